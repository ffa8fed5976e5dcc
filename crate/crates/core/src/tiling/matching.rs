//! Tileability through perfect matchings of the pixel adjacency graph.
//!
//! Every domino joins a white and a grey pixel, so a region is tileable iff
//! the bipartite white/grey adjacency graph has a perfect matching.

use std::collections::{HashMap, VecDeque};

use crate::aperture::{Color, PixelRegion};

const NIL: usize = usize::MAX;

/// True iff `region` admits a perfect domino tiling. Works for regions with
/// holes and several components.
pub fn is_tileable(region: &PixelRegion) -> bool {
    let grid = region.topology();
    let members = region.membership();
    let mut white = Vec::new();
    let mut grey_slot = vec![NIL; grid.len()];
    let mut greys = 0;
    for p in region.indices() {
        match grid.color_of(p) {
            Color::White => white.push(p),
            Color::Grey => {
                grey_slot[p] = greys;
                greys += 1;
            }
        }
    }
    if white.len() != greys {
        return false;
    }
    if greys == 0 {
        return true;
    }
    let adj: Vec<Vec<usize>> = white
        .iter()
        .map(|&p| {
            grid.neighbors(p)
                .filter(|&q| members[q])
                .map(|q| grey_slot[q])
                .collect()
        })
        .collect();
    if adj.iter().any(|a| a.is_empty()) {
        return false;
    }
    hopcroft_karp(&adj, greys) == white.len()
}

/// Size of a maximum matching; `adj[l]` lists the right vertices of `l`.
fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> usize {
    let left = adj.len();
    let mut match_l = vec![NIL; left];
    let mut match_r = vec![NIL; right];
    let mut dist = vec![0usize; left];
    let mut size = 0;

    // greedy warm start
    for l in 0..left {
        if let Some(&r) = adj[l].iter().find(|&&r| match_r[r] == NIL) {
            match_l[l] = r;
            match_r[r] = l;
            size += 1;
        }
    }

    loop {
        let mut queue = VecDeque::new();
        for l in 0..left {
            if match_l[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = NIL;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = match_r[r];
                if next == NIL {
                    found = true;
                } else if dist[next] == NIL {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        for l in 0..left {
            if match_l[l] == NIL && augment(l, adj, &mut match_l, &mut match_r, &mut dist) {
                size += 1;
            }
        }
    }
    size
}

fn augment(l: usize, adj: &[Vec<usize>], match_l: &mut [usize], match_r: &mut [usize], dist: &mut [usize]) -> bool {
    for &r in &adj[l] {
        let next = match_r[r];
        if next == NIL || (dist[next] == dist[l] + 1 && augment(next, adj, match_l, match_r, dist)) {
            match_l[l] = r;
            match_r[r] = l;
            return true;
        }
    }
    dist[l] = NIL;
    false
}

/// Memoised [`is_tileable`] keyed by region membership.
#[derive(Debug, Default)]
pub struct TileabilityCache {
    known: HashMap<Vec<u64>, bool>,
    checks: u64,
}

impl TileabilityCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_tileable(&mut self, region: &PixelRegion) -> bool {
        let key = pack(region.membership());
        if let Some(&v) = self.known.get(&key) {
            return v;
        }
        self.checks += 1;
        let v = is_tileable(region);
        self.known.insert(key, v);
        v
    }

    /// Matching problems actually solved (cache misses).
    pub fn checks(&self) -> u64 {
        self.checks
    }
}

fn pack(bits: &[bool]) -> Vec<u64> {
    bits.chunks(64)
        .map(|c| c.iter().enumerate().fold(0u64, |w, (i, &b)| w | ((b as u64) << i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::{enumerate_tilings, Domino};
    use crate::aperture::ApertureGrid;
    use proptest::prelude::*;

    fn grid(m: usize, n: usize) -> ApertureGrid {
        ApertureGrid::new(m, n, 0.5, 0.5).unwrap()
    }

    #[test]
    fn full_even_rectangles() {
        for (m, n) in [(2, 2), (4, 3), (6, 6), (22, 12), (24, 24)] {
            assert!(is_tileable(&PixelRegion::full(&grid(m, n))));
        }
    }

    #[test]
    fn odd_count_fails() {
        let g = grid(4, 4);
        let mut r = PixelRegion::full(&g);
        r.remove(0);
        assert!(!is_tileable(&r));
    }

    #[test]
    fn mutilated_board() {
        let g = grid(4, 4);
        let mut r = PixelRegion::full(&g);
        r.remove(g.index(1, 1).unwrap());
        r.remove(g.index(4, 4).unwrap());
        assert!(!is_tileable(&r));
        assert_eq!(enumerate_tilings(&r, |_: &[Domino]| {}), 0);
        // opposite colours can be removed
        let mut r = PixelRegion::full(&g);
        r.remove(g.index(1, 1).unwrap());
        r.remove(g.index(4, 1).unwrap());
        assert!(is_tileable(&r));
    }

    #[test]
    fn balanced_but_disconnected() {
        // two 1x1 islands of opposite colour are balanced but untileable
        let g = grid(4, 4);
        let r = PixelRegion::from_pixels(&g, &[(1, 1), (4, 2)]).unwrap();
        assert!(!is_tileable(&r));
    }

    #[test]
    fn cache_hits() {
        let g = grid(6, 6);
        let r = PixelRegion::full(&g);
        let mut cache = TileabilityCache::new();
        assert!(cache.is_tileable(&r));
        assert!(cache.is_tileable(&r));
        assert_eq!(cache.checks(), 1);
    }

    proptest! {
        #[test]
        fn matching_agrees_with_enumeration(bits in proptest::collection::vec(proptest::bool::weighted(0.85), 36)) {
            let g = grid(6, 6);
            let r = PixelRegion::from_indices(&g, bits.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))).unwrap();
            let count = enumerate_tilings(&r, |_: &[Domino]| {});
            prop_assert_eq!(is_tileable(&r), count > 0);
        }
    }
}
