//! Domino tilings of pixel regions.
//!
//! A [`Tiling`] stores the cluster identifier of every pixel of the grid,
//! `0` marking pixels outside the tiled region. Every other identifier is
//! shared by exactly two edge-adjacent pixels.

mod enumerate;
mod height;
mod matching;

pub use enumerate::{
    enumerate_partition_tilings, enumerate_tilings, soft_extended_region, CoverSearch, PlacementVisitor, DOWN, LEFT,
    RIGHT, UP,
};
pub use height::{height_of_tiling, minimal_tiling, tiling_of_height, HeightField};
pub use matching::{is_tileable, TileabilityCache};

use crate::aperture::{ApertureGrid, PixelRegion};
use crate::error::{Error, Result};

/// Two edge-adjacent pixels (flat indices, `first < second`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Domino {
    first: usize,
    second: usize,
}

impl Domino {
    /// Domino made of two pixels; the order of the arguments is irrelevant.
    pub fn new(a: usize, b: usize) -> Self {
        Self {
            first: a.min(b),
            second: a.max(b),
        }
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn second(&self) -> usize {
        self.second
    }

    pub fn pixels(&self) -> [usize; 2] {
        [self.first, self.second]
    }

    pub fn contains(&self, pixel: usize) -> bool {
        self.first == pixel || self.second == pixel
    }

    /// True for a `2 x 1` domino lying along a row.
    pub fn is_horizontal(&self) -> bool {
        self.second == self.first + 1
    }
}

/// Per-pixel cluster assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tiling {
    cols: usize,
    rows: usize,
    cluster: Vec<u32>,
    count: usize,
}

impl Tiling {
    /// Assigns identifiers `1..=len` to `dominoes` in the given order.
    pub fn from_dominoes(grid: &ApertureGrid, dominoes: &[Domino]) -> Result<Self> {
        let mut cluster = vec![0u32; grid.len()];
        for (q, d) in dominoes.iter().enumerate() {
            let [a, b] = d.pixels();
            if b >= grid.len() || !grid.adjacent(a, b) {
                return Err(Error::Structural(format!(
                    "domino {q} joins non-adjacent pixels {a} and {b}"
                )));
            }
            for p in [a, b] {
                if cluster[p] != 0 {
                    return Err(Error::Structural(format!("pixel {p} covered twice")));
                }
                cluster[p] = q as u32 + 1;
            }
        }
        Ok(Self {
            cols: grid.cols(),
            rows: grid.rows(),
            cluster,
            count: dominoes.len(),
        })
    }

    /// Builds a tiling from raw identifiers, validating the domino structure.
    pub fn from_clusters(grid: &ApertureGrid, cluster: Vec<u32>) -> Result<Self> {
        if cluster.len() != grid.len() {
            return Err(Error::Structural(format!(
                "{} cluster entries for {} pixels",
                cluster.len(),
                grid.len()
            )));
        }
        let max = cluster.iter().copied().max().unwrap_or(0) as usize;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); max];
        for (p, &c) in cluster.iter().enumerate() {
            if c > 0 {
                members[c as usize - 1].push(p);
            }
        }
        for (q, m) in members.iter().enumerate() {
            if m.len() != 2 || !grid.adjacent(m[0], m[1]) {
                return Err(Error::Structural(format!(
                    "cluster {} must hold exactly two adjacent pixels, found {:?}",
                    q + 1,
                    m
                )));
            }
        }
        Ok(Self {
            cols: grid.cols(),
            rows: grid.rows(),
            cluster,
            count: max,
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Cluster identifier of every pixel (0 = untiled).
    pub fn clusters(&self) -> &[u32] {
        &self.cluster
    }

    /// Identifier of a pixel, `None` when untiled.
    pub fn cluster_of(&self, pixel: usize) -> Option<u32> {
        match self.cluster[pixel] {
            0 => None,
            c => Some(c),
        }
    }

    /// Number of dominoes `Q`.
    pub fn domino_count(&self) -> usize {
        self.count
    }

    /// True when every pixel of the grid belongs to a domino.
    pub fn is_full(&self) -> bool {
        self.cluster.iter().all(|&c| c != 0)
    }

    /// Tiled pixels.
    pub fn covered(&self) -> PixelRegion {
        let grid = ApertureGrid::topology(self.cols, self.rows);
        PixelRegion::from_indices(
            &grid,
            self.cluster
                .iter()
                .enumerate()
                .filter_map(|(i, &c)| (c != 0).then_some(i)),
        )
        .expect("indices in range")
    }

    /// Dominoes ordered by cluster identifier.
    pub fn dominoes(&self) -> Vec<Domino> {
        let mut pairs = vec![(usize::MAX, usize::MAX); self.count];
        for (p, &c) in self.cluster.iter().enumerate() {
            if c > 0 {
                let slot = &mut pairs[c as usize - 1];
                if slot.0 == usize::MAX {
                    slot.0 = p;
                } else {
                    slot.1 = p;
                }
            }
        }
        pairs.into_iter().map(|(a, b)| Domino::new(a, b)).collect()
    }

    /// Same tiling with identifiers renumbered by the raster position of
    /// each domino's first pixel.
    pub fn canonical(&self) -> Tiling {
        let mut dominoes = self.dominoes();
        dominoes.sort();
        let grid = ApertureGrid::topology(self.cols, self.rows);
        Tiling::from_dominoes(&grid, &dominoes).expect("valid dominoes stay valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cluster_validation() {
        let g = ApertureGrid::new(2, 2, 0.5, 0.5).unwrap();
        assert!(Tiling::from_clusters(&g, vec![1, 1, 2, 2]).is_ok());
        assert!(Tiling::from_clusters(&g, vec![1, 2, 2, 1]).is_err());
        assert!(Tiling::from_clusters(&g, vec![1, 1, 1, 0]).is_err());
        let t = Tiling::from_clusters(&g, vec![1, 2, 1, 2]).unwrap();
        assert_eq!(t.dominoes(), vec![Domino::new(0, 2), Domino::new(1, 3)]);
        assert!(t.is_full());
    }

    #[test]
    fn rejects_overlap_and_gaps() {
        let g = ApertureGrid::new(4, 2, 0.5, 0.5).unwrap();
        assert!(Tiling::from_dominoes(&g, &[Domino::new(0, 1), Domino::new(1, 2)]).is_err());
        assert!(Tiling::from_dominoes(&g, &[Domino::new(0, 2)]).is_err());
        assert!(Tiling::from_dominoes(&g, &[Domino::new(3, 4)]).is_err());
        let t = Tiling::from_dominoes(&g, &[Domino::new(2, 3)]).unwrap();
        assert!(!t.is_full());
        assert_eq!(t.cluster_of(0), None);
        assert_eq!(t.cluster_of(3), Some(1));
    }
}
