//! Thurston height functions of full tilings of the rectangular aperture.
//!
//! Moving along an oriented lattice edge changes the height by `+1` unless
//! the edge is crossed by a domino, in which case the change is `-3`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Domino, Tiling};
use crate::aperture::{oriented_step, ApertureGrid};
use crate::error::{Error, Result};

/// Integer heights on the `(M+1) x (N+1)` vertex lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HeightField {
    cols: usize,
    rows: usize,
    values: Vec<i32>,
}

impl HeightField {
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Height at vertex `(a, b)`.
    pub fn at(&self, a: usize, b: usize) -> i32 {
        self.values[b * (self.cols + 1) + a]
    }

    /// All vertex heights, row-major over `b` then `a`.
    pub fn values(&self) -> &[i32] {
        &self.values
    }

    /// The `L = (M-1)(N-1)` internal heights, row-major.
    pub fn internal(&self) -> Vec<i32> {
        let mut out = Vec::with_capacity(self.cols.saturating_sub(1) * self.rows.saturating_sub(1));
        for b in 1..self.rows {
            for a in 1..self.cols {
                out.push(self.at(a, b));
            }
        }
        out
    }

    /// The `B` boundary heights in periphery-walk order.
    pub fn boundary(&self) -> Vec<i32> {
        ApertureGrid::topology(self.cols, self.rows)
            .boundary_vertices()
            .into_iter()
            .map(|(a, b)| self.at(a, b))
            .collect()
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &HeightField) -> bool {
        self.cols == other.cols
            && self.rows == other.rows
            && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// Pixels separated by the lattice edge between two adjacent vertices, if
/// the edge is internal to the aperture.
fn pixels_across(grid: &ApertureGrid, v: (usize, usize), w: (usize, usize)) -> Option<(usize, usize)> {
    let (cols, rows) = (grid.cols(), grid.rows());
    if v.1 == w.1 {
        // horizontal edge at row boundary b between columns a..a+1
        let a = v.0.min(w.0);
        let b = v.1;
        (b > 0 && b < rows).then(|| ((b - 1) * cols + a, b * cols + a))
    } else {
        let a = v.0;
        let b = v.1.min(w.1);
        (a > 0 && a < cols).then(|| (b * cols + a - 1, b * cols + a))
    }
}

fn vertex_neighbors(cols: usize, rows: usize, (a, b): (usize, usize)) -> impl Iterator<Item = (usize, usize)> {
    [
        (a < cols).then(|| (a + 1, b)),
        (b < rows).then(|| (a, b + 1)),
        (a > 0).then(|| (a - 1, b)),
        (b > 0).then(|| (a, b - 1)),
    ]
    .into_iter()
    .flatten()
}

/// Height function of a full tiling of the aperture, anchored at `0` on the
/// top-left corner.
pub fn height_of_tiling(tiling: &Tiling) -> Result<HeightField> {
    if !tiling.is_full() {
        return Err(Error::Structural(
            "height functions are defined for full tilings only".into(),
        ));
    }
    let (cols, rows) = (tiling.cols(), tiling.rows());
    let grid = ApertureGrid::topology(cols, rows);
    let clusters = tiling.clusters();
    let step = |v: (usize, usize), w: (usize, usize)| -> i32 {
        let unit = oriented_step(v, w);
        match pixels_across(&grid, v, w) {
            Some((p, q)) if clusters[p] == clusters[q] => -3 * unit,
            _ => unit,
        }
    };

    let idx = |(a, b): (usize, usize)| b * (cols + 1) + a;
    let mut values = vec![i32::MIN; grid.vertex_count()];
    values[0] = 0;
    let mut stack = vec![(0usize, 0usize)];
    while let Some(v) = stack.pop() {
        let hv = values[idx(v)];
        for w in vertex_neighbors(cols, rows, v) {
            let hw = hv + step(v, w);
            let slot = &mut values[idx(w)];
            if *slot == i32::MIN {
                *slot = hw;
                stack.push(w);
            } else if *slot != hw {
                return Err(Error::Structural(format!(
                    "inconsistent heights at vertex {w:?}: {} vs {hw}",
                    *slot
                )));
            }
        }
    }
    Ok(HeightField { cols, rows, values })
}

/// Tiling encoded by a height field: an internal edge is crossed by a domino
/// exactly where the heights of its endpoints differ by 3.
pub fn tiling_of_height(field: &HeightField) -> Result<Tiling> {
    let (cols, rows) = (field.cols, field.rows);
    let grid = ApertureGrid::topology(cols, rows);
    let mut partner = vec![usize::MAX; grid.len()];
    for b in 0..=rows {
        for a in 0..=cols {
            let v = (a, b);
            for w in [(a + 1, b), (a, b + 1)] {
                if w.0 > cols || w.1 > rows {
                    continue;
                }
                let diff = field.at(w.0, w.1) - field.at(a, b);
                let unit = oriented_step(v, w);
                let crossed = if diff == unit {
                    false
                } else if diff == -3 * unit {
                    true
                } else {
                    return Err(Error::Structural(format!(
                        "edge {v:?}-{w:?} has height step {diff}"
                    )));
                };
                match (crossed, pixels_across(&grid, v, w)) {
                    (false, _) => {}
                    (true, None) => {
                        return Err(Error::Structural(format!(
                            "boundary edge {v:?}-{w:?} cannot be crossed"
                        )))
                    }
                    (true, Some((p, q))) => {
                        if partner[p] != usize::MAX || partner[q] != usize::MAX {
                            return Err(Error::Structural(format!(
                                "pixel in more than one domino near {v:?}"
                            )));
                        }
                        partner[p] = q;
                        partner[q] = p;
                    }
                }
            }
        }
    }
    let mut dominoes = Vec::with_capacity(grid.len() / 2);
    for (p, &q) in partner.iter().enumerate() {
        if q == usize::MAX {
            return Err(Error::Structural(format!("pixel {p} left uncovered")));
        }
        if p < q {
            dominoes.push(Domino::new(p, q));
        }
    }
    Tiling::from_dominoes(&grid, &dominoes)
}

/// The tiling whose height function is pointwise minimal over all tilings of
/// the aperture, together with that height function.
///
/// Every height function satisfies `h(y) - h(x) <= d(x, y)`, where `d` is the
/// shortest-path distance with cost 1 along an edge orientation and 3
/// against it. The minimal one is therefore
/// `h(v) = max_b (h_b - d(v, b))` over the boundary vertices `b`, computed
/// here with a single multi-source Dijkstra pass on the reversed lattice.
pub fn minimal_tiling(grid: &ApertureGrid) -> Result<(Tiling, HeightField)> {
    if grid.len() % 2 != 0 {
        return Err(Error::Untileable(format!(
            "{}x{} aperture has an odd pixel count",
            grid.cols(),
            grid.rows()
        )));
    }
    let (cols, rows) = (grid.cols(), grid.rows());
    let idx = |(a, b): (usize, usize)| b * (cols + 1) + a;
    let mut cost = vec![i64::MAX; grid.vertex_count()];
    let mut heap = BinaryHeap::new();
    for (v, h) in grid.boundary_vertices().into_iter().zip(grid.boundary_heights()) {
        cost[idx(v)] = -(h as i64);
        heap.push(Reverse((-(h as i64), v.1, v.0)));
    }
    while let Some(Reverse((c, b, a))) = heap.pop() {
        let y = (a, b);
        if c > cost[idx(y)] {
            continue;
        }
        for x in vertex_neighbors(cols, rows, y) {
            // cost of moving x -> y
            let w = if oriented_step(x, y) == 1 { 1 } else { 3 };
            let cand = c + w;
            if cand < cost[idx(x)] {
                cost[idx(x)] = cand;
                heap.push(Reverse((cand, x.1, x.0)));
            }
        }
    }
    let field = HeightField {
        cols,
        rows,
        values: cost.into_iter().map(|c| -c as i32).collect(),
    };
    if field.boundary() != grid.boundary_heights() {
        return Err(Error::Untileable(
            "boundary heights are not attainable".into(),
        ));
    }
    let tiling = tiling_of_height(&field)?;
    Ok((tiling, field))
}
