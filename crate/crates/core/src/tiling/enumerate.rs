//! Exhaustive domino placement by ordered backtracking.
//!
//! The search always covers the first uncovered target pixel in raster
//! order. Each branch fixes the domino covering that pixel, so every
//! placement is produced exactly once and in a deterministic order.

use std::ops::ControlFlow;

use super::Domino;
use crate::aperture::{ApertureGrid, PixelRegion};
use crate::error::{Error, Result};

/// Receives the placements produced by a [`CoverSearch`].
///
/// `place`/`unplace` bracket every tentative domino, which lets visitors
/// maintain running quantities along the search path instead of recomputing
/// them at every leaf.
pub trait PlacementVisitor {
    fn place(&mut self, _domino: Domino) {}

    fn unplace(&mut self, _domino: Domino) {}

    /// Called with the dominoes of every complete placement.
    fn complete(&mut self, placement: &[Domino]) -> ControlFlow<()>;
}

impl<F: FnMut(&[Domino])> PlacementVisitor for F {
    fn complete(&mut self, placement: &[Domino]) -> ControlFlow<()> {
        self(placement);
        ControlFlow::Continue(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cell {
    Blocked,
    /// Target pixel still to be covered.
    Open,
    /// Soft-margin pixel available to a domino.
    Margin,
    Used,
}

/// Direction codes used by neighbour preferences.
pub const RIGHT: u8 = 0;
pub const DOWN: u8 = 1;
pub const LEFT: u8 = 2;
pub const UP: u8 = 3;

/// Backtracking cover of a target region, optionally allowed to borrow
/// pixels from a soft margin.
pub struct CoverSearch {
    grid: ApertureGrid,
    cells: Vec<Cell>,
    targets: Vec<usize>,
    stack: Vec<Domino>,
    preferences: Option<Vec<[u8; 4]>>,
    budget: Option<u64>,
    nodes: u64,
}

impl CoverSearch {
    /// Search covering every pixel of `target`, with dominoes allowed to use
    /// pixels of `margin` at most once. Dominoes always hold at least one
    /// target pixel.
    pub fn new(target: &PixelRegion, margin: &PixelRegion) -> Self {
        let grid = target.topology();
        let mut cells = vec![Cell::Blocked; grid.len()];
        for p in margin.indices() {
            cells[p] = Cell::Margin;
        }
        let targets: Vec<usize> = target.indices().collect();
        for &p in &targets {
            cells[p] = Cell::Open;
        }
        Self {
            grid,
            cells,
            targets,
            stack: Vec::new(),
            preferences: None,
            budget: None,
            nodes: 0,
        }
    }

    /// Marks pixels as already covered by the given dominoes before the
    /// search starts; the dominoes are reported as part of every placement.
    pub fn with_fixed(mut self, fixed: &[Domino]) -> Self {
        for d in fixed {
            for p in d.pixels() {
                self.cells[p] = Cell::Used;
            }
            self.stack.push(*d);
        }
        self
    }

    /// Per-pixel neighbour order (direction codes, most preferred first).
    pub fn with_preferences(mut self, preferences: Vec<[u8; 4]>) -> Self {
        self.preferences = Some(preferences);
        self
    }

    /// Stops exploring after `nodes` search nodes.
    pub fn with_budget(mut self, nodes: u64) -> Self {
        self.budget = Some(nodes);
        self
    }

    /// Runs the search; returns the number of complete placements visited.
    pub fn run<V: PlacementVisitor + ?Sized>(&mut self, visitor: &mut V) -> u64 {
        self.nodes = 0;
        let mut count = 0;
        let _ = self.descend(0, visitor, &mut count);
        count
    }

    /// Search nodes expanded by the last run.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn neighbor(&self, p: usize, dir: u8) -> Option<usize> {
        let cols = self.grid.cols();
        let (c, r) = (p % cols, p / cols);
        match dir {
            RIGHT => (c + 1 < cols).then(|| p + 1),
            DOWN => (r + 1 < self.grid.rows()).then(|| p + cols),
            LEFT => (c > 0).then(|| p - 1),
            _ => (r > 0).then(|| p - cols),
        }
    }

    fn descend<V: PlacementVisitor + ?Sized>(
        &mut self,
        mut pos: usize,
        visitor: &mut V,
        count: &mut u64,
    ) -> ControlFlow<()> {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                return ControlFlow::Break(());
            }
        }
        while pos < self.targets.len() && self.cells[self.targets[pos]] != Cell::Open {
            pos += 1;
        }
        if pos == self.targets.len() {
            *count += 1;
            return visitor.complete(&self.stack);
        }
        let p = self.targets[pos];
        let order = match &self.preferences {
            Some(pref) => pref[p],
            None => [RIGHT, DOWN, LEFT, UP],
        };
        self.cells[p] = Cell::Used;
        for dir in order {
            let Some(q) = self.neighbor(p, dir) else {
                continue;
            };
            let prev = self.cells[q];
            if prev != Cell::Open && prev != Cell::Margin {
                continue;
            }
            let d = Domino::new(p, q);
            self.cells[q] = Cell::Used;
            self.stack.push(d);
            visitor.place(d);
            let flow = self.descend(pos + 1, visitor, count);
            visitor.unplace(d);
            self.stack.pop();
            self.cells[q] = prev;
            if flow.is_break() {
                self.cells[p] = Cell::Open;
                return flow;
            }
        }
        self.cells[p] = Cell::Open;
        ControlFlow::Continue(())
    }
}

/// Visits every perfect domino tiling of `region`; returns the count.
pub fn enumerate_tilings<V: PlacementVisitor>(region: &PixelRegion, mut visitor: V) -> u64 {
    let margin = PixelRegion::from_indices(&region.topology(), []).expect("empty region");
    CoverSearch::new(region, &margin).run(&mut visitor)
}

/// `S` plus every pixel of `R - S` that is edge-adjacent to `S`.
pub fn soft_extended_region(s: &PixelRegion, r: &PixelRegion) -> Result<PixelRegion> {
    if !s.is_subset_of(r) {
        return Err(Error::Domain(
            "partition region is not contained in the untiled region".into(),
        ));
    }
    let grid = s.topology();
    let mut out = s.clone();
    for p in s.indices() {
        for q in grid.neighbors(p) {
            if r.contains(q) {
                out.insert(q);
            }
        }
    }
    Ok(out)
}

/// Visits every placement covering `S` exactly once with dominoes drawn from
/// the soft extension of `S` inside `R`.
pub fn enumerate_partition_tilings<V: PlacementVisitor>(
    s: &PixelRegion,
    r: &PixelRegion,
    mut visitor: V,
) -> Result<u64> {
    let margin = soft_extended_region(s, r)?.difference(s);
    Ok(CoverSearch::new(s, &margin).run(&mut visitor))
}
