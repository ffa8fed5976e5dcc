//! Pixel lattice of a rectangular aperture.
//!
//! Pixels are addressed with 1-based `(m, n)` pairs, `m` being the column
//! (`1..=M`, along x) and `n` the row (`1..=N`, along y). Internally every
//! pixel also has a flat row-major index `(n - 1) * M + (m - 1)`, so that
//! increasing index is raster order (left to right, then row by row).
//!
//! Vertices of the pixel lattice are addressed by `(a, b)` with
//! `a in 0..=M` and `b in 0..=N`; pixel `(m, n)` has corners
//! `(m-1, n-1)`, `(m, n-1)`, `(m, n)` and `(m-1, n)`. Row 1 is drawn on top,
//! so vertex `(0, 0)` is the top-left corner of the aperture.

use crate::error::{Error, Result};

/// Rectangular `M x N` lattice of pixels, one radiating element per pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureGrid {
    cols: usize,
    rows: usize,
    dx: f64,
    dy: f64,
}

impl ApertureGrid {
    /// Builds a grid of `cols x rows` pixels with spacings in wavelengths.
    pub fn new(cols: usize, rows: usize, dx: f64, dy: f64) -> Result<Self> {
        if cols == 0 || rows == 0 {
            return Err(Error::Config(format!(
                "aperture must have at least one column and one row, got {cols}x{rows}"
            )));
        }
        if cols % 2 == 1 && rows % 2 == 1 {
            return Err(Error::Config(format!(
                "either M or N must be even for a full domino coverage, got {cols}x{rows}"
            )));
        }
        if !(dx.is_finite() && dx > 0.0 && dy.is_finite() && dy > 0.0) {
            return Err(Error::Config(format!(
                "element spacings must be positive, got dx={dx}, dy={dy}"
            )));
        }
        Ok(Self { cols, rows, dx, dy })
    }

    /// Lattice used only for its topology (neighbourhoods, indexing).
    pub(crate) fn topology(cols: usize, rows: usize) -> Self {
        Self {
            cols,
            rows,
            dx: 1.0,
            dy: 1.0,
        }
    }

    /// Column count `M`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row count `N`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    /// Number of pixels `M * N`.
    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of the 1-based pixel `(m, n)`.
    pub fn index(&self, m: usize, n: usize) -> Result<usize> {
        if m == 0 || m > self.cols || n == 0 || n > self.rows {
            return Err(Error::Domain(format!(
                "pixel ({m},{n}) outside {}x{} aperture",
                self.cols, self.rows
            )));
        }
        Ok((n - 1) * self.cols + (m - 1))
    }

    /// 1-based `(m, n)` of a flat index.
    pub fn pixel(&self, index: usize) -> (usize, usize) {
        (index % self.cols + 1, index / self.cols + 1)
    }

    /// Element abscissa `x_m` in wavelengths, centred on the aperture.
    pub fn x(&self, m: usize) -> f64 {
        (m as f64 - (self.cols as f64 + 1.0) / 2.0) * self.dx
    }

    /// Element ordinate `y_n` in wavelengths, centred on the aperture.
    pub fn y(&self, n: usize) -> f64 {
        (n as f64 - (self.rows as f64 + 1.0) / 2.0) * self.dy
    }

    /// Edge-adjacent neighbours of a flat index, in the fixed order
    /// right, down, left, up.
    pub fn neighbors(&self, index: usize) -> impl Iterator<Item = usize> {
        let (cols, rows) = (self.cols, self.rows);
        let c = index % cols;
        let r = index / cols;
        [
            (c + 1 < cols).then(|| index + 1),
            (r + 1 < rows).then(|| index + cols),
            (c > 0).then(|| index - 1),
            (r > 0).then(|| index - cols),
        ]
        .into_iter()
        .flatten()
    }

    /// True when two flat indices are edge-adjacent.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let (ca, ra) = (a % self.cols, a / self.cols);
        let (cb, rb) = (b % self.cols, b / self.cols);
        (ra == rb && ca.abs_diff(cb) == 1) || (ca == cb && ra.abs_diff(rb) == 1)
    }

    /// Checkerboard colour of a flat index.
    pub fn color_of(&self, index: usize) -> Color {
        let (m, n) = self.pixel(index);
        if (m + n) % 2 == 0 {
            Color::White
        } else {
            Color::Grey
        }
    }

    /// Checkerboard colour of the 1-based pixel `(m, n)`.
    pub fn color(&self, m: usize, n: usize) -> Result<Color> {
        self.index(m, n).map(|i| self.color_of(i))
    }

    /// Number of vertices of the `(M+1) x (N+1)` lattice.
    pub fn vertex_count(&self) -> usize {
        (self.cols + 1) * (self.rows + 1)
    }

    /// Flat index of vertex `(a, b)`.
    pub fn vertex(&self, a: usize, b: usize) -> usize {
        b * (self.cols + 1) + a
    }

    /// Vertices of the aperture periphery, starting at the top-left corner
    /// and walking clockwise (top edge left to right first).
    pub fn boundary_vertices(&self) -> Vec<(usize, usize)> {
        let (m, n) = (self.cols, self.rows);
        let mut out = Vec::with_capacity(2 * (m + n));
        out.extend((0..m).map(|a| (a, 0)));
        out.extend((0..n).map(|b| (m, b)));
        out.extend((1..=m).rev().map(|a| (a, n)));
        out.extend((1..=n).rev().map(|b| (0, b)));
        out
    }

    /// Height-function values on the periphery, in the order of
    /// [`boundary_vertices`](Self::boundary_vertices).
    pub fn boundary_heights(&self) -> Vec<i32> {
        let verts = self.boundary_vertices();
        let mut heights = Vec::with_capacity(verts.len());
        let mut h = 0;
        heights.push(h);
        for w in verts.windows(2) {
            h += oriented_step(w[0], w[1]);
            heights.push(h);
        }
        heights
    }
}

/// Checkerboard colour. Pixel `(1, 1)` is white; white cells have their edges
/// oriented clockwise and grey cells counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    White,
    Grey,
}

/// Colour of the 1-based pixel `(m, n)` of `grid`.
pub fn checkerboard_color(grid: &ApertureGrid, m: usize, n: usize) -> Result<Color> {
    grid.color(m, n)
}

/// Periphery heights of `grid`; see [`ApertureGrid::boundary_heights`].
pub fn boundary_heights(grid: &ApertureGrid) -> Vec<i32> {
    grid.boundary_heights()
}

/// Signed unit step `+1`/`-1` when moving between two adjacent vertices:
/// `+1` when the move follows the edge orientation.
///
/// A horizontal edge from `(a, b)` to `(a+1, b)` is oriented rightwards iff
/// `a + b` is even; a vertical edge from `(a, b)` to `(a, b+1)` is oriented
/// downwards iff `a + b` is odd.
pub(crate) fn oriented_step(from: (usize, usize), to: (usize, usize)) -> i32 {
    let (a, b) = from;
    debug_assert_eq!(a.abs_diff(to.0) + b.abs_diff(to.1), 1);
    let even = (a + b) % 2 == 0;
    let along = if to.1 == b { even } else { !even };
    if along {
        1
    } else {
        -1
    }
}

/// Subset of the pixels of a grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixelRegion {
    cols: usize,
    rows: usize,
    members: Vec<bool>,
}

impl PixelRegion {
    pub fn empty(grid: &ApertureGrid) -> Self {
        Self {
            cols: grid.cols(),
            rows: grid.rows(),
            members: vec![false; grid.len()],
        }
    }

    pub fn full(grid: &ApertureGrid) -> Self {
        Self {
            cols: grid.cols(),
            rows: grid.rows(),
            members: vec![true; grid.len()],
        }
    }

    /// Region made of the given flat indices.
    pub fn from_indices(grid: &ApertureGrid, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut region = Self::empty(grid);
        for i in indices {
            if i >= grid.len() {
                return Err(Error::Domain(format!("pixel index {i} outside the grid")));
            }
            region.members[i] = true;
        }
        Ok(region)
    }

    /// Region made of the given 1-based `(m, n)` pixels.
    pub fn from_pixels(grid: &ApertureGrid, pixels: &[(usize, usize)]) -> Result<Self> {
        let indices = pixels
            .iter()
            .map(|&(m, n)| grid.index(m, n))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(grid, indices)
    }

    /// Axis-aligned rectangle of pixels `m0..m0+w`, `n0..n0+h` (1-based origin).
    pub fn rectangle(grid: &ApertureGrid, m0: usize, n0: usize, w: usize, h: usize) -> Result<Self> {
        let mut pixels = Vec::with_capacity(w * h);
        for n in n0..n0 + h {
            for m in m0..m0 + w {
                pixels.push((m, n));
            }
        }
        Self::from_pixels(grid, &pixels)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.get(index).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, index: usize) {
        self.members[index] = true;
    }

    pub fn remove(&mut self, index: usize) {
        self.members[index] = false;
    }

    /// Number of member pixels.
    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    /// Member indices in raster order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn membership(&self) -> &[bool] {
        &self.members
    }

    pub fn is_subset_of(&self, other: &PixelRegion) -> bool {
        self.same_shape(other)
            && self
                .members
                .iter()
                .zip(&other.members)
                .all(|(&a, &b)| !a || b)
    }

    pub fn intersection(&self, other: &PixelRegion) -> PixelRegion {
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(&a, &b)| a && b)
            .collect();
        Self { members, ..*self }
    }

    pub fn difference(&self, other: &PixelRegion) -> PixelRegion {
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(&a, &b)| a && !b)
            .collect();
        Self { members, ..*self }
    }

    pub fn union(&self, other: &PixelRegion) -> PixelRegion {
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(&a, &b)| a || b)
            .collect();
        Self { members, ..*self }
    }

    fn same_shape(&self, other: &PixelRegion) -> bool {
        self.cols == other.cols && self.rows == other.rows
    }

    pub(crate) fn topology(&self) -> ApertureGrid {
        ApertureGrid::topology(self.cols, self.rows)
    }

    /// True when the region lives on a grid with the same dimensions.
    pub fn fits(&self, grid: &ApertureGrid) -> bool {
        self.cols == grid.cols() && self.rows == grid.rows()
    }
}

/// Split of the aperture into `I` equal rectangular partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionScheme {
    cols: usize,
    rows: usize,
    part_cols: usize,
    part_rows: usize,
}

impl PartitionScheme {
    pub fn new(grid: &ApertureGrid, part_cols: usize, part_rows: usize) -> Result<Self> {
        if part_cols == 0
            || part_rows == 0
            || part_cols > grid.cols()
            || part_rows > grid.rows()
            || grid.cols() % part_cols != 0
            || grid.rows() % part_rows != 0
        {
            return Err(Error::Config(format!(
                "partition {part_cols}x{part_rows} must evenly divide the {}x{} aperture",
                grid.cols(),
                grid.rows()
            )));
        }
        Ok(Self {
            cols: grid.cols(),
            rows: grid.rows(),
            part_cols,
            part_rows,
        })
    }

    /// Partitions shaped like the aperture, each side scaled by `eta`.
    pub fn from_eta(grid: &ApertureGrid, eta: f64) -> Result<Self> {
        let side = |n: usize| {
            let s = eta * n as f64;
            let r = s.round();
            ((s - r).abs() < 1e-9 && r >= 1.0).then_some(r as usize)
        };
        match (side(grid.cols()), side(grid.rows())) {
            (Some(c), Some(r)) => Self::new(grid, c, r),
            _ => Err(Error::Config(format!(
                "eta {eta} does not give whole partitions on the {}x{} aperture",
                grid.cols(),
                grid.rows()
            ))),
        }
    }

    /// Partition width `M^`.
    pub fn part_cols(&self) -> usize {
        self.part_cols
    }

    /// Partition height `N^`.
    pub fn part_rows(&self) -> usize {
        self.part_rows
    }

    /// Partition count `I`.
    pub fn count(&self) -> usize {
        (self.cols / self.part_cols) * (self.rows / self.part_rows)
    }

    /// Size ratio `eta = sqrt(M^ N^ / (M N))`.
    pub fn eta(&self) -> f64 {
        self.delta().sqrt()
    }

    /// Aspect ratio `Delta = M^ N^ / (M N)`.
    pub fn delta(&self) -> f64 {
        (self.part_cols * self.part_rows) as f64 / (self.cols * self.rows) as f64
    }

    /// Global 1-based pixel of the local pixel `(r, s)` of partition `i`
    /// (all 1-based).
    pub fn pixel(&self, i: usize, r: usize, s: usize) -> Result<(usize, usize)> {
        if i == 0 || i > self.count() {
            return Err(Error::Domain(format!(
                "partition index {i} outside 1..={}",
                self.count()
            )));
        }
        if r == 0 || r > self.part_cols || s == 0 || s > self.part_rows {
            return Err(Error::Domain(format!(
                "local pixel ({r},{s}) outside {}x{} partition",
                self.part_cols, self.part_rows
            )));
        }
        // floor((i-1) * M^/M) is the partition row; the column offset is the
        // remainder once whole rows of partitions are removed.
        let per_row = self.cols / self.part_cols;
        let band = (i - 1) / per_row;
        let m = r + (i - 1 - band * per_row) * self.part_cols;
        let n = s + band * self.part_rows;
        Ok((m, n))
    }

    /// 1-based origin pixel of every partition, in raster order.
    pub fn origins(&self) -> Vec<(usize, usize)> {
        (1..=self.count())
            .map(|i| self.pixel(i, 1, 1).expect("index in range"))
            .collect()
    }

    /// Pixels of partition `i` as a region of `grid`.
    pub fn region(&self, grid: &ApertureGrid, i: usize) -> Result<PixelRegion> {
        let (m0, n0) = self.pixel(i, 1, 1)?;
        PixelRegion::rectangle(grid, m0, n0, self.part_cols, self.part_rows)
    }
}

/// All `I` partitions of `grid` in raster order.
pub fn raster_partitions(grid: &ApertureGrid, part_cols: usize, part_rows: usize) -> Result<PartitionScheme> {
    PartitionScheme::new(grid, part_cols, part_rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(m: usize, n: usize) -> ApertureGrid {
        ApertureGrid::new(m, n, 0.5, 0.5).unwrap()
    }

    #[test]
    fn colours() {
        let g = grid(4, 4);
        assert_eq!(checkerboard_color(&g, 1, 1).unwrap(), Color::White);
        assert_eq!(checkerboard_color(&g, 1, 2).unwrap(), Color::Grey);
        assert_eq!(checkerboard_color(&g, 3, 3).unwrap(), Color::White);
        assert!(checkerboard_color(&g, 0, 1).is_err());
        assert!(checkerboard_color(&g, 5, 1).is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(ApertureGrid::new(3, 5, 0.5, 0.5).is_err());
        assert!(ApertureGrid::new(0, 2, 0.5, 0.5).is_err());
        assert!(ApertureGrid::new(2, 2, 0.0, 0.5).is_err());
        assert!(ApertureGrid::new(3, 4, 0.5, 0.5).is_ok());
    }

    #[test]
    fn centred_positions() {
        let g = grid(4, 2);
        assert_eq!(g.x(1), -0.75);
        assert_eq!(g.x(4), 0.75);
        assert_eq!(g.y(1), -0.25);
        assert_eq!(g.y(2), 0.25);
    }

    #[test]
    fn white_cell_is_clockwise() {
        // walking (0,0) -> (1,0) -> (1,1) -> (0,1) -> (0,0) around pixel (1,1)
        let path = [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)];
        let sum: i32 = path.windows(2).map(|w| oriented_step(w[0], w[1])).sum();
        assert_eq!(sum, 4);
        // pixel (2,1) is grey: clockwise walk gives -4
        let path = [(1, 0), (2, 0), (2, 1), (1, 1), (1, 0)];
        let sum: i32 = path.windows(2).map(|w| oriented_step(w[0], w[1])).sum();
        assert_eq!(sum, -4);
    }

    #[test]
    fn boundary_walk_2x2() {
        let h = grid(2, 2).boundary_heights();
        assert_eq!(h, vec![0, 1, 0, -1, 0, 1, 0, -1]);
    }

    #[test]
    fn boundary_walk_12x12_top_edge() {
        let g = grid(12, 12);
        let h = g.boundary_heights();
        assert_eq!(h.len(), 48);
        assert_eq!(h[0], 0);
        // the top edge alternates 0, 1, 0, 1, ...
        assert_eq!(&h[..6], &[0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn partition_formula() {
        let g = grid(12, 12);
        let p = raster_partitions(&g, 4, 4).unwrap();
        assert_eq!(p.count(), 9);
        assert_eq!(p.pixel(1, 1, 1).unwrap(), (1, 1));
        assert_eq!(p.pixel(2, 1, 1).unwrap(), (5, 1));
        assert_eq!(p.pixel(4, 1, 1).unwrap(), (1, 5));
        assert_eq!(p.pixel(9, 4, 4).unwrap(), (12, 12));
        assert_eq!(
            p.origins(),
            vec![(1, 1), (5, 1), (9, 1), (1, 5), (5, 5), (9, 5), (1, 9), (5, 9), (9, 9)]
        );
        assert!(p.pixel(10, 1, 1).is_err());
        assert!(p.pixel(1, 5, 1).is_err());
    }

    #[test]
    fn partition_counts() {
        assert_eq!(raster_partitions(&grid(8, 8), 2, 2).unwrap().count(), 16);
        let whole = raster_partitions(&grid(24, 24), 24, 24).unwrap();
        assert_eq!(whole.count(), 1);
        assert_eq!(whole.eta(), 1.0);
        assert!(raster_partitions(&grid(12, 12), 5, 4).is_err());
    }

    #[test]
    fn partitions_from_eta() {
        let g = grid(24, 24);
        let p = PartitionScheme::from_eta(&g, 1.0 / 6.0).unwrap();
        assert_eq!((p.part_cols(), p.part_rows()), (4, 4));
        assert!((p.delta() - 1.0 / 36.0).abs() < 1e-15);
        let p = PartitionScheme::from_eta(&grid(22, 12), 0.5).unwrap();
        assert_eq!((p.part_cols(), p.part_rows()), (11, 6));
        assert!(PartitionScheme::from_eta(&g, 0.3).is_err());
        assert!(PartitionScheme::from_eta(&g, 1.0 / 48.0).is_err());
    }

    proptest! {
        #[test]
        fn periphery_walk_closes(m in 1usize..30, n in 1usize..30) {
            prop_assume!(m % 2 == 0 || n % 2 == 0);
            let g = grid(m, n);
            let h = g.boundary_heights();
            prop_assert_eq!(h.len(), 2 * (m + n));
            let verts = g.boundary_vertices();
            let back = oriented_step(*verts.last().unwrap(), verts[0]);
            prop_assert_eq!(h.last().unwrap() + back, 0);
        }

        #[test]
        fn partitions_cover_once(pc in 1usize..5, pr in 1usize..5, kc in 1usize..5, kr in 1usize..5) {
            let (m, n) = (pc * kc, pr * kr);
            prop_assume!(m % 2 == 0 || n % 2 == 0);
            let g = grid(m, n);
            let scheme = raster_partitions(&g, pc, pr).unwrap();
            let mut hits = vec![0u32; g.len()];
            for i in 1..=scheme.count() {
                for s in 1..=pr {
                    for r in 1..=pc {
                        let (mm, nn) = scheme.pixel(i, r, s).unwrap();
                        hits[g.index(mm, nn).unwrap()] += 1;
                    }
                }
            }
            prop_assert!(hits.iter().all(|&h| h == 1));
        }

        #[test]
        fn adjacent_pixels_differ(m in 2usize..20, n in 2usize..20) {
            prop_assume!(m % 2 == 0 || n % 2 == 0);
            let g = grid(m, n);
            for i in 0..g.len() {
                for j in g.neighbors(i) {
                    prop_assert_ne!(g.color_of(i), g.color_of(j));
                }
            }
        }
    }
}
