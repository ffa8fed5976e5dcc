//! Array factor on a regular (u, v) lattice.
//!
//! Each axis is a chirp-z transform (Bluestein), so the lattice spacing is
//! independent of the element spacing and every sample is exact up to
//! floating-point rounding.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::aperture::ApertureGrid;
use crate::error::{Error, Result};

/// Samples `u_k = -1 + 2k/U`, `v_l = -1 + 2l/V`; index `l * U + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UvLattice {
    nu: usize,
    nv: usize,
}

impl UvLattice {
    pub fn new(nu: usize, nv: usize) -> Result<Self> {
        if nu < 2 || nv < 2 {
            return Err(Error::Config(format!("uv lattice must be at least 2x2, got {nu}x{nv}")));
        }
        Ok(Self { nu, nv })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn du(&self) -> f64 {
        2.0 / self.nu as f64
    }

    pub fn dv(&self) -> f64 {
        2.0 / self.nv as f64
    }

    pub fn u(&self, k: usize) -> f64 {
        -1.0 + k as f64 * self.du()
    }

    pub fn v(&self, l: usize) -> f64 {
        -1.0 + l as f64 * self.dv()
    }

    pub fn index(&self, k: usize, l: usize) -> usize {
        l * self.nu + k
    }

    /// `(k, l)` of a flat index.
    pub fn cell(&self, index: usize) -> (usize, usize) {
        (index % self.nu, index / self.nu)
    }

    pub fn position(&self, index: usize) -> (f64, f64) {
        let (k, l) = self.cell(index);
        (self.u(k), self.v(l))
    }

    pub fn in_disk(&self, index: usize) -> bool {
        let (u, v) = self.position(index);
        u * u + v * v <= 1.0
    }

    /// Flat indices of the samples inside the visible disk.
    pub fn disk(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_disk(i)).collect()
    }

    /// Sample closest to `(u, v)`, clamped to the lattice.
    pub fn nearest(&self, u: f64, v: f64) -> (usize, usize) {
        let k = ((u + 1.0) / self.du()).round().clamp(0.0, (self.nu - 1) as f64) as usize;
        let l = ((v + 1.0) / self.dv()).round().clamp(0.0, (self.nv - 1) as f64) as usize;
        (k, l)
    }
}

/// `A_k = sum_i a_i exp(j 2 pi d (i - c)(start + k step))`, `k = 0..outputs`.
struct Czt {
    inputs: usize,
    outputs: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    kernel: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Czt {
    fn new(planner: &mut FftPlanner<f64>, inputs: usize, outputs: usize, d: f64, start: f64, step: f64) -> Self {
        let c = (inputs as f64 - 1.0) / 2.0;
        let theta = 2.0 * PI * d * step;
        let len = (inputs + outputs - 1).next_power_of_two();
        let pre = (0..inputs)
            .map(|i| {
                let i = i as f64;
                Complex64::from_polar(1.0, 2.0 * PI * d * start * (i - c) + theta * i * i / 2.0)
            })
            .collect();
        let post = (0..outputs)
            .map(|k| {
                let k = k as f64;
                Complex64::from_polar(1.0, theta * (k * k / 2.0 - c * k))
            })
            .collect();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut kernel = vec![Complex64::new(0.0, 0.0); len];
        for t in 0..outputs {
            let t2 = (t * t) as f64;
            kernel[t] = Complex64::from_polar(1.0, -theta * t2 / 2.0);
        }
        for t in 1..inputs {
            let t2 = (t * t) as f64;
            kernel[len - t] = Complex64::from_polar(1.0, -theta * t2 / 2.0);
        }
        forward.process(&mut kernel);
        let scale = 1.0 / len as f64;
        for k in kernel.iter_mut() {
            *k *= scale;
        }
        Self {
            inputs,
            outputs,
            pre,
            post,
            kernel,
            forward,
            inverse,
        }
    }

    fn apply(&self, input: &[Complex64], buffer: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>, out: &mut [Complex64]) {
        let len = self.kernel.len();
        buffer.clear();
        buffer.extend(input.iter().zip(&self.pre).map(|(a, p)| a * p));
        buffer.resize(len, Complex64::new(0.0, 0.0));
        scratch.resize(self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len()), Complex64::new(0.0, 0.0));
        self.forward.process_with_scratch(buffer, scratch);
        for (b, k) in buffer.iter_mut().zip(&self.kernel) {
            *b *= k;
        }
        self.inverse.process_with_scratch(buffer, scratch);
        for (k, o) in out.iter_mut().enumerate().take(self.outputs) {
            *o = buffer[k] * self.post[k];
        }
        debug_assert_eq!(input.len(), self.inputs);
    }
}

/// Precomputed array-factor evaluator for one grid and lattice. Reentrant.
pub struct UvTransform {
    cols: usize,
    rows: usize,
    lattice: UvLattice,
    along_x: Czt,
    along_y: Czt,
}

impl std::fmt::Debug for UvTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UvTransform")
            .field("cols", &self.cols)
            .field("rows", &self.rows)
            .field("lattice", &self.lattice)
            .finish()
    }
}

impl UvTransform {
    pub fn new(grid: &ApertureGrid, lattice: UvLattice) -> Self {
        let mut planner = FftPlanner::new();
        let along_x = Czt::new(&mut planner, grid.cols(), lattice.nu(), grid.dx(), -1.0, lattice.du());
        let along_y = Czt::new(&mut planner, grid.rows(), lattice.nv(), grid.dy(), -1.0, lattice.dv());
        Self {
            cols: grid.cols(),
            rows: grid.rows(),
            lattice,
            along_x,
            along_y,
        }
    }

    pub fn lattice(&self) -> UvLattice {
        self.lattice
    }

    /// Array factor (no element pattern) at every lattice sample.
    pub fn field(&self, weights: &[Complex64]) -> Result<Vec<Complex64>> {
        if weights.len() != self.cols * self.rows {
            return Err(Error::Domain(format!(
                "{} weights for a {}x{} grid",
                weights.len(),
                self.cols,
                self.rows
            )));
        }
        let (nu, nv) = (self.lattice.nu(), self.lattice.nv());
        let zero = Complex64::new(0.0, 0.0);
        let mut buffer = Vec::new();
        let mut scratch = Vec::new();
        // rows first: partial[n * nu + k]
        let mut partial = vec![zero; self.rows * nu];
        for n in 0..self.rows {
            let row = &weights[n * self.cols..(n + 1) * self.cols];
            self.along_x.apply(row, &mut buffer, &mut scratch, &mut partial[n * nu..(n + 1) * nu]);
        }
        let mut out = vec![zero; nu * nv];
        let mut column = vec![zero; self.rows];
        let mut result = vec![zero; nv];
        for k in 0..nu {
            for n in 0..self.rows {
                column[n] = partial[n * nu + k];
            }
            self.along_y.apply(&column, &mut buffer, &mut scratch, &mut result);
            for l in 0..nv {
                out[l * nu + k] = result[l];
            }
        }
        Ok(out)
    }
}

/// Array factor at one direction by direct summation.
pub fn direct_field(grid: &ApertureGrid, weights: &[Complex64], u: f64, v: f64) -> Complex64 {
    let ex: Vec<Complex64> = (1..=grid.cols())
        .map(|m| Complex64::from_polar(1.0, 2.0 * PI * grid.x(m) * u))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for n in 1..=grid.rows() {
        let ey = Complex64::from_polar(1.0, 2.0 * PI * grid.y(n) * v);
        let row = &weights[(n - 1) * grid.cols()..n * grid.cols()];
        let s: Complex64 = row.iter().zip(&ex).map(|(w, e)| w * e).sum();
        total += s * ey;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plain_sum(grid: &ApertureGrid, w: &[Complex64], u: f64, v: f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (i, wi) in w.iter().enumerate() {
            let (m, n) = grid.pixel(i);
            s += wi * Complex64::from_polar(1.0, 2.0 * PI * (grid.x(m) * u + grid.y(n) * v));
        }
        s
    }

    #[test]
    fn transform_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (m, n, dx, dy, nu, nv) in [(5, 4, 0.5, 0.5, 64, 48), (8, 8, 0.52, 0.61, 100, 128), (3, 6, 0.7, 0.45, 37, 40)] {
            let g = ApertureGrid::new(m, n, dx, dy).unwrap();
            let lat = UvLattice::new(nu, nv).unwrap();
            let w: Vec<Complex64> = (0..g.len())
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-PI..PI)))
                .collect();
            let f = UvTransform::new(&g, lat).field(&w).unwrap();
            let peak = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for _ in 0..64 {
                let i = rng.gen_range(0..lat.len());
                let (u, v) = lat.position(i);
                let d = plain_sum(&g, &w, u, v);
                assert!((f[i] - d).norm() < 1e-10 * peak, "{} vs {}", f[i], d);
                assert!((direct_field(&g, &w, u, v) - d).norm() < 1e-12 * peak);
            }
        }
    }

    #[test]
    fn lattice_geometry() {
        let lat = UvLattice::square(8).unwrap();
        assert_eq!(lat.u(0), -1.0);
        assert_eq!(lat.u(4), 0.0);
        assert_eq!(lat.nearest(0.01, -0.99), (4, 0));
        assert_eq!(lat.cell(lat.index(3, 5)), (3, 5));
        assert!(!lat.in_disk(lat.index(0, 0)));
        assert!(UvLattice::new(1, 4).is_err());
    }
}
