//! Excitations, far-field patterns, masks and pattern metrics.
//!
//! Directions are direction cosines `u = sin(theta) cos(phi)`,
//! `v = sin(theta) sin(phi)`; the visible region is the unit disk.
//! Element positions are in wavelengths, so the far field of an excitation
//! `w` is `F(u, v) = g(u, v) sum_mn w_mn exp(j 2 pi (x_m u + y_n v))`.

mod mask;
mod metrics;
mod pattern;
mod transform;

pub use mask::{enclosing_region, mask_cost, Mask, MaskDefinition, MaskRegion};
pub use metrics::{directivity, hpbw, main_lobe, metrics, sidelobe_level, PatternMetrics};
pub use pattern::{array_pattern, FarField, PointPower, PowerPattern};
pub use transform::{direct_field, UvLattice, UvTransform};

use num_complex::Complex64;

use crate::aperture::ApertureGrid;
use crate::error::{Error, Result};

use std::f64::consts::PI;

/// Amplitude and phase of every element, raster order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationField {
    cols: usize,
    rows: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl ExcitationField {
    pub fn new(grid: &ApertureGrid, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != grid.len() || beta.len() != grid.len() {
            return Err(Error::Domain(format!(
                "excitation has {}/{} entries for {} elements",
                alpha.len(),
                beta.len(),
                grid.len()
            )));
        }
        if let Some(a) = alpha.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(Error::Domain(format!("amplitude {a} is not a finite non-negative number")));
        }
        if let Some(b) = beta.iter().find(|b| !b.is_finite()) {
            return Err(Error::Domain(format!("phase {b} is not finite")));
        }
        Ok(Self {
            cols: grid.cols(),
            rows: grid.rows(),
            alpha,
            beta,
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `alpha exp(j beta)` of one element.
    pub fn weight(&self, index: usize) -> Complex64 {
        Complex64::from_polar(self.alpha[index], self.beta[index])
    }

    pub fn weights(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub fn matches(&self, grid: &ApertureGrid) -> bool {
        self.cols == grid.cols() && self.rows == grid.rows()
    }

    /// Same amplitudes with the steering phases of `(u0, v0)` added.
    pub fn steered(&self, grid: &ApertureGrid, u0: f64, v0: f64) -> Result<Self> {
        self.check(grid)?;
        let phases = steering_phases(grid, u0, v0)?;
        let beta = self.beta.iter().zip(&phases).map(|(b, p)| b + p).collect();
        Self::new(grid, self.alpha.clone(), beta)
    }

    pub(crate) fn check(&self, grid: &ApertureGrid) -> Result<()> {
        if self.matches(grid) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "excitation is {}x{} but the grid is {}x{}",
                self.cols,
                self.rows,
                grid.cols(),
                grid.rows()
            )))
        }
    }
}

/// Scalar element pattern magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElementModel {
    #[default]
    Isotropic,
    /// `|g| = sqrt(2) ((1 - u^2 - v^2) / 2)^(1/4)`: two co-polar components
    /// of the fourth-root cosine pattern.
    CosineRoot,
}

impl ElementModel {
    /// Field magnitude; zero outside the visible disk.
    pub fn gain(&self, u: f64, v: f64) -> f64 {
        let c = 1.0 - u * u - v * v;
        if c < 0.0 {
            return 0.0;
        }
        match self {
            ElementModel::Isotropic => 1.0,
            ElementModel::CosineRoot => std::f64::consts::SQRT_2 * (c / 2.0).powf(0.25),
        }
    }

    pub fn power(&self, u: f64, v: f64) -> f64 {
        let g = self.gain(u, v);
        g * g
    }
}

/// Phases `-2 pi (x_m u0 + y_n v0)` that point the beam at `(u0, v0)`.
pub fn steering_phases(grid: &ApertureGrid, u0: f64, v0: f64) -> Result<Vec<f64>> {
    if !(u0 * u0 + v0 * v0 <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("steering ({u0}, {v0}) lies outside the unit disk")));
    }
    Ok((0..grid.len())
        .map(|i| {
            let (m, n) = grid.pixel(i);
            -2.0 * PI * (grid.x(m) * u0 + grid.y(n) * v0)
        })
        .collect())
}

/// Unit amplitudes, zero phases.
pub fn uniform_weights(grid: &ApertureGrid) -> ExcitationField {
    ExcitationField {
        cols: grid.cols(),
        rows: grid.rows(),
        alpha: vec![1.0; grid.len()],
        beta: vec![0.0; grid.len()],
    }
}

/// Separable product of two Dolph-Chebyshev tapers with sidelobes at
/// `sll_db` in both principal planes.
pub fn dolph_chebyshev_weights(grid: &ApertureGrid, sll_db: f64) -> Result<ExcitationField> {
    if grid.cols() < 2 || grid.rows() < 2 {
        return Err(Error::Config(format!(
            "Chebyshev taper needs at least 2x2 elements, got {}x{}",
            grid.cols(),
            grid.rows()
        )));
    }
    let tx = chebyshev_taper(grid.cols(), sll_db)?;
    let ty = chebyshev_taper(grid.rows(), sll_db)?;
    let alpha = (0..grid.len())
        .map(|i| {
            let (m, n) = grid.pixel(i);
            tx[m - 1] * ty[n - 1]
        })
        .collect();
    ExcitationField::new(grid, alpha, vec![0.0; grid.len()])
}

/// One-dimensional Dolph-Chebyshev taper of `n` elements, peak-normalised.
///
/// Samples the Chebyshev polynomial pattern at the `n` DFT frequencies and
/// inverts the transform.
pub fn chebyshev_taper(n: usize, sll_db: f64) -> Result<Vec<f64>> {
    if !(sll_db < 0.0) || !sll_db.is_finite() {
        return Err(Error::Config(format!("sidelobe level must be negative dB, got {sll_db}")));
    }
    if n < 2 {
        return Err(Error::Config(format!("Chebyshev taper needs at least 2 elements, got {n}")));
    }
    let order = (n - 1) as f64;
    let ratio = 10f64.powf(-sll_db / 20.0);
    let x0 = (ratio.acosh() / order).cosh();
    let cheb = |x: f64| {
        if x.abs() <= 1.0 {
            (order * x.acos()).cos()
        } else if x > 1.0 {
            (order * x.acosh()).cosh()
        } else {
            let s = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
            s * (order * (-x).acosh()).cosh()
        }
    };
    let nf = n as f64;
    // pattern samples with the half-sample shift that centres the taper
    let samples: Vec<Complex64> = (0..n)
        .map(|k| {
            let p = cheb(x0 * (PI * k as f64 / nf).cos());
            if n % 2 == 1 {
                Complex64::new(p, 0.0)
            } else {
                Complex64::from_polar(p, PI * k as f64 / nf)
            }
        })
        .collect();
    let dft = |i: usize| -> f64 {
        samples
            .iter()
            .enumerate()
            .map(|(k, s)| s * Complex64::from_polar(1.0, -2.0 * PI * (i * k) as f64 / nf))
            .sum::<Complex64>()
            .re
    };
    let w: Vec<f64> = if n % 2 == 1 {
        let h = (n + 1) / 2;
        let half: Vec<f64> = (0..h).map(dft).collect();
        half[1..].iter().rev().chain(half.iter()).copied().collect()
    } else {
        let h = n / 2 + 1;
        let half: Vec<f64> = (0..h).map(dft).collect();
        half[1..].iter().rev().chain(half[1..].iter()).copied().collect()
    };
    let peak = w.iter().cloned().fold(f64::MIN, f64::max);
    Ok(w.into_iter().map(|x| x / peak).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cheb_recurrence(order: usize, x: f64) -> f64 {
        let (mut a, mut b) = (1.0, x);
        if order == 0 {
            return a;
        }
        for _ in 1..order {
            let c = 2.0 * x * b - a;
            a = b;
            b = c;
        }
        b
    }

    #[test]
    fn chebyshev_matches_polynomial_pattern() {
        for (n, sll) in [(8usize, -30.0), (12, -20.0), (7, -25.0), (22, -20.0)] {
            let w = chebyshev_taper(n, sll).unwrap();
            assert_eq!(w.len(), n);
            for i in 0..n {
                assert!((w[i] - w[n - 1 - i]).abs() < 1e-12);
            }
            assert!((w.iter().cloned().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
            let r = 10f64.powf(-sll / 20.0);
            let x0 = (r.acosh() / (n - 1) as f64).cosh();
            let c = (n - 1) as f64 / 2.0;
            let af = |psi: f64| -> f64 { w.iter().enumerate().map(|(i, a)| a * ((i as f64 - c) * psi).cos()).sum() };
            let scale = af(0.0) / r;
            for k in 0..200 {
                let psi = PI * k as f64 / 199.0;
                let expect = cheb_recurrence(n - 1, x0 * (psi / 2.0).cos()) * scale;
                assert!((af(psi) - expect).abs() < 1e-9 * af(0.0), "n={n} psi={psi}");
            }
        }
    }

    #[test]
    fn chebyshev_tends_to_monotone() {
        let w = chebyshev_taper(8, -80.0).unwrap();
        for i in 0..3 {
            assert!(w[i] < w[i + 1]);
        }
        assert!(chebyshev_taper(8, 3.0).is_err());
        assert!(chebyshev_taper(1, -20.0).is_err());
    }

    #[test]
    fn steering_is_linear() {
        let g = ApertureGrid::new(5, 4, 0.5, 0.7).unwrap();
        assert!(steering_phases(&g, 0.0, 0.0).unwrap().iter().all(|&p| p == 0.0));
        let u0 = 3f64.sqrt() / 2.0;
        let p = steering_phases(&g, u0, 0.0).unwrap();
        for n in 1..=4 {
            for m in 1..5 {
                let d = p[g.index(m + 1, n).unwrap()] - p[g.index(m, n).unwrap()];
                assert!((d + 2.0 * PI * 0.5 * u0).abs() < 1e-12);
            }
        }
        assert!(steering_phases(&g, 0.9, 0.9).is_err());
    }

    #[test]
    fn excitation_validation() {
        let g = ApertureGrid::new(2, 2, 0.5, 0.5).unwrap();
        let u = uniform_weights(&g);
        assert_eq!(u.alpha(), &[1.0; 4]);
        assert!(ExcitationField::new(&g, vec![1.0; 3], vec![0.0; 4]).is_err());
        assert!(ExcitationField::new(&g, vec![1.0, -1.0, 1.0, 1.0], vec![0.0; 4]).is_err());
        assert!(ExcitationField::new(&g, vec![1.0; 4], vec![f64::NAN, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn element_models() {
        assert_eq!(ElementModel::Isotropic.gain(0.3, 0.2), 1.0);
        assert_eq!(ElementModel::Isotropic.gain(1.0, 0.2), 0.0);
        let g = ElementModel::CosineRoot;
        assert!((g.power(0.0, 0.0) - 2f64.sqrt()).abs() < 1e-12);
        assert!((g.power(0.6, 0.0) - 2f64.sqrt() * 0.8).abs() < 1e-12);
    }
}
