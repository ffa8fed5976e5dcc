use std::f64::consts::PI;

use num_complex::Complex64;

use super::transform::{direct_field, UvLattice, UvTransform};
use super::{ElementModel, ExcitationField};
use crate::aperture::ApertureGrid;
use crate::error::{Error, Result};

/// Power at an arbitrary direction.
pub trait PointPower {
    fn power_at(&self, u: f64, v: f64) -> f64;
}

/// Sampled `P(u, v)`; samples outside the visible disk hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPattern {
    lattice: UvLattice,
    values: Vec<f64>,
}

impl PowerPattern {
    pub fn new(lattice: UvLattice, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::Domain(format!(
                "{} pattern samples for a {}x{} lattice",
                values.len(),
                lattice.nu(),
                lattice.nv()
            )));
        }
        for (i, p) in values.iter_mut().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::Domain(format!("pattern sample {i} is {p}")));
            }
            if !lattice.in_disk(i) {
                *p = 0.0;
            }
        }
        Ok(Self { lattice, values })
    }

    pub fn lattice(&self) -> UvLattice {
        self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, k: usize, l: usize) -> f64 {
        self.values[self.lattice.index(k, l)]
    }

    /// Pattern divided by `reference`.
    pub fn normalized(&self, reference: f64) -> PowerPattern {
        PowerPattern {
            lattice: self.lattice,
            values: self.values.iter().map(|p| p / reference).collect(),
        }
    }
}

impl PointPower for PowerPattern {
    /// Bilinear interpolation between lattice samples.
    fn power_at(&self, u: f64, v: f64) -> f64 {
        let lat = self.lattice;
        if u * u + v * v > 1.0 {
            return 0.0;
        }
        let fu = (u + 1.0) / lat.du();
        let fv = (v + 1.0) / lat.dv();
        let k0 = (fu.floor() as usize).min(lat.nu() - 1);
        let l0 = (fv.floor() as usize).min(lat.nv() - 1);
        let (tu, tv) = (fu - k0 as f64, fv - l0 as f64);
        let get = |k: usize, l: usize| {
            if k < lat.nu() && l < lat.nv() {
                self.values[lat.index(k, l)]
            } else {
                0.0
            }
        };
        (1.0 - tu) * (1.0 - tv) * get(k0, l0)
            + tu * (1.0 - tv) * get(k0 + 1, l0)
            + (1.0 - tu) * tv * get(k0, l0 + 1)
            + tu * tv * get(k0 + 1, l0 + 1)
    }
}

/// Exact far field of an excitation.
#[derive(Debug, Clone)]
pub struct FarField {
    grid: ApertureGrid,
    weights: Vec<Complex64>,
    model: ElementModel,
}

impl FarField {
    pub fn new(grid: &ApertureGrid, excitation: &ExcitationField, model: ElementModel) -> Result<Self> {
        excitation.check(grid)?;
        Ok(Self {
            grid: grid.clone(),
            weights: excitation.weights(),
            model,
        })
    }

    pub fn field(&self, u: f64, v: f64) -> Complex64 {
        direct_field(&self.grid, &self.weights, u, v) * self.model.gain(u, v)
    }

    /// Sampled pattern on `lattice`.
    pub fn sample(&self, lattice: UvLattice) -> Result<PowerPattern> {
        let af = UvTransform::new(&self.grid, lattice).field(&self.weights)?;
        let values = af
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let (u, v) = lattice.position(i);
                f.norm_sqr() * self.model.power(u, v)
            })
            .collect();
        PowerPattern::new(lattice, values)
    }

    /// Principal-plane cut `v = 0` (`phi = 0`) or `u = 0` (`phi = 90`) in dB
    /// relative to `reference`, for `theta` in `[-90, 90]` degrees.
    pub fn cut(&self, phi_deg: f64, step_deg: f64, reference: f64) -> Vec<(f64, f64)> {
        let count = (180.0 / step_deg).round() as usize;
        let (c, s) = (phi_deg.to_radians().cos(), phi_deg.to_radians().sin());
        (0..=count)
            .map(|i| {
                let theta = -90.0 + i as f64 * step_deg;
                let r = (theta * PI / 180.0).sin();
                let p = self.power_at(r * c, r * s) / reference;
                (theta, 10.0 * p.max(1e-30).log10())
            })
            .collect()
    }
}

impl PointPower for FarField {
    fn power_at(&self, u: f64, v: f64) -> f64 {
        self.field(u, v).norm_sqr()
    }
}

/// Sampled power pattern of an excitation.
pub fn array_pattern(
    excitation: &ExcitationField,
    grid: &ApertureGrid,
    model: ElementModel,
    lattice: UvLattice,
) -> Result<PowerPattern> {
    FarField::new(grid, excitation, model)?.sample(lattice)
}
