use super::pattern::PowerPattern;
use super::transform::UvLattice;
use crate::error::{Error, Result};

/// Ellipse centred on the beam direction with a constant level inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskRegion {
    /// Semi-axis along `u`.
    pub half_u: f64,
    /// Semi-axis along `v`.
    pub half_v: f64,
    /// Upper bound inside the ellipse, dB relative to the reference peak.
    pub level_db: f64,
}

impl MaskRegion {
    pub fn contains(&self, du: f64, dv: f64) -> bool {
        (du / self.half_u).powi(2) + (dv / self.half_v).powi(2) <= 1.0
    }
}

/// Piecewise-constant mask: the first region containing a direction sets
/// its level, everything else gets `far_db`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskDefinition {
    pub regions: Vec<MaskRegion>,
    pub far_db: f64,
}

impl MaskDefinition {
    pub fn level_db(&self, du: f64, dv: f64) -> f64 {
        self.regions
            .iter()
            .find(|r| r.contains(du, dv))
            .map_or(self.far_db, |r| r.level_db)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.far_db.is_finite() {
            return Err(Error::Config(format!("far mask level {} is not finite", self.far_db)));
        }
        for (i, r) in self.regions.iter().enumerate() {
            if !(r.half_u > 0.0 && r.half_v > 0.0) || !r.level_db.is_finite() {
                return Err(Error::Config(format!(
                    "mask region {} needs positive semi-axes and a finite level, got {:?}",
                    i + 1,
                    r
                )));
            }
        }
        Ok(())
    }
}

/// Smallest ellipse with semi-axes proportional to `shape`, centred on
/// `steer`, that holds every main-lobe sample of `pattern` above
/// `above_db` (relative to `peak`), padded by one lattice step.
pub fn enclosing_region(
    pattern: &PowerPattern,
    steer: (f64, f64),
    peak: f64,
    above_db: f64,
    shape: (f64, f64),
    level_db: f64,
) -> MaskRegion {
    let lat = pattern.lattice();
    let lobe = super::main_lobe(pattern, steer);
    let threshold = peak * 10f64.powf(above_db / 10.0);
    let mut scale = 0.0f64;
    for i in lat.disk() {
        if lobe[i] && pattern.values()[i] > threshold {
            let (u, v) = lat.position(i);
            let s = ((u - steer.0) / shape.0).hypot((v - steer.1) / shape.1);
            scale = scale.max(s);
        }
    }
    let pad = lat.du().max(lat.dv());
    MaskRegion {
        half_u: scale * shape.0 + pad,
        half_v: scale * shape.1 + pad,
        level_db,
    }
}

/// Upper bound `Psi(u, v)` in linear power units.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    lattice: UvLattice,
    values: Vec<f64>,
}

impl Mask {
    pub fn new(lattice: UvLattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::Config(format!(
                "{} mask samples for a lattice of {}",
                values.len(),
                lattice.len()
            )));
        }
        for i in lattice.disk() {
            if !(values[i] > 0.0) || !values[i].is_finite() {
                return Err(Error::Config(format!("mask sample {} is {}, must be positive", i, values[i])));
            }
        }
        Ok(Self { lattice, values })
    }

    /// Samples `definition` around `(u0, v0)`, scaling dB levels by `peak`.
    pub fn from_definition(lattice: UvLattice, definition: &MaskDefinition, steer: (f64, f64), peak: f64) -> Result<Self> {
        definition.validate()?;
        if !(peak > 0.0) {
            return Err(Error::Config(format!("mask reference peak must be positive, got {peak}")));
        }
        let values = (0..lattice.len())
            .map(|i| {
                let (u, v) = lattice.position(i);
                peak * 10f64.powf(definition.level_db(u - steer.0, v - steer.1) / 10.0)
            })
            .collect();
        Self::new(lattice, values)
    }

    pub fn lattice(&self) -> UvLattice {
        self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Normalised excess `sum max(P - Psi, 0) / sum Psi` over the visible disk.
pub fn mask_cost(pattern: &PowerPattern, mask: &Mask) -> Result<f64> {
    let lat = pattern.lattice();
    if lat != mask.lattice() {
        return Err(Error::Domain("pattern and mask use different uv lattices".into()));
    }
    let p = pattern.values();
    let psi = mask.values();
    let (mut excess, mut total) = (0.0, 0.0);
    for i in lat.disk() {
        excess += (p[i] - psi[i]).max(0.0);
        total += psi[i];
    }
    Ok(excess / total)
}
