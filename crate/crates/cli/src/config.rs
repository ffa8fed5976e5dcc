//! Run configuration read from a TOML file.
//!
//! ```toml
//! case = "22x12"
//! seed = 1
//! uv = 256
//! out = "out/22x12"
//!
//! [grid]
//! cols = 22
//! rows = 12
//! dx = 0.5
//! dy = 0.5
//!
//! [element]
//! model = "isotropic"        # or "cosine-root"
//!
//! [reference]
//! kind = "chebyshev"         # "uniform", "chebyshev" or "file"
//! sll_db = -20.0
//!
//! [steering]                 # u0/v0 or theta_deg/phi_deg
//! u0 = 0.0
//! v0 = 0.0
//!
//! [mask]
//! far_db = -20.0
//! [[mask.region]]            # fitted to the reference main lobe...
//! fit_above_db = -3.0
//! level_db = 0.0
//! [[mask.region]]            # ...or given explicitly
//! half_u = 0.2
//! half_v = 0.3
//! level_db = -3.0
//!
//! [partition]                # cols/rows or eta
//! cols = 2
//! rows = 2
//! eta_th = 0.25
//!
//! [ga]                       # every key optional
//! generations = 1000
//!
//! [sweep]
//! eta = [0.0833333333333333, 0.125]
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use dctm_core::aperture::{ApertureGrid, PartitionScheme};
use dctm_core::io::read_excitation;
use dctm_core::radiation::{
    array_pattern, dolph_chebyshev_weights, enclosing_region, uniform_weights, ElementModel, ExcitationField, FarField,
    Mask, MaskDefinition, MaskRegion, PointPower, UvLattice,
};
use dctm_core::synthesis::{DctmConfig, GaConfig};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_uv")]
    pub uv: usize,
    pub out: Option<PathBuf>,
    /// Input power in watts; enables the EIRP column.
    pub upsilon_w: Option<f64>,
    pub grid: GridSection,
    #[serde(default)]
    pub element: ElementSection,
    pub reference: ReferenceSection,
    #[serde(default)]
    pub steering: SteeringSection,
    pub mask: Option<MaskSection>,
    pub partition: Option<PartitionSection>,
    #[serde(default)]
    pub ga: GaSection,
    pub sweep: Option<SweepSection>,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn default_uv() -> usize {
    256
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub cols: usize,
    pub rows: usize,
    #[serde(default = "half")]
    pub dx: f64,
    #[serde(default = "half")]
    pub dy: f64,
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSection {
    #[serde(default)]
    pub model: ModelName,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    #[default]
    Isotropic,
    CosineRoot,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ReferenceSection {
    Uniform,
    Chebyshev { sll_db: f64 },
    File { path: PathBuf },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteeringSection {
    pub u0: Option<f64>,
    pub v0: Option<f64>,
    pub theta_deg: Option<f64>,
    pub phi_deg: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSection {
    pub far_db: f64,
    #[serde(default)]
    pub region: Vec<RegionSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub level_db: f64,
    pub half_u: Option<f64>,
    pub half_v: Option<f64>,
    /// Smallest ellipse holding the reference main lobe above this level.
    pub fit_above_db: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSection {
    pub cols: Option<usize>,
    pub rows: Option<usize>,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    #[serde(default = "default_eta_th")]
    pub eta_th: f64,
}

fn default_eta_th() -> f64 {
    0.25
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaSection {
    pub population: Option<usize>,
    pub crossover: Option<f64>,
    pub mutation: Option<f64>,
    pub generations: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub eta: Option<Vec<f64>>,
    pub delta: Option<Vec<f64>>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => bad(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if cfg.case.is_none() {
            cfg.case = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    /// Parses and checks a configuration; relative paths resolve against
    /// the working directory.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        let grid = self.grid()?;
        if self.uv < 16 {
            return Err(bad(format!("uv = {} is too coarse, use at least 16", self.uv)));
        }
        if let Some(u) = self.upsilon_w {
            if !(u > 0.0 && u.is_finite()) {
                return Err(bad(format!("upsilon_w must be a positive power in watts, got {u}")));
            }
        }
        if let ReferenceSection::Chebyshev { sll_db } = self.reference {
            if !(sll_db < 0.0) {
                return Err(bad(format!("reference.sll_db must be negative, got {sll_db}")));
            }
        }
        self.steering()?;
        if let Some(mask) = &self.mask {
            for (i, r) in mask.region.iter().enumerate() {
                let explicit = r.half_u.is_some() || r.half_v.is_some();
                match (explicit, r.fit_above_db) {
                    (true, Some(_)) => {
                        return Err(bad(format!("mask region {} mixes half_u/half_v with fit_above_db", i + 1)))
                    }
                    (true, None) if r.half_u.is_none() || r.half_v.is_none() => {
                        return Err(bad(format!("mask region {} needs both half_u and half_v", i + 1)))
                    }
                    (false, None) => {
                        return Err(bad(format!("mask region {} needs half_u/half_v or fit_above_db", i + 1)))
                    }
                    _ => {}
                }
            }
        }
        if let Some(p) = &self.partition {
            if !(p.eta_th > 0.0 && p.eta_th <= 1.0) {
                return Err(bad(format!("partition.eta_th must lie in (0, 1], got {}", p.eta_th)));
            }
            let given = [p.cols.is_some() || p.rows.is_some(), p.eta.is_some(), p.delta.is_some()];
            if given.iter().filter(|&&g| g).count() > 1 {
                return Err(bad("give the partition as cols/rows, eta or delta, not several"));
            }
            if given.iter().any(|&g| g) {
                self.scheme(&grid)?;
            }
        }
        self.ga_for(&PartitionScheme::new(&grid, grid.cols(), grid.rows()).map_err(|e| bad(e.to_string()))?)?;
        if let Some(s) = &self.sweep {
            for eta in self.sweep_etas()? {
                PartitionScheme::from_eta(&grid, eta).map_err(|e| bad(format!("sweep: {e}")))?;
            }
            if s.eta.is_some() == s.delta.is_some() {
                return Err(bad("sweep needs exactly one of eta or delta"));
            }
        }
        Ok(())
    }

    pub fn case(&self) -> String {
        self.case.clone().unwrap_or_else(|| "run".into())
    }

    pub fn grid(&self) -> Result<ApertureGrid, CliError> {
        ApertureGrid::new(self.grid.cols, self.grid.rows, self.grid.dx, self.grid.dy).map_err(|e| bad(e.to_string()))
    }

    pub fn model(&self) -> ElementModel {
        match self.element.model {
            ModelName::Isotropic => ElementModel::Isotropic,
            ModelName::CosineRoot => ElementModel::CosineRoot,
        }
    }

    pub fn lattice(&self) -> Result<UvLattice, CliError> {
        UvLattice::square(self.uv).map_err(|e| bad(e.to_string()))
    }

    /// Beam direction `(u0, v0)`.
    pub fn steering(&self) -> Result<(f64, f64), CliError> {
        let s = &self.steering;
        let direction = match (s.u0.is_some() || s.v0.is_some(), s.theta_deg.is_some() || s.phi_deg.is_some()) {
            (true, true) => return Err(bad("steering takes u0/v0 or theta_deg/phi_deg, not both")),
            (_, false) => (s.u0.unwrap_or(0.0), s.v0.unwrap_or(0.0)),
            (false, true) => {
                let (t, p) = (s.theta_deg.unwrap_or(0.0).to_radians(), s.phi_deg.unwrap_or(0.0).to_radians());
                (t.sin() * p.cos(), t.sin() * p.sin())
            }
        };
        if !(direction.0.hypot(direction.1) < 1.0) {
            return Err(bad(format!("steering direction {direction:?} is outside the visible disk")));
        }
        Ok(direction)
    }

    /// Reference excitation, steered to the beam direction.
    pub fn reference(&self) -> Result<ExcitationField, CliError> {
        let grid = self.grid()?;
        let base = match &self.reference {
            ReferenceSection::Uniform => uniform_weights(&grid),
            ReferenceSection::Chebyshev { sll_db } => dolph_chebyshev_weights(&grid, *sll_db)?,
            ReferenceSection::File { path } => {
                let path = self.base_dir.join(path);
                let file = fs::File::open(&path).map_err(|e| bad(format!("cannot open {}: {e}", path.display())))?;
                return Ok(read_excitation(file, &grid)?);
            }
        };
        let (u0, v0) = self.steering()?;
        Ok(base.steered(&grid, u0, v0)?)
    }

    /// Mask on the run's uv lattice, levels relative to the reference peak.
    pub fn mask(&self, reference: &ExcitationField) -> Result<Mask, CliError> {
        let section = self.mask.as_ref().ok_or_else(|| bad("this command needs a [mask] section"))?;
        let grid = self.grid()?;
        let lattice = self.lattice()?;
        let steer = self.steering()?;
        let pattern = array_pattern(reference, &grid, self.model(), lattice)?;
        // the sampled maximum can sit a rounding error above the exact peak
        let exact = FarField::new(&grid, reference, self.model())?.power_at(steer.0, steer.1);
        let peak = pattern.values().iter().fold(exact, |a, &b| a.max(b));
        let shape = (1.0 / (grid.cols() as f64 * grid.dx()), 1.0 / (grid.rows() as f64 * grid.dy()));
        let regions = section
            .region
            .iter()
            .map(|r| match r.fit_above_db {
                Some(above) => enclosing_region(&pattern, steer, peak, above, shape, r.level_db),
                None => MaskRegion {
                    half_u: r.half_u.unwrap_or_default(),
                    half_v: r.half_v.unwrap_or_default(),
                    level_db: r.level_db,
                },
            })
            .collect();
        let def = MaskDefinition {
            regions,
            far_db: section.far_db,
        };
        Ok(Mask::from_definition(lattice, &def, steer, peak)?)
    }

    pub fn scheme(&self, grid: &ApertureGrid) -> Result<PartitionScheme, CliError> {
        let p = self.partition.as_ref().ok_or_else(|| bad("this command needs a [partition] section"))?;
        let scheme = match (p.cols, p.rows, p.eta, p.delta) {
            (c, r, None, None) if c.is_some() || r.is_some() => {
                PartitionScheme::new(grid, c.unwrap_or(grid.cols()), r.unwrap_or(grid.rows()))
            }
            (None, None, Some(eta), None) => PartitionScheme::from_eta(grid, eta),
            (None, None, None, Some(delta)) if delta > 0.0 => PartitionScheme::from_eta(grid, delta.sqrt()),
            _ => return Err(bad("partition needs cols/rows, eta or a positive delta")),
        };
        scheme.map_err(|e| bad(format!("partition: {e}")))
    }

    pub fn eta_th(&self) -> f64 {
        self.partition.as_ref().map_or(default_eta_th(), |p| p.eta_th)
    }

    /// GA parameters for `scheme`, defaults filled in.
    pub fn ga_for(&self, scheme: &PartitionScheme) -> Result<GaConfig, CliError> {
        let d = GaConfig::for_scheme(scheme);
        let ga = GaConfig {
            population: self.ga.population.unwrap_or(d.population),
            crossover: self.ga.crossover.unwrap_or(d.crossover),
            mutation: self.ga.mutation.unwrap_or(d.mutation),
            generations: self.ga.generations.unwrap_or(d.generations),
        };
        ga.validate().map_err(|e| bad(format!("ga: {e}")))?;
        Ok(ga)
    }

    pub fn synthesis(&self, scheme: PartitionScheme, reference: &ExcitationField, mask: &Mask) -> Result<DctmConfig, CliError> {
        Ok(DctmConfig {
            scheme,
            eta_th: self.eta_th(),
            mask: mask.clone(),
            reference: reference.clone(),
            model: self.model(),
            steering: self.steering()?,
            ga: Some(self.ga_for(&scheme)?),
            seed: self.seed,
        })
    }

    pub fn sweep_etas(&self) -> Result<Vec<f64>, CliError> {
        let s = self.sweep.as_ref().ok_or_else(|| bad("this command needs a [sweep] section"))?;
        let etas: Vec<f64> = match (&s.eta, &s.delta) {
            (Some(e), None) => e.clone(),
            (None, Some(d)) => d.iter().map(|x| x.sqrt()).collect(),
            _ => return Err(bad("sweep needs exactly one of eta or delta")),
        };
        if etas.is_empty() {
            return Err(bad("sweep list is empty"));
        }
        if let Some(e) = etas.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return Err(bad(format!("sweep value eta = {e} must lie in (0, 1]")));
        }
        Ok(etas)
    }
}
