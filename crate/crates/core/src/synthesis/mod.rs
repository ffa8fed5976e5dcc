//! Divide-and-conquer domino clustering of a reference excitation.
//!
//! The aperture is visited partition by partition in raster order. Each
//! partition is tiled either exhaustively (when the partition is small
//! compared with the aperture) or with a genetic algorithm, always judging a
//! candidate by the mask-matching cost of the whole hybrid array: tiled
//! dominoes carry averaged weights, untiled elements keep the reference.

mod cost;
mod edctm;
mod odctm;

pub use cost::CostEvaluator;
pub use edctm::e_dctm_step;
pub use odctm::o_dctm_step;

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aperture::{ApertureGrid, PartitionScheme, PixelRegion};
use crate::error::{Error, Result};
use crate::radiation::{ElementModel, ExcitationField, Mask};
use crate::tiling::{is_tileable, Domino, TileabilityCache, Tiling};

/// Genetic-algorithm controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    pub crossover: f64,
    pub mutation: f64,
    pub generations: usize,
}

impl GaConfig {
    /// `P = 3 M^ N^`, `pc = 0.9`, `pm = 0.01`, `K = 1000`.
    pub fn for_scheme(scheme: &PartitionScheme) -> Self {
        Self {
            population: 3 * scheme.part_cols() * scheme.part_rows(),
            crossover: 0.9,
            mutation: 0.01,
            generations: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population == 0 || self.generations == 0 {
            return Err(Error::Config(format!(
                "GA needs a positive population and generation count, got P={} K={}",
                self.population, self.generations
            )));
        }
        for (name, p) in [("crossover", self.crossover), ("mutation", self.mutation)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Everything a synthesis run needs besides the grid.
#[derive(Debug, Clone)]
pub struct DctmConfig {
    pub scheme: PartitionScheme,
    /// Partitions with `eta <= eta_th` are searched exhaustively.
    pub eta_th: f64,
    /// Upper bound in the same power units as the element model's pattern.
    pub mask: Mask,
    pub reference: ExcitationField,
    pub model: ElementModel,
    pub steering: (f64, f64),
    /// `None` uses [`GaConfig::for_scheme`].
    pub ga: Option<GaConfig>,
    pub seed: u64,
}

impl DctmConfig {
    pub fn validate(&self, grid: &ApertureGrid) -> Result<()> {
        if !(self.eta_th > 0.0 && self.eta_th <= 1.0) {
            return Err(Error::Config(format!("eta_th must lie in (0, 1], got {}", self.eta_th)));
        }
        if self.scheme != PartitionScheme::new(grid, self.scheme.part_cols(), self.scheme.part_rows())? {
            return Err(Error::Config("partition scheme belongs to a different grid".into()));
        }
        self.reference.check(grid)?;
        self.ga().validate()
    }

    pub fn ga(&self) -> GaConfig {
        self.ga.unwrap_or_else(|| GaConfig::for_scheme(&self.scheme))
    }

    pub fn uses_ga(&self) -> bool {
        self.scheme.eta() > self.eta_th
    }
}

/// One partition's search problem.
#[derive(Debug, Clone, Copy)]
pub struct PartitionProblem<'a> {
    /// 1-based partition index, used in error reports.
    pub index: usize,
    /// Partition pixels `S`.
    pub partition: &'a PixelRegion,
    /// Untiled area `R` before this step.
    pub untiled: &'a PixelRegion,
    pub reference: &'a ExcitationField,
    /// Hybrid excitation before this step.
    pub current: &'a ExcitationField,
    pub evaluator: &'a CostEvaluator,
}

impl PartitionProblem<'_> {
    /// Pixels to cover (`S` minus what earlier steps already took) and the
    /// soft margin around them.
    pub(crate) fn regions(&self) -> Result<(PixelRegion, PixelRegion)> {
        let target = self.partition.intersection(self.untiled);
        let margin = crate::tiling::soft_extended_region(&target, self.untiled)?.difference(&target);
        Ok((target, margin))
    }

    /// Array factor of the current hybrid with the target pixels switched
    /// off.
    pub(crate) fn base_field(&self, target: &PixelRegion) -> Result<Vec<Complex64>> {
        let mut w = self.current.weights();
        for p in target.indices() {
            w[p] = Complex64::new(0.0, 0.0);
        }
        self.evaluator.field(&w)
    }

    /// Adds the change a domino makes to the base field: its averaged weight
    /// on both pixels, minus the reference weight of a borrowed margin pixel.
    pub(crate) fn domino_field(&self, d: Domino, margin: &PixelRegion, out: &mut [Complex64]) {
        let (a, b) = domino_weight(self.reference, d);
        let w = Complex64::from_polar(a, b);
        for p in d.pixels() {
            self.evaluator.add_element(p, w, out);
            if margin.contains(p) {
                self.evaluator.add_element(p, -self.current.weight(p), out);
            }
        }
    }
}

/// Admissibility of placements: the untiled area left over must still be
/// tileable. Only the margin pixels a placement borrows matter, so results
/// are memoised on that set.
pub(crate) struct Admissibility {
    margin: PixelRegion,
    residual: PixelRegion,
    known: HashMap<Vec<usize>, bool>,
    cache: TileabilityCache,
}

impl Admissibility {
    pub(crate) fn new(untiled: &PixelRegion, target: &PixelRegion, margin: &PixelRegion) -> Self {
        Self {
            margin: margin.clone(),
            residual: untiled.difference(target),
            known: HashMap::new(),
            cache: TileabilityCache::new(),
        }
    }

    pub(crate) fn check(&mut self, placement: &[Domino]) -> bool {
        let mut used: Vec<usize> = placement
            .iter()
            .flat_map(|d| d.pixels())
            .filter(|&p| self.margin.contains(p))
            .collect();
        used.sort_unstable();
        if let Some(&ok) = self.known.get(&used) {
            return ok;
        }
        let mut rest = self.residual.clone();
        for &p in &used {
            rest.remove(p);
        }
        let ok = self.cache.is_tileable(&rest);
        self.known.insert(used, ok);
        ok
    }
}

/// Winner of one partition step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub placement: Vec<Domino>,
    pub phi: f64,
    /// Cost-function evaluations spent, `T^(i)`.
    pub evaluations: u64,
}

/// Per-iteration record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub best_phi: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    /// Final clustering, identifiers in placement order.
    pub tiling: Tiling,
    /// `(alpha, beta)` of every cluster, indexed by identifier - 1.
    pub cluster_weights: Vec<(f64, f64)>,
    /// Element-level excitation realised by the clustering.
    pub excitation: ExcitationField,
    pub phi_opt: f64,
    pub evaluations: u64,
    pub trace: Vec<IterationRecord>,
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Mean amplitude and phase of a domino's two reference elements. The
/// phase difference is taken on its nearest branch before averaging.
pub fn domino_weight(reference: &ExcitationField, d: Domino) -> (f64, f64) {
    let [p, q] = d.pixels();
    let (a, b) = (reference.alpha(), reference.beta());
    ((a[p] + a[q]) / 2.0, b[p] + wrap(b[q] - b[p]) / 2.0)
}

/// Averaged weights of every cluster of `tiling`, by identifier.
pub fn subarray_average(tiling: &Tiling, reference: &ExcitationField) -> Result<Vec<(f64, f64)>> {
    if reference.cols() != tiling.cols() || reference.rows() != tiling.rows() {
        return Err(Error::Domain("tiling and reference have different sizes".into()));
    }
    Ok(tiling.dominoes().into_iter().map(|d| domino_weight(reference, d)).collect())
}

/// Clustered weights on tiled pixels, reference weights on `untiled` ones.
pub fn hybrid_excitations(
    grid: &ApertureGrid,
    tiling: &Tiling,
    reference: &ExcitationField,
    untiled: &PixelRegion,
) -> Result<ExcitationField> {
    reference.check(grid)?;
    for p in 0..grid.len() {
        let tiled = tiling.cluster_of(p).is_some();
        if tiled == untiled.contains(p) {
            let (m, n) = grid.pixel(p);
            let what = if tiled { "both tiled and untiled" } else { "neither tiled nor untiled" };
            return Err(Error::Structural(format!("element ({m},{n}) is {what}")));
        }
    }
    let weights = subarray_average(tiling, reference)?;
    let mut alpha = reference.alpha().to_vec();
    let mut beta = reference.beta().to_vec();
    for (p, c) in tiling.clusters().iter().enumerate() {
        if *c > 0 {
            (alpha[p], beta[p]) = weights[*c as usize - 1];
        }
    }
    ExcitationField::new(grid, alpha, beta)
}

/// Runs the divide-and-conquer synthesis over every partition.
pub fn dctm(grid: &ApertureGrid, config: &DctmConfig) -> Result<SynthesisResult> {
    config.validate(grid)?;
    let evaluator = CostEvaluator::new(grid, config.model, &config.mask)?;
    let ga = config.ga();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut untiled = PixelRegion::full(grid);
    let mut dominoes: Vec<Domino> = Vec::new();
    let mut current = config.reference.clone();
    let mut trace = Vec::new();
    let mut phi = evaluator.phi(&current.weights())?;
    for i in 1..=config.scheme.count() {
        let partition = config.scheme.region(grid, i)?;
        let problem = PartitionProblem {
            index: i,
            partition: &partition,
            untiled: &untiled,
            reference: &config.reference,
            current: &current,
            evaluator: &evaluator,
        };
        let outcome = if partition.intersection(&untiled).is_empty() {
            // earlier soft margins already covered this partition
            StepOutcome {
                placement: Vec::new(),
                phi,
                evaluations: 0,
            }
        } else if config.uses_ga() {
            o_dctm_step(&problem, &ga, &mut rng)?
        } else {
            e_dctm_step(&problem)?
        };
        let (mut alpha, mut beta) = (current.alpha().to_vec(), current.beta().to_vec());
        for d in &outcome.placement {
            let w = domino_weight(&config.reference, *d);
            for p in d.pixels() {
                untiled.remove(p);
                (alpha[p], beta[p]) = w;
            }
            dominoes.push(*d);
        }
        current = ExcitationField::new(grid, alpha, beta)?;
        if !is_tileable(&untiled) {
            return Err(Error::Infeasible {
                partition: i,
                reason: "remaining aperture lost its tileability".into(),
            });
        }
        phi = outcome.phi;
        trace.push(IterationRecord {
            iteration: i,
            best_phi: outcome.phi,
            evaluations: outcome.evaluations,
        });
    }
    let tiling = Tiling::from_dominoes(grid, &dominoes)?;
    if !tiling.is_full() {
        return Err(Error::Structural("synthesis left untiled elements".into()));
    }
    let cluster_weights = subarray_average(&tiling, &config.reference)?;
    Ok(SynthesisResult {
        tiling,
        cluster_weights,
        excitation: current,
        phi_opt: phi,
        evaluations: trace.iter().map(|r| r.evaluations).sum(),
        trace,
    })
}

/// Calibration indicator `0.5 (Phi_D / max Phi + T_D / max T)` for entry
/// `index` of a sweep.
pub fn chi_delta(phis: &[f64], counts: &[f64], index: usize) -> Result<f64> {
    if phis.is_empty() || phis.len() != counts.len() || index >= phis.len() {
        return Err(Error::Domain(format!(
            "sweep tables of length {} and {} cannot be indexed at {index}",
            phis.len(),
            counts.len()
        )));
    }
    let max_phi = phis.iter().cloned().fold(f64::MIN, f64::max);
    let max_t = counts.iter().cloned().fold(f64::MIN, f64::max);
    if !(max_phi > 0.0 && max_t > 0.0) {
        return Err(Error::Domain("sweep maxima must be positive".into()));
    }
    Ok(0.5 * (phis[index] / max_phi + counts[index] / max_t))
}

/// `chi_delta` for every entry.
pub fn chi_profile(phis: &[f64], counts: &[f64]) -> Result<Vec<f64>> {
    (0..phis.len()).map(|i| chi_delta(phis, counts, i)).collect()
}
