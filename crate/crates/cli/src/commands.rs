//! The command implementations. Each writes its CSV artifacts into an
//! output directory, created on demand.
//!
//! Every file except the `wall_s` column is a pure function of the
//! configuration and seed.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use dctm_core::aperture::{ApertureGrid, PixelRegion};
use dctm_core::io::{
    read_excitation, read_pattern, read_tiling, write_cluster_weights, write_cut, write_excitation, write_pattern,
    write_tiling, write_trace,
};
use dctm_core::radiation::{
    mask_cost, metrics, ExcitationField, FarField, Mask, PatternMetrics, PointPower, PowerPattern,
};
use dctm_core::synthesis::{chi_profile, dctm, hybrid_excitations, SynthesisResult};
use dctm_core::tiling::{enumerate_tilings, Domino};

use crate::config::RunConfig;
use crate::CliError;

pub const METRICS_HEADER: [&str; 9] = [
    "case",
    "sll_db",
    "d_dbi",
    "eirp_dbw",
    "hpbw_az_deg",
    "hpbw_el_deg",
    "phi",
    "evaluations",
    "wall_s",
];

pub const SWEEP_HEADER: [&str; 6] = ["eta", "delta", "phi_opt", "evaluations", "wall_s", "chi"];

/// Angular step of the principal-plane cuts, degrees.
const CUT_STEP_DEG: f64 = 0.05;

/// Largest aperture `count` enumerates unless told otherwise.
pub const COUNT_LIMIT: usize = 64;

pub struct Progress {
    quiet: bool,
}

impl Progress {
    pub fn new(quiet: bool) -> Self {
        Self { quiet }
    }

    pub fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// One row of the metrics summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub case: String,
    pub metrics: PatternMetrics,
    pub evaluations: Option<u64>,
    pub wall_s: Option<f64>,
}

impl MetricsRow {
    fn record(&self) -> Vec<String> {
        let m = &self.metrics;
        let opt = |x: Option<String>| x.unwrap_or_default();
        vec![
            self.case.clone(),
            format!("{:.4}", m.sll_db),
            format!("{:.4}", m.d_dbi),
            opt(m.eirp_dbw.map(|e| format!("{e:.4}"))),
            format!("{:.4}", m.hpbw_az_deg),
            format!("{:.4}", m.hpbw_el_deg),
            opt(m.phi.map(|p| format!("{p:e}"))),
            opt(self.evaluations.map(|t| t.to_string())),
            opt(self.wall_s.map(|w| format!("{w:.3}"))),
        ]
    }
}

/// One row of a sweep table; the result fields are `None` when that point
/// failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub delta: f64,
    pub phi_opt: Option<f64>,
    pub evaluations: Option<u64>,
    pub wall_s: Option<f64>,
    pub chi: Option<f64>,
}

pub fn output_dir(cfg: &RunConfig, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.case()))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn write_metrics<W: Write>(out: W, rows: &[MetricsRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        let opt = |x: Option<String>| x.unwrap_or_default();
        w.write_record([
            r.eta.to_string(),
            r.delta.to_string(),
            opt(r.phi_opt.map(|p| format!("{p:e}"))),
            opt(r.evaluations.map(|t| t.to_string())),
            opt(r.wall_s.map(|w| format!("{w:.3}"))),
            opt(r.chi.map(|c| c.to_string())),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Metrics of an excitation, with its mask cost when a mask is given.
pub fn excitation_metrics(
    cfg: &RunConfig,
    excitation: &ExcitationField,
    mask: Option<&Mask>,
) -> Result<(PatternMetrics, PowerPattern, FarField), CliError> {
    let grid = cfg.grid()?;
    let far = FarField::new(&grid, excitation, cfg.model())?;
    let pattern = far.sample(cfg.lattice()?)?;
    let mut m = metrics(&pattern, &far, cfg.steering()?)?;
    if let Some(u) = cfg.upsilon_w {
        m = m.with_eirp(u);
    }
    if let Some(mask) = mask {
        m = m.with_phi(mask_cost(&pattern, mask)?);
    }
    Ok((m, pattern, far))
}

fn write_pattern_files(dir: &Path, pattern: &PowerPattern, far: &FarField, steer: (f64, f64)) -> Result<(), CliError> {
    let peak = far.power_at(steer.0, steer.1);
    write_pattern(create(dir, "pattern.csv")?, pattern)?;
    write_cut(create(dir, "cut_phi0.csv")?, &far.cut(0.0, CUT_STEP_DEG, peak))?;
    write_cut(create(dir, "cut_phi90.csv")?, &far.cut(90.0, CUT_STEP_DEG, peak))?;
    Ok(())
}

pub fn write_result(dir: &Path, grid: &ApertureGrid, result: &SynthesisResult) -> Result<(), CliError> {
    write_tiling(create(dir, "tiling.csv")?, &result.tiling)?;
    write_cluster_weights(create(dir, "cluster_weights.csv")?, &result.cluster_weights)?;
    write_excitation(create(dir, "excitation.csv")?, grid, &result.excitation)?;
    let trace: Vec<_> = result.trace.iter().map(|r| (r.iteration, r.best_phi, r.evaluations)).collect();
    write_trace(create(dir, "trace.csv")?, &trace)?;
    Ok(())
}

/// Full synthesis run; returns the reference and synthesized metrics rows.
pub fn synthesize(cfg: &RunConfig, dir: &Path, progress: &Progress) -> Result<Vec<MetricsRow>, CliError> {
    let grid = cfg.grid()?;
    let reference = cfg.reference()?;
    let mask = cfg.mask(&reference)?;
    let scheme = cfg.scheme(&grid)?;
    let dcfg = cfg.synthesis(scheme, &reference, &mask)?;
    progress.say(format!(
        "{}: {}x{} aperture, {} partitions of {}x{} ({})",
        cfg.case(),
        grid.cols(),
        grid.rows(),
        scheme.count(),
        scheme.part_cols(),
        scheme.part_rows(),
        if dcfg.uses_ga() { "genetic" } else { "exhaustive" }
    ));
    let start = Instant::now();
    let result = dctm(&grid, &dcfg)?;
    let wall = start.elapsed().as_secs_f64();
    progress.say(format!("phi = {:e} after {} evaluations", result.phi_opt, result.evaluations));

    write_result(dir, &grid, &result)?;
    let (ref_m, _, _) = excitation_metrics(cfg, &reference, Some(&mask))?;
    let (syn_m, pattern, far) = excitation_metrics(cfg, &result.excitation, Some(&mask))?;
    write_pattern_files(dir, &pattern, &far, cfg.steering()?)?;
    let rows = vec![
        MetricsRow {
            case: "reference".into(),
            metrics: ref_m,
            evaluations: None,
            wall_s: None,
        },
        MetricsRow {
            case: cfg.case(),
            metrics: syn_m,
            evaluations: Some(result.evaluations),
            wall_s: Some(wall),
        },
    ];
    write_metrics(create(dir, "metrics.csv")?, &rows)?;
    Ok(rows)
}

/// Synthesis at each sweep value; failing points are reported and skipped.
pub fn sweep(cfg: &RunConfig, dir: &Path, progress: &Progress) -> Result<Vec<SweepRow>, CliError> {
    let grid = cfg.grid()?;
    let reference = cfg.reference()?;
    let mask = cfg.mask(&reference)?;
    let mut rows = Vec::new();
    for eta in cfg.sweep_etas()? {
        let point = || -> Result<(f64, SynthesisResult, f64), CliError> {
            let scheme = dctm_core::aperture::PartitionScheme::from_eta(&grid, eta)?;
            let dcfg = cfg.synthesis(scheme, &reference, &mask)?;
            let start = Instant::now();
            let r = dctm(&grid, &dcfg)?;
            Ok((scheme.delta(), r, start.elapsed().as_secs_f64()))
        };
        match point() {
            Ok((delta, r, wall)) => {
                progress.say(format!("eta {eta}: phi = {:e}, {} evaluations", r.phi_opt, r.evaluations));
                rows.push(SweepRow {
                    eta,
                    delta,
                    phi_opt: Some(r.phi_opt),
                    evaluations: Some(r.evaluations),
                    wall_s: Some(wall),
                    chi: None,
                });
            }
            Err(e) => {
                eprintln!("eta {eta}: skipped, {e}");
                rows.push(SweepRow {
                    eta,
                    delta: eta * eta,
                    phi_opt: None,
                    evaluations: None,
                    wall_s: None,
                    chi: None,
                });
            }
        }
    }
    let done: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].phi_opt.is_some()).collect();
    if !done.is_empty() {
        let phis: Vec<f64> = done.iter().map(|&i| rows[i].phi_opt.unwrap_or_default()).collect();
        let counts: Vec<f64> = done.iter().map(|&i| rows[i].evaluations.unwrap_or_default() as f64).collect();
        for (&i, chi) in done.iter().zip(chi_profile(&phis, &counts)?) {
            rows[i].chi = Some(chi);
        }
    }
    write_sweep(create(dir, "sweep.csv")?, &rows)?;
    Ok(rows)
}

/// Exact number of domino tilings of a `cols x rows` rectangle.
pub fn count(cols: usize, rows: usize, limit: usize) -> Result<u64, CliError> {
    if cols * rows > limit {
        return Err(CliError::Config(format!(
            "{cols}x{rows} has {} pixels, above the enumeration limit of {limit}; raise it with --limit if you mean it",
            cols * rows
        )));
    }
    if (cols * rows) % 2 == 1 {
        return Ok(0);
    }
    let grid = ApertureGrid::new(cols, rows, 0.5, 0.5)?;
    Ok(enumerate_tilings(&PixelRegion::full(&grid), |_: &[Domino]| {}))
}

/// What `pattern` evaluates.
pub enum PatternSource<'a> {
    Reference,
    Excitation(&'a Path),
    /// Tiling averaged over the reference; untiled pixels keep the
    /// reference weights.
    Tiling(&'a Path),
}

pub fn pattern(cfg: &RunConfig, source: PatternSource, dir: &Path) -> Result<MetricsRow, CliError> {
    let grid = cfg.grid()?;
    let reference = cfg.reference()?;
    let open = |p: &Path| File::open(p).map_err(|e| CliError::Config(format!("cannot open {}: {e}", p.display())));
    let excitation = match source {
        PatternSource::Reference => reference.clone(),
        PatternSource::Excitation(p) => read_excitation(open(p)?, &grid)?,
        PatternSource::Tiling(p) => {
            let tiling = read_tiling(open(p)?, &grid)?;
            let untiled = PixelRegion::from_indices(&grid, (0..grid.len()).filter(|&i| tiling.cluster_of(i).is_none()))?;
            hybrid_excitations(&grid, &tiling, &reference, &untiled)?
        }
    };
    let mask = cfg.mask.as_ref().map(|_| cfg.mask(&reference)).transpose()?;
    let (m, pat, far) = excitation_metrics(cfg, &excitation, mask.as_ref())?;
    write_pattern_files(dir, &pat, &far, cfg.steering()?)?;
    let row = MetricsRow {
        case: cfg.case(),
        metrics: m,
        evaluations: None,
        wall_s: None,
    };
    write_metrics(create(dir, "metrics.csv")?, std::slice::from_ref(&row))?;
    Ok(row)
}

/// Metrics recomputed from a pattern dump; off-lattice values come from
/// bilinear interpolation.
pub fn metrics_from_dump(
    dump: &Path,
    steer: (f64, f64),
    upsilon_w: Option<f64>,
    case: &str,
) -> Result<MetricsRow, CliError> {
    let file = File::open(dump).map_err(|e| CliError::Config(format!("cannot open {}: {e}", dump.display())))?;
    let pattern = read_pattern(file)?;
    let mut m = metrics(&pattern, &pattern, steer)?;
    if let Some(u) = upsilon_w {
        m = m.with_eirp(u);
    }
    Ok(MetricsRow {
        case: case.into(),
        metrics: m,
        evaluations: None,
        wall_s: None,
    })
}
