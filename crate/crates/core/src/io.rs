//! CSV import and export.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! written file reads back bit for bit.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use crate::aperture::ApertureGrid;
use crate::error::{Error, Result};
use crate::radiation::{ExcitationField, PowerPattern, UvLattice};
use crate::tiling::Tiling;

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r)
}

fn check_header<R: Read>(rd: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = rd.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Format(format!(
            "expected header {:?}, found {:?}",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = record.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::Format(format!("line {line}: cannot parse column {} value {raw:?}", i + 1)))
}

/// Rows `m,n,cluster` in raster order; the cluster is blank when untiled.
pub fn write_tiling<W: Write>(out: W, tiling: &Tiling) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["m", "n", "cluster"])?;
    let cols = tiling.cols();
    for (i, c) in tiling.clusters().iter().enumerate() {
        let (m, n) = (i % cols + 1, i / cols + 1);
        let c = if *c == 0 { String::new() } else { c.to_string() };
        w.write_record([m.to_string(), n.to_string(), c])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_tiling<R: Read>(input: R, grid: &ApertureGrid) -> Result<Tiling> {
    let mut rd = reader(input);
    check_header(&mut rd, &["m", "n", "cluster"])?;
    let mut cluster = vec![None; grid.len()];
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let (m, n): (usize, usize) = (field(&rec, 0, line)?, field(&rec, 1, line)?);
        let idx = grid.index(m, n).map_err(|e| Error::Format(format!("line {line}: {e}")))?;
        let c = match rec.get(2).unwrap_or("") {
            "" => 0,
            _ => field::<u32>(&rec, 2, line)?,
        };
        if cluster[idx].replace(c).is_some() {
            return Err(Error::Format(format!("line {line}: pixel ({m},{n}) listed twice")));
        }
    }
    let cluster = missing(cluster, grid)?;
    Tiling::from_clusters(grid, cluster)
}

fn missing<T>(values: Vec<Option<T>>, grid: &ApertureGrid) -> Result<Vec<T>> {
    if let Some(i) = values.iter().position(Option::is_none) {
        let (m, n) = grid.pixel(i);
        return Err(Error::Format(format!("no row for element ({m},{n})")));
    }
    Ok(values.into_iter().map(Option::unwrap).collect())
}

/// Rows `m,n,alpha,beta_rad` in raster order.
pub fn write_excitation<W: Write>(out: W, grid: &ApertureGrid, exc: &ExcitationField) -> Result<()> {
    exc.check(grid)?;
    let mut w = writer(out);
    w.write_record(["m", "n", "alpha", "beta_rad"])?;
    for i in 0..grid.len() {
        let (m, n) = grid.pixel(i);
        w.write_record([
            m.to_string(),
            n.to_string(),
            exc.alpha()[i].to_string(),
            exc.beta()[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_excitation<R: Read>(input: R, grid: &ApertureGrid) -> Result<ExcitationField> {
    let mut rd = reader(input);
    check_header(&mut rd, &["m", "n", "alpha", "beta_rad"])?;
    let mut rows = vec![None; grid.len()];
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let (m, n): (usize, usize) = (field(&rec, 0, line)?, field(&rec, 1, line)?);
        let idx = grid.index(m, n).map_err(|e| Error::Format(format!("line {line}: {e}")))?;
        let pair: (f64, f64) = (field(&rec, 2, line)?, field(&rec, 3, line)?);
        if rows[idx].replace(pair).is_some() {
            return Err(Error::Format(format!("line {line}: element ({m},{n}) listed twice")));
        }
    }
    let rows = missing(rows, grid)?;
    let (alpha, beta) = rows.into_iter().unzip();
    ExcitationField::new(grid, alpha, beta).map_err(|e| Error::Format(e.to_string()))
}

/// Rows `cluster,alpha,beta_rad`, clusters numbered from 1.
pub fn write_cluster_weights<W: Write>(out: W, weights: &[(f64, f64)]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["cluster", "alpha", "beta_rad"])?;
    for (q, (a, b)) in weights.iter().enumerate() {
        w.write_record([(q + 1).to_string(), a.to_string(), b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `iteration,best_phi,evaluations`.
pub fn write_trace<W: Write>(out: W, trace: &[(usize, f64, u64)]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["iteration", "best_phi", "evaluations"])?;
    for (i, phi, t) in trace {
        w.write_record([i.to_string(), phi.to_string(), t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `angle_deg,power_db`.
pub fn write_cut<W: Write>(out: W, cut: &[(f64, f64)]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["angle_deg", "power_db"])?;
    for (a, p) in cut {
        w.write_record([a.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `u,v,power` over the whole lattice, `u` varying fastest.
pub fn write_pattern<W: Write>(out: W, pattern: &PowerPattern) -> Result<()> {
    let lat = pattern.lattice();
    let mut w = writer(out);
    w.write_record(["u", "v", "power"])?;
    for (i, p) in pattern.values().iter().enumerate() {
        let (u, v) = lat.position(i);
        w.write_record([u.to_string(), v.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pattern<R: Read>(input: R) -> Result<PowerPattern> {
    let mut rd = reader(input);
    check_header(&mut rd, &["u", "v", "power"])?;
    let mut us = BTreeSet::new();
    let mut values = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let u: f64 = field(&rec, 0, line)?;
        let _: f64 = field(&rec, 1, line)?;
        us.insert(u.to_bits());
        values.push(field::<f64>(&rec, 2, line)?);
    }
    let nu = us.len();
    if nu < 2 || values.len() % nu != 0 {
        return Err(Error::Format(format!(
            "{} samples do not form a lattice with {} distinct u values",
            values.len(),
            nu
        )));
    }
    let lattice = UvLattice::new(nu, values.len() / nu)?;
    PowerPattern::new(lattice, values).map_err(|e| Error::Format(e.to_string()))
}
