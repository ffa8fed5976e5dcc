use std::collections::VecDeque;
use std::f64::consts::PI;

use super::pattern::{PointPower, PowerPattern};
use crate::error::{Error, Result};

/// Scalar figures of merit of one pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternMetrics {
    pub sll_db: f64,
    pub d_dbi: f64,
    pub hpbw_az_deg: f64,
    pub hpbw_el_deg: f64,
    pub eirp_dbw: Option<f64>,
    pub phi: Option<f64>,
}

impl PatternMetrics {
    /// Adds the peak EIRP for `upsilon` watts of input power.
    pub fn with_eirp(mut self, upsilon: f64) -> Self {
        self.eirp_dbw = Some(self.d_dbi + 10.0 * upsilon.log10());
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = Some(phi);
        self
    }
}

/// Linear directivity `4 pi peak / sum P / sqrt(1 - u^2 - v^2) du dv`.
pub fn directivity(pattern: &PowerPattern, peak: f64) -> f64 {
    let lat = pattern.lattice();
    let p = pattern.values();
    let mut total = 0.0;
    for i in lat.disk() {
        let (u, v) = lat.position(i);
        let c = 1.0 - u * u - v * v;
        if c >= 1e-9 {
            total += p[i] / c.sqrt();
        }
    }
    4.0 * PI * peak / (total * lat.du() * lat.dv())
}

/// Half-power widths in degrees on the `u` and `v` cuts through `steer`.
///
/// Crossings are bracketed by walking outwards in steps of `step` and then
/// bisected.
pub fn hpbw<P: PointPower + ?Sized>(point: &P, steer: (f64, f64), step: f64) -> Result<(f64, f64)> {
    let (u0, v0) = steer;
    let half = point.power_at(u0, v0) / 2.0;
    if !(half > 0.0) {
        return Err(Error::Resolution(format!("no power at the beam direction ({u0}, {v0})")));
    }
    let crossing = |du: f64, dv: f64| -> Result<f64> {
        let f = |t: f64| point.power_at(u0 + t * du, v0 + t * dv);
        let mut t = 0.0;
        loop {
            let next = t + step;
            let (u, v) = (u0 + next * du, v0 + next * dv);
            if u * u + v * v > 1.0 {
                return Err(Error::Resolution(format!(
                    "half-power point not reached before the visible edge from ({u0}, {v0})"
                )));
            }
            if f(next) < half {
                let (mut lo, mut hi) = (t, next);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) < half {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok(0.5 * (lo + hi));
            }
            t = next;
        }
    };
    let angle = |s: f64| s.clamp(-1.0, 1.0).asin();
    let (u_hi, u_lo) = (u0 + crossing(1.0, 0.0)?, u0 - crossing(-1.0, 0.0)?);
    let (v_hi, v_lo) = (v0 + crossing(0.0, 1.0)?, v0 - crossing(0.0, -1.0)?);
    Ok((
        (angle(u_hi) - angle(u_lo)).to_degrees(),
        (angle(v_hi) - angle(v_lo)).to_degrees(),
    ))
}

const NEIGHBORS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

fn lattice_neighbors(pattern: &PowerPattern, index: usize) -> impl Iterator<Item = usize> + '_ {
    let lat = pattern.lattice();
    let (k, l) = lat.cell(index);
    NEIGHBORS.iter().filter_map(move |&(a, b)| {
        let (k2, l2) = (k as i64 + a, l as i64 + b);
        if k2 < 0 || l2 < 0 || k2 >= lat.nu() as i64 || l2 >= lat.nv() as i64 {
            return None;
        }
        let j = lat.index(k2 as usize, l2 as usize);
        lat.in_disk(j).then_some(j)
    })
}

/// Samples of the main lobe: everything reachable from the beam peak by
/// non-increasing steps between neighbouring samples.
pub fn main_lobe(pattern: &PowerPattern, steer: (f64, f64)) -> Vec<bool> {
    let lat = pattern.lattice();
    let p = pattern.values();
    let (k, l) = lat.nearest(steer.0, steer.1);
    let mut start = lat.index(k, l);
    // climb to the local maximum
    loop {
        match lattice_neighbors(pattern, start).max_by(|a, b| p[*a].total_cmp(&p[*b])) {
            Some(j) if p[j] > p[start] => start = j,
            _ => break,
        }
    }
    let mut inside = vec![false; lat.len()];
    inside[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for j in lattice_neighbors(pattern, i) {
            if !inside[j] && p[j] <= p[i] {
                inside[j] = true;
                queue.push_back(j);
            }
        }
    }
    inside
}

/// Highest sidelobe relative to the power at `steer`, in dB.
///
/// Candidate lobes are the lattice local maxima outside the main lobe; the
/// strongest few are polished on `point` by a compass search.
pub fn sidelobe_level<P: PointPower + ?Sized>(pattern: &PowerPattern, point: &P, steer: (f64, f64)) -> f64 {
    let lat = pattern.lattice();
    let p = pattern.values();
    let lobe = main_lobe(pattern, steer);
    let mut peaks: Vec<usize> = lat
        .disk()
        .into_iter()
        .filter(|&i| !lobe[i] && lattice_neighbors(pattern, i).all(|j| lobe[j] || p[j] <= p[i]))
        .collect();
    peaks.sort_by(|a, b| p[*b].total_cmp(&p[*a]));
    let reference = point.power_at(steer.0, steer.1);
    let mut best = 0.0f64;
    for &i in peaks.iter().take(8) {
        let (u, v) = lat.position(i);
        best = best.max(p[i]).max(polish(point, u, v, lat.du()));
    }
    if best > 0.0 {
        10.0 * (best / reference).log10()
    } else {
        f64::NEG_INFINITY
    }
}

fn polish<P: PointPower + ?Sized>(point: &P, u: f64, v: f64, du: f64) -> f64 {
    let (su, sv) = (u, v);
    let (mut u, mut v) = (u, v);
    let mut value = point.power_at(u, v);
    let mut step = du / 2.0;
    while step > du * 1e-6 {
        let mut moved = false;
        for (a, b) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let (cu, cv) = (u + a * step, v + b * step);
            if cu * cu + cv * cv > 1.0 {
                continue;
            }
            let c = point.power_at(cu, cv);
            if c > value {
                (u, v, value) = (cu, cv, c);
                moved = true;
            }
        }
        if !moved {
            step /= 2.0;
        }
        if (u - su).hypot(v - sv) > 2.0 * du {
            // wandered into a different lobe: keep the sample value
            return point.power_at(su, sv);
        }
    }
    value
}

/// SLL, directivity and beamwidths of `pattern`, with `point` giving exact
/// values off the lattice (the pattern itself may serve).
pub fn metrics<P: PointPower + ?Sized>(pattern: &PowerPattern, point: &P, steer: (f64, f64)) -> Result<PatternMetrics> {
    let lat = pattern.lattice();
    let peak = point.power_at(steer.0, steer.1);
    if !(peak > 0.0) {
        return Err(Error::Resolution(format!("no power at the beam direction {steer:?}")));
    }
    let (az, el) = hpbw(point, steer, lat.du().min(lat.dv()) / 8.0)?;
    let width = |deg: f64, centre: f64| {
        let a = centre.clamp(-1.0, 1.0).asin();
        (a + deg.to_radians() / 2.0).sin() - (a - deg.to_radians() / 2.0).sin()
    };
    let (wu, wv) = (width(az, steer.0), width(el, steer.1));
    if wu < 8.0 * lat.du() || wv < 8.0 * lat.dv() {
        return Err(Error::Resolution(format!(
            "main lobe spans {:.1}x{:.1} samples, need at least 8; use a finer uv lattice",
            wu / lat.du(),
            wv / lat.dv()
        )));
    }
    Ok(PatternMetrics {
        sll_db: sidelobe_level(pattern, point, steer),
        d_dbi: 10.0 * directivity(pattern, peak).log10(),
        hpbw_az_deg: az,
        hpbw_el_deg: el,
        eirp_dbw: None,
        phi: None,
    })
}
