use std::f64::consts::PI;

use num_complex::Complex64;

use crate::aperture::ApertureGrid;
use crate::error::{Error, Result};
use crate::radiation::{ElementModel, Mask, UvTransform};

/// Mask-matching cost of candidate excitations on the visible samples of a
/// mask lattice.
///
/// Besides whole-excitation evaluation it exposes per-element fields so the
/// optimisers can update a running field one domino at a time.
pub struct CostEvaluator {
    grid: ApertureGrid,
    transform: UvTransform,
    disk: Vec<usize>,
    gain2: Vec<f64>,
    psi: Vec<f64>,
    psi_sum: f64,
    // exp(j 2 pi x_m u_k) and exp(j 2 pi y_n v_l) over the disk samples' axes
    ex: Vec<Complex64>,
    ey: Vec<Complex64>,
    cells: Vec<(usize, usize)>,
}

impl std::fmt::Debug for CostEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CostEvaluator")
            .field("grid", &self.grid)
            .field("samples", &self.disk.len())
            .finish()
    }
}

impl CostEvaluator {
    pub fn new(grid: &ApertureGrid, model: ElementModel, mask: &Mask) -> Result<Self> {
        let lat = mask.lattice();
        let disk = lat.disk();
        if disk.is_empty() {
            return Err(Error::Config("mask lattice has no visible samples".into()));
        }
        let gain2 = disk
            .iter()
            .map(|&i| {
                let (u, v) = lat.position(i);
                model.power(u, v)
            })
            .collect();
        let psi: Vec<f64> = disk.iter().map(|&i| mask.values()[i]).collect();
        let psi_sum = psi.iter().sum();
        let ex = (1..=grid.cols())
            .flat_map(|m| (0..lat.nu()).map(move |k| (m, k)))
            .map(|(m, k)| Complex64::from_polar(1.0, 2.0 * PI * grid.x(m) * lat.u(k)))
            .collect();
        let ey = (1..=grid.rows())
            .flat_map(|n| (0..lat.nv()).map(move |l| (n, l)))
            .map(|(n, l)| Complex64::from_polar(1.0, 2.0 * PI * grid.y(n) * lat.v(l)))
            .collect();
        let cells = disk.iter().map(|&i| lat.cell(i)).collect();
        Ok(Self {
            grid: grid.clone(),
            transform: UvTransform::new(grid, lat),
            disk,
            gain2,
            psi,
            psi_sum,
            ex,
            ey,
            cells,
        })
    }

    pub fn grid(&self) -> &ApertureGrid {
        &self.grid
    }

    /// Visible samples per field vector.
    pub fn samples(&self) -> usize {
        self.disk.len()
    }

    /// Array factor of `weights` on the visible samples.
    pub fn field(&self, weights: &[Complex64]) -> Result<Vec<Complex64>> {
        let full = self.transform.field(weights)?;
        Ok(self.disk.iter().map(|&i| full[i]).collect())
    }

    /// Adds `weight` times the field of element `pixel` to `out`.
    pub fn add_element(&self, pixel: usize, weight: Complex64, out: &mut [Complex64]) {
        let (m, n) = self.grid.pixel(pixel);
        let lat = self.transform.lattice();
        let ex = &self.ex[(m - 1) * lat.nu()..m * lat.nu()];
        let ey = &self.ey[(n - 1) * lat.nv()..n * lat.nv()];
        for (o, &(k, l)) in out.iter_mut().zip(&self.cells) {
            *o += weight * ex[k] * ey[l];
        }
    }

    /// Cost of a field on the visible samples.
    pub fn phi_of_field(&self, field: &[Complex64]) -> f64 {
        let mut excess = 0.0;
        for ((f, g), psi) in field.iter().zip(&self.gain2).zip(&self.psi) {
            let p = g * f.norm_sqr();
            if p > *psi {
                excess += p - psi;
            }
        }
        excess / self.psi_sum
    }

    /// Cost of a whole excitation.
    pub fn phi(&self, weights: &[Complex64]) -> Result<f64> {
        Ok(self.phi_of_field(&self.field(weights)?))
    }
}
