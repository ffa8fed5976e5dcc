#![allow(dead_code)]

use dctm_core::aperture::{ApertureGrid, PartitionScheme};
use dctm_core::radiation::{
    array_pattern, dolph_chebyshev_weights, enclosing_region, ElementModel, ExcitationField, Mask, MaskDefinition,
    UvLattice,
};
use dctm_core::synthesis::DctmConfig;

pub struct Scenario {
    pub grid: ApertureGrid,
    pub reference: ExcitationField,
    pub lattice: UvLattice,
    pub mask: Mask,
    pub model: ElementModel,
}

/// Chebyshev reference with a mask fitted to its main lobe: 0 dB inside
/// the -3 dB contour, -3 dB out to where the lobe meets `far_db`.
pub fn scenario(cols: usize, rows: usize, sll_db: f64, far_db: f64, uv: usize) -> Scenario {
    let grid = ApertureGrid::new(cols, rows, 0.5, 0.5).unwrap();
    let reference = dolph_chebyshev_weights(&grid, sll_db).unwrap();
    let model = ElementModel::Isotropic;
    let lattice = UvLattice::square(uv).unwrap();
    let pattern = array_pattern(&reference, &grid, model, lattice).unwrap();
    let peak = pattern.values().iter().cloned().fold(0.0, f64::max);
    let shape = (1.0 / (cols as f64 * 0.5), 1.0 / (rows as f64 * 0.5));
    let def = MaskDefinition {
        regions: vec![
            enclosing_region(&pattern, (0.0, 0.0), peak, -3.0, shape, 0.0),
            enclosing_region(&pattern, (0.0, 0.0), peak, far_db, shape, -3.0),
        ],
        far_db,
    };
    let mask = Mask::from_definition(lattice, &def, (0.0, 0.0), peak).unwrap();
    Scenario { grid, reference, lattice, mask, model }
}

impl Scenario {
    pub fn config(&self, part_cols: usize, part_rows: usize, eta_th: f64, seed: u64) -> DctmConfig {
        DctmConfig {
            scheme: PartitionScheme::new(&self.grid, part_cols, part_rows).unwrap(),
            eta_th,
            mask: self.mask.clone(),
            reference: self.reference.clone(),
            model: self.model,
            steering: (0.0, 0.0),
            ga: None,
            seed,
        }
    }
}
