use std::collections::HashMap;
use std::ops::ControlFlow;

use num_complex::Complex64;

use super::{Admissibility, PartitionProblem, StepOutcome};
use crate::aperture::PixelRegion;
use crate::error::{Error, Result};
use crate::tiling::{CoverSearch, Domino, PlacementVisitor};

/// Keeps one running field per search depth so each leaf costs a single
/// cost evaluation.
struct Exhaustive<'a> {
    problem: &'a PartitionProblem<'a>,
    fields: HashMap<Domino, Vec<Complex64>>,
    levels: Vec<Vec<Complex64>>,
    depth: usize,
    margin: &'a PixelRegion,
    admissible: Admissibility,
    evaluations: u64,
    best: Option<(f64, Vec<Domino>)>,
}

impl PlacementVisitor for Exhaustive<'_> {
    fn place(&mut self, domino: Domino) {
        let problem = self.problem;
        let margin = self.margin;
        let delta = self.fields.entry(domino).or_insert_with(|| {
            let mut f = vec![Complex64::new(0.0, 0.0); problem.evaluator.samples()];
            problem.domino_field(domino, margin, &mut f);
            f
        });
        let (lower, upper) = self.levels.split_at_mut(self.depth + 1);
        for ((o, a), b) in upper[0].iter_mut().zip(&lower[self.depth]).zip(delta.iter()) {
            *o = a + b;
        }
        self.depth += 1;
    }

    fn unplace(&mut self, _domino: Domino) {
        self.depth -= 1;
    }

    fn complete(&mut self, placement: &[Domino]) -> ControlFlow<()> {
        if self.admissible.check(placement) {
            self.evaluations += 1;
            let phi = self.problem.evaluator.phi_of_field(&self.levels[self.depth]);
            if self.best.as_ref().map_or(true, |(b, _)| phi < *b) {
                self.best = Some((phi, placement.to_vec()));
            }
        }
        ControlFlow::Continue(())
    }
}

/// Exhaustive search over every admissible soft-boundary placement of the
/// partition; the first placement reaching the minimum cost wins.
pub fn e_dctm_step(problem: &PartitionProblem) -> Result<StepOutcome> {
    let (target, margin) = problem.regions()?;
    let base = problem.base_field(&target)?;
    let depth = target.count() + 1;
    let mut levels = vec![vec![Complex64::new(0.0, 0.0); base.len()]; depth];
    levels[0] = base;
    let mut visitor = Exhaustive {
        problem,
        fields: HashMap::new(),
        levels,
        depth: 0,
        margin: &margin,
        admissible: Admissibility::new(problem.untiled, &target, &margin),
        evaluations: 0,
        best: None,
    };
    CoverSearch::new(&target, &margin).run(&mut visitor);
    let evaluations = visitor.evaluations;
    match visitor.best {
        Some((phi, placement)) => Ok(StepOutcome {
            placement,
            phi,
            evaluations,
        }),
        None => Err(Error::Infeasible {
            partition: problem.index,
            reason: "no admissible placement".into(),
        }),
    }
}
