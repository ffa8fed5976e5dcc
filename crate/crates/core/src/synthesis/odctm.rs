//! Genetic search over admissible placements of one partition.
//!
//! Individuals are complete placements. Seeds come from structured
//! neighbour preferences (horizontal bricks, vertical bricks, alternating
//! 2x2 blocks) and random preferences, each completed by a bounded cover
//! search. Crossover keeps a rectangle of one parent, adds the compatible
//! dominoes of the other and repairs the rest; mutation flips two parallel
//! dominoes sharing a 2x2 square.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Admissibility, GaConfig, PartitionProblem, StepOutcome};
use crate::aperture::PixelRegion;
use crate::error::{Error, Result};
use crate::tiling::{CoverSearch, Domino, PlacementVisitor, DOWN, LEFT, RIGHT, UP};

const HORIZONTAL: [u8; 4] = [RIGHT, LEFT, DOWN, UP];
const VERTICAL: [u8; 4] = [DOWN, UP, RIGHT, LEFT];

// precomputed domino fields are kept while they fit in this many samples
const TABLE_LIMIT: usize = 1 << 23;

struct FirstAdmissible<'a> {
    admissible: &'a mut Admissibility,
    found: Option<Vec<Domino>>,
}

impl PlacementVisitor for FirstAdmissible<'_> {
    fn complete(&mut self, placement: &[Domino]) -> ControlFlow<()> {
        if self.admissible.check(placement) {
            let mut p = placement.to_vec();
            p.sort();
            self.found = Some(p);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }
}

struct Search<'a> {
    problem: &'a PartitionProblem<'a>,
    target: PixelRegion,
    margin: PixelRegion,
    admissible: Admissibility,
    base: Vec<Complex64>,
    fields: Option<HashMap<Domino, Vec<Complex64>>>,
    fitness: HashMap<Vec<Domino>, f64>,
    evaluations: u64,
    budget: u64,
    bounds: (usize, usize, usize, usize),
}

impl Search<'_> {
    fn complete(&mut self, fixed: &[Domino], preferences: Vec<[u8; 4]>) -> Option<Vec<Domino>> {
        let mut visitor = FirstAdmissible {
            admissible: &mut self.admissible,
            found: None,
        };
        CoverSearch::new(&self.target, &self.margin)
            .with_fixed(fixed)
            .with_preferences(preferences)
            .with_budget(self.budget)
            .run(&mut visitor);
        visitor.found
    }

    fn uniform(&self, order: [u8; 4]) -> Vec<[u8; 4]> {
        vec![order; self.problem.evaluator.grid().len()]
    }

    fn blocks(&self) -> Vec<[u8; 4]> {
        let grid = self.problem.evaluator.grid();
        (0..grid.len())
            .map(|p| {
                let (m, n) = grid.pixel(p);
                if ((m - 1) / 2 + (n - 1) / 2) % 2 == 0 {
                    HORIZONTAL
                } else {
                    VERTICAL
                }
            })
            .collect()
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> Vec<[u8; 4]> {
        (0..self.problem.evaluator.grid().len())
            .map(|_| {
                let mut o = [RIGHT, DOWN, LEFT, UP];
                o.shuffle(rng);
                o
            })
            .collect()
    }

    fn regenerate(&mut self, rng: &mut ChaCha8Rng) -> Option<Vec<Domino>> {
        for _ in 0..8 {
            let prefs = self.random(rng);
            if let Some(p) = self.complete(&[], prefs) {
                return Some(p);
            }
        }
        None
    }

    fn cost(&mut self, individual: &[Domino]) -> f64 {
        if let Some(&f) = self.fitness.get(individual) {
            return f;
        }
        self.evaluations += 1;
        let problem = self.problem;
        let phi = match &mut self.fields {
            Some(table) => {
                let mut field = self.base.clone();
                for d in individual {
                    let margin = &self.margin;
                    let delta = table.entry(*d).or_insert_with(|| {
                        let mut f = vec![Complex64::new(0.0, 0.0); problem.evaluator.samples()];
                        problem.domino_field(*d, margin, &mut f);
                        f
                    });
                    for (o, x) in field.iter_mut().zip(delta.iter()) {
                        *o += x;
                    }
                }
                problem.evaluator.phi_of_field(&field)
            }
            None => {
                let mut w = problem.current.weights();
                for p in self.target.indices() {
                    w[p] = Complex64::new(0.0, 0.0);
                }
                for d in individual {
                    let (a, b) = super::domino_weight(problem.reference, *d);
                    for p in d.pixels() {
                        w[p] = Complex64::from_polar(a, b);
                    }
                }
                problem.evaluator.phi(&w).expect("weights match the grid")
            }
        };
        self.fitness.insert(individual.to_vec(), phi);
        phi
    }

    fn crossover(&mut self, a: &[Domino], b: &[Domino], rng: &mut ChaCha8Rng) -> Option<Vec<Domino>> {
        let cols = self.problem.evaluator.grid().cols();
        let (c0, c1, r0, r1) = self.bounds;
        let (mut x0, mut x1) = (rng.gen_range(c0..=c1), rng.gen_range(c0..=c1));
        let (mut y0, mut y1) = (rng.gen_range(r0..=r1), rng.gen_range(r0..=r1));
        if x0 > x1 {
            std::mem::swap(&mut x0, &mut x1);
        }
        if y0 > y1 {
            std::mem::swap(&mut y0, &mut y1);
        }
        let inside = |p: usize| (x0..=x1).contains(&(p % cols)) && (y0..=y1).contains(&(p / cols));
        let kept: Vec<Domino> = a.iter().copied().filter(|d| inside(d.first()) && inside(d.second())).collect();
        let mut taken = vec![false; self.problem.evaluator.grid().len()];
        for d in &kept {
            for p in d.pixels() {
                taken[p] = true;
            }
        }
        let mut mixed = kept.clone();
        for d in b {
            if d.pixels().iter().all(|&p| !taken[p]) {
                for p in d.pixels() {
                    taken[p] = true;
                }
                mixed.push(*d);
            }
        }
        let prefs = self.random(rng);
        if let Some(child) = self.complete(&mixed, prefs.clone()) {
            return Some(child);
        }
        self.complete(&kept, prefs)
    }

    fn mutate(&self, individual: &mut Vec<Domino>, rate: f64, rng: &mut ChaCha8Rng) {
        if rate <= 0.0 {
            return;
        }
        let grid = self.problem.evaluator.grid();
        let cols = grid.cols();
        let mut changed = false;
        for i in 0..individual.len() {
            if !rng.gen_bool(rate) {
                continue;
            }
            let d = individual[i];
            let p = d.first();
            // the partner completes a 2x2 square below/right of `d`
            let (partner, flipped) = if d.is_horizontal() {
                if p / cols + 1 >= grid.rows() {
                    continue;
                }
                (Domino::new(p + cols, p + cols + 1), [Domino::new(p, p + cols), Domino::new(p + 1, p + cols + 1)])
            } else {
                if p % cols + 1 >= cols {
                    continue;
                }
                (Domino::new(p + 1, p + cols + 1), [Domino::new(p, p + 1), Domino::new(p + cols, p + cols + 1)])
            };
            let Some(j) = individual.iter().position(|&e| e == partner) else {
                continue;
            };
            if flipped.iter().any(|f| f.pixels().iter().all(|&x| !self.target.contains(x))) {
                continue;
            }
            individual[i] = flipped[0];
            individual[j] = flipped[1];
            changed = true;
        }
        if changed {
            individual.sort();
        }
    }
}

fn tournament(population: &[(Vec<Domino>, f64)], rng: &mut ChaCha8Rng) -> usize {
    let a = rng.gen_range(0..population.len());
    let b = rng.gen_range(0..population.len());
    if population[b].1 < population[a].1 {
        b
    } else {
        a
    }
}

// lower cost wins; equal costs go to the lexicographically smaller placement
fn better(a: &(Vec<Domino>, f64), b: &(Vec<Domino>, f64)) -> bool {
    a.1 < b.1 || (a.1 == b.1 && a.0 < b.0)
}

fn first_best(population: &[(Vec<Domino>, f64)]) -> usize {
    let mut best = 0;
    for (i, x) in population.iter().enumerate() {
        if better(x, &population[best]) {
            best = i;
        }
    }
    best
}

/// Genetic search of one partition. `evaluations` counts distinct
/// placements whose cost was computed.
pub fn o_dctm_step(problem: &PartitionProblem, ga: &GaConfig, rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
    ga.validate()?;
    let (target, margin) = problem.regions()?;
    let grid = problem.evaluator.grid();
    let cols = grid.cols();
    let area = target.union(&margin);
    let (mut c0, mut c1, mut r0, mut r1) = (usize::MAX, 0, usize::MAX, 0);
    for p in area.indices() {
        let (c, r) = (p % cols, p / cols);
        (c0, c1, r0, r1) = (c0.min(c), c1.max(c), r0.min(r), r1.max(r));
    }
    let candidates = area.count() * 2;
    let fields = (candidates * problem.evaluator.samples() <= TABLE_LIMIT).then(HashMap::new);
    let infeasible = || Error::Infeasible {
        partition: problem.index,
        reason: "no admissible placement found".into(),
    };
    let mut search = Search {
        problem,
        admissible: Admissibility::new(problem.untiled, &target, &margin),
        base: problem.base_field(&target)?,
        budget: 2000 + 200 * target.count() as u64,
        target,
        margin,
        fields,
        fitness: HashMap::new(),
        evaluations: 0,
        bounds: (c0, c1, r0, r1),
    };

    let mut population: Vec<(Vec<Domino>, f64)> = Vec::with_capacity(ga.population);
    for s in 0..ga.population {
        let prefs = match s {
            0 => search.uniform(HORIZONTAL),
            1 => search.uniform(VERTICAL),
            2 => search.blocks(),
            _ => search.random(rng),
        };
        let individual = match search.complete(&[], prefs) {
            Some(p) => p,
            None => search.regenerate(rng).ok_or_else(infeasible)?,
        };
        let f = search.cost(&individual);
        population.push((individual, f));
    }
    let mut best = population[first_best(&population)].clone();

    for _ in 1..ga.generations {
        let elite = first_best(&population);
        let mut next = vec![population[elite].clone()];
        while next.len() < ga.population {
            let a = tournament(&population, rng);
            let b = tournament(&population, rng);
            let mut child = if rng.gen_bool(ga.crossover) {
                let (pa, pb) = (population[a].0.clone(), population[b].0.clone());
                match search.crossover(&pa, &pb, rng) {
                    Some(c) => c,
                    None => search.regenerate(rng).unwrap_or(pa),
                }
            } else {
                population[a].0.clone()
            };
            search.mutate(&mut child, ga.mutation, rng);
            // a child seen before is swapped for a random immigrant
            if search.fitness.contains_key(&child) {
                if let Some(c) = search.regenerate(rng) {
                    child = c;
                }
            }
            let f = search.cost(&child);
            next.push((child, f));
        }
        population = next;
        let i = first_best(&population);
        if better(&population[i], &best) {
            best = population[i].clone();
        }
    }

    Ok(StepOutcome {
        placement: best.0,
        phi: best.1,
        evaluations: search.evaluations,
    })
}
