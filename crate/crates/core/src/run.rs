//! Run configuration, binary tournament selection and the generational loop
//! shared by GP and PIPE. The two algorithms differ only in how the selected
//! parents become the next population.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::init::ramped_half_and_half;
use crate::problem::{Evaluator, ProblemSpec};
use crate::tree::ProgramTree;

/// Generator used for every run; seeded from [`RunConfig::seed`].
pub type RunRng = ChaCha8Rng;

pub const DEFAULT_MAX_GENERATIONS: usize = 200;
pub const DEFAULT_INTERNAL_NODE_BIAS: f64 = 0.9;
pub const DEFAULT_CROSSOVER_RETRIES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub pop_size: usize,
    pub max_generations: usize,
    /// Edge-count depth limit for every tree in the run.
    pub max_depth: usize,
    /// Re-picks of both crossover points after a depth violation.
    pub crossover_retries: usize,
    /// Chance of picking an internal crossover point when one exists.
    pub internal_node_bias: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(pop_size: usize, max_depth: usize, seed: u64) -> Self {
        Self {
            pop_size,
            max_generations: DEFAULT_MAX_GENERATIONS,
            max_depth,
            crossover_retries: DEFAULT_CROSSOVER_RETRIES,
            internal_node_bias: DEFAULT_INTERNAL_NODE_BIAS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "population size must be even and at least 2, got {}",
                self.pop_size
            )));
        }
        if !(0.0..=1.0).contains(&self.internal_node_bias) {
            return Err(Error::InvalidConfig(format!(
                "internal node bias must lie in [0, 1], got {}",
                self.internal_node_bias
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub tree: ProgramTree,
    pub fitness: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub success: bool,
    /// Fitness calls made, initial population included.
    pub evaluations: u64,
    pub generations_used: usize,
    pub best_fitness: f64,
    pub best_tree: ProgramTree,
}

/// Two uniform draws with replacement; the fitter wins, ties go to a fair coin.
///
/// # Panics
/// If `pop` is empty.
pub fn binary_tournament<'p, R: Rng + ?Sized>(pop: &'p [Individual], rng: &mut R) -> &'p Individual {
    &pop[tournament_index(pop, rng)]
}

pub(crate) fn tournament_index<R: Rng + ?Sized>(pop: &[Individual], rng: &mut R) -> usize {
    assert!(!pop.is_empty(), "tournament over an empty population");
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    let (fa, fb) = (pop[a].fitness, pop[b].fitness);
    if fa > fb {
        a
    } else if fb > fa {
        b
    } else if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}

/// Turns the selected parents into the next generation.
pub(crate) trait Variation {
    fn offspring(&mut self, parents: Vec<ProgramTree>, rng: &mut RunRng) -> Vec<ProgramTree>;
}

/// Initialise, then alternate selection, variation and whole-population
/// replacement until the optimum appears or the generation cap is reached.
pub(crate) fn run_generational(
    spec: &ProblemSpec,
    cfg: &RunConfig,
    variation: &mut dyn Variation,
) -> Result<RunResult> {
    cfg.validate()?;
    let mut rng = RunRng::seed_from_u64(cfg.seed);
    let mut eval = Evaluator::new(spec);
    let optimum = spec.optimum_fitness();

    let mut pop: Vec<Individual> =
        ramped_half_and_half(spec.primitive_set(), cfg.pop_size, cfg.max_depth, &mut rng)
            .into_iter()
            .map(|tree| {
                let fitness = eval.evaluate(&tree);
                Individual { tree, fitness }
            })
            .collect();

    let mut generation = 0;
    loop {
        let best = pop
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.fitness.total_cmp(&b.fitness).then(j.cmp(i)))
            .map(|(i, _)| i)
            .expect("population is nonempty");
        let success = pop[best].fitness >= optimum;
        if success || generation >= cfg.max_generations {
            return Ok(RunResult {
                success,
                evaluations: eval.evaluations(),
                generations_used: generation,
                best_fitness: pop[best].fitness,
                best_tree: pop.swap_remove(best).tree,
            });
        }

        let parents: Vec<ProgramTree> = (0..cfg.pop_size)
            .map(|_| pop[tournament_index(&pop, &mut rng)].tree.clone())
            .collect();
        drop(std::mem::take(&mut pop));
        let children = variation.offspring(parents, &mut rng);
        debug_assert_eq!(children.len(), cfg.pop_size);
        pop = children
            .into_iter()
            .map(|tree| {
                debug_assert!(tree.depth() <= cfg.max_depth);
                let fitness = eval.evaluate(&tree);
                Individual { tree, fitness }
            })
            .collect();
        generation += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Primitive;

    fn pop_with(fitness: &[f64]) -> Vec<Individual> {
        fitness
            .iter()
            .map(|&f| Individual {
                tree: ProgramTree::leaf(Primitive::Positive(1)),
                fitness: f,
            })
            .collect()
    }

    #[test]
    fn tournament_of_one() {
        let pop = pop_with(&[3.0]);
        let mut rng = RunRng::seed_from_u64(0);
        for _ in 0..10 {
            assert_eq!(binary_tournament(&pop, &mut rng).fitness, 3.0);
        }
    }

    #[test]
    fn tournament_best_probability() {
        // P(best chosen) = 1 - (1 - 1/n)^2 with draws taken with replacement.
        let n = 10;
        let mut f = vec![0.0; n];
        f[n - 1] = 1.0;
        let pop = pop_with(&f);
        let mut rng = RunRng::seed_from_u64(11);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| tournament_index(&pop, &mut rng) == n - 1)
            .count();
        let p = 2.0 / n as f64 - 1.0 / (n * n) as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let observed = hits as f64 / trials as f64;
        assert!((observed - p).abs() < 3.0 * sigma, "{observed} vs {p}");
    }

    #[test]
    fn tournament_ties_uniform() {
        let n = 8;
        let pop = pop_with(&vec![1.0; n]);
        let mut rng = RunRng::seed_from_u64(12);
        let trials = 100_000;
        let mut counts = vec![0usize; n];
        for _ in 0..trials {
            counts[tournament_index(&pop, &mut rng)] += 1;
        }
        let expected = trials as f64 / n as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99.9th percentile of chi-square with 7 degrees of freedom.
        assert!(chi2 < 24.32, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::new(3, 2, 0).validate().is_err());
        assert!(RunConfig::new(0, 2, 0).validate().is_err());
        assert!(RunConfig::new(2, 2, 0).validate().is_ok());
        let mut cfg = RunConfig::new(4, 2, 0);
        cfg.internal_node_bias = 1.5;
        assert!(cfg.validate().is_err());
    }
}
