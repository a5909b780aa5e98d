//! Experiment harness: seeded batches of runs, bisection population sizing,
//! scalability sweeps and report files.

mod report;
mod sweep;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gp::run_gp;
use crate::pipe::run_pipe;
use crate::problem::ProblemSpec;
use crate::run::{
    RunConfig, RunResult, DEFAULT_CROSSOVER_RETRIES, DEFAULT_INTERNAL_NODE_BIAS,
    DEFAULT_MAX_GENERATIONS,
};

pub use report::{emit_report, read_csv, write_csv, write_svg, CsvRecord, CSV_HEADER};
pub use sweep::{scalability_sweep, PlanKind, SweepPlan, SweepRow};

pub const DEFAULT_RUNS: usize = 30;
pub const DEFAULT_START_POP: usize = 16;
pub const DEFAULT_POP_CEILING: usize = 1 << 20;

/// Runs are launched in chunks of 1, 2, 4 and then 8; a batch stops after the
/// first chunk containing a failure. The schedule never depends on the thread
/// count, so results are identical however many threads run them.
const BATCH_CHUNK: usize = 8;

/// Above this population size the runs of a chunk execute one at a time.
const PARALLEL_POP_LIMIT: usize = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Gp,
    Pipe,
}

impl Algorithm {
    pub fn run(self, spec: &ProblemSpec, cfg: &RunConfig) -> Result<RunResult> {
        match self {
            Algorithm::Gp => run_gp(spec, cfg),
            Algorithm::Pipe => run_pipe(spec, cfg),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Gp => "gp",
            Algorithm::Pipe => "pipe",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gp" => Ok(Algorithm::Gp),
            "pipe" => Ok(Algorithm::Pipe),
            other => Err(Error::InvalidConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Everything about a run except its population size and seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SizingSettings {
    /// Runs per batch; all must succeed.
    pub runs: usize,
    pub start_pop: usize,
    /// Sizing gives up once doubling would pass this population size.
    pub pop_ceiling: usize,
    pub max_generations: usize,
    pub max_depth: usize,
    pub internal_node_bias: f64,
    pub crossover_retries: usize,
}

impl SizingSettings {
    pub fn new(max_depth: usize) -> Self {
        Self {
            runs: DEFAULT_RUNS,
            start_pop: DEFAULT_START_POP,
            pop_ceiling: DEFAULT_POP_CEILING,
            max_generations: DEFAULT_MAX_GENERATIONS,
            max_depth,
            internal_node_bias: DEFAULT_INTERNAL_NODE_BIAS,
            crossover_retries: DEFAULT_CROSSOVER_RETRIES,
        }
    }

    pub fn run_config(&self, pop_size: usize, seed: u64) -> RunConfig {
        RunConfig {
            pop_size,
            max_generations: self.max_generations,
            max_depth: self.max_depth,
            crossover_retries: self.crossover_retries,
            internal_node_bias: self.internal_node_bias,
            seed,
        }
    }
}

/// Outcome of one batch of runs at a fixed population size.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub pop_size: usize,
    pub all_succeeded: bool,
    /// Results ordered by run index. A failing batch may stop early, so this
    /// can be shorter than the requested run count.
    pub results: Vec<RunResult>,
}

impl Batch {
    pub fn successes(&self) -> usize {
        self.results.iter().filter(|r| r.success).count()
    }

    pub fn success_rate(&self, runs: usize) -> f64 {
        self.successes() as f64 / runs as f64
    }

    /// Mean evaluations over the runs held.
    pub fn avg_evaluations(&self) -> f64 {
        if self.results.is_empty() {
            return f64::NAN;
        }
        self.results.iter().map(|r| r.evaluations as f64).sum::<f64>() / self.results.len() as f64
    }
}

/// Runs `n_runs` seeded runs (seed = `seed_base` + run index) at `pop_size`.
pub fn batch_success(
    spec: &ProblemSpec,
    algo: Algorithm,
    settings: &SizingSettings,
    pop_size: usize,
    n_runs: usize,
    seed_base: u64,
) -> Result<Batch> {
    settings.run_config(pop_size, seed_base).validate()?;
    let mut results = Vec::with_capacity(n_runs);
    let mut all_succeeded = true;
    let one = |i: usize| {
        let cfg = settings.run_config(pop_size, seed_base.wrapping_add(i as u64));
        algo.run(spec, &cfg)
    };
    let mut chunk_start = 0;
    let mut chunk_len = 1;
    while chunk_start < n_runs {
        let chunk_end = (chunk_start + chunk_len).min(n_runs);
        let chunk: Vec<RunResult> = if pop_size > PARALLEL_POP_LIMIT {
            (chunk_start..chunk_end).map(one).collect::<Result<_>>()?
        } else {
            (chunk_start..chunk_end).into_par_iter().map(one).collect::<Result<_>>()?
        };
        chunk_start = chunk_end;
        chunk_len = (chunk_len * 2).min(BATCH_CHUNK);
        let failed = chunk.iter().any(|r| !r.success);
        results.extend(chunk);
        if failed {
            all_succeeded = false;
            break;
        }
    }
    Ok(Batch {
        pop_size,
        all_succeeded,
        results,
    })
}

/// Seed base for the batch tested at `pop_size`.
pub fn size_seed(seed_base: u64, pop_size: usize) -> u64 {
    // splitmix64 finaliser
    let mut z = seed_base ^ (pop_size as u64).rotate_left(32);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Nearest even integer, odd values rounding up.
pub fn round_even(n: usize) -> usize {
    n + n % 2
}

/// Result of a bracket-and-bisect search.
#[derive(Clone, Debug, PartialEq)]
pub struct Bisection<T> {
    /// Smallest size found to succeed.
    pub size: usize,
    /// Largest size known (or, for the floor of 2, assumed) to fail.
    pub known_failing: usize,
    pub outcome: T,
    /// Every size tested, in order, with its verdict.
    pub tested: Vec<(usize, bool)>,
}

/// Search gave up at the ceiling.
#[derive(Clone, Debug, PartialEq)]
pub struct CeilingHit<T> {
    pub ceiling: usize,
    pub last_size: usize,
    pub last_outcome: T,
    pub tested: Vec<(usize, bool)>,
}

/// Doubling from `start` until a size succeeds, then bisection until the
/// bracket is at most 10% of the failing bound (and so of the succeeding
/// size too). Sizes are kept even.
pub fn bisect_sizes<T>(
    start: usize,
    ceiling: usize,
    mut trial: impl FnMut(usize) -> Result<(bool, T)>,
) -> Result<std::result::Result<Bisection<T>, CeilingHit<T>>> {
    let mut tested = Vec::new();
    let mut n = round_even(start.max(2));
    let mut lo = 2;
    let mut last: Option<T> = None;
    let mut best = loop {
        if n > ceiling {
            let last_outcome = last.expect("start must not exceed the ceiling");
            return Ok(Err(CeilingHit {
                ceiling,
                last_size: lo,
                last_outcome,
                tested,
            }));
        }
        let (ok, outcome) = trial(n)?;
        tested.push((n, ok));
        if ok {
            break outcome;
        }
        lo = n;
        last = Some(outcome);
        n *= 2;
    };
    let mut hi = n;
    while 10 * (hi - lo) > lo {
        let mid = round_even((lo + hi) / 2);
        if mid <= lo || mid >= hi {
            break;
        }
        let (ok, outcome) = trial(mid)?;
        tested.push((mid, ok));
        if ok {
            hi = mid;
            best = outcome;
        } else {
            lo = mid;
        }
    }
    Ok(Ok(Bisection {
        size: hi,
        known_failing: lo,
        outcome: best,
        tested,
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizingResult {
    pub min_pop_size: usize,
    /// Mean evaluations over the successful batch at `min_pop_size`.
    pub avg_evaluations: f64,
    pub runs: Vec<RunResult>,
    pub known_failing: usize,
    pub tested: Vec<(usize, bool)>,
}

/// Sizing report for a search that hit the population ceiling.
#[derive(Clone, Debug, PartialEq)]
pub struct SizingFailure {
    pub ceiling: usize,
    pub last_pop_size: usize,
    pub last_batch: Batch,
    pub runs: usize,
    pub tested: Vec<(usize, bool)>,
}

impl fmt::Display for SizingFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no population up to {} solved all {} runs (largest tried {}: {} of {} executed runs succeeded)",
            self.ceiling,
            self.runs,
            self.last_pop_size,
            self.last_batch.successes(),
            self.last_batch.results.len()
        )
    }
}

/// Bisection population sizing for one algorithm on one problem.
///
/// Every tested size gets a fresh batch seeded from `seed_base` and the size.
/// Hitting the ceiling yields [`Error::SizingCeiling`].
pub fn bisect_population_size(
    spec: &ProblemSpec,
    algo: Algorithm,
    settings: &SizingSettings,
    seed_base: u64,
) -> Result<SizingResult> {
    if settings.runs == 0 {
        return Err(Error::InvalidConfig("sizing needs at least one run per batch".into()));
    }
    if round_even(settings.start_pop.max(2)) > settings.pop_ceiling {
        return Err(Error::InvalidConfig(format!(
            "starting population {} exceeds the ceiling {}",
            settings.start_pop, settings.pop_ceiling
        )));
    }
    let search = bisect_sizes(settings.start_pop, settings.pop_ceiling, |n| {
        let batch = batch_success(spec, algo, settings, n, settings.runs, size_seed(seed_base, n))?;
        Ok((batch.all_succeeded, batch))
    })?;
    match search {
        Ok(b) => Ok(SizingResult {
            min_pop_size: b.size,
            avg_evaluations: b.outcome.avg_evaluations(),
            runs: b.outcome.results,
            known_failing: b.known_failing,
            tested: b.tested,
        }),
        Err(hit) => Err(Error::SizingCeiling(Box::new(SizingFailure {
            ceiling: hit.ceiling,
            last_pop_size: hit.last_size,
            last_batch: hit.last_outcome,
            runs: settings.runs,
            tested: hit.tested,
        }))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::PrimitiveSet;
    use proptest::prelude::*;

    fn stub(threshold: usize) -> impl FnMut(usize) -> Result<(bool, ())> {
        move |n| Ok((n >= threshold, ()))
    }

    #[test]
    fn bisection_against_threshold_73() {
        let b = bisect_sizes(16, 1 << 20, stub(73)).unwrap().unwrap();
        assert!((73..=80).contains(&b.size), "{b:?}");
        assert!(10 * (b.size - b.known_failing) <= b.size);
        assert_eq!((b.known_failing, b.size), (72, 76));
        assert_eq!(
            b.tested,
            vec![
                (16, false),
                (32, false),
                (64, false),
                (128, true),
                (96, true),
                (80, true),
                (72, false),
                (76, true)
            ]
        );
    }

    #[test]
    fn immediate_success_brackets_from_two() {
        let b = bisect_sizes(16, 1 << 20, stub(1)).unwrap().unwrap();
        assert_eq!(b.known_failing, 2);
        assert_eq!(b.size, 4);
    }

    #[test]
    fn ceiling_reported() {
        let hit = bisect_sizes(16, 200, stub(1000)).unwrap().unwrap_err();
        assert_eq!(hit.ceiling, 200);
        assert_eq!(hit.last_size, 128);
        assert_eq!(hit.tested.len(), 4);
    }

    proptest! {
        #[test]
        fn bisection_brackets_threshold(threshold in 1usize..200_000) {
            let b = bisect_sizes(16, 1 << 20, stub(threshold)).unwrap().unwrap();
            prop_assert!(b.size >= threshold);
            prop_assert_eq!(b.size % 2, 0);
            prop_assert!(b.known_failing < threshold || b.known_failing == 2);
            prop_assert!(10 * (b.size - b.known_failing) <= b.size || b.size - b.known_failing == 2);
            // size / 1.1, floored and evened, is already at or below the failing bound.
            let below = (b.size as f64 / 1.1).floor() as usize;
            prop_assert!(below - below % 2 <= b.known_failing);
        }
    }

    #[test]
    fn batch_is_deterministic() {
        let spec = ProblemSpec::order(PrimitiveSet::basic(5).unwrap());
        let settings = SizingSettings::new(4);
        let a = batch_success(&spec, Algorithm::Gp, &settings, 40, 10, 99).unwrap();
        let b = batch_success(&spec, Algorithm::Gp, &settings, 40, 10, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn batch_trivial_order() {
        let spec = ProblemSpec::order(PrimitiveSet::basic(1).unwrap());
        let settings = SizingSettings::new(1);
        for algo in [Algorithm::Gp, Algorithm::Pipe] {
            let batch = batch_success(&spec, algo, &settings, 64, 30, 5).unwrap();
            assert!(batch.all_succeeded);
            assert_eq!(batch.results.len(), 30);
            assert_eq!(batch.success_rate(30), 1.0);
        }
    }

    #[test]
    fn tiny_population_fails_large_order() {
        let spec = ProblemSpec::order(PrimitiveSet::basic(100).unwrap());
        let mut settings = SizingSettings::new(8);
        settings.max_generations = 50;
        let batch = batch_success(&spec, Algorithm::Gp, &settings, 2, 30, 5).unwrap();
        assert!(!batch.all_succeeded);
        assert_eq!(batch.results.len(), 1);
    }

    #[test]
    fn sizing_trivial_order() {
        let spec = ProblemSpec::order(PrimitiveSet::basic(1).unwrap());
        for algo in [Algorithm::Gp, Algorithm::Pipe] {
            let r = bisect_population_size(&spec, algo, &SizingSettings::new(1), 3).unwrap();
            assert!(r.min_pop_size <= 10, "{algo}: {} {:?}", r.min_pop_size, r.tested);
            assert!(r.known_failing < r.min_pop_size);
            assert_eq!(r.runs.len(), DEFAULT_RUNS);
            assert!(r.runs.iter().all(|run| run.success));
        }
    }

    #[test]
    fn sizing_ceiling_is_an_error_value() {
        let spec = ProblemSpec::trap(
            PrimitiveSet::basic(33).unwrap(),
            crate::TrapParams::new(3, 1.0).unwrap(),
        )
        .unwrap();
        let mut settings = SizingSettings::new(7);
        settings.pop_ceiling = 64;
        settings.max_generations = 20;
        match bisect_population_size(&spec, Algorithm::Gp, &settings, 1) {
            Err(Error::SizingCeiling(f)) => {
                assert_eq!(f.ceiling, 64);
                assert_eq!(f.last_pop_size, 64);
                assert!(f.to_string().contains("no population up to 64"));
            }
            other => panic!("expected a ceiling hit, got {other:?}"),
        }
    }

    #[test]
    fn even_rounding() {
        assert_eq!(round_even(9), 10);
        assert_eq!(round_even(8), 8);
        assert_eq!(round_even(0), 0);
    }

    #[test]
    fn algorithm_names() {
        assert_eq!("gp".parse::<Algorithm>().unwrap(), Algorithm::Gp);
        assert_eq!(Algorithm::Pipe.to_string(), "pipe");
        assert!("both".parse::<Algorithm>().is_err());
    }
}
