//! Command-line front end: `run`, `bisect`, `sweep` and `express`.
//!
//! Exit codes: 0 on success, 1 when a run or a sizing fails (or a report
//! cannot be written), 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::expression::express;
use crate::harness::{
    bisect_population_size, emit_report, scalability_sweep, Algorithm, PlanKind, SizingSettings,
    SweepPlan, DEFAULT_POP_CEILING, DEFAULT_RUNS, DEFAULT_START_POP,
};
use crate::pipe::run_pipe_observed;
use crate::primitives::{Primitive, PrimitiveSet};
use crate::problem::{ProblemSpec, TrapParams};
use crate::run::{RunConfig, DEFAULT_CROSSOVER_RETRIES, DEFAULT_INTERNAL_NODE_BIAS, DEFAULT_MAX_GENERATIONS};
use crate::tree::{minimum_optimum_depth, ProgramTree};
use crate::gp::run_gp;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "treeevo",
    version,
    about = "GP and PIPE on the ORDER and TRAP benchmarks, with population sizing and scalability sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One seeded run; prints the result as key=value lines.
    Run(RunArgs),
    /// Bisection population sizing for one problem instance.
    Bisect(BisectArgs),
    /// Sizes a whole plan of instances and writes CSV and SVG reports.
    Sweep(SweepArgs),
    /// Parses a tree and shows its leaves, expression and fitness.
    Express(ExpressArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgoChoice {
    Gp,
    Pipe,
    Both,
}

impl AlgoChoice {
    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoChoice::Gp => vec![Algorithm::Gp],
            AlgoChoice::Pipe => vec![Algorithm::Pipe],
            AlgoChoice::Both => vec![Algorithm::Gp, Algorithm::Pipe],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProblemChoice {
    Order,
    Trap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PlanChoice {
    Order,
    Trap,
    OrderNeg,
    OrderJunk,
    JunkFixedL,
}

impl From<PlanChoice> for PlanKind {
    fn from(p: PlanChoice) -> Self {
        match p {
            PlanChoice::Order => PlanKind::Order,
            PlanChoice::Trap => PlanKind::Trap,
            PlanChoice::OrderNeg => PlanKind::OrderNeg,
            PlanChoice::OrderJunk => PlanKind::OrderJunk,
            PlanChoice::JunkFixedL => PlanKind::JunkFixedL,
        }
    }
}

#[derive(Debug, Args)]
struct TrapArgs {
    /// Trap group size.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Trap signal parameter, in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
}

#[derive(Debug, Args)]
struct ProblemArgs {
    #[arg(long, value_enum, default_value_t = ProblemChoice::Order)]
    problem: ProblemChoice,
    /// Number of complementary terminal pairs.
    #[arg(long, default_value_t = 10)]
    l: usize,
    #[command(flatten)]
    trap: TrapArgs,
    /// Add the NEG_JOIN function.
    #[arg(long)]
    neg_join: bool,
    /// Number of distinct JUNK terminals.
    #[arg(long, default_value_t = 0)]
    junk: usize,
}

#[derive(Debug, Args)]
struct EvolutionArgs {
    /// Generation cap per run.
    #[arg(long, default_value_t = DEFAULT_MAX_GENERATIONS)]
    max_gens: usize,
    /// Depth limit in edges [default: one more than the minimum optimal depth].
    #[arg(long)]
    max_depth: Option<usize>,
    /// Chance that a crossover point is an internal node.
    #[arg(long, default_value_t = DEFAULT_INTERNAL_NODE_BIAS)]
    internal_bias: f64,
    /// Crossover re-picks after a depth violation.
    #[arg(long, default_value_t = DEFAULT_CROSSOVER_RETRIES)]
    retries: usize,
}

#[derive(Debug, Args)]
struct SizingArgs {
    /// Runs per batch; every one must succeed.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    /// First population size tried.
    #[arg(long, default_value_t = DEFAULT_START_POP)]
    start_pop: usize,
    /// Largest population size tried before giving up.
    #[arg(long, default_value_t = DEFAULT_POP_CEILING)]
    max_pop: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = AlgoChoice::Gp)]
    algo: AlgoChoice,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    evolution: EvolutionArgs,
    /// Population size (even).
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Print every learned PIPE model to stderr.
    #[arg(long)]
    dump_model: bool,
}

#[derive(Debug, Args)]
struct BisectArgs {
    #[arg(long, value_enum, default_value_t = AlgoChoice::Both)]
    algo: AlgoChoice,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    evolution: EvolutionArgs,
    #[command(flatten)]
    sizing: SizingArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = PlanChoice::Order)]
    plan: PlanChoice,
    /// Comma-separated sizes (l, or junk counts for junk-fixed-l) [default: the plan's list].
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = AlgoChoice::Both)]
    algo: AlgoChoice,
    #[command(flatten)]
    trap: TrapArgs,
    /// Problem size for the junk-fixed-l plan.
    #[arg(long, default_value_t = 20)]
    fixed_l: usize,
    #[command(flatten)]
    evolution: EvolutionArgs,
    #[command(flatten)]
    sizing: SizingArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory for <plan>.csv and <plan>.svg.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExpressArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Tree in prefix form, e.g. "(JOIN (NEG_JOIN X1 ~X2) J3)".
    tree: String,
}

/// A usage problem detected after parsing.
struct Usage(String);

fn build_problem(args: &ProblemArgs, neg_join: bool, junk: usize) -> Result<ProblemSpec, Usage> {
    if args.l == 0 {
        return Err(Usage("--l must be at least 1".into()));
    }
    let ps = PrimitiveSet::new(args.l, junk, neg_join).map_err(|e| Usage(format!("--l: {e}")))?;
    match args.problem {
        ProblemChoice::Order => Ok(ProblemSpec::order(ps)),
        ProblemChoice::Trap => {
            let tp = trap_params(&args.trap)?;
            if !args.l.is_multiple_of(tp.k()) {
                return Err(Usage(format!(
                    "--l ({}) must be a multiple of --k ({})",
                    args.l,
                    tp.k()
                )));
            }
            ProblemSpec::trap(ps, tp).map_err(|e| Usage(e.to_string()))
        }
    }
}

fn trap_params(args: &TrapArgs) -> Result<TrapParams, Usage> {
    match TrapParams::new(args.k, args.delta) {
        Ok(tp) => Ok(tp),
        Err(Error::TrapGroupTooSmall(_)) => Err(Usage(format!("--k must be at least 2, got {}", args.k))),
        Err(_) => Err(Usage(format!("--delta must lie in [0, 1], got {}", args.delta))),
    }
}

fn check_evolution(args: &EvolutionArgs) -> Result<(), Usage> {
    if !(0.0..=1.0).contains(&args.internal_bias) {
        return Err(Usage(format!(
            "--internal-bias must lie in [0, 1], got {}",
            args.internal_bias
        )));
    }
    Ok(())
}

fn check_sizing(args: &SizingArgs) -> Result<(), Usage> {
    if args.runs == 0 {
        return Err(Usage("--runs must be at least 1".into()));
    }
    if args.start_pop < 2 {
        return Err(Usage("--start-pop must be at least 2".into()));
    }
    if args.start_pop > args.max_pop {
        return Err(Usage(format!(
            "--start-pop ({}) exceeds --max-pop ({})",
            args.start_pop, args.max_pop
        )));
    }
    Ok(())
}

fn depth_for(spec: &ProblemSpec, evolution: &EvolutionArgs) -> usize {
    evolution
        .max_depth
        .unwrap_or_else(|| minimum_optimum_depth(spec.pairs()).expect("l >= 1") + 1)
}

fn settings_for(max_depth: usize, evolution: &EvolutionArgs, sizing: &SizingArgs) -> SizingSettings {
    SizingSettings {
        runs: sizing.runs,
        start_pop: sizing.start_pop,
        pop_ceiling: sizing.max_pop,
        max_generations: evolution.max_gens,
        max_depth,
        internal_node_bias: evolution.internal_bias,
        crossover_retries: evolution.retries,
    }
}

fn describe_problem(out: &mut dyn Write, spec: &ProblemSpec) -> std::io::Result<()> {
    let ps = spec.primitive_set();
    writeln!(out, "problem={}", spec.family())?;
    writeln!(out, "l={}", ps.pairs())?;
    if let crate::Family::Trap(tp) = spec.family() {
        writeln!(out, "k={}", tp.k())?;
        writeln!(out, "delta={}", tp.delta())?;
    }
    writeln!(out, "neg_join={}", ps.neg_join_enabled())?;
    writeln!(out, "num_junk={}", ps.num_junk())
}

fn cmd_run(args: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Usage> {
    let spec = build_problem(&args.problem, args.problem.neg_join, args.problem.junk)?;
    check_evolution(&args.evolution)?;
    if args.pop < 2 || !args.pop.is_multiple_of(2) {
        return Err(Usage(format!("--pop must be even and at least 2, got {}", args.pop)));
    }
    let cfg = RunConfig {
        pop_size: args.pop,
        max_generations: args.evolution.max_gens,
        max_depth: depth_for(&spec, &args.evolution),
        crossover_retries: args.evolution.retries,
        internal_node_bias: args.evolution.internal_bias,
        seed: args.seed,
    };
    let mut code = EXIT_OK;
    for (i, algo) in args.algo.algorithms().into_iter().enumerate() {
        let result = match algo {
            Algorithm::Gp => run_gp(&spec, &cfg),
            Algorithm::Pipe => {
                let mut generation = 0;
                run_pipe_observed(&spec, &cfg, &mut |model| {
                    generation += 1;
                    if args.dump_model {
                        let _ = writeln!(err, "# model built for generation {generation}");
                        let _ = write!(err, "{model}");
                    }
                })
            }
        };
        let r = match result {
            Ok(r) => r,
            Err(e) => return Err(Usage(e.to_string())),
        };
        let io = (|| -> std::io::Result<()> {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "algorithm={algo}")?;
            describe_problem(out, &spec)?;
            writeln!(out, "pop_size={}", cfg.pop_size)?;
            writeln!(out, "max_depth={}", cfg.max_depth)?;
            writeln!(out, "seed={}", cfg.seed)?;
            writeln!(out, "success={}", r.success)?;
            writeln!(out, "evaluations={}", r.evaluations)?;
            writeln!(out, "generations_used={}", r.generations_used)?;
            writeln!(out, "best_fitness={}", r.best_fitness)?;
            writeln!(out, "best_tree={}", r.best_tree)
        })();
        if io.is_err() {
            return Ok(EXIT_FAILURE);
        }
        if !r.success {
            code = EXIT_FAILURE;
        }
    }
    Ok(code)
}

fn format_tested(tested: &[(usize, bool)]) -> String {
    tested
        .iter()
        .map(|(n, ok)| format!("{n}:{}", if *ok { "ok" } else { "fail" }))
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_bisect(args: BisectArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Usage> {
    let spec = build_problem(&args.problem, args.problem.neg_join, args.problem.junk)?;
    check_evolution(&args.evolution)?;
    check_sizing(&args.sizing)?;
    let settings = settings_for(depth_for(&spec, &args.evolution), &args.evolution, &args.sizing);
    let mut code = EXIT_OK;
    for (i, algo) in args.algo.algorithms().into_iter().enumerate() {
        let outcome = bisect_population_size(&spec, algo, &settings, args.seed);
        let io = (|| -> std::io::Result<()> {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "algorithm={algo}")?;
            describe_problem(out, &spec)?;
            writeln!(out, "max_depth={}", settings.max_depth)?;
            writeln!(out, "seed_base={}", args.seed)?;
            match &outcome {
                Ok(sized) => {
                    writeln!(out, "sizing=ok")?;
                    writeln!(out, "min_pop_size={}", sized.min_pop_size)?;
                    writeln!(out, "known_failing={}", sized.known_failing)?;
                    writeln!(out, "avg_evaluations={}", sized.avg_evaluations)?;
                    writeln!(out, "runs={}", sized.runs.len())?;
                    writeln!(out, "tested={}", format_tested(&sized.tested))
                }
                Err(Error::SizingCeiling(f)) => {
                    writeln!(out, "sizing=failed")?;
                    writeln!(out, "ceiling={}", f.ceiling)?;
                    writeln!(out, "last_pop_size={}", f.last_pop_size)?;
                    writeln!(out, "last_successes={}", f.last_batch.successes())?;
                    writeln!(out, "last_runs_executed={}", f.last_batch.results.len())?;
                    writeln!(out, "tested={}", format_tested(&f.tested))?;
                    writeln!(err, "{algo}: population sizing failed: {f}")
                }
                Err(e) => writeln!(err, "{algo}: {e}"),
            }
        })();
        if io.is_err() || outcome.is_err() {
            code = EXIT_FAILURE;
        }
    }
    Ok(code)
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Usage> {
    check_evolution(&args.evolution)?;
    check_sizing(&args.sizing)?;
    let kind = PlanKind::from(args.plan);
    let mut plan = SweepPlan::new(kind);
    if let Some(sizes) = args.sizes.clone() {
        if sizes.iter().any(|&s| s == 0 && !kind.sweeps_junk()) {
            return Err(Usage("--sizes: problem sizes must be at least 1".into()));
        }
        plan.sizes = sizes;
    }
    plan.algorithms = args.algo.algorithms();
    plan.trap = trap_params(&args.trap)?;
    if kind == PlanKind::Trap {
        if let Some(&bad) = plan.sizes.iter().find(|&&l| l % plan.trap.k() != 0) {
            return Err(Usage(format!(
                "--sizes: {bad} is not a multiple of --k ({})",
                plan.trap.k()
            )));
        }
    }
    if args.fixed_l == 0 {
        return Err(Usage("--fixed-l must be at least 1".into()));
    }
    plan.fixed_l = args.fixed_l;
    plan.max_depth = args.evolution.max_depth;
    plan.sizing = settings_for(0, &args.evolution, &args.sizing);
    plan.seed_base = args.seed;

    let rows = match scalability_sweep(&plan, &mut |row| {
        let _ = writeln!(
            err,
            "{} l={} junk={} depth={}: pop_size={} avg_evaluations={} success_rate={}",
            row.algorithm,
            row.l,
            row.num_junk,
            row.max_depth,
            row.pop_size,
            row.avg_evaluations,
            row.success_rate
        );
    }) {
        Ok(rows) => rows,
        Err(e) => {
            let _ = writeln!(err, "sweep failed: {e}");
            return Ok(EXIT_FAILURE);
        }
    };

    if let Err(e) = fs::create_dir_all(&args.out) {
        let _ = writeln!(err, "cannot create {}: {e}", args.out.display());
        return Ok(EXIT_FAILURE);
    }
    let csv_path = args.out.join(format!("{}.csv", kind.name()));
    let svg_path = args.out.join(format!("{}.svg", kind.name()));
    let written = if rows.is_empty() {
        crate::harness::write_csv(&rows, &csv_path).map(|_| false)
    } else {
        emit_report(&rows, &csv_path, &svg_path, kind.sweeps_junk()).map(|_| true)
    };
    let plotted = match written {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return Ok(EXIT_FAILURE);
        }
    };
    let aborted = rows.iter().filter(|r| !r.sized()).count();
    let _ = writeln!(out, "plan={}", kind.name());
    let _ = writeln!(out, "rows={}", rows.len());
    let _ = writeln!(out, "unsized_rows={aborted}");
    let _ = writeln!(out, "csv={}", csv_path.display());
    if plotted {
        let _ = writeln!(out, "svg={}", svg_path.display());
    }
    Ok(if aborted > 0 { EXIT_FAILURE } else { EXIT_OK })
}

fn cmd_express(args: ExpressArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let tree: ProgramTree = args
        .tree
        .parse()
        .map_err(|e| Usage(format!("tree: {e}")))?;
    if let Some(p) = tree.prefix().iter().find(|p| match p {
        Primitive::Positive(i) | Primitive::Negative(i) => *i as usize > args.problem.l,
        _ => false,
    }) {
        return Err(Usage(format!("tree uses {p}, beyond --l ({})", args.problem.l)));
    }
    // The alphabet grows to cover whatever NEG_JOIN or junk the tree uses.
    let uses_neg = tree.prefix().contains(&Primitive::NegJoin);
    let max_junk = tree
        .prefix()
        .iter()
        .filter_map(|p| match p {
            Primitive::Junk(j) => Some(*j as usize),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let spec = build_problem(
        &args.problem,
        args.problem.neg_join || uses_neg,
        args.problem.junk.max(max_junk),
    )?;
    let leaves = tree.inorder_leaves();
    let raw: Vec<String> = leaves
        .iter()
        .map(|l| {
            if l.neg_ancestor {
                format!("{}*", l.primitive)
            } else {
                l.primitive.to_string()
            }
        })
        .collect();
    let effective: Vec<String> = leaves
        .iter()
        .filter(|l| !matches!(l.primitive, Primitive::Junk(_)))
        .map(|l| {
            if l.neg_ancestor {
                l.primitive.complement()
            } else {
                l.primitive
            }
            .to_string()
        })
        .collect();
    let ev = express(&tree, spec.primitive_set());
    let expressed: Vec<String> = ev.expressed().iter().map(|p| p.to_string()).collect();
    let fitness = spec.fitness_of(&ev);
    let _ = (|| -> std::io::Result<()> {
        writeln!(out, "tree={tree}")?;
        describe_problem(out, &spec)?;
        writeln!(out, "depth={}", tree.depth())?;
        writeln!(out, "size={}", tree.size())?;
        writeln!(out, "leaves={}", raw.join(" "))?;
        writeln!(out, "effective_leaves={}", effective.join(" "))?;
        writeln!(out, "expressed={}", expressed.join(" "))?;
        writeln!(out, "bits={ev}")?;
        writeln!(out, "fitness={fitness}")?;
        writeln!(out, "optimum={}", spec.optimum_fitness())
    })();
    Ok(EXIT_OK)
}

/// Parses `argv` (program name first) and runs the chosen subcommand,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Bisect(a) => cmd_bisect(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Express(a) => cmd_express(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}
