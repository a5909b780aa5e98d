//! Python bindings: trees, problems, single runs, PIPE models, sizing and sweeps.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;

use treeevo::harness::{emit_report, write_csv};
use treeevo::{
    bisect_population_size, build_model, express, minimum_optimum_depth, scalability_sweep, Algorithm,
    Error, Family, PlanKind, PrimitiveSet, ProblemSpec, ProgramTree, RunConfig, RunRng, SizingSettings,
    SweepPlan, TrapParams,
};

create_exception!(treeevo, SizingError, PyException);

fn value_err(e: Error) -> PyErr {
    match e {
        Error::SizingCeiling(f) => SizingError::new_err(f.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_algo(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(value_err)
}

fn parse_algos(name: &str) -> PyResult<Vec<Algorithm>> {
    if name == "both" {
        Ok(vec![Algorithm::Gp, Algorithm::Pipe])
    } else {
        Ok(vec![parse_algo(name)?])
    }
}

/// A program tree. Construct from the text form, e.g. `Tree("(JOIN X1 ~X2)")`.
#[pyclass(frozen, from_py_object, eq, hash, str, module = "treeevo")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Tree(ProgramTree);

impl std::fmt::Display for Tree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[pymethods]
impl Tree {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(Tree).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Tree('{}')", self.0)
    }

    /// Edge depth.
    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    /// Symbols in preorder.
    fn prefix(&self) -> Vec<String> {
        self.0.prefix().iter().map(|p| p.to_string()).collect()
    }

    /// Leaves left to right as `(symbol, under_neg_join)` pairs.
    fn leaves(&self) -> Vec<(String, bool)> {
        self.0
            .inorder_leaves()
            .into_iter()
            .map(|l| (l.primitive.to_string(), l.neg_ancestor))
            .collect()
    }
}

/// A benchmark instance: ORDER or TRAP over an alphabet.
#[pyclass(frozen, from_py_object, module = "treeevo")]
#[derive(Clone)]
struct Problem(ProblemSpec);

#[pymethods]
impl Problem {
    #[staticmethod]
    #[pyo3(signature = (pairs, num_junk=0, neg_join=false))]
    fn order(pairs: usize, num_junk: usize, neg_join: bool) -> PyResult<Self> {
        let ps = PrimitiveSet::new(pairs, num_junk, neg_join).map_err(value_err)?;
        Ok(Problem(ProblemSpec::order(ps)))
    }

    #[staticmethod]
    #[pyo3(signature = (pairs, k=3, delta=1.0, num_junk=0, neg_join=false))]
    fn trap(pairs: usize, k: usize, delta: f64, num_junk: usize, neg_join: bool) -> PyResult<Self> {
        let ps = PrimitiveSet::new(pairs, num_junk, neg_join).map_err(value_err)?;
        let tp = TrapParams::new(k, delta).map_err(value_err)?;
        ProblemSpec::trap(ps, tp).map(Problem).map_err(value_err)
    }

    #[getter]
    fn family(&self) -> String {
        self.0.family().to_string()
    }

    #[getter]
    fn pairs(&self) -> usize {
        self.0.pairs()
    }

    #[getter]
    fn num_junk(&self) -> usize {
        self.0.primitive_set().num_junk()
    }

    #[getter]
    fn neg_join(&self) -> bool {
        self.0.primitive_set().neg_join_enabled()
    }

    #[getter]
    fn optimum(&self) -> f64 {
        self.0.optimum_fitness()
    }

    /// Default depth limit: one level more than the smallest optimal tree.
    #[getter]
    fn default_max_depth(&self) -> usize {
        minimum_optimum_depth(self.0.pairs()).expect("pairs >= 1") + 1
    }

    /// All symbols of the alphabet, functions first.
    fn symbols(&self) -> Vec<String> {
        self.0.primitive_set().symbols().map(|p| p.to_string()).collect()
    }

    fn check(&self, tree: &Tree) -> PyResult<()> {
        tree.0.validate(self.0.primitive_set()).map_err(value_err)
    }

    /// Expressed bit per pair.
    fn express(&self, tree: &Tree) -> PyResult<Vec<bool>> {
        self.check(tree)?;
        Ok(express(&tree.0, self.0.primitive_set()).bits().to_vec())
    }

    fn fitness(&self, tree: &Tree) -> PyResult<f64> {
        self.check(tree)?;
        Ok(self.0.fitness(&tree.0))
    }

    fn __repr__(&self) -> String {
        let ps = self.0.primitive_set();
        match self.0.family() {
            Family::Order => format!(
                "Problem.order({}, num_junk={}, neg_join={})",
                ps.pairs(),
                ps.num_junk(),
                if ps.neg_join_enabled() { "True" } else { "False" }
            ),
            Family::Trap(tp) => format!(
                "Problem.trap({}, k={}, delta={}, num_junk={}, neg_join={})",
                ps.pairs(),
                tp.k(),
                tp.delta(),
                ps.num_junk(),
                if ps.neg_join_enabled() { "True" } else { "False" }
            ),
        }
    }
}

#[pyclass(frozen, get_all, module = "treeevo")]
struct RunResult {
    success: bool,
    evaluations: u64,
    generations_used: usize,
    best_fitness: f64,
    best_tree: Tree,
}

#[pymethods]
impl RunResult {
    fn __repr__(&self) -> String {
        format!(
            "RunResult(success={}, evaluations={}, generations_used={}, best_fitness={})",
            if self.success { "True" } else { "False" },
            self.evaluations,
            self.generations_used,
            self.best_fitness
        )
    }
}

/// One seeded run of `algo` ("gp" or "pipe").
#[pyfunction]
#[pyo3(signature = (problem, algo="gp", pop_size=100, seed=1, max_depth=None, max_generations=200, internal_node_bias=0.9, crossover_retries=10))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    problem: &Problem,
    algo: &str,
    pop_size: usize,
    seed: u64,
    max_depth: Option<usize>,
    max_generations: usize,
    internal_node_bias: f64,
    crossover_retries: usize,
) -> PyResult<RunResult> {
    let algo = parse_algo(algo)?;
    let cfg = RunConfig {
        pop_size,
        max_generations,
        max_depth: max_depth.unwrap_or_else(|| problem.default_max_depth()),
        crossover_retries,
        internal_node_bias,
        seed,
    };
    let spec = problem.0;
    let r = py.detach(|| algo.run(&spec, &cfg)).map_err(value_err)?;
    Ok(RunResult {
        success: r.success,
        evaluations: r.evaluations,
        generations_used: r.generations_used,
        best_fitness: r.best_fitness,
        best_tree: Tree(r.best_tree),
    })
}

/// A prototype-tree model learned from a list of trees.
#[pyclass(frozen, str, module = "treeevo")]
struct PipeModel(treeevo::PipeModel);

impl std::fmt::Display for PipeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[pymethods]
impl PipeModel {
    #[new]
    fn new(trees: Vec<Tree>) -> PyResult<Self> {
        let trees: Vec<ProgramTree> = trees.into_iter().map(|t| t.0).collect();
        build_model(&trees).map(PipeModel).map_err(value_err)
    }

    #[getter]
    fn num_positions(&self) -> usize {
        self.0.num_positions()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    /// Probability table at the position reached by `path` (child indices).
    #[pyo3(signature = (path=Vec::new()))]
    fn table(&self, path: Vec<usize>) -> PyResult<Vec<(String, f64)>> {
        let node = self
            .0
            .node_at(&path)
            .ok_or_else(|| PyValueError::new_err(format!("no position at {path:?}")))?;
        Ok(node.table().into_iter().map(|(p, q)| (p.to_string(), q)).collect())
    }

    fn probability(&self, tree: &Tree) -> f64 {
        self.0.probability_of(&tree.0)
    }

    /// `count` trees sampled with a generator seeded by `seed`.
    #[pyo3(signature = (count=1, seed=0))]
    fn sample(&self, count: usize, seed: u64) -> Vec<Tree> {
        let mut rng = RunRng::seed_from_u64(seed);
        (0..count).map(|_| Tree(self.0.sample(&mut rng))).collect()
    }
}

#[pyclass(frozen, get_all, module = "treeevo")]
struct Sizing {
    algorithm: String,
    min_pop_size: usize,
    known_failing: usize,
    avg_evaluations: f64,
    tested: Vec<(usize, bool)>,
}

#[pymethods]
impl Sizing {
    fn __repr__(&self) -> String {
        format!(
            "Sizing(algorithm='{}', min_pop_size={}, known_failing={}, avg_evaluations={})",
            self.algorithm, self.min_pop_size, self.known_failing, self.avg_evaluations
        )
    }
}

/// Bisection population sizing. Raises `SizingError` when no population up
/// to `max_pop` solves every run.
#[pyfunction]
#[pyo3(signature = (problem, algo="gp", runs=30, seed_base=1, max_depth=None, max_generations=200, start_pop=16, max_pop=1<<20))]
#[allow(clippy::too_many_arguments)]
fn bisect(
    py: Python<'_>,
    problem: &Problem,
    algo: &str,
    runs: usize,
    seed_base: u64,
    max_depth: Option<usize>,
    max_generations: usize,
    start_pop: usize,
    max_pop: usize,
) -> PyResult<Sizing> {
    let algo = parse_algo(algo)?;
    let mut settings = SizingSettings::new(max_depth.unwrap_or_else(|| problem.default_max_depth()));
    settings.runs = runs;
    settings.max_generations = max_generations;
    settings.start_pop = start_pop;
    settings.pop_ceiling = max_pop;
    let spec = problem.0;
    let r = py
        .detach(|| bisect_population_size(&spec, algo, &settings, seed_base))
        .map_err(value_err)?;
    Ok(Sizing {
        algorithm: algo.to_string(),
        min_pop_size: r.min_pop_size,
        known_failing: r.known_failing,
        avg_evaluations: r.avg_evaluations,
        tested: r.tested,
    })
}

/// Sizes every instance of a named plan and returns one dict per row. With
/// `out`, also writes `<out>/<plan>.csv` and `<out>/<plan>.svg`.
#[pyfunction]
#[pyo3(signature = (plan, sizes=None, algo="both", runs=30, seed_base=1, k=3, delta=1.0, max_depth=None, max_generations=200, max_pop=1<<20, out=None))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    plan: &str,
    sizes: Option<Vec<usize>>,
    algo: &str,
    runs: usize,
    seed_base: u64,
    k: usize,
    delta: f64,
    max_depth: Option<usize>,
    max_generations: usize,
    max_pop: usize,
    out: Option<PathBuf>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let kind: PlanKind = plan.parse().map_err(value_err)?;
    let mut p = SweepPlan::new(kind);
    if let Some(sizes) = sizes {
        p.sizes = sizes;
    }
    p.algorithms = parse_algos(algo)?;
    p.trap = TrapParams::new(k, delta).map_err(value_err)?;
    p.max_depth = max_depth;
    p.sizing.runs = runs;
    p.sizing.max_generations = max_generations;
    p.sizing.pop_ceiling = max_pop;
    p.seed_base = seed_base;
    let rows = py
        .detach(|| scalability_sweep(&p, &mut |_| {}))
        .map_err(value_err)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)
            .map_err(|e| PyValueError::new_err(format!("cannot create {}: {e}", dir.display())))?;
        let csv = dir.join(format!("{}.csv", kind.name()));
        let svg = dir.join(format!("{}.svg", kind.name()));
        if rows.is_empty() {
            write_csv(&rows, &csv).map_err(value_err)?;
        } else {
            emit_report(&rows, &csv, &svg, kind.sweeps_junk()).map_err(value_err)?;
        }
    }
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("algorithm", r.algorithm.to_string())?;
            d.set_item("problem", &r.problem)?;
            d.set_item("l", r.l)?;
            d.set_item("num_junk", r.num_junk)?;
            d.set_item("neg_join", r.neg_join)?;
            d.set_item("k", r.k)?;
            d.set_item("delta", r.delta)?;
            d.set_item("max_depth", r.max_depth)?;
            d.set_item("pop_size", r.pop_size)?;
            d.set_item("avg_evaluations", r.avg_evaluations)?;
            d.set_item("success_rate", r.success_rate)?;
            d.set_item("seed_base", r.seed_base)?;
            Ok(d)
        })
        .collect()
}

/// Trap subfunction value for `u` ones in a group of `k`.
#[pyfunction]
fn trap_value(u: usize, k: usize, delta: f64) -> PyResult<f64> {
    let tp = TrapParams::new(k, delta).map_err(value_err)?;
    treeevo::trap_subfunction(u, &tp).map_err(value_err)
}

#[pymodule(name = "treeevo")]
fn treeevo_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Tree>()?;
    m.add_class::<Problem>()?;
    m.add_class::<RunResult>()?;
    m.add_class::<PipeModel>()?;
    m.add_class::<Sizing>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(bisect, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(trap_value, m)?)?;
    m.add("SizingError", m.py().get_type::<SizingError>())?;
    Ok(())
}
