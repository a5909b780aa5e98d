//! Tree-based genetic programming and prototype-tree PIPE on the ORDER and
//! TRAP program-evolution benchmarks, with a population-sizing harness for
//! scalability experiments.

pub mod cli;
pub mod error;
pub mod expression;
pub mod gp;
pub mod harness;
pub mod init;
pub mod pipe;
pub mod primitives;
pub mod problem;
pub mod run;
pub mod tree;

pub use error::{Error, Result};
pub use expression::{express, ExpressionVector};
pub use harness::{
    batch_success, bisect_population_size, scalability_sweep, Algorithm, Batch, PlanKind,
    SizingFailure, SizingResult, SizingSettings, SweepPlan, SweepRow,
};
pub use gp::{run_gp, subtree_crossover, swap_subtrees};
pub use init::{generate_random_tree, ramp_schedule, ramped_half_and_half, InitMethod, RampSlot};
pub use pipe::{build_model, run_pipe, run_pipe_observed, sample_model, ModelNode, PipeModel};
pub use primitives::{Primitive, PrimitiveSet};
pub use problem::{
    order_fitness, trap_fitness, trap_subfunction, Evaluator, Family, ProblemSpec, TrapParams,
};
pub use run::{binary_tournament, Individual, RunConfig, RunResult, RunRng};
pub use tree::{minimum_optimum_depth, DepthBudget, Leaf, ProgramTree};
