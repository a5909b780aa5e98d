//! Generational GP: binary tournament, subtree crossover on every pair, no
//! mutation, no elitism.

use rand::Rng;

use crate::error::Result;
use crate::problem::ProblemSpec;
use crate::run::{run_generational, RunConfig, RunResult, RunRng, Variation};
use crate::tree::{prefix_depth, subtree_end, ProgramTree};

/// Picks a crossover point: an internal node with probability `bias` when the
/// tree has any, otherwise a leaf; uniform within the chosen class.
fn pick_point<R: Rng + ?Sized>(tree: &ProgramTree, bias: f64, rng: &mut R) -> usize {
    let nodes = tree.prefix();
    let internal = nodes.iter().filter(|p| p.is_function()).count();
    let want_internal = internal > 0 && rng.gen_bool(bias);
    let class_size = if want_internal {
        internal
    } else {
        nodes.len() - internal
    };
    let nth = rng.gen_range(0..class_size);
    nodes
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_function() == want_internal)
        .nth(nth)
        .map(|(i, _)| i)
        .expect("class is nonempty")
}

fn splice(host: &ProgramTree, at: usize, donor: &[crate::Primitive]) -> Vec<crate::Primitive> {
    let nodes = host.prefix();
    let end = subtree_end(nodes, at);
    let mut out = Vec::with_capacity(nodes.len() - (end - at) + donor.len());
    out.extend_from_slice(&nodes[..at]);
    out.extend_from_slice(donor);
    out.extend_from_slice(&nodes[end..]);
    out
}

/// Swaps the subtrees rooted at `a` in `first` and `b` in `second`.
pub fn swap_subtrees(
    first: &ProgramTree,
    a: usize,
    second: &ProgramTree,
    b: usize,
) -> (ProgramTree, ProgramTree) {
    let sub_a = &first.prefix()[a..first.subtree_end(a)];
    let sub_b = &second.prefix()[b..second.subtree_end(b)];
    (
        ProgramTree::from_prefix_unchecked(splice(first, a, sub_b)),
        ProgramTree::from_prefix_unchecked(splice(second, b, sub_a)),
    )
}

/// Subtree crossover. When either child would exceed `cfg.max_depth` both
/// points are re-picked, up to `cfg.crossover_retries` times; after that the
/// parents are returned unchanged.
pub fn subtree_crossover<R: Rng + ?Sized>(
    first: &ProgramTree,
    second: &ProgramTree,
    cfg: &RunConfig,
    rng: &mut R,
) -> (ProgramTree, ProgramTree) {
    for _ in 0..=cfg.crossover_retries {
        let a = pick_point(first, cfg.internal_node_bias, rng);
        let b = pick_point(second, cfg.internal_node_bias, rng);
        let sub_a = &first.prefix()[a..first.subtree_end(a)];
        let sub_b = &second.prefix()[b..second.subtree_end(b)];
        let child_a = splice(first, a, sub_b);
        if prefix_depth(&child_a) > cfg.max_depth {
            continue;
        }
        let child_b = splice(second, b, sub_a);
        if prefix_depth(&child_b) > cfg.max_depth {
            continue;
        }
        return (
            ProgramTree::from_prefix_unchecked(child_a),
            ProgramTree::from_prefix_unchecked(child_b),
        );
    }
    (first.clone(), second.clone())
}

struct Crossover<'c> {
    cfg: &'c RunConfig,
}

impl Variation for Crossover<'_> {
    fn offspring(&mut self, parents: Vec<ProgramTree>, rng: &mut RunRng) -> Vec<ProgramTree> {
        let mut out = Vec::with_capacity(parents.len());
        let mut parents = parents.into_iter();
        while let (Some(first), Some(second)) = (parents.next(), parents.next()) {
            let (a, b) = subtree_crossover(&first, &second, self.cfg, rng);
            out.push(a);
            out.push(b);
        }
        out
    }
}

/// One GP run.
pub fn run_gp(spec: &ProblemSpec, cfg: &RunConfig) -> Result<RunResult> {
    run_generational(spec, cfg, &mut Crossover { cfg })
}
