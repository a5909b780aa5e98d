//! Prototype-tree PIPE.
//!
//! Each generation the selected programs are overlaid position by position
//! (a position is the path of child indices from the root). Every position
//! occupied by at least one program gets an independent table of symbol
//! frequencies, normalised over the programs that reach it. New programs are
//! sampled top-down from those tables, so a sample never leaves the region
//! the selected programs covered.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::primitives::Primitive;
use crate::problem::ProblemSpec;
use crate::run::{run_generational, RunConfig, RunResult, RunRng, Variation};
use crate::tree::ProgramTree;

/// One position of the prototype tree.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelNode {
    /// Observed symbols with their counts, sorted by symbol.
    counts: Vec<(Primitive, u32)>,
    total: u32,
    /// Arena indices of the argument positions; present iff a function was observed here.
    children: Option<[usize; 2]>,
}

impl ModelNode {
    fn empty() -> Self {
        Self {
            counts: Vec::new(),
            total: 0,
            children: None,
        }
    }

    fn observe(&mut self, p: Primitive) {
        self.total += 1;
        match self.counts.iter_mut().find(|(q, _)| *q == p) {
            Some((_, c)) => *c += 1,
            None => self.counts.push((p, 1)),
        }
    }

    /// Symbols with nonzero probability and their probabilities.
    pub fn table(&self) -> Vec<(Primitive, f64)> {
        let total = f64::from(self.total);
        self.counts
            .iter()
            .map(|&(p, c)| (p, f64::from(c) / total))
            .collect()
    }

    pub fn probability(&self, p: Primitive) -> f64 {
        self.counts
            .iter()
            .find(|(q, _)| *q == p)
            .map_or(0.0, |&(_, c)| f64::from(c) / f64::from(self.total))
    }

    /// Number of argument positions below this one (0 or 2).
    pub fn num_children(&self) -> usize {
        self.children.map_or(0, |c| c.len())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Primitive {
        let mut r = rng.gen_range(0..self.total);
        for &(p, c) in &self.counts {
            if r < c {
                return p;
            }
            r -= c;
        }
        unreachable!("counts sum to total")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipeModel {
    /// Arena; index 0 is the root position.
    nodes: Vec<ModelNode>,
}

/// Learns the prototype tree of `selected` by maximum-likelihood counting.
pub fn build_model(selected: &[ProgramTree]) -> Result<PipeModel> {
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut nodes = vec![ModelNode::empty()];
    // (arena index, position in the program's prefix sequence)
    let mut stack: Vec<usize> = Vec::with_capacity(32);
    for tree in selected {
        stack.clear();
        stack.push(0);
        for &p in tree.prefix() {
            let at = stack.pop().expect("arity-valid tree");
            nodes[at].observe(p);
            if p.is_function() {
                let [left, right] = match nodes[at].children {
                    Some(c) => c,
                    None => {
                        let left = nodes.len();
                        nodes.push(ModelNode::empty());
                        nodes.push(ModelNode::empty());
                        nodes[at].children = Some([left, left + 1]);
                        [left, left + 1]
                    }
                };
                stack.push(right);
                stack.push(left);
            }
        }
    }
    for node in &mut nodes {
        node.counts.sort_by_key(|&(p, _)| p);
    }
    Ok(PipeModel { nodes })
}

/// Samples one program top-down from `model`.
pub fn sample_model<R: Rng + ?Sized>(model: &PipeModel, rng: &mut R) -> ProgramTree {
    model.sample(rng)
}

impl PipeModel {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ProgramTree {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(at) = stack.pop() {
            let node = &self.nodes[at];
            let p = node.draw(rng);
            out.push(p);
            if p.is_function() {
                let [left, right] = node.children.expect("function observed here");
                stack.push(right);
                stack.push(left);
            }
        }
        ProgramTree::from_prefix_unchecked(out)
    }

    /// Number of positions in the prototype tree.
    pub fn num_positions(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> &ModelNode {
        &self.nodes[0]
    }

    /// The position reached by following `path` (child indices) from the root.
    pub fn node_at(&self, path: &[usize]) -> Option<&ModelNode> {
        let mut at = 0;
        for &step in path {
            at = *self.nodes[at].children?.get(step)?;
        }
        Some(&self.nodes[at])
    }

    /// Every position with its root path, in preorder.
    pub fn positions(&self) -> Vec<(Vec<usize>, &ModelNode)> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((at, path)) = stack.pop() {
            if let Some(children) = self.nodes[at].children {
                for (i, &c) in children.iter().enumerate().rev() {
                    let mut p = path.clone();
                    p.push(i);
                    stack.push((c, p));
                }
            }
            out.push((path, &self.nodes[at]));
        }
        out
    }

    /// Edge depth of the prototype tree.
    pub fn depth(&self) -> usize {
        self.positions().iter().map(|(p, _)| p.len()).max().unwrap_or(0)
    }

    /// Probability that sampling produces exactly `tree`.
    pub fn probability_of(&self, tree: &ProgramTree) -> f64 {
        let mut prob = 1.0;
        let mut stack = vec![Some(0usize)];
        for &p in tree.prefix() {
            let Some(at) = stack.pop().expect("arity-valid tree") else {
                return 0.0;
            };
            let node = &self.nodes[at];
            prob *= node.probability(p);
            if prob == 0.0 {
                return 0.0;
            }
            if p.is_function() {
                let [left, right] = node.children.expect("function observed here");
                stack.push(Some(right));
                stack.push(Some(left));
            }
        }
        prob
    }
}

/// One line per position: `path: {SYMBOL=prob,...}`, probabilities to 6 decimals.
/// The root path is `/`; children append `/<index>`.
impl fmt::Display for PipeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (path, node) in self.positions() {
            if path.is_empty() {
                f.write_str("/")?;
            } else {
                for step in &path {
                    write!(f, "/{step}")?;
                }
            }
            f.write_str(": {")?;
            for (i, (p, prob)) in node.table().into_iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}={prob:.6}")?;
            }
            f.write_str("}\n")?;
        }
        Ok(())
    }
}

struct ModelRebuild<'o> {
    pop_size: usize,
    observer: &'o mut dyn FnMut(&PipeModel),
}

impl Variation for ModelRebuild<'_> {
    fn offspring(&mut self, parents: Vec<ProgramTree>, rng: &mut RunRng) -> Vec<ProgramTree> {
        let model = build_model(&parents).expect("selection is nonempty");
        drop(parents);
        (self.observer)(&model);
        (0..self.pop_size).map(|_| model.sample(rng)).collect()
    }
}

/// One PIPE run.
pub fn run_pipe(spec: &ProblemSpec, cfg: &RunConfig) -> Result<RunResult> {
    run_pipe_observed(spec, cfg, &mut |_| {})
}

/// Like [`run_pipe`], handing every learned model to `observer` before it is sampled.
pub fn run_pipe_observed(
    spec: &ProblemSpec,
    cfg: &RunConfig,
    observer: &mut dyn FnMut(&PipeModel),
) -> Result<RunResult> {
    run_generational(
        spec,
        cfg,
        &mut ModelRebuild {
            pop_size: cfg.pop_size,
            observer,
        },
    )
}
