//! ORDER and TRAP fitness functions and the per-run evaluation counter.

use std::fmt;

use crate::error::{Error, Result};
use crate::expression::{first_occurrences, is_expressed, ExpressionVector};
use crate::primitives::PrimitiveSet;
use crate::tree::ProgramTree;

/// Trap group size `k` and signal parameter `delta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapParams {
    k: usize,
    delta: f64,
}

impl TrapParams {
    pub fn new(k: usize, delta: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::TrapGroupTooSmall(k));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        Ok(Self { k, delta })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Trap value of a group holding `u` ones; `u` must be in `0..=k`.
    fn value(&self, u: usize) -> f64 {
        if u == self.k {
            1.0
        } else {
            (1.0 - self.delta) * (1.0 - u as f64 / (self.k - 1) as f64)
        }
    }
}

pub fn trap_subfunction(u: usize, tp: &TrapParams) -> Result<f64> {
    if u > tp.k {
        return Err(Error::UnitationOutOfRange { u, k: tp.k });
    }
    Ok(tp.value(u))
}

/// Number of expressed positive terminals.
pub fn order_fitness(ev: &ExpressionVector) -> f64 {
    ev.count_ones() as f64
}

/// Sum of the trap over consecutive `k`-bit groups.
pub fn trap_fitness(ev: &ExpressionVector, tp: &TrapParams) -> Result<f64> {
    if !ev.len().is_multiple_of(tp.k) {
        return Err(Error::IndivisibleLength {
            l: ev.len(),
            k: tp.k,
        });
    }
    Ok(ev
        .bits()
        .chunks(tp.k)
        .map(|group| tp.value(group.iter().filter(|&&b| b).count()))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Order,
    Trap(TrapParams),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Order => f.write_str("order"),
            Family::Trap(_) => f.write_str("trap"),
        }
    }
}

/// A problem instance: fitness family plus alphabet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemSpec {
    family: Family,
    primitive_set: PrimitiveSet,
}

impl ProblemSpec {
    pub fn order(primitive_set: PrimitiveSet) -> Self {
        Self {
            family: Family::Order,
            primitive_set,
        }
    }

    pub fn trap(primitive_set: PrimitiveSet, params: TrapParams) -> Result<Self> {
        if !primitive_set.pairs().is_multiple_of(params.k) {
            return Err(Error::IndivisibleLength {
                l: primitive_set.pairs(),
                k: params.k,
            });
        }
        Ok(Self {
            family: Family::Trap(params),
            primitive_set,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn primitive_set(&self) -> &PrimitiveSet {
        &self.primitive_set
    }

    pub fn pairs(&self) -> usize {
        self.primitive_set.pairs()
    }

    /// `l` for ORDER, `l / k` for TRAP.
    pub fn optimum_fitness(&self) -> f64 {
        let l = self.primitive_set.pairs();
        match self.family {
            Family::Order => l as f64,
            Family::Trap(tp) => (l / tp.k) as f64,
        }
    }

    pub fn fitness_of(&self, ev: &ExpressionVector) -> f64 {
        match self.family {
            Family::Order => order_fitness(ev),
            Family::Trap(tp) => trap_fitness(ev, &tp).expect("l is a multiple of k"),
        }
    }

    /// Fitness of `tree`, without touching any counter.
    pub fn fitness(&self, tree: &ProgramTree) -> f64 {
        let mut scratch = Vec::new();
        self.fitness_with(tree, &mut scratch)
    }

    fn fitness_with(&self, tree: &ProgramTree, state: &mut Vec<u8>) -> f64 {
        first_occurrences(tree, self.primitive_set.pairs(), state);
        match self.family {
            Family::Order => state.iter().filter(|&&m| is_expressed(m)).count() as f64,
            Family::Trap(tp) => state
                .chunks(tp.k)
                .map(|g| tp.value(g.iter().filter(|&&m| is_expressed(m)).count()))
                .sum(),
        }
    }
}

/// Fitness evaluation with a counter; one per run.
#[derive(Debug)]
pub struct Evaluator<'a> {
    spec: &'a ProblemSpec,
    evaluations: u64,
    scratch: Vec<u8>,
}

impl<'a> Evaluator<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Self {
        Self {
            spec,
            evaluations: 0,
            scratch: Vec::with_capacity(spec.pairs()),
        }
    }

    pub fn spec(&self) -> &ProblemSpec {
        self.spec
    }

    pub fn evaluate(&mut self, tree: &ProgramTree) -> f64 {
        self.evaluations += 1;
        self.spec.fitness_with(tree, &mut self.scratch)
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }
}
