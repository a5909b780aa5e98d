//! Random tree generation: the Full and Grow methods and ramped half-and-half.

use rand::Rng;

use crate::primitives::{Primitive, PrimitiveSet};
use crate::tree::ProgramTree;

/// Shallowest depth used by the half-and-half ramp.
pub const MIN_RAMP_DEPTH: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitMethod {
    /// Functions everywhere above `depth_limit`, terminals exactly at it.
    Full,
    /// Uniform over the whole alphabet above `depth_limit`, terminals at it.
    Grow,
}

pub fn generate_random_tree<R: Rng + ?Sized>(
    ps: &PrimitiveSet,
    depth_limit: usize,
    method: InitMethod,
    rng: &mut R,
) -> ProgramTree {
    let mut nodes = Vec::new();
    grow_into(ps, 0, depth_limit, method, rng, &mut nodes);
    ProgramTree::from_prefix_unchecked(nodes)
}

fn grow_into<R: Rng + ?Sized>(
    ps: &PrimitiveSet,
    depth: usize,
    limit: usize,
    method: InitMethod,
    rng: &mut R,
    out: &mut Vec<Primitive>,
) {
    let symbol = if depth >= limit {
        ps.random_terminal(rng)
    } else {
        match method {
            InitMethod::Full => ps.random_function(rng),
            InitMethod::Grow => ps.random_symbol(rng),
        }
    };
    out.push(symbol);
    for _ in 0..symbol.arity() {
        grow_into(ps, depth + 1, limit, method, rng, out);
    }
}

/// One population slot of the ramp.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RampSlot {
    pub depth: usize,
    pub method: InitMethod,
}

/// Depth and method for each member of a ramped half-and-half population.
///
/// Depths run from `min(2, max_depth)` to `max_depth`. When the population does
/// not divide evenly, the shallower depths take one extra member each. Within a
/// depth the Full half comes first and any odd member goes to Grow.
pub fn ramp_schedule(pop_size: usize, max_depth: usize) -> Vec<RampSlot> {
    let low = MIN_RAMP_DEPTH.min(max_depth);
    let levels = max_depth - low + 1;
    let base = pop_size / levels;
    let extra = pop_size % levels;
    let mut slots = Vec::with_capacity(pop_size);
    for (n, depth) in (low..=max_depth).enumerate() {
        let count = base + usize::from(n < extra);
        let full = count / 2;
        slots.extend((0..full).map(|_| RampSlot {
            depth,
            method: InitMethod::Full,
        }));
        slots.extend((full..count).map(|_| RampSlot {
            depth,
            method: InitMethod::Grow,
        }));
    }
    slots
}

/// Initial population by ramped half-and-half. Duplicates are kept.
pub fn ramped_half_and_half<R: Rng + ?Sized>(
    ps: &PrimitiveSet,
    pop_size: usize,
    max_depth: usize,
    rng: &mut R,
) -> Vec<ProgramTree> {
    ramp_schedule(pop_size, max_depth)
        .into_iter()
        .map(|slot| generate_random_tree(ps, slot.depth, slot.method, rng))
        .collect()
}
