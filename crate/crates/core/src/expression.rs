//! The expression mechanism: which member of each terminal pair a program expresses.

use std::fmt;

use crate::primitives::{Primitive, PrimitiveSet};
use crate::tree::ProgramTree;

/// `bits[i]` is true iff `X(i+1)` is expressed; false means its complement is.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpressionVector {
    bits: Vec<bool>,
}

impl ExpressionVector {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// The expressed terminal of every pair, in pair order.
    pub fn expressed(&self) -> Vec<Primitive> {
        self.bits
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let i = i as u32 + 1;
                if b {
                    Primitive::Positive(i)
                } else {
                    Primitive::Negative(i)
                }
            })
            .collect()
    }
}

impl fmt::Display for ExpressionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

const UNSEEN: u8 = 0;
const POSITIVE: u8 = 1;
const NEGATIVE: u8 = 2;

/// Fills `state` (one slot per pair) with the first effective occurrence of
/// each pair: junk is skipped and leaves under `NEG_JOIN` are complemented.
pub(crate) fn first_occurrences(tree: &ProgramTree, pairs: usize, state: &mut Vec<u8>) {
    state.clear();
    state.resize(pairs, UNSEEN);
    tree.for_each_leaf(|leaf| {
        let effective = if leaf.neg_ancestor {
            leaf.primitive.complement()
        } else {
            leaf.primitive
        };
        let (i, mark) = match effective {
            Primitive::Positive(i) => (i, POSITIVE),
            Primitive::Negative(i) => (i, NEGATIVE),
            _ => return,
        };
        let slot = &mut state[i as usize - 1];
        if *slot == UNSEEN {
            *slot = mark;
        }
    });
}

pub(crate) fn is_expressed(mark: u8) -> bool {
    mark == POSITIVE
}

/// Expression of `tree` over the pairs of `ps`. Pairs that never occur
/// default to their negative terminal.
pub fn express(tree: &ProgramTree, ps: &PrimitiveSet) -> ExpressionVector {
    let mut state = Vec::new();
    first_occurrences(tree, ps.pairs(), &mut state);
    ExpressionVector {
        bits: state.into_iter().map(is_expressed).collect(),
    }
}
