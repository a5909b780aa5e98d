//! Primitive symbols and the alphabets built from them.
//!
//! Every problem instance uses one binary connector (`JOIN`), optionally the
//! negating connector `NEG_JOIN`, `l` complementary terminal pairs `Xi`/`~Xi`
//! and any number of irrelevant `Jk` terminals.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// One node label. Pair and junk indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Primitive {
    Join,
    NegJoin,
    Positive(u32),
    Negative(u32),
    Junk(u32),
}

impl Primitive {
    pub fn arity(self) -> usize {
        match self {
            Primitive::Join | Primitive::NegJoin => 2,
            _ => 0,
        }
    }

    pub fn is_function(self) -> bool {
        self.arity() > 0
    }

    pub fn is_terminal(self) -> bool {
        self.arity() == 0
    }

    /// The complementary terminal, flipping `Xi` and `~Xi`. Other symbols are unchanged.
    pub fn complement(self) -> Primitive {
        match self {
            Primitive::Positive(i) => Primitive::Negative(i),
            Primitive::Negative(i) => Primitive::Positive(i),
            other => other,
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::Join => f.write_str("JOIN"),
            Primitive::NegJoin => f.write_str("NEG_JOIN"),
            Primitive::Positive(i) => write!(f, "X{i}"),
            Primitive::Negative(i) => write!(f, "~X{i}"),
            Primitive::Junk(j) => write!(f, "J{j}"),
        }
    }
}

impl FromStr for Primitive {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let index = |digits: &str| -> Result<u32> {
            match digits.parse::<u32>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(Error::Parse(format!("bad symbol index in `{s}`"))),
            }
        };
        match s {
            "JOIN" => Ok(Primitive::Join),
            "NEG_JOIN" => Ok(Primitive::NegJoin),
            _ => {
                if let Some(rest) = s.strip_prefix("~X") {
                    Ok(Primitive::Negative(index(rest)?))
                } else if let Some(rest) = s.strip_prefix('X') {
                    Ok(Primitive::Positive(index(rest)?))
                } else if let Some(rest) = s.strip_prefix('J') {
                    Ok(Primitive::Junk(index(rest)?))
                } else {
                    Err(Error::Parse(format!("unknown symbol `{s}`")))
                }
            }
        }
    }
}

/// The alphabet of one problem instance.
///
/// Symbols are indexed in a fixed order: `JOIN`, `NEG_JOIN` (when enabled),
/// then `X1, ~X1, X2, ~X2, ...`, then `J1, J2, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimitiveSet {
    pairs: usize,
    num_junk: usize,
    neg_join: bool,
}

impl PrimitiveSet {
    pub fn new(pairs: usize, num_junk: usize, neg_join: bool) -> Result<Self> {
        if pairs == 0 {
            return Err(Error::NoTerminalPairs);
        }
        Ok(Self {
            pairs,
            num_junk,
            neg_join,
        })
    }

    /// Plain `JOIN` plus `l` terminal pairs.
    pub fn basic(pairs: usize) -> Result<Self> {
        Self::new(pairs, 0, false)
    }

    /// Number of complementary terminal pairs, `l`.
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn num_junk(&self) -> usize {
        self.num_junk
    }

    pub fn neg_join_enabled(&self) -> bool {
        self.neg_join
    }

    pub fn num_functions(&self) -> usize {
        1 + usize::from(self.neg_join)
    }

    pub fn num_terminals(&self) -> usize {
        2 * self.pairs + self.num_junk
    }

    pub fn len(&self) -> usize {
        self.num_functions() + self.num_terminals()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: Primitive) -> bool {
        match p {
            Primitive::Join => true,
            Primitive::NegJoin => self.neg_join,
            Primitive::Positive(i) | Primitive::Negative(i) => {
                i >= 1 && (i as usize) <= self.pairs
            }
            Primitive::Junk(j) => j >= 1 && (j as usize) <= self.num_junk,
        }
    }

    pub fn function(&self, index: usize) -> Primitive {
        match index {
            0 => Primitive::Join,
            1 if self.neg_join => Primitive::NegJoin,
            _ => panic!("function index {index} out of range"),
        }
    }

    pub fn terminal(&self, index: usize) -> Primitive {
        let pair_slots = 2 * self.pairs;
        if index < pair_slots {
            let i = (index / 2 + 1) as u32;
            if index.is_multiple_of(2) {
                Primitive::Positive(i)
            } else {
                Primitive::Negative(i)
            }
        } else if index < pair_slots + self.num_junk {
            Primitive::Junk((index - pair_slots + 1) as u32)
        } else {
            panic!("terminal index {index} out of range")
        }
    }

    /// Symbol at position `index` of the full alphabet.
    pub fn symbol(&self, index: usize) -> Primitive {
        let nf = self.num_functions();
        if index < nf {
            self.function(index)
        } else {
            self.terminal(index - nf)
        }
    }

    /// Position of `p` in the full alphabet, if it belongs to the set.
    pub fn index_of(&self, p: Primitive) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let nf = self.num_functions();
        Some(match p {
            Primitive::Join => 0,
            Primitive::NegJoin => 1,
            Primitive::Positive(i) => nf + 2 * (i as usize - 1),
            Primitive::Negative(i) => nf + 2 * (i as usize - 1) + 1,
            Primitive::Junk(j) => nf + 2 * self.pairs + (j as usize - 1),
        })
    }

    pub fn symbols(&self) -> impl Iterator<Item = Primitive> + '_ {
        (0..self.len()).map(|i| self.symbol(i))
    }

    pub fn random_function<R: Rng + ?Sized>(&self, rng: &mut R) -> Primitive {
        self.function(rng.gen_range(0..self.num_functions()))
    }

    pub fn random_terminal<R: Rng + ?Sized>(&self, rng: &mut R) -> Primitive {
        self.terminal(rng.gen_range(0..self.num_terminals()))
    }

    /// Uniform over the whole alphabet, each symbol weighted equally.
    pub fn random_symbol<R: Rng + ?Sized>(&self, rng: &mut R) -> Primitive {
        self.symbol(rng.gen_range(0..self.len()))
    }
}
