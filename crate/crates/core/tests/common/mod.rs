//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the library's evaluation code.

#![allow(dead_code)]

use treeevo::{Primitive, ProgramTree};

/// Nested tree, built and walked recursively.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf(Primitive),
    Call(Primitive, Box<Node>, Box<Node>),
}

impl Node {
    pub fn to_prefix(&self, out: &mut Vec<Primitive>) {
        match self {
            Node::Leaf(p) => out.push(*p),
            Node::Call(f, a, b) => {
                out.push(*f);
                a.to_prefix(out);
                b.to_prefix(out);
            }
        }
    }

    pub fn to_tree(&self) -> ProgramTree {
        let mut v = Vec::new();
        self.to_prefix(&mut v);
        ProgramTree::from_prefix(v).expect("well-formed")
    }
}

/// Every tree of edge depth `<= depth` over the given functions and terminals.
pub fn enumerate(functions: &[Primitive], terminals: &[Primitive], depth: usize) -> Vec<Node> {
    let mut out: Vec<Node> = terminals.iter().map(|&t| Node::Leaf(t)).collect();
    if depth == 0 {
        return out;
    }
    let smaller = enumerate(functions, terminals, depth - 1);
    for &f in functions {
        for a in &smaller {
            for b in &smaller {
                out.push(Node::Call(f, Box::new(a.clone()), Box::new(b.clone())));
            }
        }
    }
    out
}

/// Leaves left to right, each already flipped when it sits under any NEG_JOIN.
fn effective_leaves(node: &Node, negated: bool, out: &mut Vec<Primitive>) {
    match node {
        Node::Leaf(p) => {
            let flipped = match (*p, negated) {
                (Primitive::Positive(i), true) => Primitive::Negative(i),
                (Primitive::Negative(i), true) => Primitive::Positive(i),
                (q, _) => q,
            };
            out.push(flipped);
        }
        Node::Call(f, a, b) => {
            let neg = negated || *f == Primitive::NegJoin;
            effective_leaves(a, neg, out);
            effective_leaves(b, neg, out);
        }
    }
}

/// Expressed bit per pair: the first effective occurrence decides, absent pairs are 0.
pub fn reference_bits(node: &Node, pairs: usize) -> Vec<bool> {
    let mut leaves = Vec::new();
    effective_leaves(node, false, &mut leaves);
    (1..=pairs as u32)
        .map(|i| {
            leaves
                .iter()
                .find(|p| matches!(p, Primitive::Positive(j) | Primitive::Negative(j) if *j == i))
                .is_some_and(|p| matches!(p, Primitive::Positive(_)))
        })
        .collect()
}

pub fn reference_order(node: &Node, pairs: usize) -> f64 {
    reference_bits(node, pairs).iter().filter(|&&b| b).count() as f64
}

pub fn reference_trap_unit(u: usize, k: usize, delta: f64) -> f64 {
    if u == k {
        1.0
    } else {
        (1.0 - delta) * (1.0 - u as f64 / (k as f64 - 1.0))
    }
}

pub fn reference_trap(node: &Node, pairs: usize, k: usize, delta: f64) -> f64 {
    let bits = reference_bits(node, pairs);
    let mut total = 0.0;
    let mut start = 0;
    while start < pairs {
        let u = bits[start..start + k].iter().filter(|&&b| b).count();
        total += reference_trap_unit(u, k, delta);
        start += k;
    }
    total
}

/// Full alphabet for `pairs` pairs: NEG_JOIN and `junk` junk terminals included.
pub fn full_alphabet(pairs: usize, junk: usize) -> (Vec<Primitive>, Vec<Primitive>) {
    let functions = vec![Primitive::Join, Primitive::NegJoin];
    let mut terminals = Vec::new();
    for i in 1..=pairs as u32 {
        terminals.push(Primitive::Positive(i));
        terminals.push(Primitive::Negative(i));
    }
    for j in 1..=junk as u32 {
        terminals.push(Primitive::Junk(j));
    }
    (functions, terminals)
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_p(stat: f64, dof: usize) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat)
}

/// Pearson statistic of `observed` counts against `expected` probabilities,
/// pooling cells whose expected count falls under 5 into one.
pub fn pearson(observed: &[u64], expected: &[f64], n: u64) -> (f64, usize) {
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_o, mut pooled_e) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = p * n as f64;
        if e < 5.0 {
            pooled_o += o as f64;
            pooled_e += e;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_e > 0.0 {
        stat += (pooled_o - pooled_e).powi(2) / pooled_e;
        cells += 1;
    }
    (stat, cells.saturating_sub(1).max(1))
}
