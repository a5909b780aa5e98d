//! Program trees.
//!
//! A tree is stored as its prefix (preorder) symbol sequence. Every symbol has
//! a fixed arity, so the sequence determines the shape, and every subtree is a
//! contiguous slice starting at its root. Leaves appear in the same left-to-right
//! order as in an inorder walk.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::primitives::{Primitive, PrimitiveSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProgramTree {
    nodes: Vec<Primitive>,
}

/// A terminal as met during the left-to-right leaf walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub primitive: Primitive,
    /// True iff at least one ancestor is `NEG_JOIN`.
    pub neg_ancestor: bool,
}

impl ProgramTree {
    /// A single-terminal tree.
    ///
    /// # Panics
    /// If `terminal` is a function.
    pub fn leaf(terminal: Primitive) -> Self {
        assert!(terminal.is_terminal(), "{terminal} is not a terminal");
        Self {
            nodes: vec![terminal],
        }
    }

    pub fn node(function: Primitive, children: Vec<ProgramTree>) -> Result<Self> {
        if function.arity() != children.len() {
            return Err(Error::MalformedTree(format!(
                "{function} takes {} arguments, got {}",
                function.arity(),
                children.len()
            )));
        }
        let mut nodes = Vec::with_capacity(1 + children.iter().map(|c| c.size()).sum::<usize>());
        nodes.push(function);
        for child in children {
            nodes.extend(child.nodes);
        }
        Ok(Self { nodes })
    }

    pub fn join(left: ProgramTree, right: ProgramTree) -> Self {
        Self::node(Primitive::Join, vec![left, right]).expect("JOIN is binary")
    }

    pub fn neg_join(left: ProgramTree, right: ProgramTree) -> Self {
        Self::node(Primitive::NegJoin, vec![left, right]).expect("NEG_JOIN is binary")
    }

    /// Builds a tree from a prefix symbol sequence, checking that arities
    /// account for every symbol exactly.
    pub fn from_prefix(nodes: Vec<Primitive>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::MalformedTree("empty symbol sequence".into()));
        }
        let mut open = 1usize;
        for (i, p) in nodes.iter().enumerate() {
            if open == 0 {
                return Err(Error::MalformedTree(format!(
                    "trailing symbols after position {i}"
                )));
            }
            open = open - 1 + p.arity();
        }
        if open != 0 {
            return Err(Error::MalformedTree(format!(
                "{open} missing argument(s) at end of sequence"
            )));
        }
        Ok(Self { nodes })
    }

    pub(crate) fn from_prefix_unchecked(nodes: Vec<Primitive>) -> Self {
        debug_assert!(Self::from_prefix(nodes.clone()).is_ok());
        Self { nodes }
    }

    pub fn prefix(&self) -> &[Primitive] {
        &self.nodes
    }

    pub fn root(&self) -> Primitive {
        self.nodes[0]
    }

    /// Node count.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|p| p.is_terminal()).count()
    }

    /// One past the last position of the subtree rooted at `start`.
    pub fn subtree_end(&self, start: usize) -> usize {
        subtree_end(&self.nodes, start)
    }

    pub fn subtree(&self, start: usize) -> ProgramTree {
        Self {
            nodes: self.nodes[start..self.subtree_end(start)].to_vec(),
        }
    }

    /// The direct subtrees of the root, in order.
    pub fn children(&self) -> Vec<ProgramTree> {
        let mut out = Vec::with_capacity(self.root().arity());
        let mut pos = 1;
        for _ in 0..self.root().arity() {
            let end = self.subtree_end(pos);
            out.push(Self {
                nodes: self.nodes[pos..end].to_vec(),
            });
            pos = end;
        }
        out
    }

    /// Maximum edge count on any root-to-leaf path; a lone terminal has depth 0.
    pub fn depth(&self) -> usize {
        prefix_depth(&self.nodes)
    }

    /// Depth of every node, in prefix order.
    pub fn node_depths(&self) -> Vec<usize> {
        let mut depths = Vec::with_capacity(self.nodes.len());
        let mut pending = vec![0usize];
        for p in &self.nodes {
            let d = pending.pop().expect("arity-valid tree");
            depths.push(d);
            for _ in 0..p.arity() {
                pending.push(d + 1);
            }
        }
        depths
    }

    /// Visits terminals left to right together with their negation flag.
    pub fn for_each_leaf(&self, mut visit: impl FnMut(Leaf)) {
        let mut pending = Vec::with_capacity(16);
        pending.push(false);
        for &p in &self.nodes {
            let negated = pending.pop().expect("arity-valid tree");
            if p.is_function() {
                let flag = negated || p == Primitive::NegJoin;
                for _ in 0..p.arity() {
                    pending.push(flag);
                }
            } else {
                visit(Leaf {
                    primitive: p,
                    neg_ancestor: negated,
                });
            }
        }
    }

    /// Terminals in left-to-right order with their negation flags.
    pub fn inorder_leaves(&self) -> Vec<Leaf> {
        let mut out = Vec::new();
        self.for_each_leaf(|leaf| out.push(leaf));
        out
    }

    /// Replaces the subtree rooted at `start` with `replacement` (itself a
    /// complete prefix sequence), returning a new tree.
    pub fn with_subtree(&self, start: usize, replacement: &[Primitive]) -> ProgramTree {
        let end = self.subtree_end(start);
        let mut nodes = Vec::with_capacity(self.nodes.len() - (end - start) + replacement.len());
        nodes.extend_from_slice(&self.nodes[..start]);
        nodes.extend_from_slice(replacement);
        nodes.extend_from_slice(&self.nodes[end..]);
        Self::from_prefix_unchecked(nodes)
    }

    /// Checks that every symbol belongs to `ps`.
    pub fn validate(&self, ps: &PrimitiveSet) -> Result<()> {
        match self.nodes.iter().find(|p| !ps.contains(**p)) {
            Some(p) => Err(Error::ForeignPrimitive(p.to_string())),
            None => Ok(()),
        }
    }
}

pub(crate) fn subtree_end(nodes: &[Primitive], start: usize) -> usize {
    let mut open = 1usize;
    let mut i = start;
    while open > 0 {
        open = open - 1 + nodes[i].arity();
        i += 1;
    }
    i
}

pub(crate) fn prefix_depth(nodes: &[Primitive]) -> usize {
    let mut pending: Vec<usize> = Vec::with_capacity(16);
    pending.push(0);
    let mut max = 0;
    for p in nodes {
        let d = pending.pop().expect("arity-valid tree");
        max = max.max(d);
        for _ in 0..p.arity() {
            pending.push(d + 1);
        }
    }
    max
}

impl fmt::Display for ProgramTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Each entry counts the arguments still to print before closing a paren.
        let mut open: Vec<usize> = Vec::new();
        for (i, p) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if p.is_function() {
                write!(f, "({p}")?;
                open.push(p.arity());
            } else {
                write!(f, "{p}")?;
                while let Some(remaining) = open.last_mut() {
                    *remaining -= 1;
                    if *remaining > 0 {
                        break;
                    }
                    f.write_str(")")?;
                    open.pop();
                }
            }
        }
        Ok(())
    }
}

impl FromStr for ProgramTree {
    type Err = Error;

    /// Parses the parenthesised prefix form, e.g. `(JOIN (NEG_JOIN X1 ~X2) J3)`.
    fn from_str(s: &str) -> Result<Self> {
        let spaced = s.replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        let mut nodes = Vec::new();
        let mut pos = 0;
        parse_expr(&tokens, &mut pos, &mut nodes)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected `{}` after complete tree",
                tokens[pos]
            )));
        }
        Ok(Self { nodes })
    }
}

fn parse_expr(tokens: &[&str], pos: &mut usize, out: &mut Vec<Primitive>) -> Result<()> {
    let tok = *tokens
        .get(*pos)
        .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok {
        "(" => {
            let head = *tokens
                .get(*pos)
                .ok_or_else(|| Error::Parse("unexpected end of input after `(`".into()))?;
            *pos += 1;
            let function: Primitive = head.parse()?;
            if function.is_terminal() {
                return Err(Error::Parse(format!("`{head}` cannot head a list")));
            }
            out.push(function);
            for _ in 0..function.arity() {
                parse_expr(tokens, pos, out)?;
            }
            match tokens.get(*pos) {
                Some(&")") => {
                    *pos += 1;
                    Ok(())
                }
                Some(t) => Err(Error::Parse(format!(
                    "{function} takes {} arguments; found extra `{t}`",
                    function.arity()
                ))),
                None => Err(Error::Parse("missing `)`".into())),
            }
        }
        ")" => Err(Error::Parse("unexpected `)`".into())),
        symbol => {
            let p: Primitive = symbol.parse()?;
            if p.is_function() {
                return Err(Error::Parse(format!("{p} used without arguments")));
            }
            out.push(p);
            Ok(())
        }
    }
}

/// Smallest edge-depth of a binary tree with at least `pairs` leaves.
pub fn minimum_optimum_depth(pairs: usize) -> Result<usize> {
    if pairs == 0 {
        return Err(Error::ZeroLength);
    }
    Ok((usize::BITS - (pairs - 1).leading_zeros()) as usize)
}

/// Edge-count depth limit applied to every tree in a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthBudget {
    pub max_depth: usize,
}

impl DepthBudget {
    pub fn new(max_depth: usize) -> Self {
        Self { max_depth }
    }

    /// One more than the depth of the smallest tree holding all `pairs` positive terminals.
    pub fn for_pairs(pairs: usize) -> Result<Self> {
        Ok(Self::new(minimum_optimum_depth(pairs)? + 1))
    }

    /// Levels including the root.
    pub fn levels(&self) -> usize {
        self.max_depth + 1
    }

    pub fn admits(&self, tree: &ProgramTree) -> bool {
        tree.depth() <= self.max_depth
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Primitive::*;

    fn t(s: &str) -> ProgramTree {
        s.parse().unwrap()
    }

    const FIG3: &str = "(JOIN (JOIN ~X3 X1) (JOIN (JOIN ~X1 ~X2) (JOIN X4 ~X3)))";

    #[test]
    fn fig3_leaf_order() {
        let leaves: Vec<_> = t(FIG3).inorder_leaves();
        let symbols: Vec<_> = leaves.iter().map(|l| l.primitive).collect();
        assert_eq!(
            symbols,
            vec![Negative(3), Positive(1), Negative(1), Negative(2), Positive(4), Negative(3)]
        );
        assert!(leaves.iter().all(|l| !l.neg_ancestor));
    }

    #[test]
    fn single_leaf() {
        let tree = ProgramTree::leaf(Positive(1));
        assert_eq!(
            tree.inorder_leaves(),
            vec![Leaf {
                primitive: Positive(1),
                neg_ancestor: false
            }]
        );
        assert_eq!(tree.depth(), 0);
        assert_eq!(tree.size(), 1);
    }

    #[test]
    fn nested_negation_flags_once() {
        let leaves = t("(NEG_JOIN (NEG_JOIN X1 X2) X3)").inorder_leaves();
        assert_eq!(leaves.len(), 3);
        assert!(leaves.iter().all(|l| l.neg_ancestor));
        let mixed = t("(JOIN (NEG_JOIN X1 X2) X3)").inorder_leaves();
        let flags: Vec<_> = mixed.iter().map(|l| l.neg_ancestor).collect();
        assert_eq!(flags, vec![true, true, false]);
    }

    #[test]
    fn depth_and_size() {
        let j = t("(JOIN X1 X2)");
        assert_eq!((j.depth(), j.size()), (1, 3));

        fn full(d: usize) -> ProgramTree {
            if d == 0 {
                ProgramTree::leaf(Positive(1))
            } else {
                ProgramTree::join(full(d - 1), full(d - 1))
            }
        }
        let f5 = full(5);
        assert_eq!(f5.num_leaves(), 32);
        assert_eq!((f5.depth(), f5.size()), (5, 63));
        assert_eq!(t(FIG3).depth(), 3);
        assert_eq!(t(FIG3).node_depths(), vec![0, 1, 2, 2, 1, 2, 3, 3, 2, 3, 3]);
    }

    #[test]
    fn minimum_depths() {
        assert_eq!(minimum_optimum_depth(20).unwrap(), 5);
        assert_eq!(DepthBudget::for_pairs(20).unwrap().max_depth, 6);
        assert_eq!(DepthBudget::for_pairs(20).unwrap().levels(), 7);
        assert_eq!(minimum_optimum_depth(1).unwrap(), 0);
        assert_eq!(minimum_optimum_depth(2).unwrap(), 1);
        assert!(minimum_optimum_depth(0).is_err());
    }

    #[test]
    fn minimum_depth_matches_enumeration() {
        for l in 1..=300usize {
            let brute = (0..).find(|d| 1usize << d >= l).unwrap();
            assert_eq!(minimum_optimum_depth(l).unwrap(), brute, "l = {l}");
        }
        assert_eq!(minimum_optimum_depth(33).unwrap(), 6);
    }

    #[test]
    fn text_form() {
        let s = "(JOIN (NEG_JOIN X1 ~X2) J3)";
        assert_eq!(t(s).to_string(), s);
        assert_eq!(t(FIG3).to_string(), FIG3);
        assert_eq!(t("  X7 ").to_string(), "X7");
        assert_eq!(t("(JOIN(JOIN X1 X2)X3)").to_string(), "(JOIN (JOIN X1 X2) X3)");
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "",
            "(JOIN X1)",
            "(JOIN X1 X2 X3)",
            "(X1 X2)",
            "JOIN",
            "(JOIN X1 X2",
            "X1 X2",
            ")",
            "(JOIN X1 Y2)",
        ] {
            assert!(bad.parse::<ProgramTree>().is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn from_prefix_checks_arity() {
        assert!(ProgramTree::from_prefix(vec![Join, Positive(1)]).is_err());
        assert!(ProgramTree::from_prefix(vec![Positive(1), Positive(2)]).is_err());
        assert!(ProgramTree::from_prefix(vec![]).is_err());
        assert!(ProgramTree::from_prefix(vec![Join, Positive(1), Negative(1)]).is_ok());
        assert!(ProgramTree::node(Join, vec![ProgramTree::leaf(Positive(1))]).is_err());
    }

    #[test]
    fn subtrees() {
        let tree = t(FIG3);
        assert_eq!(tree.subtree(4).to_string(), "(JOIN (JOIN ~X1 ~X2) (JOIN X4 ~X3))");
        assert_eq!(tree.subtree_end(1), 4);
        let kids: Vec<String> = tree.children().iter().map(|c| c.to_string()).collect();
        assert_eq!(kids, vec!["(JOIN ~X3 X1)", "(JOIN (JOIN ~X1 ~X2) (JOIN X4 ~X3))"]);
        let swapped = tree.with_subtree(1, &[Junk(1)]);
        assert_eq!(
            swapped.to_string(),
            "(JOIN J1 (JOIN (JOIN ~X1 ~X2) (JOIN X4 ~X3)))"
        );
    }

    #[test]
    fn validate_against_set() {
        let ps = PrimitiveSet::basic(3).unwrap();
        assert!(t("(JOIN X1 ~X3)").validate(&ps).is_ok());
        assert!(t("(JOIN X1 X4)").validate(&ps).is_err());
        assert!(t("(NEG_JOIN X1 X2)").validate(&ps).is_err());
        assert!(t("(JOIN X1 J1)").validate(&ps).is_err());
    }
}
