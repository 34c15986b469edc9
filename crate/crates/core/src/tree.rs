//! Binarization trees.
//!
//! A binarization tree for an `m`-faced die is a full binary tree with `m`
//! leaves labeled `0..m` and `m - 1` internal nodes. Internal node `i`
//! defines the component map `Φ_i`: symbols in its left subtree map to `0`,
//! symbols in its right subtree to `1` and every other symbol is skipped.
//! Internal nodes are numbered `1..m` breadth-first from the root, left
//! before right.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::bits::BitString;

/// A face of the die, `0..m`.
pub type Symbol = u32;

/// Largest supported alphabet.
pub const MAX_ALPHABET: usize = 1 << 16;

/// Child slot of an internal node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Child {
    /// Internal node index (`2..m` once canonicalized).
    Internal(usize),
    Leaf(Symbol),
}

/// Value of a component map on one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentValue {
    Zero,
    One,
    /// No output (λ).
    Skip,
}

impl ComponentValue {
    pub fn bit(self) -> Option<bool> {
        match self {
            Self::Zero => Some(false),
            Self::One => Some(true),
            Self::Skip => None,
        }
    }
}

impl fmt::Display for ComponentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Zero => "0",
            Self::One => "1",
            Self::Skip => "λ",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("node opened at byte {position} has {found} children, expected 2")]
    Arity { position: usize, found: usize },
    #[error("a binarization tree needs at least 2 leaves, found {0}")]
    TooFewLeaves(usize),
    #[error("alphabet of {0} symbols exceeds the supported maximum {MAX_ALPHABET}")]
    TooManyLeaves(usize),
    #[error("duplicate leaf label {0}")]
    DuplicateLabel(Symbol),
    #[error("leaf label {label} out of range for {leaves} leaves (label {missing} is missing)")]
    LabelOutOfRange {
        label: Symbol,
        leaves: usize,
        missing: Symbol,
    },
    #[error("child maps do not form a single tree rooted at node 1: {0}")]
    NotATree(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("internal node {index} out of range 1..={max}")]
    Node { index: usize, max: usize },
    #[error("symbol {symbol} out of range for alphabet of size {m}")]
    Symbol { symbol: Symbol, m: usize },
}

/// A validated binarization tree with breadth-first node numbering.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinarizationTree {
    m: usize,
    /// `children[i - 1] = [a(i), b(i)]`.
    children: Vec<[Child; 2]>,
    /// Parent node and side (`true` = right) of each leaf.
    leaf_parent: Vec<(usize, bool)>,
    /// Parent node and side of each internal node; `None` for the root.
    node_parent: Vec<Option<(usize, bool)>>,
}

impl BinarizationTree {
    /// Builds a tree from child maps, `children[i - 1]` holding node `i`'s
    /// left and right child with node 1 the root. Any numbering is accepted;
    /// the result is renumbered breadth-first.
    pub fn new(children: Vec<[Child; 2]>) -> Result<Self, TreeError> {
        if children.is_empty() {
            return Err(TreeError::TooFewLeaves(1));
        }
        Self::from_arena(&children, 0, |i| {
            i.checked_sub(1)
                .filter(|&j| j < children.len())
                .ok_or_else(|| TreeError::NotATree(format!("child refers to unknown node {i}")))
        })
    }

    /// `nodes` is an arena whose `Child::Internal` entries are arena
    /// positions after passing through `resolve`.
    fn from_arena(
        nodes: &[[Child; 2]],
        root: usize,
        resolve: impl Fn(usize) -> Result<usize, TreeError>,
    ) -> Result<Self, TreeError> {
        let leaves = nodes.len() + 1;
        if leaves < 2 {
            return Err(TreeError::TooFewLeaves(leaves));
        }
        if leaves > MAX_ALPHABET {
            return Err(TreeError::TooManyLeaves(leaves));
        }

        // Breadth-first walk assigns canonical indices and rejects sharing,
        // cycles and unreachable nodes.
        let mut canonical = vec![usize::MAX; nodes.len()];
        let mut order = Vec::with_capacity(nodes.len());
        let mut queue = VecDeque::from([root]);
        canonical[root] = 1;
        let mut labels = Vec::with_capacity(leaves);
        while let Some(pos) = queue.pop_front() {
            order.push(pos);
            for child in nodes[pos] {
                match child {
                    Child::Leaf(s) => labels.push(s),
                    Child::Internal(c) => {
                        let c = resolve(c)?;
                        if canonical[c] != usize::MAX {
                            return Err(TreeError::NotATree(format!(
                                "node {} is reached twice",
                                c + 1
                            )));
                        }
                        canonical[c] = order.len() + queue.len() + 1;
                        queue.push_back(c);
                    }
                }
            }
        }
        if order.len() != nodes.len() {
            return Err(TreeError::NotATree(format!(
                "{} internal nodes unreachable from the root",
                nodes.len() - order.len()
            )));
        }
        debug_assert_eq!(labels.len(), leaves);

        let mut seen = vec![false; leaves];
        for &s in &labels {
            if s as usize >= leaves {
                let mut present = vec![false; leaves];
                labels
                    .iter()
                    .filter(|&&l| (l as usize) < leaves)
                    .for_each(|&l| present[l as usize] = true);
                let missing = present.iter().position(|p| !p).unwrap_or(0) as Symbol;
                return Err(TreeError::LabelOutOfRange {
                    label: s,
                    leaves,
                    missing,
                });
            }
            if std::mem::replace(&mut seen[s as usize], true) {
                return Err(TreeError::DuplicateLabel(s));
            }
        }

        let mut children = Vec::with_capacity(nodes.len());
        for &pos in &order {
            let mut slots = nodes[pos];
            for slot in &mut slots {
                if let Child::Internal(c) = *slot {
                    *slot = Child::Internal(canonical[resolve(c)?]);
                }
            }
            children.push(slots);
        }

        let mut leaf_parent = vec![(0, false); leaves];
        let mut node_parent = vec![None; nodes.len()];
        for (i, slots) in children.iter().enumerate() {
            for (side, child) in slots.iter().enumerate() {
                let link = (i + 1, side == 1);
                match *child {
                    Child::Leaf(s) => leaf_parent[s as usize] = link,
                    Child::Internal(c) => node_parent[c - 1] = Some(link),
                }
            }
        }

        Ok(Self {
            m: leaves,
            children,
            leaf_parent,
            node_parent,
        })
    }

    /// Alphabet size (number of leaves).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of internal nodes, `m - 1`.
    pub fn internal_count(&self) -> usize {
        self.children.len()
    }

    /// Left and right child of internal node `i`.
    ///
    /// # Panics
    /// If `i` is not in `1..m`.
    pub fn children(&self, i: usize) -> [Child; 2] {
        self.children[i - 1]
    }

    /// `a(i)`: index of the left child if it is internal, 0 for a leaf.
    pub fn a(&self, i: usize) -> usize {
        match self.children(i)[0] {
            Child::Internal(c) => c,
            Child::Leaf(_) => 0,
        }
    }

    /// `b(i)`: index of the right child if it is internal, 0 for a leaf.
    pub fn b(&self, i: usize) -> usize {
        match self.children(i)[1] {
            Child::Internal(c) => c,
            Child::Leaf(_) => 0,
        }
    }

    /// Parent node and side of internal node `i`, `None` at the root.
    pub fn parent(&self, i: usize) -> Option<(usize, bool)> {
        self.node_parent[i - 1]
    }

    /// `(node, bit)` pairs from the leaf of `x` up to the root.
    ///
    /// # Panics
    /// If `x >= m`.
    pub fn path_up(&self, x: Symbol) -> PathUp<'_> {
        PathUp {
            tree: self,
            next: Some(self.leaf_parent[x as usize]),
        }
    }

    pub fn component(&self, i: usize, x: Symbol) -> Result<ComponentValue, IndexError> {
        self.check_node(i)?;
        if x as usize >= self.m {
            return Err(IndexError::Symbol { symbol: x, m: self.m });
        }
        Ok(self
            .path_up(x)
            .find(|&(node, _)| node == i)
            .map_or(ComponentValue::Skip, |(_, bit)| {
                if bit {
                    ComponentValue::One
                } else {
                    ComponentValue::Zero
                }
            }))
    }

    /// Symbols in the left (`side = false`) or right subtree of node `i`,
    /// sorted ascending.
    pub fn support(&self, i: usize, side: bool) -> Result<Vec<Symbol>, IndexError> {
        self.check_node(i)?;
        let mut out = Vec::new();
        let mut stack = vec![self.children(i)[side as usize]];
        while let Some(c) = stack.pop() {
            match c {
                Child::Leaf(s) => out.push(s),
                Child::Internal(j) => stack.extend(self.children(j)),
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Prefix codeword of `x`: the root-to-leaf path, `0` = left.
    pub fn codeword(&self, x: Symbol) -> BitString {
        let mut path: Vec<bool> = self.path_up(x).map(|(_, bit)| bit).collect();
        path.reverse();
        path.into()
    }

    fn check_node(&self, i: usize) -> Result<(), IndexError> {
        if i == 0 || i > self.internal_count() {
            return Err(IndexError::Node {
                index: i,
                max: self.internal_count(),
            });
        }
        Ok(())
    }
}

/// Iterator returned by [`BinarizationTree::path_up`].
pub struct PathUp<'a> {
    tree: &'a BinarizationTree,
    next: Option<(usize, bool)>,
}

impl Iterator for PathUp<'_> {
    type Item = (usize, bool);

    fn next(&mut self) -> Option<Self::Item> {
        let here = self.next?;
        self.next = self.tree.node_parent[here.0 - 1];
        Some(here)
    }
}

/// Left-leaning comb `((((0 1) 2) 3) ... m-1)`.
///
/// The node whose right child is leaf `i` maps `0..i` to `0`, `i` to `1`
/// and skips larger symbols; breadth-first it has index `m - i`.
pub fn comb_tree(m: usize) -> Result<BinarizationTree, TreeError> {
    if m < 2 {
        return Err(TreeError::TooFewLeaves(m));
    }
    // Arena slot `i - 1` holds the node for symbol `i`.
    let nodes: Vec<[Child; 2]> = (1..m)
        .map(|i| {
            let left = if i == 1 {
                Child::Leaf(0)
            } else {
                Child::Internal(i - 2)
            };
            [left, Child::Leaf(i as Symbol)]
        })
        .collect();
    BinarizationTree::from_arena(&nodes, m - 2, Ok)
}

/// Tree of `⌈lg m⌉`-bit binary expansions with degenerate nodes collapsed.
///
/// Every node splits the symbols sharing some expansion prefix by the next
/// bit. A prefix whose symbols all share the next bit as well yields a
/// degenerate component and is skipped.
pub fn zhou_bruck_tree(m: usize) -> Result<BinarizationTree, TreeError> {
    if m < 2 {
        return Err(TreeError::TooFewLeaves(m));
    }
    let width = expansion_width(m);
    let mut nodes = Vec::with_capacity(m - 1);
    let root = zb_build(0, 1 << width, m, &mut nodes);
    match root {
        Child::Internal(pos) => BinarizationTree::from_arena(&nodes, pos, Ok),
        Child::Leaf(_) => unreachable!("m >= 2 always splits"),
    }
}

/// `⌈lg m⌉`.
pub fn expansion_width(m: usize) -> u32 {
    usize::BITS - (m - 1).leading_zeros()
}

/// Builds the subtree for the aligned symbol interval `lo..lo + span`.
fn zb_build(lo: usize, span: usize, m: usize, nodes: &mut Vec<[Child; 2]>) -> Child {
    let hi = (lo + span).min(m);
    if hi - lo == 1 {
        return Child::Leaf(lo as Symbol);
    }
    let half = span / 2;
    if lo + half >= m {
        return zb_build(lo, half, m, nodes);
    }
    let left = zb_build(lo, half, m, nodes);
    let right = zb_build(lo + half, half, m, nodes);
    nodes.push([left, right]);
    Child::Internal(nodes.len() - 1)
}

/// Uniformly shuffled labels joined by random pairwise merges.
pub fn random_tree<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<BinarizationTree, TreeError> {
    if m < 2 {
        return Err(TreeError::TooFewLeaves(m));
    }
    let mut pool: Vec<Child> = (0..m as Symbol).map(Child::Leaf).collect();
    pool.shuffle(rng);
    let mut nodes = Vec::with_capacity(m - 1);
    while pool.len() > 1 {
        let a = pool.swap_remove(rng.gen_range(0..pool.len()));
        let b = pool.swap_remove(rng.gen_range(0..pool.len()));
        nodes.push([a, b]);
        pool.push(Child::Internal(nodes.len() - 1));
    }
    BinarizationTree::from_arena(&nodes, nodes.len() - 1, Ok)
}

impl FromStr for BinarizationTree {
    type Err = TreeError;

    /// Parses `tree := label | "(" tree tree ")"` with decimal labels.
    /// Whitespace separates tokens and is otherwise ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        struct Frame {
            open: usize,
            children: Vec<Child>,
        }
        let syntax = |position: usize, message: &str| TreeError::Syntax {
            position,
            message: message.to_string(),
        };

        let bytes = s.as_bytes();
        let mut nodes: Vec<[Child; 2]> = Vec::new();
        let mut stack: Vec<Frame> = Vec::new();
        let mut root: Option<Child> = None;
        let mut pos = 0;
        while pos < bytes.len() {
            let c = bytes[pos];
            let start = pos;
            let finished = match c {
                b if b.is_ascii_whitespace() => {
                    pos += 1;
                    continue;
                }
                b'(' => {
                    if root.is_some() {
                        return Err(syntax(pos, "trailing input after tree"));
                    }
                    stack.push(Frame {
                        open: pos,
                        children: Vec::with_capacity(2),
                    });
                    pos += 1;
                    continue;
                }
                b')' => {
                    let frame = stack.pop().ok_or_else(|| syntax(pos, "unmatched ')'"))?;
                    pos += 1;
                    let [left, right] = <[Child; 2]>::try_from(frame.children).map_err(|v| {
                        TreeError::Arity {
                            position: frame.open,
                            found: v.len(),
                        }
                    })?;
                    nodes.push([left, right]);
                    Child::Internal(nodes.len() - 1)
                }
                b'0'..=b'9' => {
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let label = s[start..pos]
                        .parse::<Symbol>()
                        .map_err(|_| syntax(start, "leaf label too large"))?;
                    Child::Leaf(label)
                }
                _ => {
                    let ch = s[pos..].chars().next().unwrap_or('?');
                    return Err(syntax(pos, &format!("unexpected character {ch:?}")));
                }
            };
            match stack.last_mut() {
                Some(frame) => {
                    if frame.children.len() == 2 {
                        return Err(TreeError::Arity {
                            position: frame.open,
                            found: 3,
                        });
                    }
                    frame.children.push(finished);
                }
                None if root.is_none() => root = Some(finished),
                None => return Err(syntax(start, "trailing input after tree")),
            }
        }
        if let Some(frame) = stack.last() {
            return Err(syntax(frame.open, "unclosed '('"));
        }
        match root {
            None => Err(syntax(0, "empty tree")),
            Some(Child::Leaf(_)) => Err(TreeError::TooFewLeaves(1)),
            Some(Child::Internal(pos)) => BinarizationTree::from_arena(&nodes, pos, Ok),
        }
    }
}

impl fmt::Display for BinarizationTree {
    /// Canonical S-expression with single-space separators.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Step {
            Open(Child),
            Space,
            Close,
        }
        let mut stack = vec![Step::Open(Child::Internal(1))];
        while let Some(step) = stack.pop() {
            match step {
                Step::Open(Child::Leaf(s)) => write!(f, "{s}")?,
                Step::Open(Child::Internal(i)) => {
                    let [l, r] = self.children(i);
                    f.write_str("(")?;
                    stack.extend([Step::Close, Step::Open(r), Step::Space, Step::Open(l)]);
                }
                Step::Space => f.write_str(" ")?,
                Step::Close => f.write_str(")")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinarizationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinarizationTree({self})")
    }
}
