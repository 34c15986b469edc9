//! Named tree constructions and component-table rendering.
//!
//! Components are numbered breadth-first. The comb and binary-expansion
//! constructions also have a conventional column order and naming: `x^(i)`
//! for the comb (`x^(1)` first, the deepest node) and `x^α` for the
//! expansion tree (prefixes `α` by length, then lexicographically).

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::tree::{comb_tree, expansion_width, zhou_bruck_tree, BinarizationTree, Symbol, TreeError};

/// Where a tree comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeSource {
    Comb,
    ZhouBruck,
    Literal(BinarizationTree),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("alphabet size is required for the {0} tree")]
    MissingAlphabet(&'static str),
    #[error("tree has {leaves} leaves but the alphabet size is {m}")]
    AlphabetMismatch { leaves: usize, m: usize },
}

impl FromStr for TreeSource {
    type Err = TreeError;

    /// `comb`, `zb` (or `zhou-bruck`), or an S-expression.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "comb" => Ok(Self::Comb),
            "zb" | "zhou-bruck" => Ok(Self::ZhouBruck),
            text => text.parse().map(Self::Literal),
        }
    }
}

impl TreeSource {
    /// Builds the tree. `m` is required for the named constructions and, if
    /// given for a literal tree, must match its leaf count.
    pub fn build(&self, m: Option<usize>) -> Result<BinarizationTree, SourceError> {
        match self {
            Self::Comb => Ok(comb_tree(m.ok_or(SourceError::MissingAlphabet("comb"))?)?),
            Self::ZhouBruck => Ok(zhou_bruck_tree(m.ok_or(SourceError::MissingAlphabet("zb"))?)?),
            Self::Literal(tree) => match m {
                Some(m) if m != tree.m() => Err(SourceError::AlphabetMismatch {
                    leaves: tree.m(),
                    m,
                }),
                _ => Ok(tree.clone()),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComponentOrder {
    /// Node-index (breadth-first) order.
    #[default]
    Bfs,
    /// The construction's conventional order; same as `Bfs` for literal trees.
    Paper,
}

impl FromStr for ComponentOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfs" => Ok(Self::Bfs),
            "paper" => Ok(Self::Paper),
            other => Err(format!("unknown component order {other:?}; expected bfs or paper")),
        }
    }
}

/// One column of a component table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub node: usize,
    pub label: String,
}

/// Components of `tree` in the requested order, with display labels.
pub fn columns(source: &TreeSource, tree: &BinarizationTree, order: ComponentOrder) -> Vec<Column> {
    let count = tree.internal_count();
    match (order, source) {
        (ComponentOrder::Paper, TreeSource::Comb) => (1..=count)
            .map(|i| Column {
                node: tree.m() - i,
                label: format!("x^({i})"),
            })
            .collect(),
        (ComponentOrder::Paper, TreeSource::ZhouBruck) => {
            let mut cols: Vec<(String, usize)> =
                (1..=count).map(|i| (expansion_prefix(tree, i), i)).collect();
            cols.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
            cols.into_iter()
                .map(|(alpha, node)| Column {
                    node,
                    label: if alpha.is_empty() {
                        "x^λ".to_string()
                    } else {
                        format!("x^{alpha}")
                    },
                })
                .collect()
        }
        _ => (1..=count)
            .map(|i| Column {
                node: i,
                label: format!("Φ{i}"),
            })
            .collect(),
    }
}

/// Longest common prefix of the binary expansions of node `i`'s symbols.
fn expansion_prefix(tree: &BinarizationTree, i: usize) -> String {
    let width = expansion_width(tree.m());
    let mut symbols = tree.support(i, false).expect("valid node");
    symbols.extend(tree.support(i, true).expect("valid node"));
    let lo = *symbols.iter().min().expect("nonempty support");
    let hi = *symbols.iter().max().expect("nonempty support");
    let common = ((lo ^ hi).leading_zeros() - (Symbol::BITS - width)) as usize;
    let expansion = format!("{:0w$b}", lo, w = width as usize);
    expansion[..common].to_string()
}

/// Tab-separated component table: one row per symbol, entries `0`, `1`, `λ`.
pub fn component_table(tree: &BinarizationTree, cols: &[Column]) -> String {
    let mut out = String::from("x");
    for c in cols {
        write!(out, "\t{}", c.label).unwrap();
    }
    out.push('\n');
    for x in 0..tree.m() as Symbol {
        write!(out, "{x}").unwrap();
        for c in cols {
            write!(out, "\t{}", tree.component(c.node, x).expect("in range")).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Component table, child maps `a(i)`/`b(i)` (0 for a leaf) and codewords.
pub fn tree_report(tree: &BinarizationTree, cols: &[Column]) -> String {
    let mut out = component_table(tree, cols);
    out.push_str("\ni\tcomponent\ta(i)\tb(i)\n");
    let label_of = |i: usize| {
        cols.iter()
            .find(|c| c.node == i)
            .map_or_else(|| format!("Φ{i}"), |c| c.label.clone())
    };
    for i in 1..=tree.internal_count() {
        writeln!(out, "{i}\t{}\t{}\t{}", label_of(i), tree.a(i), tree.b(i)).unwrap();
    }
    out.push_str("\nx\tcodeword\n");
    for x in 0..tree.m() as Symbol {
        writeln!(out, "{x}\t{}", tree.codeword(x)).unwrap();
    }
    out
}
