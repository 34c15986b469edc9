//! Component streams, the composed m-ary extractor, and the prefix-code
//! correspondence between a symbol string's code and its component streams.

use thiserror::Error;

use crate::bits::BitString;
use crate::extract::{extract_into, ExtractorSpec};
use crate::tree::{BinarizationTree, Child, Symbol};

/// Splits `x` into the `m - 1` component streams, ordered by node index.
///
/// # Panics
/// If a symbol is not below `tree.m()`.
pub fn binarize(tree: &BinarizationTree, x: &[Symbol]) -> Vec<BitString> {
    let mut out = vec![BitString::new(); tree.internal_count()];
    for &s in x {
        check_symbol(tree, s);
        for (node, bit) in tree.path_up(s) {
            out[node - 1].push(bit);
        }
    }
    out
}

/// `Ψ(Φ_1(x)) * ... * Ψ(Φ_{m-1}(x))`, in node-index order.
pub fn compose(tree: &BinarizationTree, spec: ExtractorSpec, x: &[Symbol]) -> BitString {
    let components = binarize(tree, x);
    let mut out = BitString::new();
    for c in &components {
        extract_into(spec, c, &mut out);
    }
    out
}

/// Like [`compose`], but only the listed components are extracted, in the
/// given order. Dropping components still gives an extracting function.
///
/// # Panics
/// If a node index is out of range.
pub fn compose_nodes(
    tree: &BinarizationTree,
    spec: ExtractorSpec,
    x: &[Symbol],
    nodes: &[usize],
) -> BitString {
    let components = binarize(tree, x);
    let mut out = BitString::new();
    for &i in nodes {
        extract_into(spec, &components[i - 1], &mut out);
    }
    out
}

/// Concatenated prefix codewords of `x`.
pub fn encode(tree: &BinarizationTree, x: &[Symbol]) -> BitString {
    let mut out = BitString::new();
    let mut path = Vec::new();
    for &s in x {
        check_symbol(tree, s);
        path.clear();
        path.extend(tree.path_up(s).map(|(_, bit)| bit));
        out.extend(path.iter().rev().copied());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("code ends inside a codeword after {decoded} symbols; residual bits {residual:?}")]
    Truncated { decoded: usize, residual: BitString },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComponentsError {
    #[error("expected {expected} components, got {found}")]
    Count { expected: usize, found: usize },
    #[error("component {component} exhausted while emitting symbol {symbol}")]
    Exhausted { component: usize, symbol: usize },
    #[error("component {component} has {remaining} unread bits")]
    Leftover { component: usize, remaining: usize },
}

/// Inverse of [`encode`].
pub fn decode(tree: &BinarizationTree, code: &[bool]) -> Result<Vec<Symbol>, CodeError> {
    let mut out = Vec::new();
    let mut node = 1;
    let mut start = 0;
    for (k, &bit) in code.iter().enumerate() {
        match tree.children(node)[bit as usize] {
            Child::Internal(next) => node = next,
            Child::Leaf(s) => {
                out.push(s);
                node = 1;
                start = k + 1;
            }
        }
    }
    if start < code.len() {
        return Err(CodeError::Truncated {
            decoded: out.len(),
            residual: code[start..].iter().copied().collect(),
        });
    }
    Ok(out)
}

/// Rebuilds the code from component streams: for each symbol, walk down
/// from the root consuming the front bit of the visited node's component.
pub fn code_from_components(
    tree: &BinarizationTree,
    components: &[BitString],
) -> Result<BitString, ComponentsError> {
    if components.len() != tree.internal_count() {
        return Err(ComponentsError::Count {
            expected: tree.internal_count(),
            found: components.len(),
        });
    }
    let total: usize = components.iter().map(|c| c.len()).sum();
    let mut code = BitString::with_capacity(total);
    let mut cursor = vec![0usize; components.len()];
    // The root sees every symbol, so its length is the symbol count.
    let symbols = components[0].len();
    for symbol in 0..symbols {
        let mut j = 1;
        loop {
            let bit = *components[j - 1]
                .get(cursor[j - 1])
                .ok_or(ComponentsError::Exhausted { component: j, symbol })?;
            cursor[j - 1] += 1;
            code.push(bit);
            match tree.children(j)[bit as usize] {
                Child::Internal(next) => j = next,
                Child::Leaf(_) => break,
            }
        }
    }
    for (i, (c, &read)) in components.iter().zip(&cursor).enumerate() {
        if read != c.len() {
            return Err(ComponentsError::Leftover {
                component: i + 1,
                remaining: c.len() - read,
            });
        }
    }
    Ok(code)
}

/// Splits a code into component streams: each code bit is appended to the
/// component of the node it leaves from.
pub fn components_from_code(
    tree: &BinarizationTree,
    code: &[bool],
) -> Result<Vec<BitString>, CodeError> {
    let mut out = vec![BitString::new(); tree.internal_count()];
    let mut j = 1;
    let mut start = 0;
    let mut decoded = 0;
    for (k, &bit) in code.iter().enumerate() {
        out[j - 1].push(bit);
        match tree.children(j)[bit as usize] {
            Child::Internal(next) => j = next,
            Child::Leaf(_) => {
                j = 1;
                start = k + 1;
                decoded += 1;
            }
        }
    }
    if start < code.len() {
        return Err(CodeError::Truncated {
            decoded,
            residual: code[start..].iter().copied().collect(),
        });
    }
    Ok(out)
}

fn check_symbol(tree: &BinarizationTree, s: Symbol) {
    assert!(
        (s as usize) < tree.m(),
        "symbol {s} out of range for alphabet of size {}",
        tree.m()
    );
}
