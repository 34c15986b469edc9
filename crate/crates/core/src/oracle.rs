//! Exhaustive checks of the extracting property.
//!
//! A function on `{0..m}^n` is extracting for every source distribution iff
//! its image of each equiprobable class (strings with fixed symbol counts)
//! is an extracting multiset: for each occupied output length `L`, all `2^L`
//! strings occur equally often. Everything here verifies by counting over
//! enumerated classes.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::binarize::{binarize, compose_nodes};
use crate::bits::BitString;
use crate::extract::{von_neumann, ExtractorSpec};
use crate::tree::{BinarizationTree, Symbol};

/// Default cap on the number of strings a single check may enumerate.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration needs {required} strings, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("component {index} out of range 1..={max}")]
    BadComponent { index: usize, max: usize },
    #[error("composition has {found} entries, alphabet has {expected}")]
    AlphabetMismatch { expected: usize, found: usize },
}

/// Symbol counts `(n_0, ..., n_{m-1})` naming the class of strings with
/// exactly `n_i` copies of symbol `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    /// String length `n = Σ n_i`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Class size `n! / (n_0! ... n_{m-1}!)`, saturating at `u128::MAX`.
    pub fn multinomial(&self) -> u128 {
        let mut acc: u128 = 1;
        let mut placed = 0;
        for &c in &self.0 {
            placed += c;
            match binomial(placed as u64, c as u64).and_then(|b| acc.checked_mul(b)) {
                Some(v) => acc = v,
                None => return u128::MAX,
            }
        }
        acc
    }

    /// Composition of a string.
    pub fn of(m: usize, x: &[Symbol]) -> Self {
        let mut counts = vec![0; m];
        for &s in x {
            counts[s as usize] += 1;
        }
        Self(counts)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `C(n, k)` or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(c)
}

/// All compositions of `n` into `m` parts, in lexicographic order.
pub fn compositions(m: usize, n: usize) -> Vec<Composition> {
    fn go(m: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if prefix.len() + 1 == m {
            prefix.push(left);
            out.push(Composition(prefix.clone()));
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            go(m, left - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    go(m, n, &mut Vec::with_capacity(m), &mut out);
    out
}

/// `m^n`, saturating.
pub fn space_size(m: usize, n: usize) -> u128 {
    (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

fn within_budget(required: u128, budget: u64) -> Result<(), OracleError> {
    if required > budget as u128 {
        return Err(OracleError::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Every string of the class, in lexicographic order.
pub fn enumerate_class(c: &Composition, budget: u64) -> Result<Vec<Vec<Symbol>>, OracleError> {
    within_budget(c.multinomial(), budget)?;
    Ok(class_members(c))
}

fn class_members(c: &Composition) -> Vec<Vec<Symbol>> {
    let mut current: Vec<Symbol> = c
        .0
        .iter()
        .enumerate()
        .flat_map(|(s, &k)| std::iter::repeat_n(s as Symbol, k))
        .collect();
    let mut out = Vec::with_capacity(c.multinomial().min(1 << 24) as usize);
    loop {
        out.push(current.clone());
        if !next_permutation(&mut current) {
            return out;
        }
    }
}

fn next_permutation(v: &mut [Symbol]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&e| e > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// A multiset of bit strings, grouped by length.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitMultiset {
    by_length: BTreeMap<usize, BTreeMap<BitString, u64>>,
}

impl BitMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` copies of `z`.
    pub fn insert(&mut self, z: BitString, count: u64) {
        if count == 0 {
            return;
        }
        *self
            .by_length
            .entry(z.len())
            .or_default()
            .entry(z)
            .or_default() += count;
    }

    /// `copies` copies of the full set `{0,1}^len`.
    pub fn full_level(len: usize, copies: u64) -> Self {
        let mut out = Self::new();
        let mut z = BitString::from(vec![false; len]);
        loop {
            out.insert(z.clone(), copies);
            if !increment(&mut z) {
                return out;
            }
        }
    }

    /// Image multiset `f((C))`.
    pub fn image<'a, F>(f: F, class: impl IntoIterator<Item = &'a Vec<Symbol>>) -> Self
    where
        F: Fn(&[Symbol]) -> BitString,
    {
        class.into_iter().map(|x| f(x)).collect()
    }

    /// Multiplicity of `z`.
    pub fn count(&self, z: &BitString) -> u64 {
        self.by_length
            .get(&z.len())
            .and_then(|level| level.get(z))
            .copied()
            .unwrap_or(0)
    }

    /// Total number of elements counted with multiplicity.
    pub fn size(&self) -> u64 {
        self.by_length.values().flat_map(|l| l.values()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_length.is_empty()
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, &BTreeMap<BitString, u64>)> {
        self.by_length.iter().map(|(&l, m)| (l, m))
    }

    /// `A ⊎ B`: multiplicities add.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (_, level) in other.levels() {
            for (z, &c) in level {
                out.insert(z.clone(), c);
            }
        }
        out
    }

    /// `A * B`: all concatenations, multiplicities multiply.
    pub fn product(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (_, la) in self.levels() {
            for (s, &ca) in la {
                for (_, lb) in other.levels() {
                    for (t, &cb) in lb {
                        let mut st = s.clone();
                        st.extend_from(t);
                        out.insert(st, ca * cb);
                    }
                }
            }
        }
        out
    }

    /// Checks the extracting property. On failure the witness is the
    /// lexicographically first string, at the shortest failing length, whose
    /// count differs from that of the first string present at that length.
    pub fn is_extracting(&self) -> Verdict {
        match self.first_uneven() {
            None => Verdict::Pass,
            Some(failure) => Verdict::Fail(Counterexample {
                composition: None,
                failure,
            }),
        }
    }

    /// Common multiplicity per occupied length, if the multiset is extracting.
    pub fn copies_per_length(&self) -> Option<BTreeMap<usize, u64>> {
        if self.first_uneven().is_some() {
            return None;
        }
        Some(
            self.levels()
                .map(|(l, level)| (l, *level.values().next().expect("occupied level")))
                .collect(),
        )
    }

    fn first_uneven(&self) -> Option<Failure> {
        for (length, level) in self.levels() {
            let (reference, &reference_count) = level.iter().next()?;
            let mut expected = BitString::from(vec![false; length]);
            let mut exhausted = false;
            let uneven = |witness: BitString, witness_count: u64| Failure::UnevenCounts {
                length,
                witness,
                witness_count,
                reference: reference.clone(),
                reference_count,
            };
            for (z, &count) in level {
                if *z != expected {
                    return Some(uneven(expected, 0));
                }
                if count != reference_count {
                    return Some(uneven(z.clone(), count));
                }
                exhausted = !increment(&mut expected);
            }
            if !exhausted {
                return Some(uneven(expected, 0));
            }
        }
        None
    }
}

impl FromIterator<BitString> for BitMultiset {
    fn from_iter<I: IntoIterator<Item = BitString>>(iter: I) -> Self {
        let mut out = Self::new();
        for z in iter {
            out.insert(z, 1);
        }
        out
    }
}

/// Binary increment in place; `false` on wrap-around to all zeros.
fn increment(z: &mut BitString) -> bool {
    let mut v = std::mem::take(z).into_vec();
    let mut carried = true;
    for b in v.iter_mut().rev() {
        if *b {
            *b = false;
        } else {
            *b = true;
            carried = false;
            break;
        }
    }
    *z = v.into();
    !carried
}

/// Outcome of a check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Counterexample),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Self::Pass)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Self::Pass => None,
            Self::Fail(c) => Some(c),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pass => f.write_str("PASS"),
            Self::Fail(c) => write!(f, "FAIL: {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// The class where the failure was found, when the check is per class.
    pub composition: Option<Composition>,
    pub failure: Failure,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = &self.composition {
            write!(f, "class {c}: ")?;
        }
        write!(f, "{}", self.failure)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Two strings of the same output length occur a different number of times.
    UnevenCounts {
        length: usize,
        witness: BitString,
        witness_count: u64,
        reference: BitString,
        reference_count: u64,
    },
    /// Two class members have identical component streams.
    NotInjective {
        first: Vec<Symbol>,
        second: Vec<Symbol>,
    },
    /// A component stream does not have the composition the class dictates.
    ComponentClass {
        component: usize,
        zeros: usize,
        ones: usize,
        found: BitString,
    },
    /// A component image is not the whole binary class it should be.
    FactorSize {
        component: usize,
        expected: u128,
        found: u128,
    },
    /// The product of component image sizes differs from the class size.
    ProductSize { class_size: u128, product: u128 },
    /// A tuple of the Cartesian product is not the image of any class member.
    MissingTuple { tuple: Vec<BitString> },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnevenCounts {
                length,
                witness,
                witness_count,
                reference,
                reference_count,
            } => write!(
                f,
                "length {length}: {witness:?} occurs {witness_count} times but {reference:?} occurs {reference_count} times"
            ),
            Self::NotInjective { first, second } => {
                write!(f, "{} and {} have the same components", join(first), join(second))
            }
            Self::ComponentClass {
                component,
                zeros,
                ones,
                found,
            } => write!(
                f,
                "component {component} produced {found:?}, expected {zeros} zeros and {ones} ones"
            ),
            Self::FactorSize {
                component,
                expected,
                found,
            } => write!(
                f,
                "component {component} has {found} distinct images, expected {expected}"
            ),
            Self::ProductSize {
                class_size,
                product,
            } => write!(f, "class size {class_size} but component product size {product}"),
            Self::MissingTuple { tuple } => write!(f, "product tuple {tuple:?} has no preimage"),
        }
    }
}

fn join(x: &[Symbol]) -> String {
    x.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

/// Checks that `f` restricted to `{0..m}^n` is extracting, class by class.
///
/// Classes are checked in parallel; the reported counterexample is the one
/// from the lexicographically first failing composition.
pub fn is_extracting_function<F>(f: F, m: usize, n: usize, budget: u64) -> Result<Verdict, OracleError>
where
    F: Fn(&[Symbol]) -> BitString + Sync,
{
    within_budget(space_size(m, n), budget)?;
    let failure = compositions(m, n).into_par_iter().find_map_first(|c| {
        let image = BitMultiset::image(&f, &class_members(&c));
        match image.is_extracting() {
            Verdict::Pass => None,
            Verdict::Fail(mut cx) => {
                cx.composition = Some(c);
                Some(cx)
            }
        }
    });
    Ok(failure.map_or(Verdict::Pass, Verdict::Fail))
}

/// Result of [`structure_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub class_size: u128,
    /// `|Φ_i(S)|` for each component, in node order.
    pub factor_sizes: Vec<u128>,
    pub verdict: Verdict,
}

/// Verifies on one class `S` that `x ↦ (Φ_1(x), ..., Φ_{m-1}(x))` is a
/// bijection onto `Φ_1(S) × ... × Φ_{m-1}(S)`, and that each `Φ_i(S)` is the
/// full binary class `S_(l_i, k_i)` given by the counts on its supports.
pub fn structure_check(
    tree: &BinarizationTree,
    c: &Composition,
    budget: u64,
) -> Result<StructureReport, OracleError> {
    if c.m() != tree.m() {
        return Err(OracleError::AlphabetMismatch {
            expected: tree.m(),
            found: c.m(),
        });
    }
    let class = enumerate_class(c, budget)?;
    let class_size = class.len() as u128;
    let components = tree.internal_count();
    let fail = |failure: Failure, factor_sizes: Vec<u128>| StructureReport {
        class_size,
        factor_sizes,
        verdict: Verdict::Fail(Counterexample {
            composition: Some(c.clone()),
            failure,
        }),
    };

    let mut images: Vec<(Vec<BitString>, usize)> = class
        .iter()
        .enumerate()
        .map(|(idx, x)| (binarize(tree, x), idx))
        .collect();

    // Component class law and per-component images.
    let mut factors: Vec<Vec<BitString>> = Vec::with_capacity(components);
    let mut factor_sizes = Vec::with_capacity(components);
    for i in 1..=components {
        let support_count = |side| -> usize {
            tree.support(i, side)
                .expect("valid node")
                .iter()
                .map(|&s| c.counts()[s as usize])
                .sum()
        };
        let (zeros, ones) = (support_count(false), support_count(true));
        let mut distinct: Vec<BitString> = Vec::new();
        for (comps, _) in &images {
            let z = &comps[i - 1];
            if z.len() != zeros + ones || z.weight() != ones {
                return Ok(fail(
                    Failure::ComponentClass {
                        component: i,
                        zeros,
                        ones,
                        found: z.clone(),
                    },
                    factor_sizes,
                ));
            }
            distinct.push(z.clone());
        }
        distinct.sort_unstable();
        distinct.dedup();
        let expected = binomial((zeros + ones) as u64, ones as u64).unwrap_or(u128::MAX);
        let found = distinct.len() as u128;
        factor_sizes.push(found);
        if found != expected {
            return Ok(fail(
                Failure::FactorSize {
                    component: i,
                    expected,
                    found,
                },
                factor_sizes,
            ));
        }
        factors.push(distinct);
    }

    let product = factor_sizes
        .iter()
        .try_fold(1u128, |acc, &s| acc.checked_mul(s))
        .unwrap_or(u128::MAX);
    if product != class_size {
        return Ok(fail(Failure::ProductSize { class_size, product }, factor_sizes));
    }

    images.sort_unstable();
    if let Some(w) = images.windows(2).find(|w| w[0].0 == w[1].0) {
        let (a, b) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
        return Ok(fail(
            Failure::NotInjective {
                first: class[a].clone(),
                second: class[b].clone(),
            },
            factor_sizes,
        ));
    }

    // Walk the Cartesian product in lexicographic order next to the sorted
    // images; with equal sizes and no duplicates they must coincide.
    let mut odometer = vec![0usize; components];
    for (comps, _) in &images {
        let tuple: Vec<&BitString> = odometer.iter().zip(&factors).map(|(&k, f)| &f[k]).collect();
        if tuple.iter().zip(comps).any(|(t, c)| *t != c) {
            return Ok(fail(
                Failure::MissingTuple {
                    tuple: tuple.into_iter().cloned().collect(),
                },
                factor_sizes,
            ));
        }
        for k in (0..components).rev() {
            odometer[k] += 1;
            if odometer[k] < factors[k].len() {
                break;
            }
            odometer[k] = 0;
        }
    }

    Ok(StructureReport {
        class_size,
        factor_sizes,
        verdict: Verdict::Pass,
    })
}

/// The first-bit / second-bit split of a 4-faced die, each fed to von
/// Neumann and concatenated.
pub fn naive_binarization(x: &[Symbol]) -> BitString {
    let high: BitString = x.iter().map(|&s| s & 2 != 0).collect();
    let low: BitString = x.iter().map(|&s| s & 1 != 0).collect();
    let mut out = von_neumann(&high);
    out.extend_from(&von_neumann(&low));
    out
}

/// Extracting check of [`naive_binarization`] on `{0,1,2,3}^n`.
pub fn naive_binarization_check(n: usize, budget: u64) -> Result<Verdict, OracleError> {
    is_extracting_function(naive_binarization, 4, n, budget)
}

/// Extracting check of the composed extractor with the listed components
/// omitted. Every component of a tree is non-degenerate.
pub fn drop_component_check(
    tree: &BinarizationTree,
    spec: ExtractorSpec,
    drop: &[usize],
    n: usize,
    budget: u64,
) -> Result<Verdict, OracleError> {
    let kept = kept_nodes(tree, drop)?;
    is_extracting_function(|x| compose_nodes(tree, spec, x, &kept), tree.m(), n, budget)
}

/// Node indices `1..m` minus `drop`, ascending.
pub fn kept_nodes(tree: &BinarizationTree, drop: &[usize]) -> Result<Vec<usize>, OracleError> {
    let max = tree.internal_count();
    if let Some(&index) = drop.iter().find(|&&i| i == 0 || i > max) {
        return Err(OracleError::BadComponent { index, max });
    }
    Ok((1..=max).filter(|i| !drop.contains(i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binarize::compose;
    use crate::bits::bits;
    use crate::extract::von_neumann;
    use crate::tree::comb_tree;

    fn syms(s: &str) -> Vec<Symbol> {
        s.chars().map(|c| c.to_digit(10).unwrap()).collect()
    }

    fn as_text(class: &[Vec<Symbol>]) -> Vec<String> {
        class.iter().map(|x| join(x).replace(' ', "")).collect()
    }

    #[test]
    fn enumerate_class_examples() {
        let s121 = enumerate_class(&Composition::new(vec![1, 2, 1]), DEFAULT_BUDGET).unwrap();
        let table = [
            "0112", "0121", "0211", "1012", "1021", "1102", "1120", "1201", "1210", "2011",
            "2101", "2110",
        ];
        assert_eq!(as_text(&s121), table);
        assert_eq!(enumerate_class(&Composition::new(vec![0, 0]), 10).unwrap(), vec![vec![]]);
        let s21 = enumerate_class(&Composition::new(vec![2, 1]), 10).unwrap();
        assert_eq!(as_text(&s21), ["001", "010", "100"]);
        assert_eq!(
            enumerate_class(&Composition::new(vec![1, 2, 1]), 11),
            Err(OracleError::BudgetExceeded {
                required: 12,
                budget: 11
            })
        );
    }

    #[test]
    fn compositions_partition_the_space() {
        for m in 1..=6 {
            for n in 0..=8 {
                let cs = compositions(m, n);
                assert!(cs.windows(2).all(|w| w[0] < w[1]));
                let total: u128 = cs.iter().map(|c| c.multinomial()).sum();
                assert_eq!(total, space_size(m, n), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn multiset_operations() {
        let coin: BitMultiset = [bits("0"), bits("1")].into_iter().collect();
        let sq = coin.product(&coin);
        for z in ["00", "01", "10", "11"] {
            assert_eq!(sq.count(&bits(z)), 1);
        }
        let lambda: BitMultiset = [bits("")].into_iter().collect();
        assert_eq!(coin.product(&lambda), coin);

        let m = BitMultiset::full_level(1, 12).union(&BitMultiset::full_level(2, 6));
        assert_eq!(m.copies_per_length(), Some(BTreeMap::from([(1, 12), (2, 6)])));
        assert_eq!(m.size(), 12 * 2 + 6 * 4);
    }

    #[test]
    fn von_neumann_image_of_six_bits() {
        let all: Vec<BitString> = (0u64..64).map(|v| BitString::from_uint(v, 6)).collect();
        let image: BitMultiset = all.iter().map(|x| von_neumann(x)).collect();
        assert!(image.is_extracting().is_pass());
        assert_eq!(
            image.copies_per_length(),
            Some(BTreeMap::from([(0, 8), (1, 12), (2, 6), (3, 1)]))
        );
        let expected = BitMultiset::full_level(0, 8)
            .union(&BitMultiset::full_level(1, 12))
            .union(&BitMultiset::full_level(2, 6))
            .union(&BitMultiset::full_level(3, 1));
        assert_eq!(image, expected);
    }

    #[test]
    fn extracting_multiset_verdicts() {
        let zero: BitMultiset = [bits("0")].into_iter().collect();
        let Verdict::Fail(cx) = zero.is_extracting() else {
            panic!("{{0}} is not extracting")
        };
        assert_eq!(
            cx.failure,
            Failure::UnevenCounts {
                length: 1,
                witness: bits("1"),
                witness_count: 0,
                reference: bits("0"),
                reference_count: 1,
            }
        );
        assert!(BitMultiset::new().is_extracting().is_pass());

        let mut uneven = BitMultiset::full_level(2, 2);
        uneven.insert(bits("10"), 1);
        let Verdict::Fail(cx) = uneven.is_extracting() else {
            panic!()
        };
        assert!(matches!(cx.failure, Failure::UnevenCounts { witness_count: 3, .. }));
    }

    #[test]
    fn extracting_function_checks() {
        assert!(is_extracting_function(|x| von_neumann(&to_bits(x)), 2, 6, DEFAULT_BUDGET)
            .unwrap()
            .is_pass());
        let constant = is_extracting_function(|_| bits("0"), 2, 2, DEFAULT_BUDGET).unwrap();
        let cx = constant.counterexample().expect("constant output fails");
        assert_eq!(cx.composition, Some(Composition::new(vec![0, 2])));
        let comb3 = comb_tree(3).unwrap();
        assert!(is_extracting_function(
            |x| compose(&comb3, ExtractorSpec::Peres, x),
            3,
            6,
            DEFAULT_BUDGET
        )
        .unwrap()
        .is_pass());
        assert!(matches!(
            is_extracting_function(|_| bits(""), 3, 30, DEFAULT_BUDGET),
            Err(OracleError::BudgetExceeded { .. })
        ));
    }

    fn to_bits(x: &[Symbol]) -> BitString {
        x.iter().map(|&s| s == 1).collect()
    }

    #[test]
    fn structure_of_s121() {
        let comb3 = comb_tree(3).unwrap();
        let report = structure_check(&comb3, &Composition::new(vec![1, 2, 1]), DEFAULT_BUDGET).unwrap();
        assert!(report.verdict.is_pass());
        assert_eq!(report.class_size, 12);
        // node 1 is x^(2) over S_(3,1), node 2 is x^(1) over S_(1,2)
        assert_eq!(report.factor_sizes, vec![4, 3]);
    }

    #[test]
    fn structure_of_empty_class() {
        for tree in [comb_tree(3).unwrap(), "((2 5) ((1 (4 0)) 3))".parse().unwrap()] {
            let zero = Composition::new(vec![0; tree.m()]);
            let report = structure_check(&tree, &zero, DEFAULT_BUDGET).unwrap();
            assert!(report.verdict.is_pass());
            assert_eq!(report.class_size, 1);
        }
    }

    #[test]
    fn structure_of_example_tree_permutations() {
        let tree: BinarizationTree = "((2 5) ((1 (4 0)) 3))".parse().unwrap();
        let report = structure_check(&tree, &Composition::new(vec![1; 6]), DEFAULT_BUDGET).unwrap();
        assert!(report.verdict.is_pass(), "{}", report.verdict);
        assert_eq!(report.class_size, 720);
        // (2|5), (14 0 3 split), ...: C(2,1) C(6,2) C(4,1) C(3,1) C(2,1)
        assert_eq!(report.factor_sizes, vec![15, 2, 4, 3, 2]);
        assert_eq!(
            structure_check(&tree, &Composition::new(vec![1; 3]), DEFAULT_BUDGET),
            Err(OracleError::AlphabetMismatch { expected: 6, found: 3 })
        );
    }

    #[test]
    fn naive_split_is_not_extracting() {
        assert!(naive_binarization_check(0, DEFAULT_BUDGET).unwrap().is_pass());
        assert!(naive_binarization_check(1, DEFAULT_BUDGET).unwrap().is_pass());
        let verdict = naive_binarization_check(2, DEFAULT_BUDGET).unwrap();
        let cx = verdict.counterexample().expect("n = 2 already fails");
        // First failing class in lexicographic order: {12, 21} -> {01, 10}.
        assert_eq!(cx.composition, Some(Composition::new(vec![0, 1, 1, 0])));
        assert_eq!(naive_binarization(&syms("12")), bits("01"));
        assert_eq!(naive_binarization(&syms("21")), bits("10"));
        assert!(matches!(
            cx.failure,
            Failure::UnevenCounts { length: 2, witness_count: 0, .. }
        ));
    }

    #[test]
    fn dropping_components_keeps_extracting() {
        let comb3 = comb_tree(3).unwrap();
        for spec in ExtractorSpec::all_with_elias_block(4) {
            assert!(drop_component_check(&comb3, spec, &[2], 5, DEFAULT_BUDGET)
                .unwrap()
                .is_pass());
            assert_eq!(
                drop_component_check(&comb3, spec, &[], 5, DEFAULT_BUDGET).unwrap(),
                is_extracting_function(|x| compose(&comb3, spec, x), 3, 5, DEFAULT_BUDGET).unwrap()
            );
        }
        assert_eq!(
            drop_component_check(&comb3, ExtractorSpec::Peres, &[3], 2, DEFAULT_BUDGET),
            Err(OracleError::BadComponent { index: 3, max: 2 })
        );
    }

    #[test]
    fn image_size_and_union_laws() {
        // |f((C))| = |C| and f((C ∪ D)) = f((C)) ⊎ f((D)) for a split of a class.
        let comb3 = comb_tree(3).unwrap();
        let f = |x: &[Symbol]| compose(&comb3, ExtractorSpec::Peres, x);
        for c in compositions(3, 5) {
            let class = class_members(&c);
            let image = BitMultiset::image(f, &class);
            assert_eq!(image.size() as usize, class.len());
            let (left, right) = class.split_at(class.len() / 3);
            let union = BitMultiset::image(f, left).union(&BitMultiset::image(f, right));
            assert_eq!(union, image);
        }
    }
}
