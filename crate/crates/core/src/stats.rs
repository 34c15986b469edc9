//! Entropies, per-component statistics and output rates.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::binarize::compose_nodes;
use crate::extract::ExtractorSpec;
use crate::oracle::{compositions, space_size, OracleError};
use crate::tree::{BinarizationTree, Child, Symbol};

/// Tolerance on `Σ p_i = 1` for [`Distribution::new`].
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Looser tolerance for hand-typed probabilities, see [`Distribution::normalized`].
pub const TYPED_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("distribution is empty")]
    Empty,
    #[error("probability {value} at index {index} is negative or not finite")]
    BadProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    BadSum { sum: f64 },
    #[error("cannot parse probability {0:?}")]
    Parse(String),
    #[error("distribution has {found} entries, alphabet has {expected}")]
    Length { expected: usize, found: usize },
}

/// Face probabilities of the die.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self, DistributionError> {
        Self::checked(p, SUM_TOLERANCE)
    }

    /// Accepts a sum within [`TYPED_SUM_TOLERANCE`] of 1, then rescales.
    pub fn normalized(p: Vec<f64>) -> Result<Self, DistributionError> {
        let Self(p) = Self::checked(p, TYPED_SUM_TOLERANCE)?;
        let sum: f64 = p.iter().sum();
        Ok(Self(p.into_iter().map(|v| v / sum).collect()))
    }

    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    fn checked(p: Vec<f64>, tolerance: f64) -> Result<Self, DistributionError> {
        if p.is_empty() {
            return Err(DistributionError::Empty);
        }
        if let Some((index, &value)) = p.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(DistributionError::BadProbability { index, value });
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(DistributionError::BadSum { sum });
        }
        Ok(Self(p))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn require_len(&self, m: usize) -> Result<(), DistributionError> {
        if self.m() != m {
            return Err(DistributionError::Length {
                expected: m,
                found: self.m(),
            });
        }
        Ok(())
    }
}

impl FromStr for Distribution {
    type Err = DistributionError;

    /// Comma-separated decimals, checked with [`Distribution::normalized`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let p = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| DistributionError::Parse(t.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::normalized(p)
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Shannon entropy in bits per symbol.
pub fn entropy(d: &Distribution) -> f64 {
    -neumaier_sum(d.0.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()))
}

/// Entropy of a coin with probability `p` of zero.
pub fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .into_iter()
        .filter(|&q| q > 0.0)
        .map(|q| -q * q.log2())
        .sum()
}

/// Statistics of one component stream under a source distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentStats {
    /// Probability that a symbol produces output on this component.
    pub pi: f64,
    /// Probability of `0` given output.
    pub p: f64,
    /// Probability of `1` given output.
    pub q: f64,
}

/// Per-node `(π_i, P_i, Q_i)`, in node order.
///
/// `π` of a leaf is its symbol's probability and `π_i = π_a(i) + π_b(i)`;
/// nodes with zero mass report `(0, 0, 0)`.
pub fn component_stats(tree: &BinarizationTree, d: &Distribution) -> Vec<ComponentStats> {
    let p = d.probabilities();
    assert_eq!(p.len(), tree.m(), "distribution length must equal alphabet size");
    let count = tree.internal_count();
    let mut mass = vec![0.0; count];
    let child_mass = |c: Child, mass: &[f64]| match c {
        Child::Leaf(s) => p[s as usize],
        Child::Internal(j) => mass[j - 1],
    };
    // Breadth-first numbering puts children after parents.
    let mut halves = vec![(0.0, 0.0); count];
    for i in (1..=count).rev() {
        let [l, r] = tree.children(i);
        let (ml, mr) = (child_mass(l, &mass), child_mass(r, &mass));
        halves[i - 1] = (ml, mr);
        mass[i - 1] = ml + mr;
    }
    mass.iter()
        .zip(&halves)
        .map(|(&pi, &(ml, mr))| {
            if pi > 0.0 {
                ComponentStats {
                    pi,
                    p: ml / pi,
                    q: mr / pi,
                }
            } else {
                ComponentStats {
                    pi: 0.0,
                    p: 0.0,
                    q: 0.0,
                }
            }
        })
        .collect()
}

/// `Σ π_i H(P_i) - H(X)`; zero for every tree and distribution.
pub fn entropy_identity_residual(tree: &BinarizationTree, d: &Distribution) -> f64 {
    let weighted = neumaier_sum(
        component_stats(tree, d)
            .iter()
            .filter(|s| s.pi > 0.0)
            .map(|s| s.pi * binary_entropy(s.p)),
    );
    weighted - entropy(d)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("input length must be at least 1")]
    ZeroLength,
    #[error("at least one trial is required")]
    ZeroTrials,
}

/// Expected output bits per input symbol over all length-`n` strings.
pub fn exact_rate(
    tree: &BinarizationTree,
    spec: ExtractorSpec,
    d: &Distribution,
    n: usize,
    budget: u64,
) -> Result<f64, RateError> {
    let all: Vec<usize> = (1..=tree.internal_count()).collect();
    exact_rate_nodes(tree, spec, d, n, &all, budget)
}

/// [`exact_rate`] for the extractor restricted to the listed components.
pub fn exact_rate_nodes(
    tree: &BinarizationTree,
    spec: ExtractorSpec,
    d: &Distribution,
    n: usize,
    nodes: &[usize],
    budget: u64,
) -> Result<f64, RateError> {
    d.require_len(tree.m())?;
    if n == 0 {
        return Err(RateError::ZeroLength);
    }
    let required = space_size(tree.m(), n);
    if required > budget as u128 {
        return Err(OracleError::BudgetExceeded { required, budget }.into());
    }
    let p = d.probabilities();
    // Every member of a class has the same probability, so sum output
    // lengths per class and weight once.
    let terms: Vec<f64> = compositions(tree.m(), n)
        .into_par_iter()
        .map(|c| {
            let weight: f64 = c
                .counts()
                .iter()
                .zip(p)
                .map(|(&k, &pk)| pk.powi(k as i32))
                .product();
            if weight == 0.0 {
                return 0.0;
            }
            let bits: u64 = crate::oracle::enumerate_class(&c, u64::MAX)
                .expect("unbounded budget")
                .iter()
                .map(|x| compose_nodes(tree, spec, x, nodes).len() as u64)
                .sum();
            weight * bits as f64
        })
        .collect();
    Ok(neumaier_sum(terms) / n as f64)
}

/// Monte Carlo rate estimate: mean and standard error of `|Ψ'(x)| / n`
/// over `trials` independent length-`n` strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Seeded generator used for all sampling: ChaCha8 via `seed_from_u64`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `count` i.i.d. symbols.
pub fn sample_symbols<R: Rng>(d: &Distribution, count: usize, rng: &mut R) -> Vec<Symbol> {
    let index = WeightedIndex::new(d.probabilities()).expect("valid distribution has positive mass");
    (0..count).map(|_| index.sample(rng) as Symbol).collect()
}

pub fn empirical_rate(
    tree: &BinarizationTree,
    spec: ExtractorSpec,
    d: &Distribution,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<RateEstimate, RateError> {
    d.require_len(tree.m())?;
    if n == 0 {
        return Err(RateError::ZeroLength);
    }
    if trials == 0 {
        return Err(RateError::ZeroTrials);
    }
    let mut rng = seeded_rng(seed);
    let nodes: Vec<usize> = (1..=tree.internal_count()).collect();
    let rates: Vec<f64> = (0..trials)
        .map(|_| {
            let x = sample_symbols(d, n, &mut rng);
            compose_nodes(tree, spec, &x, &nodes).len() as f64 / n as f64
        })
        .collect();
    let mean = neumaier_sum(rates.iter().copied()) / trials as f64;
    let std_error = if trials > 1 {
        let var = neumaier_sum(rates.iter().map(|r| (r - mean) * (r - mean))) / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(RateEstimate { mean, std_error })
}

/// Compensated (Neumaier) summation.
fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DEFAULT_BUDGET;
    use crate::tree::{comb_tree, zhou_bruck_tree};

    fn dist(p: &[f64]) -> Distribution {
        Distribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&dist(&[0.5, 0.5])), 1.0);
        assert_eq!(entropy(&dist(&[1.0, 0.0, 0.0])), 0.0);
        assert_eq!(entropy(&dist(&[0.25; 4])), 2.0);
        let h = entropy(&dist(&[0.5, 0.3, 0.2]));
        assert!((h - 1.485475297227334).abs() < 1e-12);
    }

    #[test]
    fn distribution_validation() {
        assert!(matches!(Distribution::new(vec![]), Err(DistributionError::Empty)));
        assert!(matches!(
            Distribution::new(vec![0.5, -0.1, 0.6]),
            Err(DistributionError::BadProbability { index: 1, .. })
        ));
        assert!(matches!(Distribution::new(vec![0.5, 0.4]), Err(DistributionError::BadSum { .. })));
        assert!(matches!(
            Distribution::new(vec![f64::NAN, 1.0]),
            Err(DistributionError::BadProbability { index: 0, .. })
        ));
        let typed: Distribution = "0.3333333333,0.3333333333,0.3333333334".parse().unwrap();
        assert!((typed.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!("0.3,0.3".parse::<Distribution>().is_err());
        assert!("0.5,abc".parse::<Distribution>().is_err());
    }

    #[test]
    fn comb_three_closed_forms() {
        let (p0, p1, p2) = (0.5, 0.3, 0.2);
        let s = component_stats(&comb_tree(3).unwrap(), &dist(&[p0, p1, p2]));
        assert!((s[0].pi - 1.0).abs() < 1e-15);
        assert!((s[0].p - (p0 + p1)).abs() < 1e-15);
        assert!((s[0].q - p2).abs() < 1e-15);
        assert!((s[1].pi - (p0 + p1)).abs() < 1e-15);
        assert!((s[1].p - p0 / (p0 + p1)).abs() < 1e-15);
        assert!((s[1].q - p1 / (p0 + p1)).abs() < 1e-15);
    }

    #[test]
    fn comb_matches_prefix_sum_formulas() {
        // Node m - i carries x^(i): output mass p_0 + ... + p_i and
        // zero-probability (p_0 + ... + p_{i-1}) / (p_0 + ... + p_i).
        let p = [0.1, 0.25, 0.05, 0.3, 0.2, 0.1];
        let m = p.len();
        let stats = component_stats(&comb_tree(m).unwrap(), &dist(&p));
        for i in 1..m {
            let below: f64 = p[..i].iter().sum();
            let upto = below + p[i];
            let s = stats[m - i - 1];
            assert!((s.pi - upto).abs() < 1e-12);
            assert!((s.p - below / upto).abs() < 1e-12);
            assert!((s.q - p[i] / upto).abs() < 1e-12);
        }
    }

    #[test]
    fn zhou_bruck_uniform_stats() {
        let s = component_stats(&zhou_bruck_tree(4).unwrap(), &Distribution::uniform(4));
        let pis: Vec<f64> = s.iter().map(|c| c.pi).collect();
        assert_eq!(pis, vec![1.0, 0.5, 0.5]);
        assert!(s.iter().all(|c| c.p == 0.5 && c.q == 0.5));
        let r = entropy_identity_residual(&zhou_bruck_tree(4).unwrap(), &Distribution::uniform(4));
        assert_eq!(r, 0.0);
    }

    #[test]
    fn zero_mass_convention() {
        let tree: BinarizationTree = "((2 5) ((1 (4 0)) 3))".parse().unwrap();
        let s = component_stats(&tree, &dist(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!(s[1], ComponentStats { pi: 0.0, p: 0.0, q: 0.0 });
        for c in &s {
            assert!(c.pi == 0.0 || (c.p + c.q - 1.0).abs() < 1e-12);
        }
        assert!(entropy_identity_residual(&tree, &dist(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0])).abs() < 1e-12);
    }

    #[test]
    fn entropy_identity_comb_three() {
        let d = dist(&[0.5, 0.3, 0.2]);
        let tree = comb_tree(3).unwrap();
        // Direct evaluation of both sides.
        let lhs = 1.0 * binary_entropy(0.8) + 0.8 * binary_entropy(0.5 / 0.8);
        assert!((lhs - entropy(&d)).abs() < 1e-12);
        assert!(entropy_identity_residual(&tree, &d).abs() < 1e-12);
    }

    #[test]
    fn von_neumann_pair_rate() {
        let tree = comb_tree(2).unwrap();
        for p in [0.5, 0.3, 0.9] {
            let d = dist(&[p, 1.0 - p]);
            let r = exact_rate(&tree, ExtractorSpec::VonNeumann, &d, 2, DEFAULT_BUDGET).unwrap();
            assert!((r - p * (1.0 - p)).abs() < 1e-15, "p={p} r={r}");
        }
    }

    #[test]
    fn point_mass_rate_is_zero() {
        let tree = comb_tree(3).unwrap();
        let d = dist(&[0.0, 1.0, 0.0]);
        for spec in ExtractorSpec::all_with_elias_block(4) {
            assert_eq!(exact_rate(&tree, spec, &d, 5, DEFAULT_BUDGET).unwrap(), 0.0);
        }
    }

    #[test]
    fn rate_errors() {
        let tree = comb_tree(3).unwrap();
        let d = dist(&[0.5, 0.3, 0.2]);
        assert_eq!(
            exact_rate(&tree, ExtractorSpec::Peres, &d, 0, DEFAULT_BUDGET),
            Err(RateError::ZeroLength)
        );
        assert!(matches!(
            exact_rate(&tree, ExtractorSpec::Peres, &d, 40, DEFAULT_BUDGET),
            Err(RateError::Oracle(OracleError::BudgetExceeded { .. }))
        ));
        assert!(matches!(
            exact_rate(&tree, ExtractorSpec::Peres, &dist(&[0.5, 0.5]), 2, DEFAULT_BUDGET),
            Err(RateError::Distribution(DistributionError::Length { .. }))
        ));
        assert_eq!(
            empirical_rate(&tree, ExtractorSpec::Peres, &d, 4, 0, 1),
            Err(RateError::ZeroTrials)
        );
    }

    #[test]
    fn empirical_rate_is_seed_deterministic() {
        let tree = comb_tree(3).unwrap();
        let d = dist(&[0.5, 0.3, 0.2]);
        let a = empirical_rate(&tree, ExtractorSpec::Peres, &d, 64, 50, 9).unwrap();
        let b = empirical_rate(&tree, ExtractorSpec::Peres, &d, 64, 50, 9).unwrap();
        assert_eq!(a, b);
        let c = empirical_rate(&tree, ExtractorSpec::Peres, &d, 64, 50, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empirical_von_neumann_pair_rate() {
        let tree = comb_tree(2).unwrap();
        let d = dist(&[0.3, 0.7]);
        let est = empirical_rate(&tree, ExtractorSpec::VonNeumann, &d, 2, 20_000, 5).unwrap();
        assert!((est.mean - 0.21).abs() < 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn neumaier_beats_naive_cancellation() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(v), 2.0);
    }
}
