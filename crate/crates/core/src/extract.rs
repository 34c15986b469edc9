//! Binary extracting procedures: von Neumann, Peres and Elias.
//!
//! Every procedure maps a bit string of any length to a bit string such
//! that, restricted to inputs of a fixed length `n`, all outputs of the same
//! length are equally likely whatever the bias of the source coin.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::bits::BitString;

/// Block size used by `elias` when none is given.
pub const DEFAULT_ELIAS_BLOCK: usize = 16;

/// Inputs up to this length rank with `u128`; longer ones use big integers.
const NATIVE_RANK_LIMIT: usize = 64;

/// Selects the binary extracting procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtractorSpec {
    VonNeumann,
    Peres,
    /// Elias's procedure applied to consecutive blocks of `block` bits.
    Elias { block: NonZeroUsize },
}

impl ExtractorSpec {
    pub fn elias(block: usize) -> Option<Self> {
        NonZeroUsize::new(block).map(|block| Self::Elias { block })
    }

    pub fn all_with_elias_block(block: usize) -> [Self; 3] {
        [
            Self::VonNeumann,
            Self::Peres,
            Self::elias(block).expect("nonzero block"),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseExtractorError {
    #[error("unknown extractor {0:?}; expected vn, peres or elias[:block]")]
    Unknown(String),
    #[error("invalid elias block size {0:?}; expected a positive integer")]
    BadBlock(String),
}

impl FromStr for ExtractorSpec {
    type Err = ParseExtractorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vn" | "von-neumann" => Ok(Self::VonNeumann),
            "peres" => Ok(Self::Peres),
            "elias" => Ok(Self::elias(DEFAULT_ELIAS_BLOCK).unwrap()),
            _ => {
                let block = s
                    .strip_prefix("elias:")
                    .ok_or_else(|| ParseExtractorError::Unknown(s.to_string()))?;
                block
                    .parse::<NonZeroUsize>()
                    .map(|block| Self::Elias { block })
                    .map_err(|_| ParseExtractorError::BadBlock(block.to_string()))
            }
        }
    }
}

impl fmt::Display for ExtractorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VonNeumann => f.write_str("vn"),
            Self::Peres => f.write_str("peres"),
            Self::Elias { block } => write!(f, "elias:{block}"),
        }
    }
}

/// Applies the selected procedure. Elias input is cut into consecutive
/// blocks of the configured size (the last block may be shorter) and the
/// per-block outputs are concatenated.
pub fn extract(spec: ExtractorSpec, x: &[bool]) -> BitString {
    let mut out = BitString::new();
    extract_into(spec, x, &mut out);
    out
}

/// Like [`extract`], appending to `out`.
pub fn extract_into(spec: ExtractorSpec, x: &[bool], out: &mut BitString) {
    match spec {
        ExtractorSpec::VonNeumann => von_neumann_into(x, out),
        ExtractorSpec::Peres => peres_into(x, out),
        ExtractorSpec::Elias { block } => {
            for chunk in x.chunks(block.get()) {
                elias_into(chunk, out);
            }
        }
    }
}

/// `01 -> 0`, `10 -> 1`, `00, 11 -> λ` over disjoint pairs; a trailing odd
/// bit is dropped.
pub fn von_neumann(x: &[bool]) -> BitString {
    let mut out = BitString::new();
    von_neumann_into(x, &mut out);
    out
}

fn von_neumann_into(x: &[bool], out: &mut BitString) {
    out.extend(
        x.chunks_exact(2)
            .filter(|pair| pair[0] != pair[1])
            .map(|pair| pair[0]),
    );
}

/// Peres's iterated von Neumann procedure.
///
/// `peres(x) = vn(x) * peres(u) * peres(v)` where `u` holds the XOR of each
/// pair and `v` the common value of each equal pair. The recursion is run
/// with an explicit stack, so input length is not limited by the call stack.
pub fn peres(x: &[bool]) -> BitString {
    let mut out = BitString::new();
    peres_into(x, &mut out);
    out
}

fn peres_into(x: &[bool], out: &mut BitString) {
    if x.len() < 2 {
        return;
    }
    // Popping `u` before `v` yields a pre-order walk, which is exactly the
    // concatenation order of the recursion.
    let mut stack: Vec<Vec<bool>> = Vec::new();
    let mut current = x.to_vec();
    loop {
        let pairs = current.len() / 2;
        let mut xors = Vec::with_capacity(pairs);
        let mut equal = Vec::new();
        for pair in current.chunks_exact(2) {
            if pair[0] != pair[1] {
                out.push(pair[0]);
                xors.push(true);
            } else {
                xors.push(false);
                equal.push(pair[0]);
            }
        }
        if equal.len() >= 2 {
            stack.push(equal);
        }
        if xors.len() >= 2 {
            current = xors;
            continue;
        }
        match stack.pop() {
            Some(next) => current = next,
            None => break,
        }
    }
}

/// Elias's procedure on a single block.
///
/// With `n = |x|` and `k` ones, `x` is ranked lexicographically within the
/// `N = C(n, k)` strings of its class. `N` is split into powers of two,
/// largest first; the rank's offset inside its power-of-two block is output
/// in that block's bit width.
pub fn elias(x: &[bool]) -> BitString {
    let mut out = BitString::new();
    elias_into(x, &mut out);
    out
}

fn elias_into(x: &[bool], out: &mut BitString) {
    if x.len() <= NATIVE_RANK_LIMIT {
        elias_with::<u128>(x, out)
    } else {
        elias_with::<BigUint>(x, out)
    }
}

fn elias_with<C: Count>(x: &[bool], out: &mut BitString) {
    let n = x.len() as u64;
    let k = x.iter().filter(|&&b| b).count() as u64;
    let total: C = binomial(n, k);
    let mut rank = lex_rank::<C>(x, k);

    for width in (0..total.bit_len()).rev() {
        if !total.bit(width) {
            continue;
        }
        if rank.bit_len() <= width {
            out.extend((0..width).rev().map(|j| rank.bit(j)));
            return;
        }
        rank.sub_pow2(width);
    }
    unreachable!("rank is below the class size");
}

/// Rank of `x` among the strings of its length with `ones` ones, `0 < 1`.
fn lex_rank<C: Count>(x: &[bool], ones: u64) -> C {
    let n = x.len() as u64;
    let mut rank = C::from_u64(0);
    if n == 0 {
        return rank;
    }
    // `c` tracks C(rest, left): strings over the remaining `rest` positions
    // with `left` ones still to place.
    let mut left = ones;
    let mut c: C = binomial(n - 1, left);
    for (i, &bit) in x.iter().enumerate() {
        let rest = n - 1 - i as u64;
        if bit {
            rank.add(&c);
        }
        if rest == 0 {
            break;
        }
        if bit {
            // C(rest - 1, left - 1) = C(rest, left) * left / rest
            c = c.mul_div(left, rest);
            left -= 1;
        } else if left <= rest {
            // C(rest - 1, left) = C(rest, left) * (rest - left) / rest
            c = c.mul_div(rest - left, rest);
        }
    }
    rank
}

fn binomial<C: Count>(n: u64, k: u64) -> C {
    if k > n {
        return C::from_u64(0);
    }
    let k = k.min(n - k);
    let mut c = C::from_u64(1);
    for i in 1..=k {
        c = c.mul_div(n - k + i, i);
    }
    c
}

/// Unsigned counter used for class sizes and ranks.
trait Count: Clone {
    fn from_u64(v: u64) -> Self;
    fn add(&mut self, other: &Self);
    /// `self * mul / div`, where the division is known to be exact.
    fn mul_div(self, mul: u64, div: u64) -> Self;
    fn sub_pow2(&mut self, exp: u64);
    fn bit(&self, i: u64) -> bool;
    fn bit_len(&self) -> u64;
}

impl Count for u128 {
    fn from_u64(v: u64) -> Self {
        v as u128
    }

    fn add(&mut self, other: &Self) {
        *self += *other;
    }

    fn mul_div(self, mul: u64, div: u64) -> Self {
        self * mul as u128 / div as u128
    }

    fn sub_pow2(&mut self, exp: u64) {
        *self -= 1u128 << exp;
    }

    fn bit(&self, i: u64) -> bool {
        i < 128 && (self >> i) & 1 == 1
    }

    fn bit_len(&self) -> u64 {
        (128 - self.leading_zeros()) as u64
    }
}

impl Count for BigUint {
    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }

    fn add(&mut self, other: &Self) {
        *self += other;
    }

    fn mul_div(self, mul: u64, div: u64) -> Self {
        if self.is_zero() {
            return self;
        }
        self * mul / div
    }

    fn sub_pow2(&mut self, exp: u64) {
        *self -= BigUint::one() << exp;
    }

    fn bit(&self, i: u64) -> bool {
        BigUint::bit(self, i)
    }

    fn bit_len(&self) -> u64 {
        self.bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use proptest::prelude::*;

    fn all_strings(n: usize) -> impl Iterator<Item = BitString> {
        (0u64..1 << n).map(move |v| BitString::from_uint(v, n))
    }

    #[test]
    fn von_neumann_pair_rule() {
        assert_eq!(von_neumann(&bits("00")), bits(""));
        assert_eq!(von_neumann(&bits("01")), bits("0"));
        assert_eq!(von_neumann(&bits("10")), bits("1"));
        assert_eq!(von_neumann(&bits("11")), bits(""));
        assert_eq!(von_neumann(&bits("")), bits(""));
        assert_eq!(von_neumann(&bits("0011")), bits(""));
        assert_eq!(von_neumann(&bits("01101")), bits("01"));
    }

    #[test]
    fn peres_examples() {
        assert_eq!(peres(&bits("01")), bits("0"));
        assert_eq!(peres(&bits("")), bits(""));
        // Singleton class: any extracting function must output λ.
        assert_eq!(peres(&bits("1111")), bits(""));
        // vn "1", u = "10" -> "1", v = "0" -> λ
        assert_eq!(peres(&bits("1000")), bits("11"));
    }

    /// Textbook recursive Peres, kept independent of the iterative version.
    fn peres_reference(x: &[bool]) -> Vec<bool> {
        if x.len() < 2 {
            return vec![];
        }
        let pairs: Vec<_> = x.chunks_exact(2).collect();
        let mut out: Vec<bool> = pairs
            .iter()
            .filter(|p| p[0] != p[1])
            .map(|p| p[0])
            .collect();
        let u: Vec<bool> = pairs.iter().map(|p| p[0] ^ p[1]).collect();
        let v: Vec<bool> = pairs.iter().filter(|p| p[0] == p[1]).map(|p| p[1]).collect();
        out.extend(peres_reference(&u));
        out.extend(peres_reference(&v));
        out
    }

    #[test]
    fn peres_matches_recursive_reference_exhaustively() {
        for n in 0..=12 {
            for x in all_strings(n) {
                assert_eq!(peres(&x).into_vec(), peres_reference(&x), "x = {x:?}");
            }
        }
    }

    #[test]
    fn peres_handles_megabit_input() {
        let x: BitString = (0..(1usize << 20)).map(|i| (i * 7 + i / 3) % 5 == 0).collect();
        let out = peres(&x);
        assert!(out.len() <= x.len());
        assert!(!out.is_empty());
    }

    #[test]
    fn elias_examples() {
        assert_eq!(elias(&bits("01")), bits("0"));
        assert_eq!(elias(&bits("10")), bits("1"));
        assert_eq!(elias(&bits("001")), bits("0"));
        assert_eq!(elias(&bits("010")), bits("1"));
        assert_eq!(elias(&bits("100")), bits(""));
        assert_eq!(elias(&bits("111")), bits(""));
        assert_eq!(elias(&bits("")), bits(""));
    }

    #[test]
    fn lex_rank_matches_enumeration() {
        for n in 0..=10 {
            for k in 0..=n {
                let class: Vec<BitString> = all_strings(n).filter(|x| x.weight() == k).collect();
                // all_strings yields increasing binary values, i.e. lexicographic order.
                for (expected, x) in class.iter().enumerate() {
                    assert_eq!(lex_rank::<u128>(x, k as u64), expected as u128);
                    assert_eq!(lex_rank::<BigUint>(x, k as u64), BigUint::from(expected));
                }
                assert_eq!(binomial::<u128>(n as u64, k as u64), class.len() as u128);
            }
        }
    }

    #[test]
    fn elias_wide_blocks_use_big_integers() {
        // 100 bits, 50 ones: C(100, 50) exceeds u64.
        let x: BitString = (0..100).map(|i| i % 2 == 1).collect();
        let out = elias(&x);
        assert!(out.len() < 100 && out.len() > 90);
        let native: u128 = binomial(100, 50);
        assert_eq!(BigUint::from(native), binomial::<BigUint>(100, 50));
        assert!(elias_out_native_vs_big(&bits("0110100110")));
    }

    fn elias_out_native_vs_big(x: &[bool]) -> bool {
        let mut a = BitString::new();
        let mut b = BitString::new();
        elias_with::<u128>(x, &mut a);
        elias_with::<BigUint>(x, &mut b);
        a == b
    }

    #[test]
    fn elias_class_outputs_are_uniform() {
        // For each class, every occupied output length must carry all strings
        // of that length equally often.
        for n in 0..=12 {
            for k in 0..=n {
                let mut counts = std::collections::BTreeMap::<BitString, usize>::new();
                for x in all_strings(n).filter(|x| x.weight() == k) {
                    *counts.entry(elias(&x)).or_default() += 1;
                }
                let mut by_len = std::collections::BTreeMap::<usize, Vec<usize>>::new();
                for (z, c) in counts {
                    by_len.entry(z.len()).or_default().push(c);
                }
                for (len, cs) in by_len {
                    assert_eq!(cs.len(), 1 << len);
                    assert!(cs.iter().all(|&c| c == cs[0]));
                }
            }
        }
    }

    #[test]
    fn extract_dispatch() {
        assert_eq!(extract(ExtractorSpec::VonNeumann, &bits("10")), bits("1"));
        assert_eq!(extract(ExtractorSpec::Peres, &bits("")), bits(""));
        let e2 = ExtractorSpec::elias(2).unwrap();
        assert_eq!(extract(e2, &bits("0110")), bits("01"));
    }

    #[test]
    fn peres_and_von_neumann_agree_on_pairs() {
        for x in all_strings(2) {
            assert_eq!(peres(&x), von_neumann(&x));
        }
    }

    #[test]
    fn elias_block_two_is_von_neumann() {
        let e2 = ExtractorSpec::elias(2).unwrap();
        for n in (0..=12).step_by(2) {
            for x in all_strings(n) {
                assert_eq!(extract(e2, &x), von_neumann(&x));
            }
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("vn".parse(), Ok(ExtractorSpec::VonNeumann));
        assert_eq!("peres".parse(), Ok(ExtractorSpec::Peres));
        assert_eq!("elias".parse(), Ok(ExtractorSpec::elias(16).unwrap()));
        assert_eq!("elias:8".parse(), Ok(ExtractorSpec::elias(8).unwrap()));
        assert!("elias:0".parse::<ExtractorSpec>().is_err());
        assert!("huffman".parse::<ExtractorSpec>().is_err());
        for s in ["vn", "peres", "elias:3"] {
            assert_eq!(s.parse::<ExtractorSpec>().unwrap().to_string(), s);
        }
    }

    fn any_spec() -> impl Strategy<Value = ExtractorSpec> {
        prop_oneof![
            Just(ExtractorSpec::VonNeumann),
            Just(ExtractorSpec::Peres),
            (1usize..80).prop_map(|b| ExtractorSpec::elias(b).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn output_never_longer_than_input(
            spec in any_spec(),
            x in proptest::collection::vec(any::<bool>(), 0..300),
        ) {
            let out = extract(spec, &x);
            prop_assert!(out.len() <= x.len());
            prop_assert_eq!(out, extract(spec, &x));
        }
    }
}
