//! Bit strings over `{0,1}`, including the empty string λ.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use thiserror::Error;

/// A finite sequence of bits. The empty string stands for "no output".
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString(Vec<bool>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid bit character {found:?} at position {position}")]
pub struct ParseBitsError {
    pub position: usize,
    pub found: char,
}

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self(Vec::with_capacity(capacity))
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<bool> {
        self.0
    }

    /// Big-endian bit string of `value`, exactly `width` bits long.
    pub fn from_uint(value: u64, width: usize) -> Self {
        Self(
            (0..width)
                .rev()
                .map(|i| i < 64 && (value >> i) & 1 == 1)
                .collect(),
        )
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Packs the bits most-significant-bit first; the last byte is zero-padded.
    pub fn to_packed(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect()
    }

    /// Inverse of [`BitString::to_packed`] given the true bit count.
    ///
    /// Returns `None` if `bytes` holds fewer than `bit_len` bits.
    pub fn from_packed(bytes: &[u8], bit_len: usize) -> Option<Self> {
        if bytes.len() * 8 < bit_len {
            return None;
        }
        Some(Self(
            (0..bit_len)
                .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1 == 1)
                .collect(),
        ))
    }
}

impl Deref for BitString {
    type Target = [bool];

    fn deref(&self) -> &[bool] {
        &self.0
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Extend<bool> for BitString {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl FromStr for BitString {
    type Err = ParseBitsError;

    /// Parses a string of `0`/`1` characters. `"λ"` and `""` both give the
    /// empty string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "λ" {
            return Ok(Self::new());
        }
        s.chars()
            .enumerate()
            .map(|(position, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(ParseBitsError { position, found }),
            })
            .collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("λ")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Shorthand for tests and examples: `bits("0110")`.
///
/// # Panics
/// On characters other than `0`, `1`, or a lone `λ`.
pub fn bits(s: &str) -> BitString {
    s.parse().expect("valid bit literal")
}
