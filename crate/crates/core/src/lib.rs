//! Unbiased random bits from a loaded die.
//!
//! A die with `m` faces is turned into `m - 1` binary streams by a
//! [`BinarizationTree`]; each stream is fed to a binary extracting procedure
//! (von Neumann, Peres or Elias) and the results are concatenated. The
//! [`oracle`] module checks the extracting property by exhaustive
//! enumeration and [`stats`] computes entropies and output rates.

pub mod binarize;
pub mod bits;
pub mod extract;
pub mod layout;
pub mod oracle;
pub mod stats;
pub mod tree;

pub use binarize::{binarize, compose, decode, encode};
pub use bits::BitString;
pub use extract::{extract, ExtractorSpec};
pub use tree::{comb_tree, random_tree, zhou_bruck_tree, BinarizationTree, Child, ComponentValue, Symbol};
