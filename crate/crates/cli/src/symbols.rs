//! Text form of symbol streams.

use std::io::{self, Write};

use anyhow::bail;
use dicebin::Symbol;

/// Parses whitespace-separated decimal tokens, or single digits with
/// `digits` (whitespace ignored). Errors name the 1-based token position.
pub fn parse_symbols(text: &str, m: usize, digits: bool) -> anyhow::Result<Vec<Symbol>> {
    if digits && m > 10 {
        bail!("--digits needs at most 10 faces, got {m}");
    }
    let tokens: Box<dyn Iterator<Item = &str>> = if digits {
        Box::new(
            text.char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .map(|(i, c)| &text[i..i + c.len_utf8()]),
        )
    } else {
        Box::new(text.split_whitespace())
    };
    tokens
        .enumerate()
        .map(|(i, tok)| match tok.parse::<Symbol>() {
            Ok(s) if (s as usize) < m => Ok(s),
            Ok(s) => bail!("token {}: symbol {s} out of range for m = {m}", i + 1),
            Err(_) => bail!("token {}: {tok:?} is not a symbol", i + 1),
        })
        .collect()
}

pub fn write_symbols(out: &mut impl Write, x: &[Symbol], digits: bool) -> io::Result<()> {
    let sep = if digits { "" } else { " " };
    for (i, s) in x.iter().enumerate() {
        if i > 0 {
            out.write_all(sep.as_bytes())?;
        }
        write!(out, "{s}")?;
    }
    if !x.is_empty() {
        out.write_all(b"\n")?;
    }
    Ok(())
}
