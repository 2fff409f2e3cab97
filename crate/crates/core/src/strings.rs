//! Strings over finite alphabets, with and without wildcards.
//!
//! Symbols are plain indices `0..alphabet.size`. A [`WildStr`] may also hold
//! the reserved [`WILDCARD`] sentinel, which stands for "any symbol" until the
//! string is instantiated.
//!
//! Text form: whitespace-separated decimal indices, `*` for the wildcard. Over
//! the binary alphabet the compact form `01*0` (no separators) is accepted
//! and produced.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u64;

/// Reserved sentinel marking a wildcard position.
pub const WILDCARD: Symbol = u64::MAX;

/// Symbol types the distance kernels run over.
///
/// `matches` is the substitution-free test used by the wildcard kernels: a
/// pair touching at least one wildcard costs nothing.
pub trait SymbolLike: Copy + Eq {
    const WILD: Self;

    #[inline(always)]
    fn is_wild(self) -> bool {
        self == Self::WILD
    }

    #[inline(always)]
    fn matches(self, other: Self) -> bool {
        self == other || self == Self::WILD || other == Self::WILD
    }
}

impl SymbolLike for u8 {
    const WILD: u8 = u8::MAX;
}

impl SymbolLike for u64 {
    const WILD: u64 = u64::MAX;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    size: u64,
}

impl Alphabet {
    pub fn new(size: u64) -> Result<Self> {
        if size == 0 || size == u64::MAX {
            return Err(Error::InvalidAlphabet(size));
        }
        Ok(Alphabet { size })
    }

    pub const fn binary() -> Self {
        Alphabet { size: 2 }
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        symbol < self.size
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Str {
    symbols: Vec<Symbol>,
    alphabet: Alphabet,
}

impl Str {
    pub fn new(symbols: Vec<Symbol>, alphabet: Alphabet) -> Result<Self> {
        if let Some((position, &symbol)) = symbols
            .iter()
            .enumerate()
            .find(|(_, &s)| !alphabet.contains(s))
        {
            return Err(Error::SymbolOutOfRange {
                symbol,
                position,
                size: alphabet.size(),
            });
        }
        if symbols.len() > i32::MAX as usize {
            return Err(Error::OutOfRange("string longer than 2^31-1 symbols".into()));
        }
        Ok(Str { symbols, alphabet })
    }

    /// Builds a binary string from `0`/`1` characters.
    pub fn binary(text: &str) -> Result<Self> {
        let symbols = text
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("unexpected binary character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Str::new(symbols, Alphabet::binary())
    }

    /// Maps lowercase letters to indices (`a` = 0) over a 26-letter alphabet.
    /// Handy for writing small examples.
    pub fn letters(text: &str) -> Result<Self> {
        let symbols = text
            .bytes()
            .map(|b| {
                if b.is_ascii_lowercase() {
                    Ok((b - b'a') as Symbol)
                } else {
                    Err(Error::Parse(format!("unexpected letter {:?}", b as char)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Str::new(symbols, Alphabet::new(26)?)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn reversed(&self) -> Str {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        Str {
            symbols,
            alphabet: self.alphabet,
        }
    }

    /// Substring over the 1-based inclusive interval `[start, end]`.
    pub fn substring(&self, start: usize, end: usize) -> Result<Str> {
        if start == 0 || start > end + 1 || end > self.len() {
            return Err(Error::OutOfRange(format!(
                "interval [{start}, {end}] in a string of length {}",
                self.len()
            )));
        }
        Ok(Str {
            symbols: self.symbols[start - 1..end].to_vec(),
            alphabet: self.alphabet,
        })
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }

    pub fn to_wild(&self) -> WildStr {
        WildStr {
            symbols: self.symbols.clone(),
            alphabet: self.alphabet,
        }
    }

    pub fn parse(line: &str, alphabet: Alphabet) -> Result<Self> {
        let symbols = parse_symbols(line, alphabet)?;
        if symbols.contains(&WILDCARD) {
            return Err(Error::Parse("wildcard in a plain string".into()));
        }
        Str::new(symbols, alphabet)
    }
}

impl fmt::Display for Str {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, &self.symbols, self.alphabet)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WildStr {
    symbols: Vec<Symbol>,
    alphabet: Alphabet,
}

impl WildStr {
    pub fn new(symbols: Vec<Symbol>, alphabet: Alphabet) -> Result<Self> {
        if let Some((position, &symbol)) = symbols
            .iter()
            .enumerate()
            .find(|(_, &s)| s != WILDCARD && !alphabet.contains(s))
        {
            return Err(Error::SymbolOutOfRange {
                symbol,
                position,
                size: alphabet.size(),
            });
        }
        Ok(WildStr { symbols, alphabet })
    }

    /// Parses the compact binary form, e.g. `"*0110*01"`.
    pub fn binary(text: &str) -> Result<Self> {
        let symbols = text
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                '*' | '★' => Ok(WILDCARD),
                other => Err(Error::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        WildStr::new(symbols, Alphabet::binary())
    }

    /// Lowercase letters plus `*`, over a 26-letter alphabet.
    pub fn letters(text: &str) -> Result<Self> {
        let symbols = text
            .bytes()
            .map(|b| match b {
                b'*' => Ok(WILDCARD),
                b'a'..=b'z' => Ok((b - b'a') as Symbol),
                other => Err(Error::Parse(format!("unexpected character {:?}", other as char))),
            })
            .collect::<Result<Vec<_>>>()?;
        WildStr::new(symbols, Alphabet::new(26)?)
    }

    pub fn parse(line: &str, alphabet: Alphabet) -> Result<Self> {
        WildStr::new(parse_symbols(line, alphabet)?, alphabet)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of wildcard positions.
    pub fn wildcard_count(&self) -> usize {
        self.symbols.iter().filter(|&&s| s == WILDCARD).count()
    }

    /// 0-based wildcard positions in order.
    pub fn wildcard_positions(&self) -> Vec<usize> {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == WILDCARD)
            .map(|(i, _)| i)
            .collect()
    }

    /// Replaces the i-th wildcard by `fill[i]`.
    pub fn instantiate(&self, fill: &[Symbol]) -> Result<Str> {
        let expected = self.wildcard_count();
        if fill.len() != expected {
            return Err(Error::LengthMismatch {
                left: fill.len(),
                right: expected,
            });
        }
        let mut it = fill.iter();
        let symbols = self
            .symbols
            .iter()
            .map(|&s| if s == WILDCARD { *it.next().unwrap() } else { s })
            .collect();
        Str::new(symbols, self.alphabet)
    }

    pub fn reversed(&self) -> WildStr {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        WildStr {
            symbols,
            alphabet: self.alphabet,
        }
    }

    pub fn concat(parts: &[&WildStr]) -> WildStr {
        let alphabet = parts.first().map(|p| p.alphabet).unwrap_or(Alphabet::binary());
        WildStr {
            symbols: parts.iter().flat_map(|p| p.symbols.iter().copied()).collect(),
            alphabet,
        }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> WildStr {
        WildStr {
            symbols: self.symbols[range].to_vec(),
            alphabet: self.alphabet,
        }
    }
}

impl fmt::Display for WildStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, &self.symbols, self.alphabet)
    }
}

fn parse_symbols(line: &str, alphabet: Alphabet) -> Result<Vec<Symbol>> {
    let trimmed = line.trim();
    let compact = alphabet.size() == 2
        && !trimmed.contains(char::is_whitespace)
        && trimmed.chars().count() > 1
        && trimmed.chars().all(|c| matches!(c, '0' | '1' | '*' | '★'));
    if compact {
        return trimmed
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Ok(WILDCARD),
            })
            .collect();
    }
    trimmed
        .split_whitespace()
        .enumerate()
        .map(|(position, tok)| {
            if tok == "*" {
                return Ok(WILDCARD);
            }
            let symbol: Symbol = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad symbol token {tok:?}")))?;
            if !alphabet.contains(symbol) {
                return Err(Error::SymbolOutOfRange {
                    symbol,
                    position,
                    size: alphabet.size(),
                });
            }
            Ok(symbol)
        })
        .collect()
}

fn write_symbols(f: &mut fmt::Formatter<'_>, symbols: &[Symbol], alphabet: Alphabet) -> fmt::Result {
    if alphabet.size() == 2 {
        for &s in symbols {
            f.write_str(match s {
                WILDCARD => "*",
                0 => "0",
                _ => "1",
            })?;
        }
        return Ok(());
    }
    for (i, &s) in symbols.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        if s == WILDCARD {
            f.write_str("*")?;
        } else {
            write!(f, "{s}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_binary_round_trip() {
        let w = WildStr::binary("*0110*01").unwrap();
        assert_eq!(w.wildcard_count(), 2);
        assert_eq!(w.to_string(), "*0110*01");
        assert_eq!(WildStr::parse("*0110*01", Alphabet::binary()).unwrap(), w);
    }

    #[test]
    fn decimal_form() {
        let a = Alphabet::new(300).unwrap();
        let s = Str::parse("12 0 299", a).unwrap();
        assert_eq!(s.symbols(), &[12, 0, 299]);
        assert_eq!(s.to_string(), "12 0 299");
        assert!(Str::parse("12 300", a).is_err());
        assert!(Str::parse("1 * 2", a).is_err());
        let w = WildStr::parse("1 * 2", a).unwrap();
        assert_eq!(w.wildcard_positions(), vec![1]);
    }

    #[test]
    fn instantiate_fills_in_order() {
        let w = WildStr::binary("*0*").unwrap();
        assert_eq!(w.instantiate(&[1, 0]).unwrap(), Str::binary("100").unwrap());
        assert!(w.instantiate(&[1]).is_err());
    }

    #[test]
    fn rejects_out_of_range_symbols() {
        assert!(Str::new(vec![0, 2], Alphabet::binary()).is_err());
        assert!(Alphabet::new(0).is_err());
    }
}
