//! Misaligners: sets of binary codewords with periodic wildcards whose
//! instantiations stay far apart in edit distance, even against substrings
//! of concatenations of other codewords.

mod check;
pub mod search;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strings::{Alphabet, WildStr, WILDCARD};

pub use check::{
    check_block_and_half, check_block_vs_substring, check_short_intervals,
    check_wildcard_properties, verify, CheckMode, Property, PropertyReport, VerifyReport, Witness,
    DEFAULT_EXACT_CAP,
};
pub use search::{build_stat_tables, search, SearchConfig, SearchOutcome, StatTables};

const FILE_MAGIC: &str = "isoembed-misaligner v1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MisalignerParams {
    pub m: usize,
    pub k: usize,
    pub t: usize,
    pub alpha: f64,
}

impl MisalignerParams {
    pub fn new(m: usize, k: usize, t: usize, alpha: f64) -> Result<Self> {
        if m == 0 || t == 0 || m % t != 0 {
            return Err(Error::OutOfRange(format!("t = {t} must divide m = {m}")));
        }
        if k == 0 {
            return Err(Error::OutOfRange("k must be positive".into()));
        }
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(Error::OutOfRange(format!("alpha {alpha} not in (0, 1/2]")));
        }
        Ok(MisalignerParams { m, k, t, alpha })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Misaligner {
    pub params: MisalignerParams,
    pub codewords: Vec<WildStr>,
}

impl Misaligner {
    /// Checks shapes only (count, lengths, binary alphabet). The four
    /// properties are checked by [`verify`].
    pub fn new(params: MisalignerParams, codewords: Vec<WildStr>) -> Result<Self> {
        let params = MisalignerParams::new(params.m, params.k, params.t, params.alpha)?;
        if codewords.len() != params.k {
            return Err(Error::OutOfRange(format!(
                "expected {} codewords, got {}",
                params.k,
                codewords.len()
            )));
        }
        for (i, c) in codewords.iter().enumerate() {
            if c.len() != params.m {
                return Err(Error::OutOfRange(format!(
                    "codeword {i} has length {}, expected {}",
                    c.len(),
                    params.m
                )));
            }
            if c.alphabet() != Alphabet::binary() {
                return Err(Error::OutOfRange(format!("codeword {i} is not binary")));
            }
        }
        Ok(Misaligner { params, codewords })
    }

    /// Codewords as bytes: `0`, `1`, and `u8::MAX` for the wildcard.
    pub(crate) fn bytes(&self) -> Vec<Vec<u8>> {
        self.codewords.iter().map(|c| to_bytes(c.symbols())).collect()
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(out, "{FILE_MAGIC}");
        let _ = writeln!(out, "{} {} {} {}", p.m, p.k, p.t, p.alpha);
        for c in &self.codewords {
            let _ = writeln!(out, "{c}");
        }
        out
    }

    /// Parses `m k t alpha` followed by `k` codeword lines over `{0,1,*}`.
    /// A leading magic line is accepted but not required.
    pub fn from_text(text: &str) -> Result<Misaligner> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .peekable();
        if lines.peek() == Some(&FILE_MAGIC) {
            lines.next();
        }
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty misaligner file".into()))?;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 4 {
            return Err(Error::Parse(format!(
                "misaligner header needs `m k t alpha`, found {header:?}"
            )));
        }
        let int = |v: &str| -> Result<usize> {
            v.parse().map_err(|_| Error::Parse(format!("bad integer {v:?}")))
        };
        let m = int(f[0])?;
        let k = int(f[1])?;
        let t = int(f[2])?;
        let alpha: f64 = f[3]
            .parse()
            .map_err(|_| Error::Parse(format!("bad alpha {:?}", f[3])))?;
        let codewords = lines.map(WildStr::binary).collect::<Result<Vec<_>>>()?;
        Misaligner::new(MisalignerParams { m, k, t, alpha }, codewords)
    }
}

pub(crate) fn to_bytes(symbols: &[u64]) -> Vec<u8> {
    symbols
        .iter()
        .map(|&s| if s == WILDCARD { u8::MAX } else { s as u8 })
        .collect()
}

pub(crate) fn from_bytes(bytes: &[u8]) -> WildStr {
    let symbols = bytes
        .iter()
        .map(|&b| if b == u8::MAX { WILDCARD } else { b as u64 })
        .collect();
    WildStr::new(symbols, Alphabet::binary()).expect("binary bytes")
}

/// True iff `c[i]` is a wildcard exactly when `i = 1 (mod t)` (1-based).
pub fn check_wildcard_pattern(c: &WildStr, t: usize) -> bool {
    t > 0
        && c
            .symbols()
            .iter()
            .enumerate()
            .all(|(i, &s)| (s == WILDCARD) == (i % t == 0))
}

/// Smallest integer `t` with `t >= 1 / ((1 - eps) alpha - 1 / (3m - 1))`.
pub fn required_t(m: usize, alpha: f64, epsilon: f64) -> Result<u64> {
    if m == 0 {
        return Err(Error::OutOfRange("m must be positive".into()));
    }
    let denom = (1.0 - epsilon) * alpha - 1.0 / (3.0 * m as f64 - 1.0);
    if !(denom > 0.0) {
        return Err(Error::Preconditions(format!(
            "(1 - eps) alpha - 1/(3m - 1) = {denom} is not positive; no wildcard period works"
        )));
    }
    Ok((1.0 / denom).ceil() as u64)
}

/// `(1 - eps) alpha - 1/(3m - 1) - 1/t`; non-negative iff `t` is large
/// enough for the embedding guarantee.
pub fn threshold_margin(m: usize, t: usize, alpha: f64, epsilon: f64) -> f64 {
    (1.0 - epsilon) * alpha - 1.0 / (3.0 * m as f64 - 1.0) - 1.0 / t as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wildcard_pattern() {
        assert!(check_wildcard_pattern(&WildStr::binary("*0000000*0000000").unwrap(), 8));
        assert!(!check_wildcard_pattern(&WildStr::binary("0*000000").unwrap(), 8));
        assert!(!check_wildcard_pattern(&WildStr::binary("*0000000").unwrap(), 4));
    }

    #[test]
    fn required_t_values() {
        assert_eq!(required_t(320, 0.1625, 0.224).unwrap(), 8);
        assert!(required_t(320, 0.1625, 0.999).is_err());
        // the m -> infinity limit: 1/(3m - 1) vanishes below f64 resolution
        assert_eq!(required_t(1_000_000_000_000_000_000, 0.2, 0.0).unwrap(), 5);
        let margin = threshold_margin(320, 8, 0.1625, 0.224);
        assert!(margin > 0.0 && (margin - 5.72e-5).abs() < 1e-6, "{margin}");
    }

    #[test]
    fn text_round_trip() {
        let cw = vec![
            WildStr::binary("*0110").unwrap(),
            WildStr::binary("*1001").unwrap(),
        ];
        let m = Misaligner::new(MisalignerParams::new(5, 2, 5, 0.2).unwrap(), cw).unwrap();
        let back = Misaligner::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        let bare: String = m.to_text().lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert_eq!(Misaligner::from_text(&bare).unwrap(), m);
    }
}
