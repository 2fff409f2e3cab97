//! The four embedding families and the common interface used by the
//! verifiers and the command line.
//!
//! Every family is interleaved: each input symbol lands at one fixed output
//! position (possibly recoded), and all other output positions hold a fixed
//! string that does not depend on the input.

mod folklore;
mod misaligner;
mod product;
mod third_rate;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strings::{Alphabet, Str, Symbol};

pub use folklore::{build_folklore, FolkloreEmbedding, DEFAULT_FOLKLORE_C};
pub use misaligner::{build_misaligner_embedding, LsmPolicy, MisalignerEmbedding};
pub use product::{build_product_embedding, ProductEmbedding, PRODUCT_C};
pub use third_rate::{
    build_third_rate_embedding, third_rate_alphabet_size, third_rate_for_rho, ThirdRateEmbedding,
};

const FILE_MAGIC: &str = "isoembed-embedding v1";

/// A map from length-`n` strings over `input_alphabet` to strings of a
/// fixed length over `output_alphabet`.
pub trait Embedding: Sync {
    fn n(&self) -> usize;
    fn input_alphabet(&self) -> u64;
    fn output_alphabet(&self) -> u64;
    /// Applies the map to a well-formed input.
    fn apply(&self, x: &[Symbol]) -> Vec<Symbol>;
}

/// An embedding given by a closure, for ad-hoc maps in tests and tools.
pub struct FnEmbedding<F> {
    pub n: usize,
    pub input_alphabet: u64,
    pub output_alphabet: u64,
    pub f: F,
}

impl<F: Fn(&[Symbol]) -> Vec<Symbol> + Sync> Embedding for FnEmbedding<F> {
    fn n(&self) -> usize {
        self.n
    }

    fn input_alphabet(&self) -> u64 {
        self.input_alphabet
    }

    fn output_alphabet(&self) -> u64 {
        self.output_alphabet
    }

    fn apply(&self, x: &[Symbol]) -> Vec<Symbol> {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EmbeddingSpec {
    Misaligner(MisalignerEmbedding),
    ThirdRate(ThirdRateEmbedding),
    Product(ProductEmbedding),
    Folklore(FolkloreEmbedding),
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    format: String,
    #[serde(flatten)]
    spec: EmbeddingSpec,
}

/// Rate `n log|in| / (N log|out|)`. `exact` is set when both alphabets
/// coincide and the rate is the plain length ratio `n / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub n: usize,
    pub output_len: usize,
    pub log2_input_alphabet: f64,
    pub log2_output_alphabet: f64,
    pub exact: Option<(u64, u64)>,
    pub value: f64,
}

impl Rate {
    pub fn new(n: usize, output_len: usize, input_alphabet: u64, output_alphabet: u64) -> Rate {
        Rate::from_logs(
            n,
            output_len,
            (input_alphabet as f64).log2(),
            (output_alphabet as f64).log2(),
            input_alphabet == output_alphabet,
        )
    }

    fn from_logs(n: usize, output_len: usize, log_in: f64, log_out: f64, same: bool) -> Rate {
        let exact = (same && output_len > 0).then(|| {
            let r = Ratio::new(n as u64, output_len as u64);
            (*r.numer(), *r.denom())
        });
        let value = if output_len == 0 || log_out == 0.0 {
            0.0
        } else {
            (n as f64 * log_in) / (output_len as f64 * log_out)
        };
        Rate {
            n,
            output_len,
            log2_input_alphabet: log_in,
            log2_output_alphabet: log_out,
            exact,
            value,
        }
    }

    /// The value rounded to 12 significant digits.
    pub fn display(&self) -> String {
        match self.exact {
            Some((p, q)) => format!("{} ({p}/{q})", significant(self.value)),
            None => significant(self.value),
        }
    }
}

fn significant(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let digits = 12 - 1 - v.abs().log10().floor() as i32;
    let s = format!("{:.*}", digits.max(0) as usize, v);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl EmbeddingSpec {
    pub fn family(&self) -> &'static str {
        match self {
            EmbeddingSpec::Misaligner(_) => "misaligner",
            EmbeddingSpec::ThirdRate(_) => "third_rate",
            EmbeddingSpec::Product(_) => "product",
            EmbeddingSpec::Folklore(_) => "folklore",
        }
    }

    pub fn output_len(&self) -> usize {
        match self {
            EmbeddingSpec::Misaligner(e) => e.template.len(),
            EmbeddingSpec::ThirdRate(e) => e.n + e.lsm.value.len(),
            EmbeddingSpec::Product(e) => e.padded_len,
            EmbeddingSpec::Folklore(e) => e.n * (1 + e.block_len),
        }
    }

    /// 0-based output positions carrying the input symbols, in input order.
    pub fn mutable_positions(&self) -> Vec<usize> {
        match self {
            EmbeddingSpec::Misaligner(e) => (0..e.n).map(|i| i * e.misaligner.params.t).collect(),
            EmbeddingSpec::ThirdRate(e) => e.input_positions(),
            EmbeddingSpec::Product(e) => e.input_positions(),
            EmbeddingSpec::Folklore(e) => (0..e.n).map(|i| i * (1 + e.block_len)).collect(),
        }
    }

    pub fn rate(&self) -> Rate {
        match self {
            EmbeddingSpec::Product(e) => e.rate(),
            _ => Rate::new(self.n(), self.output_len(), self.input_alphabet(), self.output_alphabet()),
        }
    }

    /// Checks length and alphabet, then applies the map.
    pub fn embed(&self, x: &Str) -> Result<Str> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.n(),
            });
        }
        let size = self.input_alphabet();
        if let Some((position, &symbol)) = x.symbols().iter().enumerate().find(|(_, &s)| s >= size) {
            return Err(Error::SymbolOutOfRange {
                symbol,
                position,
                size,
            });
        }
        Str::new(self.apply(x.symbols()), Alphabet::new(self.output_alphabet())?)
    }

    /// The same construction (parameters and seed) for inputs of length `n`.
    pub fn resized(&self, n: usize) -> Result<EmbeddingSpec> {
        Ok(match self {
            EmbeddingSpec::Misaligner(e) => EmbeddingSpec::Misaligner(build_misaligner_embedding(
                &e.misaligner,
                e.epsilon,
                n,
                e.seed,
            )?),
            EmbeddingSpec::ThirdRate(e) => {
                EmbeddingSpec::ThirdRate(build_third_rate_embedding(e.rate(), n, e.seed)?)
            }
            EmbeddingSpec::Product(e) => EmbeddingSpec::Product(build_product_embedding(e.rho(), n, e.seed)?),
            EmbeddingSpec::Folklore(e) => EmbeddingSpec::Folklore(build_folklore(n, e.c, e.seed)?),
        })
    }

    pub fn to_json(&self) -> String {
        let file = SpecFile {
            format: FILE_MAGIC.into(),
            spec: self.clone(),
        };
        serde_json::to_string_pretty(&file).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<EmbeddingSpec> {
        let file: SpecFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("embedding spec: {e}")))?;
        if file.format != FILE_MAGIC {
            return Err(Error::Parse(format!(
                "unsupported spec format {:?}, expected {FILE_MAGIC:?}",
                file.format
            )));
        }
        Ok(file.spec)
    }
}

impl Embedding for EmbeddingSpec {
    fn n(&self) -> usize {
        match self {
            EmbeddingSpec::Misaligner(e) => e.n,
            EmbeddingSpec::ThirdRate(e) => e.n,
            EmbeddingSpec::Product(e) => e.n,
            EmbeddingSpec::Folklore(e) => e.n,
        }
    }

    fn input_alphabet(&self) -> u64 {
        match self {
            EmbeddingSpec::Misaligner(_) | EmbeddingSpec::Folklore(_) => 2,
            EmbeddingSpec::ThirdRate(e) => e.alphabet_size,
            EmbeddingSpec::Product(e) => e.sigma_in_size,
        }
    }

    fn output_alphabet(&self) -> u64 {
        match self {
            EmbeddingSpec::Product(e) => e.sigma_out_size,
            _ => self.input_alphabet(),
        }
    }

    fn apply(&self, x: &[Symbol]) -> Vec<Symbol> {
        match self {
            EmbeddingSpec::Misaligner(e) => e.apply(x),
            EmbeddingSpec::ThirdRate(e) => e.apply(x),
            EmbeddingSpec::Product(e) => e.apply(x),
            EmbeddingSpec::Folklore(e) => e.apply(x),
        }
    }
}

/// Parses `a/b`, an integer, or a decimal such as `0.125` into an exact
/// non-negative rational.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>> {
    let bad = || Error::Parse(format!("not a non-negative rational: {text:?}"));
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if (int.is_empty() && frac.is_empty()) || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let scale = 10u64.pow(frac.len() as u32);
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let numer = int
        .checked_mul(scale)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Ratio::new(numer, scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_parse_exactly() {
        assert_eq!(parse_ratio("1/4").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("0.5").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("3").unwrap(), Ratio::new(3, 1));
        assert_eq!(parse_ratio(".125").unwrap(), Ratio::new(1, 8));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("-1").is_err());
        assert!(parse_ratio("abc").is_err());
    }

    #[test]
    fn rate_formatting() {
        let r = Rate::new(1, 8, 2, 2);
        assert_eq!(r.exact, Some((1, 8)));
        assert_eq!(r.display(), "0.125 (1/8)");
        assert_eq!(significant(1.0 / 3.0), "0.333333333333");
        // inserting a fresh symbol after each bit: N = 2n over n + 2 symbols
        let naive = Rate::new(4, 8, 2, 6);
        assert!((naive.value - 1.0 / (2.0 * 6f64.log2())).abs() < 1e-12);
        assert!(naive.value < 0.5);
        assert_eq!(naive.exact, None);
    }
}
