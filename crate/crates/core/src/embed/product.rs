//! High-rate embedding over a product alphabet: the padded input paired
//! symbol by symbol with a locally self-matching string.

use std::f64::consts::E;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::Rate;
use crate::error::{Error, Result};
use crate::lsm::{self, LsmString};
use crate::strings::Symbol;

/// The constant in the padding period; 10 is enough for the rate bound.
pub const PRODUCT_C: u64 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEmbedding {
    pub n: usize,
    pub seed: u64,
    /// `rho = rho_num / rho_den`.
    pub rho_num: u64,
    pub rho_den: u64,
    pub c: u64,
    /// Padding period: a pad symbol follows every `m_pad - 1` input symbols.
    pub m_pad: u64,
    /// `1 / m_pad`.
    pub epsilon: f64,
    /// `m_pad ^ m_pad`.
    pub sigma_in_size: u64,
    /// `ceil(5 e^2 / (epsilon / 2)^2)`.
    pub sigma_prime_size: u64,
    /// Output symbol `(u, v)` is encoded as `u * sigma_prime_size + v`.
    pub sigma_out_size: u64,
    pub pad_symbol: Symbol,
    /// `n + floor(n / (m_pad - 1))`.
    pub padded_len: usize,
    pub lsm: LsmString,
}

impl ProductEmbedding {
    pub fn rho(&self) -> Ratio<u64> {
        Ratio::new(self.rho_num, self.rho_den)
    }

    pub(crate) fn input_positions(&self) -> Vec<usize> {
        let g = (self.m_pad - 1) as usize;
        (0..self.n).map(|i| i + i / g).collect()
    }

    /// `x` with the pad symbol after every `m_pad - 1` symbols.
    pub fn pad(&self, x: &[Symbol]) -> Vec<Symbol> {
        let g = (self.m_pad - 1) as usize;
        let mut out = Vec::with_capacity(self.padded_len);
        for chunk in x.chunks(g) {
            out.extend_from_slice(chunk);
            if chunk.len() == g {
                out.push(self.pad_symbol);
            }
        }
        out
    }

    pub fn encode(&self, u: Symbol, v: Symbol) -> Symbol {
        u * self.sigma_prime_size + v
    }

    pub fn decode(&self, s: Symbol) -> (Symbol, Symbol) {
        (s / self.sigma_prime_size, s % self.sigma_prime_size)
    }

    pub(crate) fn apply(&self, x: &[Symbol]) -> Vec<Symbol> {
        self.pad(x)
            .into_iter()
            .zip(self.lsm.value.symbols())
            .map(|(u, &v)| self.encode(u, v))
            .collect()
    }

    pub fn rate(&self) -> Rate {
        let m = self.m_pad as f64;
        let log_in = m * m.log2();
        let log_out = log_in + (self.sigma_prime_size as f64).log2();
        Rate::from_logs(self.n, self.padded_len, log_in, log_out, false)
    }

    /// Exact lower bound `(m_pad - 1) / (m_pad + c)` on the rate, valid
    /// when `sigma_prime_size <= m_pad ^ c`; `None` if that fails.
    pub fn certified_rate_bound(&self) -> Option<Ratio<u64>> {
        let cap = (self.m_pad as u128).checked_pow(self.c as u32).unwrap_or(u128::MAX);
        (self.sigma_prime_size as u128 <= cap)
            .then(|| Ratio::new(self.m_pad - 1, self.m_pad + self.c))
    }
}

/// `ceil((c (1 - rho) + 1) / rho)`.
fn padding_period(rho: Ratio<u64>, c: u64) -> u64 {
    let (p, q) = (*rho.numer(), *rho.denom());
    // (c (q - p) / q + 1) / (p / q) = (c (q - p) + q) / p
    (c * (q - p) + q).div_ceil(p)
}

/// Builds the embedding with rate at least `1 - rho` for inputs of length
/// `n`. Symbols are 64-bit indices, which limits `rho` to roughly 0.46 and
/// above.
pub fn build_product_embedding(rho: Ratio<u64>, n: usize, seed: u64) -> Result<ProductEmbedding> {
    if *rho.numer() == 0 || rho >= Ratio::from_integer(1) {
        return Err(Error::OutOfRange(format!("rho {rho} not in (0, 1)")));
    }
    let c = PRODUCT_C;
    let m_pad = padding_period(rho, c);
    let too_large = || Error::TooLarge(format!("alphabets for m_pad = {m_pad} exceed 64-bit symbols"));
    let sigma_in_size = u32::try_from(m_pad)
        .ok()
        .and_then(|e| m_pad.checked_pow(e))
        .ok_or_else(too_large)?;
    let eps_prime = 1.0 / (2 * m_pad) as f64;
    let sigma_prime_size = (5.0 * E * E / (eps_prime * eps_prime)).ceil() as u64;
    let sigma_out_size = sigma_in_size
        .checked_mul(sigma_prime_size)
        .filter(|&s| s < u64::MAX)
        .ok_or_else(too_large)?;
    let padded_len = n + n / (m_pad - 1) as usize;
    let lsm = lsm::generate(eps_prime, sigma_prime_size, padded_len, seed)?;
    Ok(ProductEmbedding {
        n,
        seed,
        rho_num: *rho.numer(),
        rho_den: *rho.denom(),
        c,
        m_pad,
        epsilon: 1.0 / m_pad as f64,
        sigma_in_size,
        sigma_prime_size,
        sigma_out_size,
        pad_symbol: 0,
        padded_len,
        lsm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_rho_parameters() {
        let e = build_product_embedding(Ratio::new(1, 2), 23, 5).unwrap();
        assert_eq!(e.m_pad, 12);
        assert_eq!(e.sigma_in_size, 12u64.pow(12));
        assert_eq!(e.sigma_prime_size, 21281);
        assert_eq!(e.padded_len, 25);
        assert_eq!(e.certified_rate_bound(), Some(Ratio::new(1, 2)));
        assert!(e.rate().value >= 0.5);
    }

    #[test]
    fn padding_and_pairs() {
        let e = build_product_embedding(Ratio::new(1, 2), 12, 5).unwrap();
        let x: Vec<Symbol> = (1..=12).collect();
        let padded = e.pad(&x);
        assert_eq!(padded.len(), 13);
        assert_eq!(padded[11], 0);
        assert_eq!(&padded[..11], &x[..11]);
        assert_eq!(padded[12], 12);
        let out = e.apply(&x);
        for (j, &s) in out.iter().enumerate() {
            assert_eq!(e.decode(s), (padded[j], e.lsm.value.symbols()[j]));
        }
        assert_eq!(e.input_positions()[11], 12);
    }

    #[test]
    fn range_checks() {
        assert!(build_product_embedding(Ratio::new(0, 1), 4, 0).is_err());
        assert!(build_product_embedding(Ratio::new(1, 1), 4, 0).is_err());
        assert!(matches!(
            build_product_embedding(Ratio::new(1, 10), 4, 0),
            Err(Error::TooLarge(_))
        ));
        // rho close to 1: period at its minimum of 2
        assert_eq!(padding_period(Ratio::new(99, 100), 10), 2);
    }
}
