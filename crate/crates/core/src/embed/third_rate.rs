//! Rate `R < 1/3` embedding over a large alphabet: each input symbol is
//! followed by a block of a locally self-matching string.

use std::f64::consts::E;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsm::{self, LsmString};
use crate::strings::Symbol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThirdRateEmbedding {
    pub n: usize,
    pub seed: u64,
    /// Rate `R = a / b` in lowest terms.
    pub a: u64,
    pub b: u64,
    pub q: u64,
    pub r: u64,
    /// Number of long blocks, `floor(n / a)`.
    pub long_blocks: usize,
    /// `(1 - 3R) / (2 (1 - R))`.
    pub epsilon_prime: f64,
    pub alphabet_size: u64,
    /// Length of the block following each input symbol.
    pub partition: Vec<usize>,
    pub lsm: LsmString,
}

fn check_rate(rate: Ratio<u64>) -> Result<(u64, u64)> {
    let (a, b) = (*rate.numer(), *rate.denom());
    if a == 0 || 3 * a >= b {
        return Err(Error::OutOfRange(format!("rate {a}/{b} not in (0, 1/3)")));
    }
    Ok((a, b))
}

/// `(1 - 3R) / (2 (1 - R))` for `R = a / b`.
fn epsilon_prime(a: u64, b: u64) -> f64 {
    (b - 3 * a) as f64 / (2 * (b - a)) as f64
}

/// `ceil(5 e^2 / eps'^2)`.
pub fn third_rate_alphabet_size(rate: Ratio<u64>) -> Result<u64> {
    let (a, b) = check_rate(rate)?;
    let e = epsilon_prime(a, b);
    Ok((5.0 * E * E / (e * e)).ceil() as u64)
}

/// With long blocks at every `a`-th place, a window can hold
/// `a (q + r - 1) / b` more input symbols than `R` times its length; this
/// stays within one exactly when `r (a - 1) <= a`.
fn layout_is_balanced(a: u64, b: u64) -> bool {
    let r = b - a * (b / a);
    r * (a - 1) <= a
}

/// Picks the rate for slack `rho`: `1/3 - rho` itself when its block layout
/// keeps the input density within one of `R` times the window length,
/// otherwise the smallest balanced rate above it (`1/q` or `a/(3a+1)`).
pub fn third_rate_for_rho(rho: Ratio<u64>) -> Result<Ratio<u64>> {
    let third = Ratio::new(1u64, 3);
    if rho == Ratio::from_integer(0) || rho >= third {
        return Err(Error::OutOfRange(format!("rho {rho} not in (0, 1/3)")));
    }
    let target = third - rho;
    let (a, b) = (*target.numer(), *target.denom());
    if layout_is_balanced(a, b) {
        return Ok(target);
    }
    if target <= Ratio::new(1, 4) {
        // smallest 1/q at least the target
        let q = b / a;
        return Ok(Ratio::new(1, q));
    }
    // k/(3k+1) >= a/b  <=>  k (b - 3a) >= a
    let gap = b - 3 * a;
    let k = a.div_ceil(gap);
    Ok(Ratio::new(k, 3 * k + 1))
}

impl ThirdRateEmbedding {
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.a, self.b)
    }

    /// `1/3 - R`.
    pub fn rho(&self) -> Ratio<u64> {
        Ratio::new(self.b - 3 * self.a, 3 * self.b)
    }

    pub(crate) fn input_positions(&self) -> Vec<usize> {
        let mut pos = 0;
        self.partition
            .iter()
            .map(|&len| {
                let p = pos;
                pos += 1 + len;
                p
            })
            .collect()
    }

    pub(crate) fn apply(&self, x: &[Symbol]) -> Vec<Symbol> {
        let w = self.lsm.value.symbols();
        let mut out = Vec::with_capacity(self.n + w.len());
        let mut next = 0;
        for (&s, &len) in x.iter().zip(&self.partition) {
            out.push(s);
            out.extend_from_slice(&w[next..next + len]);
            next += len;
        }
        out
    }

    /// First output window (0-based, half-open) whose count of input
    /// symbols leaves `[R L - 1, R L + 1]`, where `L` is its length.
    pub fn density_violation(&self) -> Option<(usize, usize)> {
        let len = self.n + self.lsm.value.len();
        let mut prefix = vec![0u64; len + 1];
        let mut is_input = vec![false; len];
        for p in self.input_positions() {
            is_input[p] = true;
        }
        for i in 0..len {
            prefix[i + 1] = prefix[i] + u64::from(is_input[i]);
        }
        let (a, b) = (self.a as i128, self.b as i128);
        for s in 0..len {
            for e in s + 1..=len {
                // |count - a L / b| <= 1  <=>  |b count - a L| <= b
                let count = (prefix[e] - prefix[s]) as i128;
                if (b * count - a * (e - s) as i128).abs() > b {
                    return Some((s, e));
                }
            }
        }
        None
    }
}

/// Builds the rate-`R` embedding for inputs of length `n`. The block after
/// the `i`-th input symbol (1-based) is long, of length `q - 1 + r`, when
/// `a` divides `i`, and of length `q - 1` otherwise.
pub fn build_third_rate_embedding(rate: Ratio<u64>, n: usize, seed: u64) -> Result<ThirdRateEmbedding> {
    let (a, b) = check_rate(rate)?;
    debug_assert_eq!(a.gcd(&b), 1);
    if !layout_is_balanced(a, b) {
        return Err(Error::Preconditions(format!(
            "rate {a}/{b}: long blocks every {a}-th place let windows exceed the input density bound; pick a rate with r (a - 1) <= a, e.g. via third_rate_for_rho"
        )));
    }
    let q = b / a;
    let r = b - a * q;
    let long_blocks = n / a as usize;
    let partition: Vec<usize> = (1..=n)
        .map(|i| {
            if i as u64 % a == 0 {
                (q - 1 + r) as usize
            } else {
                (q - 1) as usize
            }
        })
        .collect();
    let total: usize = partition.iter().sum();
    let eps = epsilon_prime(a, b);
    let alphabet_size = third_rate_alphabet_size(rate)?;
    let lsm = lsm::generate(eps, alphabet_size, total, seed)?;
    Ok(ThirdRateEmbedding {
        n,
        seed,
        a,
        b,
        q,
        r,
        long_blocks,
        epsilon_prime: eps,
        alphabet_size,
        partition,
        lsm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_sizes() {
        assert_eq!(third_rate_alphabet_size(Ratio::new(1, 8)).unwrap(), 290);
        assert_eq!(third_rate_alphabet_size(Ratio::new(1, 4)).unwrap(), 1331);
        assert!(third_rate_alphabet_size(Ratio::new(1, 3)).is_err());
    }

    #[test]
    fn rate_choice() {
        assert_eq!(third_rate_for_rho(Ratio::new(1, 12)).unwrap(), Ratio::new(1, 4));
        // 1/3 - 1/24 = 7/24 is unbalanced; 3/10 is the next balanced rate
        assert_eq!(third_rate_for_rho(Ratio::new(1, 24)).unwrap(), Ratio::new(3, 10));
        // 1/3 - 1/5 = 2/15: q = 7, r = 1, balanced
        assert_eq!(third_rate_for_rho(Ratio::new(1, 5)).unwrap(), Ratio::new(2, 15));
        // 1/3 - 3/10 = 1/30
        assert_eq!(third_rate_for_rho(Ratio::new(3, 10)).unwrap(), Ratio::new(1, 30));
        assert!(third_rate_for_rho(Ratio::new(2, 5)).is_err());
        assert!(third_rate_for_rho(Ratio::new(0, 1)).is_err());
    }

    #[test]
    fn quarter_rate_layout() {
        let e = build_third_rate_embedding(Ratio::new(1, 4), 10, 3).unwrap();
        assert_eq!((e.q, e.r, e.long_blocks), (4, 0, 10));
        assert!(e.partition.iter().all(|&l| l == 3));
        assert_eq!(e.apply(&[0; 10]).len(), 40);
        assert_eq!(e.density_violation(), None);
    }

    #[test]
    fn two_sevenths_layout() {
        let e = build_third_rate_embedding(Ratio::new(2, 7), 9, 3).unwrap();
        assert_eq!((e.q, e.r, e.long_blocks), (3, 1, 4));
        assert_eq!(e.partition, vec![2, 3, 2, 3, 2, 3, 2, 3, 2]);
        assert_eq!(e.lsm.value.len(), 4 * 3 + 5 * 2);
        assert_eq!(e.density_violation(), None);
        assert!(build_third_rate_embedding(Ratio::new(7, 24), 9, 3).is_err());
    }
}
