//! Baseline: a uniformly random binary block of length about `c log2 n`
//! after each input bit. Isometric only with high probability.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::strings::Symbol;

pub const DEFAULT_FOLKLORE_C: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FolkloreEmbedding {
    pub n: usize,
    pub c: f64,
    pub seed: u64,
    /// `ceil(c log2 n)`.
    pub block_len: usize,
    /// Concatenated pad blocks, `n * block_len` bits.
    pub pads: Vec<u8>,
}

impl FolkloreEmbedding {
    pub(crate) fn apply(&self, x: &[Symbol]) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(self.n * (1 + self.block_len));
        for (i, &b) in x.iter().enumerate() {
            out.push(b);
            out.extend(
                self.pads[i * self.block_len..(i + 1) * self.block_len]
                    .iter()
                    .map(|&p| p as Symbol),
            );
        }
        out
    }
}

pub fn build_folklore(n: usize, c: f64, seed: u64) -> Result<FolkloreEmbedding> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n = {n} must be at least 2")));
    }
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::OutOfRange(format!("c = {c} must be at least 1")));
    }
    let block_len = (c * (n as f64).log2()).ceil() as usize;
    let mut rng = seeded(seed);
    let pads = (0..n * block_len).map(|_| rng.gen_range(0..2u8)).collect();
    Ok(FolkloreEmbedding {
        n,
        c,
        seed,
        block_len,
        pads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_length_and_determinism() {
        let f = build_folklore(16, 3.0, 9).unwrap();
        assert_eq!(f.block_len, 12);
        assert_eq!(f.apply(&[0; 16]).len(), 16 * 13);
        assert_eq!(build_folklore(16, 3.0, 9).unwrap(), f);
        assert_ne!(build_folklore(16, 3.0, 10).unwrap().pads, f.pads);
        assert!(build_folklore(1, 3.0, 0).is_err());
        assert!(build_folklore(8, 0.5, 0).is_err());
    }
}
