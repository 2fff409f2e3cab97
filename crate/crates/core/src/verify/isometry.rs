use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::metrics::kernels::edit_banded;
use crate::rng::seeded;
use crate::strings::Symbol;

/// Exhaustive checking enumerates at most this many inputs.
pub const EXHAUSTIVE_INPUT_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub x: Vec<Symbol>,
    pub y: Vec<Symbol>,
    pub hamming: usize,
    /// Edit distance of the images, capped at `hamming + 1` when larger.
    pub edit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub pass: bool,
    pub pairs_checked: u64,
    pub violations: u64,
    /// First violation found (deterministic order).
    pub counterexample: Option<Counterexample>,
}

/// Compares the edit distance of the images with the Hamming distance of
/// `x`, `y`; returns the capped edit distance when they differ.
fn mismatch(
    x: &[Symbol],
    fx: &[Symbol],
    y: &[Symbol],
    fy: &[Symbol],
) -> Option<Counterexample> {
    let hamming = x.iter().zip(y).filter(|(a, b)| a != b).count();
    let edit = edit_banded(fx, fy, |a, b| a == b, false, hamming as u32) as usize;
    (edit != hamming).then(|| Counterexample {
        x: x.to_vec(),
        y: y.to_vec(),
        hamming,
        edit,
    })
}

fn decode(mut index: u64, n: usize, q: u64) -> Vec<Symbol> {
    let mut x = vec![0; n];
    for s in x.iter_mut().rev() {
        *s = index % q;
        index /= q;
    }
    x
}

/// Checks every pair of inputs. Fails fast on inputs whose count exceeds
/// [`EXHAUSTIVE_INPUT_LIMIT`].
pub fn verify_isometry_exhaustive<E: Embedding + ?Sized>(emb: &E) -> Result<IsometryReport> {
    let n = emb.n();
    let q = emb.input_alphabet();
    let count = (q as u128)
        .checked_pow(n as u32)
        .filter(|&c| c <= EXHAUSTIVE_INPUT_LIMIT as u128)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "{q}^{n} inputs exceed the exhaustive limit of {EXHAUSTIVE_INPUT_LIMIT}; use sampling"
            ))
        })? as u64;
    let inputs: Vec<Vec<Symbol>> = (0..count).map(|i| decode(i, n, q)).collect();
    let images: Vec<Vec<Symbol>> = inputs.par_iter().map(|x| emb.apply(x)).collect();
    let per_x: Vec<(u64, Option<Counterexample>)> = (0..inputs.len())
        .into_par_iter()
        .map(|i| {
            let mut bad = 0u64;
            let mut first = None;
            for j in i + 1..inputs.len() {
                if let Some(c) = mismatch(&inputs[i], &images[i], &inputs[j], &images[j]) {
                    bad += 1;
                    first.get_or_insert(c);
                }
            }
            (bad, first)
        })
        .collect();
    let violations = per_x.iter().map(|p| p.0).sum();
    let counterexample = per_x.into_iter().find_map(|p| p.1);
    Ok(IsometryReport {
        pass: violations == 0,
        pairs_checked: count * count.saturating_sub(1) / 2,
        violations,
        counterexample,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub trials: usize,
    pub seed: u64,
    /// Also test every input at Hamming distance 1 and 2 from each sampled
    /// point (one random replacement symbol per changed position).
    pub neighbors: bool,
}

fn other_symbol<R: Rng>(rng: &mut R, q: u64, not: Symbol) -> Symbol {
    let v = rng.gen_range(0..q - 1);
    if v >= not {
        v + 1
    } else {
        v
    }
}

/// Checks random pairs and, optionally, all close neighbours of random
/// points. Inputs over a one-symbol alphabet have nothing to compare.
pub fn verify_isometry_sampled<E: Embedding + ?Sized>(emb: &E, config: SampleConfig) -> IsometryReport {
    let n = emb.n();
    let q = emb.input_alphabet();
    if q < 2 || n == 0 {
        return IsometryReport {
            pass: true,
            pairs_checked: 0,
            violations: 0,
            counterexample: None,
        };
    }
    // draw all trial inputs up front so the result does not depend on
    // scheduling
    let mut rng = seeded(config.seed);
    let trials: Vec<(Vec<Symbol>, Vec<Symbol>, u64)> = (0..config.trials)
        .map(|_| {
            let x: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..q)).collect();
            let mut y: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..q)).collect();
            if y == x {
                let i = *(0..n).collect::<Vec<_>>().choose(&mut rng).expect("n > 0");
                y[i] = other_symbol(&mut rng, q, x[i]);
            }
            (x, y, rng.gen())
        })
        .collect();
    let results: Vec<(u64, u64, Option<Counterexample>)> = trials
        .par_iter()
        .map(|(x, y, sub_seed)| {
            let mut checked = 0u64;
            let mut bad = 0u64;
            let mut first = None;
            let fx = emb.apply(x);
            let mut test = |z: &[Symbol]| {
                checked += 1;
                if let Some(c) = mismatch(x, &fx, z, &emb.apply(z)) {
                    bad += 1;
                    first.get_or_insert(c);
                }
            };
            test(y);
            if config.neighbors {
                let mut r = seeded(*sub_seed);
                let mut z = x.clone();
                for i in 0..n {
                    z[i] = other_symbol(&mut r, q, x[i]);
                    test(&z);
                    for j in i + 1..n {
                        z[j] = other_symbol(&mut r, q, x[j]);
                        test(&z);
                        z[j] = x[j];
                    }
                    z[i] = x[i];
                }
            }
            (checked, bad, first)
        })
        .collect();
    let pairs_checked = results.iter().map(|r| r.0).sum();
    let violations = results.iter().map(|r| r.1).sum();
    let counterexample = results.into_iter().find_map(|r| r.2);
    IsometryReport {
        pass: violations == 0,
        pairs_checked,
        violations,
        counterexample,
    }
}
