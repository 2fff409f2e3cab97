//! Locally self-matching strings: every substring `s` has a nowhere-vertical
//! self-LCS shorter than `epsilon * |s|`.
//!
//! Generation draws each symbol uniformly among those not used by the
//! previous `ceil(theta) - 1` symbols, then repairs bad substrings by
//! resampling them (shortest first, then leftmost) until none remain.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::f64::consts::E;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::strings::{Alphabet, Str, Symbol};

const FILE_MAGIC: &str = "isoembed-lsm v1";

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 && epsilon <= 0.5 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("epsilon {epsilon} not in (0, 1/2]")))
    }
}

/// `ceil((e^2 / eps^2) * (1 + 4 eps^(1/4)))`.
pub fn min_alphabet_size(epsilon: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    Ok((E * E / (epsilon * epsilon) * (1.0 + 4.0 * epsilon.powf(0.25))).ceil() as u64)
}

/// `ceil(e^2 / eps^(7/4))`.
pub fn theta_of(epsilon: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    Ok((E * E / epsilon.powf(1.75)).ceil() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsmParams {
    pub epsilon: f64,
    pub sigma_size: u64,
    pub theta: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsmString {
    pub params: LsmParams,
    pub value: Str,
    pub verified: bool,
    pub resample_count: u64,
}

/// Generates a verified string of length `n`. Requires
/// `sigma_size >= min_alphabet_size(epsilon)`.
pub fn generate(epsilon: f64, sigma_size: u64, n: usize, seed: u64) -> Result<LsmString> {
    let required = min_alphabet_size(epsilon)?;
    if sigma_size < required {
        return Err(Error::AlphabetTooSmall {
            required,
            actual: sigma_size,
        });
    }
    let window = theta_of(epsilon)? - 1;
    generate_with_window(epsilon, sigma_size, n, seed, window)
}

/// Like [`generate`] but over any alphabet, with an explicit exclusion
/// window (clamped to `sigma_size - 1`).
///
/// Without the alphabet bound nothing guarantees quick convergence, but the
/// result is only returned once [`verify_lsm`] passes.
pub fn generate_with_window(
    epsilon: f64,
    sigma_size: u64,
    n: usize,
    seed: u64,
    window: u64,
) -> Result<LsmString> {
    check_epsilon(epsilon)?;
    let alphabet = Alphabet::new(sigma_size)?;
    let theta = theta_of(epsilon)?;
    let window = window.min(sigma_size - 1) as usize;
    let mut rng = seeded(seed);

    let mut w: Vec<Symbol> = Vec::with_capacity(n);
    let mut last: HashMap<Symbol, usize> = HashMap::new();
    for i in 0..n {
        let s = loop {
            let c = rng.gen_range(0..sigma_size);
            match last.get(&c) {
                Some(&p) if p + window >= i => continue,
                _ => break c,
            }
        };
        last.insert(s, i);
        w.push(s);
    }

    let budget = 1000u64.saturating_mul(n as u64);
    let mut resample_count = 0u64;
    // shortest[a] = length of the shortest bad substring starting at a
    let mut shortest: Vec<Option<usize>> = (0..n)
        .into_par_iter()
        .map(|a| first_bad_length(&w[a..], epsilon))
        .collect();
    while let Some((a, len)) = pick_bad(&shortest) {
        if resample_count >= budget {
            return Err(Error::ResampleBudget {
                budget,
                start: a + 1,
                end: a + len,
            });
        }
        resample_count += 1;
        let b = a + len - 1;
        resample_window(&mut w, a, b, window, sigma_size, &mut rng);
        // only substrings starting at or before b can have changed
        let fresh: Vec<Option<usize>> = (0..=b)
            .into_par_iter()
            .map(|s| first_bad_length(&w[s..], epsilon))
            .collect();
        shortest[..=b].copy_from_slice(&fresh);
    }

    Ok(LsmString {
        params: LsmParams {
            epsilon,
            sigma_size,
            theta,
            seed,
        },
        value: Str::new(w, alphabet)?,
        verified: true,
        resample_count,
    })
}

fn pick_bad(shortest: &[Option<usize>]) -> Option<(usize, usize)> {
    shortest
        .iter()
        .enumerate()
        .filter_map(|(a, l)| l.map(|l| (l, a)))
        .min()
        .map(|(l, a)| (a, l))
}

fn resample_window(
    w: &mut [Symbol],
    a: usize,
    b: usize,
    window: usize,
    sigma: u64,
    rng: &mut ChaCha8Rng,
) {
    let n = w.len();
    for i in a..=b {
        let mut avoid: HashSet<Symbol> = w[i.saturating_sub(window)..i].iter().copied().collect();
        // keep the exclusion rule intact for the untouched symbols after the window
        let succ_lo = (b + 1).max(i + 1);
        let succ_hi = (i + window).min(n - 1);
        if succ_lo <= succ_hi {
            avoid.extend(w[succ_lo..=succ_hi].iter().copied());
        }
        if avoid.len() as u64 >= sigma {
            avoid = w[i.saturating_sub(window)..i].iter().copied().collect();
        }
        w[i] = loop {
            let c = rng.gen_range(0..sigma);
            if !avoid.contains(&c) {
                break c;
            }
        };
    }
}

/// Nowhere-vertical self-LCS of every prefix: entry `l - 1` is
/// `nvLcs(s[..l], s[..l])`.
///
/// The self-comparison table is symmetric, so only the upper triangle is
/// filled; its diagonal cell `(l, l)` equals the cell above it.
pub fn nv_lcs_self_prefixes(s: &[Symbol]) -> Vec<u32> {
    let n = s.len();
    let mut out = Vec::with_capacity(n);
    let mut r = vec![0u32; n + 1];
    for i in 1..=n {
        let a = s[i - 1];
        let mut diag = r[i];
        let mut left = r[i];
        out.push(left);
        for j in i + 1..=n {
            let up = r[j];
            let mut v = up.max(left);
            if a == s[j - 1] {
                v = v.max(diag + 1);
            }
            r[j] = v;
            diag = up;
            left = v;
        }
    }
    out
}

/// Nowhere-vertical self edit distance of every prefix, via the same
/// upper-triangle pass.
pub fn nv_edit_self_prefixes(s: &[Symbol]) -> Vec<u32> {
    let n = s.len();
    let mut out = Vec::with_capacity(n);
    let mut r: Vec<u32> = (0..=n as u32).collect();
    for i in 1..=n {
        let a = s[i - 1];
        let mut diag = r[i];
        r[i] += 1;
        let mut left = r[i];
        out.push(left);
        for j in i + 1..=n {
            let up = r[j];
            let v = (up.min(left) + 1).min(diag + u32::from(a != s[j - 1]));
            r[j] = v;
            diag = up;
            left = v;
        }
    }
    out
}

fn is_bad(nv_lcs: u32, len: usize, epsilon: f64) -> bool {
    nv_lcs as f64 >= epsilon * len as f64
}

fn first_bad_length(s: &[Symbol], epsilon: f64) -> Option<usize> {
    nv_lcs_self_prefixes(s)
        .iter()
        .enumerate()
        .find(|&(i, &v)| is_bad(v, i + 1, epsilon))
        .map(|(i, _)| i + 1)
}

/// True iff `nvLcs(s, s) >= epsilon * |s|`.
pub fn is_bad_substring(s: &Str, epsilon: f64) -> bool {
    let v = crate::metrics::nv_lcs(s, s);
    v as f64 >= epsilon * s.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsmReport {
    pub ok: bool,
    /// 1-based inclusive interval of the lexicographically first bad
    /// substring.
    pub first_bad_interval: Option<(usize, usize)>,
}

/// Checks every substring of `w`.
pub fn verify_lsm(w: &Str, epsilon: f64) -> LsmReport {
    let s = w.symbols();
    let first = (0..s.len())
        .into_par_iter()
        .find_map_first(|a| first_bad_length(&s[a..], epsilon).map(|l| (a + 1, a + l)));
    LsmReport {
        ok: first.is_none(),
        first_bad_interval: first,
    }
}

/// First substring (lexicographic in `(start, end)`) whose nowhere-vertical
/// self edit distance is below `(1 - epsilon) |s|`.
pub fn sync_violation(w: &Str, epsilon: f64) -> Option<(usize, usize)> {
    let s = w.symbols();
    (0..s.len()).into_par_iter().find_map_first(|a| {
        nv_edit_self_prefixes(&s[a..])
            .iter()
            .enumerate()
            .find(|&(i, &v)| (v as f64) < (1.0 - epsilon) * (i + 1) as f64)
            .map(|(i, _)| (a + 1, a + i + 1))
    })
}

/// True iff every substring `s` has `nvEdit(s, s) >= (1 - epsilon) |s|`.
pub fn verify_sync_string(w: &Str, epsilon: f64) -> bool {
    sync_violation(w, epsilon).is_none()
}

impl LsmString {
    /// A magic line, then `epsilon sigmaSize n seed resampleCount`, then the
    /// symbols.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{FILE_MAGIC}");
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            self.params.epsilon,
            self.params.sigma_size,
            self.value.len(),
            self.params.seed,
            self.resample_count
        );
        let syms: Vec<String> = self.value.symbols().iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "{}", syms.join(" "));
        out
    }

    /// Parses the format written by [`LsmString::to_text`]; the magic line
    /// is optional. The result is marked unverified.
    pub fn from_text(text: &str) -> Result<LsmString> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
        if lines.peek().map(|l| l.trim()) == Some(FILE_MAGIC) {
            lines.next();
        }
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty LSM file".into()))?;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 5 {
            return Err(Error::Parse(format!(
                "LSM header needs 5 fields, found {}",
                f.len()
            )));
        }
        let bad = |what: &str, v: &str| Error::Parse(format!("bad {what} '{v}'"));
        let epsilon: f64 = f[0].parse().map_err(|_| bad("epsilon", f[0]))?;
        let sigma_size: u64 = f[1].parse().map_err(|_| bad("sigma size", f[1]))?;
        let n: usize = f[2].parse().map_err(|_| bad("length", f[2]))?;
        let seed: u64 = f[3].parse().map_err(|_| bad("seed", f[3]))?;
        let resample_count: u64 = f[4].parse().map_err(|_| bad("resample count", f[4]))?;
        check_epsilon(epsilon)?;
        let alphabet = Alphabet::new(sigma_size)?;
        let value = match lines.next() {
            Some(l) => Str::parse(l, alphabet)?,
            None => Str::new(Vec::new(), alphabet)?,
        };
        if value.len() != n {
            return Err(Error::Parse(format!(
                "header says length {n}, found {} symbols",
                value.len()
            )));
        }
        Ok(LsmString {
            params: LsmParams {
                epsilon,
                sigma_size,
                theta: theta_of(epsilon)?,
                seed,
            },
            value,
            verified: false,
            resample_count,
        })
    }
}
