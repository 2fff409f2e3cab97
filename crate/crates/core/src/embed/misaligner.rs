//! Binary embedding of rate `1/t` from a misaligner and a locally
//! self-matching string over the codeword indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsm::{self, LsmString};
use crate::misaligner::{required_t, Misaligner};
use crate::strings::{Symbol, WildStr, WILDCARD};

/// How the locally self-matching string over `k` symbols was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsmPolicy {
    /// `k` meets the alphabet bound, so generation is guaranteed to succeed.
    Guaranteed,
    /// `k` is below the bound; the string was generated with the widest
    /// exclusion window the alphabet allows and then checked exhaustively.
    Verified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisalignerEmbedding {
    pub misaligner: Misaligner,
    pub epsilon: f64,
    pub n: usize,
    pub seed: u64,
    pub lsm_policy: LsmPolicy,
    /// Symbol `i` of the string stands for codeword `i`.
    pub lsm: LsmString,
    /// Concatenated codewords trimmed to length `t n`; exactly `n`
    /// wildcards, at positions `0, t, 2t, ...`.
    pub template: WildStr,
}

impl MisalignerEmbedding {
    pub(crate) fn apply(&self, x: &[Symbol]) -> Vec<Symbol> {
        let mut it = x.iter();
        self.template
            .symbols()
            .iter()
            .map(|&s| if s == WILDCARD { *it.next().expect("one input symbol per wildcard") } else { s })
            .collect()
    }
}

/// Builds the embedding for inputs of length `n`.
///
/// Requires `required_t(m, alpha, epsilon) <= t`. When `k` is below
/// [`lsm::min_alphabet_size`] the string is still accepted if exhaustive
/// checking confirms it (see [`LsmPolicy::Verified`]).
pub fn build_misaligner_embedding(
    mis: &Misaligner,
    epsilon: f64,
    n: usize,
    seed: u64,
) -> Result<MisalignerEmbedding> {
    let p = mis.params;
    let need_t = required_t(p.m, p.alpha, epsilon)?;
    if need_t > p.t as u64 {
        return Err(Error::Preconditions(format!(
            "wildcard period t = {} is below the required {need_t} for m = {}, alpha = {}, epsilon = {epsilon}",
            p.t, p.m, p.alpha
        )));
    }
    let k = p.k as u64;
    let blocks = (p.t * n).div_ceil(p.m);
    let (policy, lsm) = if k >= lsm::min_alphabet_size(epsilon)? {
        (LsmPolicy::Guaranteed, lsm::generate(epsilon, k, blocks, seed)?)
    } else {
        let window = lsm::theta_of(epsilon)? - 1;
        let w = lsm::generate_with_window(epsilon, k, blocks, seed, window)?;
        let report = lsm::verify_lsm(&w.value, epsilon);
        if let Some((a, b)) = report.first_bad_interval {
            return Err(Error::Preconditions(format!(
                "alphabet of {k} codewords is below the bound and the generated string fails on [{a}, {b}]"
            )));
        }
        (LsmPolicy::Verified, w)
    };
    let mut symbols: Vec<Symbol> = Vec::with_capacity(blocks * p.m);
    for &c in lsm.value.symbols() {
        symbols.extend_from_slice(mis.codewords[c as usize].symbols());
    }
    symbols.truncate(p.t * n);
    let template = WildStr::new(symbols, mis.codewords[0].alphabet())?;
    Ok(MisalignerEmbedding {
        misaligner: mis.clone(),
        epsilon,
        n,
        seed,
        lsm_policy: policy,
        lsm,
        template,
    })
}
