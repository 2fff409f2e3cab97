//! Randomized search for misaligners.
//!
//! A preprocessing pass estimates, for random patterned codewords, the
//! distribution of distances between pieces of one codeword (prefix, suffix,
//! middle) and another whole codeword. Low quantiles of these distributions
//! become filters: a candidate joins the collection only if none of its
//! distances to existing codewords, in either direction, falls below the
//! threshold for that piece length. Full verification then prunes the
//! codeword most involved in failures, and the loop refills.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::check::{newcomer_passes, verify, CheckMode, VerifyReport};
use super::{from_bytes, Misaligner, MisalignerParams};
use crate::error::{Error, Result};
use crate::rng::seeded;

const WILD: u8 = u8::MAX;
/// Offsets the preprocessing stream from the candidate stream.
const TABLE_STREAM: u64 = 0x5851_f42d_4c95_7f2d;
pub const DEFAULT_RANK_FRAC: f64 = 0.005;
/// Rejected third codewords before the first two are redrawn.
const SEED_PATIENCE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Target parameters; `alpha` is the level the result must verify at.
    pub params: MisalignerParams,
    pub rank_frac: f64,
    /// Number of random codeword pairs in the preprocessing pass.
    pub preprocess_count: usize,
    /// Maximum number of random candidates drawn.
    pub candidate_budget: usize,
    pub seed: u64,
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        let p = self.params;
        MisalignerParams::new(p.m, p.k, p.t, p.alpha)?;
        if !(self.rank_frac > 0.0 && self.rank_frac <= 1.0) {
            return Err(Error::OutOfRange(format!(
                "rank fraction {} not in (0, 1]",
                self.rank_frac
            )));
        }
        if self.preprocess_count < 1000 {
            return Err(Error::OutOfRange(format!(
                "preprocess count {} below 1000",
                self.preprocess_count
            )));
        }
        Ok(())
    }
}

/// Per-length histograms of piece-vs-codeword distances and the derived
/// thresholds. Index `l` of each vector is the piece length (index 0 is
/// unused).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatTables {
    pub m: usize,
    pub t: usize,
    pub rank_frac: f64,
    pub pairs: usize,
    pub prefix_stats: Vec<Vec<u64>>,
    pub suffix_stats: Vec<Vec<u64>>,
    pub middle_stats: Vec<Vec<u64>>,
    pub prefix_thr: Vec<u32>,
    pub suffix_thr: Vec<u32>,
    pub middle_thr: Vec<u32>,
}

/// Distances between the pieces of `c` and the whole of `other`.
struct Profile {
    /// `prefix[l]`: prefix of length `l` against the best suffix of `other`.
    prefix: Vec<u32>,
    /// `suffix[l]`: suffix of length `l` against the best prefix of `other`.
    suffix: Vec<u32>,
    /// `middle[l]`: worst case over windows of length `l` that avoid both
    /// ends of `c`, each against all of `other`.
    middle: Vec<u32>,
}

/// Last-column values of the wildcard edit table of `rows` vs `cols`:
/// entry `r` is the distance of `rows[..r]` to `cols`, or to the best suffix
/// of `cols` when `free_start` is set.
fn last_column(rows: &[u8], cols: &[u8], free_start: bool) -> Vec<u32> {
    let n = cols.len();
    let mut prev: Vec<u32> = if free_start {
        vec![0; n + 1]
    } else {
        (0..=n as u32).collect()
    };
    let mut cur = vec![0u32; n + 1];
    let mut out = Vec::with_capacity(rows.len() + 1);
    out.push(prev[n]);
    for (r, &a) in rows.iter().enumerate() {
        cur[0] = r as u32 + 1;
        for j in 1..=n {
            let b = cols[j - 1];
            let sub = u32::from(!(a == b || a == WILD || b == WILD));
            cur[j] = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + sub);
        }
        std::mem::swap(&mut prev, &mut cur);
        out.push(prev[n]);
    }
    out
}

fn profile(c: &[u8], other: &[u8]) -> Profile {
    let m = c.len();
    let prefix = last_column(c, other, true);
    let rc: Vec<u8> = c.iter().rev().copied().collect();
    let ro: Vec<u8> = other.iter().rev().copied().collect();
    let suffix = last_column(&rc, &ro, true);
    // windows c[i..i+l] with 1 <= i and i + l <= m - 1 (0-based)
    let mut middle = vec![0u32; m.saturating_sub(1)];
    let mut seen = vec![false; middle.len()];
    for i in 1..m.saturating_sub(1) {
        let col = last_column(&c[i..m - 1], other, false);
        for (l, &v) in col.iter().enumerate().skip(1) {
            if !seen[l] || v < middle[l] {
                middle[l] = v;
                seen[l] = true;
            }
        }
    }
    Profile {
        prefix,
        suffix,
        middle,
    }
}

fn random_codeword(m: usize, t: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..m)
        .map(|i| if i % t == 0 { WILD } else { rng.gen::<bool>() as u8 })
        .collect()
}

/// Largest `v` not above the histogram maximum such that at most a
/// `rank_frac` share of the samples lie strictly below `v`.
fn threshold(hist: &[u64], rank_frac: f64) -> u32 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 0;
    }
    let max = hist.iter().rposition(|&h| h > 0).unwrap_or(0);
    let allowed = rank_frac * total as f64;
    let mut below = 0u64;
    let mut best = 0;
    for (v, &h) in hist.iter().enumerate().take(max + 1) {
        if below as f64 <= allowed {
            best = v;
        }
        below += h;
    }
    best as u32
}

/// Builds the statistical filters from `pairs` random codeword pairs.
pub fn build_stat_tables(
    m: usize,
    t: usize,
    pairs: usize,
    rank_frac: f64,
    seed: u64,
) -> Result<StatTables> {
    if pairs == 0 {
        return Err(Error::OutOfRange("preprocess count must be positive".into()));
    }
    if m < 2 || t == 0 || m % t != 0 {
        return Err(Error::OutOfRange(format!("invalid shape m = {m}, t = {t}")));
    }
    if !(rank_frac > 0.0 && rank_frac <= 1.0) {
        return Err(Error::OutOfRange(format!("rank fraction {rank_frac} not in (0, 1]")));
    }
    let mut rng = seeded(seed);
    let width = 2 * m + 1;
    let mut prefix_stats = vec![vec![0u64; width]; m + 1];
    let mut suffix_stats = vec![vec![0u64; width]; m + 1];
    let mut middle_stats = vec![vec![0u64; width]; m.saturating_sub(1)];
    for _ in 0..pairs {
        let a = random_codeword(m, t, &mut rng);
        let b = random_codeword(m, t, &mut rng);
        let p = profile(&a, &b);
        for l in 1..=m {
            prefix_stats[l][p.prefix[l] as usize] += 1;
            suffix_stats[l][p.suffix[l] as usize] += 1;
        }
        for l in 1..p.middle.len() {
            middle_stats[l][p.middle[l] as usize] += 1;
        }
    }
    let thr = |stats: &[Vec<u64>]| stats.iter().map(|h| threshold(h, rank_frac)).collect();
    Ok(StatTables {
        m,
        t,
        rank_frac,
        pairs,
        prefix_thr: thr(&prefix_stats),
        suffix_thr: thr(&suffix_stats),
        middle_thr: thr(&middle_stats),
        prefix_stats,
        suffix_stats,
        middle_stats,
    })
}

impl StatTables {
    /// True iff no piece of `c` is closer to `other` than its threshold.
    fn accepts(&self, c: &[u8], other: &[u8]) -> bool {
        let p = profile(c, other);
        let ok = |vals: &[u32], thr: &[u32]| {
            vals.iter().zip(thr).skip(1).all(|(&v, &th)| v >= th)
        };
        ok(&p.prefix, &self.prefix_thr)
            && ok(&p.suffix, &self.suffix_thr)
            && ok(&p.middle, &self.middle_thr)
    }

    /// Filters in both directions against every codeword in `existing`.
    pub fn admits(&self, c: &[u8], existing: &[Vec<u8>]) -> bool {
        existing
            .iter()
            .all(|e| e.as_slice() != c && self.accepts(c, e) && self.accepts(e, c))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// The collection found; when complete, its `alpha` is the achieved one.
    pub misaligner: Misaligner,
    pub complete: bool,
    pub target_alpha: f64,
    pub achieved_alpha: Option<f64>,
    pub candidates_used: usize,
    pub prune_rounds: usize,
    /// Conservative report at the target alpha for the final collection.
    pub report: Option<VerifyReport>,
    pub diagnostic: Option<String>,
}

fn assemble(params: MisalignerParams, cw: &[Vec<u8>], alpha: f64) -> Misaligner {
    let params = MisalignerParams {
        k: cw.len(),
        alpha,
        ..params
    };
    Misaligner {
        params,
        codewords: cw.iter().map(|c| from_bytes(c)).collect(),
    }
}

/// Searches for a misaligner verifying (conservatively) at the target alpha.
///
/// Candidates are patterned random codewords. Each must pass the statistical
/// filters against every codeword already collected, in both directions,
/// and then the property checks on all triples it takes part in. The first
/// three accepted codewords form the seed; if no third codeword fits the
/// first two, they are redrawn. A final full verification
/// confirms the collection; codewords it blames are removed and refilled.
///
/// Running out of candidates is not an error: the outcome is then marked
/// incomplete and carries a diagnostic.
pub fn search(config: &SearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let p = config.params;
    let tables = build_stat_tables(
        p.m,
        p.t,
        config.preprocess_count,
        config.rank_frac,
        config.seed ^ TABLE_STREAM,
    )?;
    let mut rng = seeded(config.seed);
    let budget = config.candidate_budget;
    let mut used = 0usize;
    let mut prune_rounds = 0usize;
    let mut cw: Vec<Vec<u8>> = Vec::with_capacity(p.k);
    let mut seed_misses = 0usize;
    loop {
        while cw.len() < p.k && used < budget {
            let c = random_codeword(p.m, p.t, &mut rng);
            used += 1;
            if !tables.admits(&c, &cw) {
                continue;
            }
            cw.push(c);
            if !newcomer_passes(&assemble(p, &cw, p.alpha), cw.len() - 1) {
                cw.pop();
                // the first two may already rule out every third codeword
                if cw.len() == 2 {
                    seed_misses += 1;
                    if seed_misses == SEED_PATIENCE {
                        cw.clear();
                        seed_misses = 0;
                    }
                }
            }
        }
        if cw.len() < p.k {
            let why = format!(
                "budget of {budget} candidates exhausted with {} of {} codewords",
                cw.len(),
                p.k
            );
            return Ok(partial(p, &cw, used, prune_rounds, None, why));
        }
        let report = verify(&assemble(p, &cw, p.alpha), CheckMode::Conservative);
        if report.pass {
            let achieved = report.achieved_alpha.unwrap_or(p.alpha).max(p.alpha);
            return Ok(SearchOutcome {
                misaligner: assemble(p, &cw, achieved),
                complete: true,
                target_alpha: p.alpha,
                achieved_alpha: Some(achieved),
                candidates_used: used,
                prune_rounds,
                report: Some(report),
                diagnostic: None,
            });
        }
        if used >= budget {
            let why = format!("budget of {budget} candidates exhausted; last verification failed");
            return Ok(partial(p, &cw, used, prune_rounds, Some(report), why));
        }
        let victim = report.removal_suggestions.first().copied().unwrap_or(cw.len() - 1);
        cw.remove(victim);
        prune_rounds += 1;
    }
}

fn partial(
    p: MisalignerParams,
    cw: &[Vec<u8>],
    used: usize,
    prune_rounds: usize,
    report: Option<VerifyReport>,
    why: String,
) -> SearchOutcome {
    SearchOutcome {
        misaligner: assemble(p, cw, p.alpha),
        complete: false,
        target_alpha: p.alpha,
        achieved_alpha: None,
        candidates_used: used,
        prune_rounds,
        report,
        diagnostic: Some(why),
    }
}
