//! Property checkers. Triple-quantified properties range over ordered
//! triples of distinct codewords and are vacuous when `k < 3`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_wildcard_pattern, Misaligner};
use crate::metrics::kernels::{edit_banded, BandedSelfDp, NvColumnDp, SubstringMatcher};

pub const DEFAULT_EXACT_CAP: usize = 10;
const WITNESS_CAP: usize = 16;
const TOL: f64 = 1e-9;
const WILD: u8 = u8::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CheckMode {
    /// Short intervals pass when `nvEditWild(s, s) >= Γ(s)`.
    Conservative,
    /// Conservative failures with at most `gamma_cap` wildcards are settled
    /// by trying every instantiation pair; larger ones stay failures.
    Exact { gamma_cap: usize },
}

impl CheckMode {
    pub fn exact() -> Self {
        CheckMode::Exact {
            gamma_cap: DEFAULT_EXACT_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    WildcardPattern,
    ShortIntervals,
    BlockVsSubstring,
    BlockAndHalf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// 0-based codeword indices. For triple properties the last three are
    /// `c1, c2, c3` (block vs. substring puts the tested codeword first).
    pub codewords: Vec<usize>,
    /// 1-based inclusive interval inside `c1 ∘ c2 ∘ c3`.
    pub interval: (usize, usize),
    pub measured: f64,
    pub required: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub pass: bool,
    pub checked: u64,
    pub failures: u64,
    /// Short intervals: smallest `nvEditWild(s, s) - Γ(s)`. Block vs.
    /// substring: smallest cost / m. Block and a half: smallest cost / |s|.
    pub min_measured: Option<f64>,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: CheckMode,
    pub alpha: f64,
    pub pass: bool,
    pub properties: Vec<PropertyReport>,
    /// Largest alpha in (0, 1/2] at which properties 3 and 4 hold, when
    /// properties 1 and 2 hold.
    pub achieved_alpha: Option<f64>,
    /// How often each codeword took part in a failure.
    pub blame: Vec<u64>,
    /// Codewords ordered by blame, most suspicious first.
    pub removal_suggestions: Vec<usize>,
}

impl VerifyReport {
    pub fn property(&self, p: Property) -> &PropertyReport {
        self.properties
            .iter()
            .find(|r| r.property == p)
            .expect("all properties reported")
    }
}

#[derive(Debug, Clone)]
struct Acc {
    checked: u64,
    failures: u64,
    min: f64,
    witnesses: Vec<Witness>,
    blame: Vec<u64>,
}

impl Acc {
    fn new(k: usize) -> Self {
        Acc {
            checked: 0,
            failures: 0,
            min: f64::INFINITY,
            witnesses: Vec::new(),
            blame: vec![0; k],
        }
    }

    #[inline]
    fn record(&mut self, value: f64) {
        self.checked += 1;
        if value < self.min {
            self.min = value;
        }
    }

    fn fail(&mut self, w: Witness, blamed: &[usize]) {
        self.failures += 1;
        for &b in blamed {
            self.blame[b] += 1;
        }
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push(w);
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.checked += other.checked;
        self.failures += other.failures;
        self.min = self.min.min(other.min);
        for w in other.witnesses {
            if self.witnesses.len() < WITNESS_CAP {
                self.witnesses.push(w);
            }
        }
        for (a, b) in self.blame.iter_mut().zip(other.blame) {
            *a += b;
        }
        self
    }

    fn report(self, property: Property) -> (PropertyReport, Vec<u64>) {
        (
            PropertyReport {
                property,
                pass: self.failures == 0,
                checked: self.checked,
                failures: self.failures,
                min_measured: self.min.is_finite().then_some(self.min),
                witnesses: self.witnesses,
            },
            self.blame,
        )
    }
}

/// Ordered pairs `(i, j)` of distinct indices that extend to at least one
/// distinct triple.
fn pairs(k: usize) -> Vec<(usize, usize)> {
    if k < 3 {
        return Vec::new();
    }
    (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect()
}

/// Which triples a check visits. With a focus, only triples (and, for
/// property 3, tested codewords) involving that codeword are visited; with
/// `early`, work stops at the first failure.
struct Scope {
    focus: Option<usize>,
    early: bool,
    stop: AtomicBool,
}

impl Scope {
    fn full() -> Self {
        Scope {
            focus: None,
            early: false,
            stop: AtomicBool::new(false),
        }
    }

    fn newcomer(c: usize) -> Self {
        Scope {
            focus: Some(c),
            early: true,
            stop: AtomicBool::new(false),
        }
    }

    fn halted(&self) -> bool {
        self.early && self.stop.load(Ordering::Relaxed)
    }

    fn failed(&self) {
        self.stop.store(true, Ordering::Relaxed);
    }

    /// Third codewords to visit for the ordered pair `(i, j)`, given that
    /// the visit is already relevant to the focus when `covered` holds.
    fn tails(&self, k: usize, i: usize, j: usize, covered: bool) -> Vec<usize> {
        match self.focus {
            Some(f) if !covered && f != i && f != j => vec![f],
            _ => (0..k).filter(|&l| l != i && l != j).collect(),
        }
    }

    fn covers(&self, i: usize, j: usize) -> bool {
        self.focus.map_or(true, |f| f == i || f == j)
    }
}

fn merge_all(parts: Vec<Acc>, k: usize) -> Acc {
    parts.into_iter().fold(Acc::new(k), Acc::merge)
}

/// Codewords of the triple overlapping the 1-based span `[start, end]` of
/// their concatenation.
fn overlapping(triple: [usize; 3], m: usize, start: usize, end: usize) -> Vec<usize> {
    (0..3)
        .filter(|&b| start <= (b + 1) * m && end > b * m && start <= end)
        .map(|b| triple[b])
        .collect()
}

/// Property 1: wildcard pattern, plus pairwise distinctness.
pub fn check_wildcard_properties(mis: &Misaligner) -> PropertyReport {
    check_wildcard_inner(mis).0
}

fn check_wildcard_inner(mis: &Misaligner) -> (PropertyReport, Vec<u64>) {
    let t = mis.params.t;
    let mut acc = Acc::new(mis.codewords.len());
    for (i, c) in mis.codewords.iter().enumerate() {
        acc.record(0.0);
        if !check_wildcard_pattern(c, t) {
            let pos = c
                .symbols()
                .iter()
                .enumerate()
                .position(|(p, &s)| (s == crate::strings::WILDCARD) != (p % t == 0))
                .map_or(0, |p| p + 1);
            acc.fail(
                Witness {
                    codewords: vec![i],
                    interval: (pos, pos),
                    measured: c.wildcard_count() as f64,
                    required: (mis.params.m / t) as f64,
                    note: "wildcard pattern".into(),
                },
                &[i],
            );
        }
    }
    let mut seen: HashMap<&[u64], usize> = HashMap::new();
    for (i, c) in mis.codewords.iter().enumerate() {
        if let Some(&j) = seen.get(c.symbols()) {
            acc.fail(
                Witness {
                    codewords: vec![j, i],
                    interval: (1, mis.params.m),
                    measured: 0.0,
                    required: 1.0,
                    note: "duplicate codeword".into(),
                },
                &[i],
            );
        } else {
            seen.insert(c.symbols(), i);
        }
    }
    let (mut r, blame) = acc.report(Property::WildcardPattern);
    r.min_measured = None;
    (r, blame)
}

/// Largest Γ of any substring of length at most `3m - 2`.
fn gamma_limit(m: usize, t: usize) -> u32 {
    (3 * m - 2).div_ceil(t).max(1) as u32
}

struct ShortFailure {
    witness: Witness,
    occurrences: u64,
    blame: Vec<u64>,
}

/// Conservative pass over every substring of length at most `3m - 2`.
/// Returns the accumulator and, when `collect` is set, the failing
/// substrings keyed by content.
fn short_intervals_conservative(
    cw: &[Vec<u8>],
    m: usize,
    t: usize,
    collect: bool,
    scope: &Scope,
) -> (Acc, HashMap<Vec<u8>, ShortFailure>) {
    let k = cw.len();
    let limit = gamma_limit(m, t);
    let band = limit as usize;
    let max_total = 3 * m - 2;
    let parts: Vec<(Acc, Vec<(Vec<u8>, Witness, Vec<usize>)>)> = pairs(k)
        .into_par_iter()
        .map(|(i, j)| {
            let mut acc = Acc::new(k);
            let mut fails = Vec::new();
            let covered = scope.covers(i, j);
            let tails = scope.tails(k, i, j, covered);
            let mut text = Vec::with_capacity(3 * m);
            for a in 0..m {
                if scope.halted() {
                    break;
                }
                text.clear();
                text.extend_from_slice(&cw[i][a..]);
                text.extend_from_slice(&cw[j]);
                let two = text.len();
                let max_len = max_total.min(3 * m - a);
                let shared = two.saturating_sub(band).min(max_len);
                let mut dp = BandedSelfDp::new(limit);
                let mut gamma = 0u32;
                let first_c3 = (0..k).find(|&l| l != i && l != j).expect("k >= 3");
                let mut check = |r: usize, v: u32, gamma: u32, text: &[u8], c3: usize, acc: &mut Acc| {
                    acc.record(v as f64 - gamma as f64);
                    if v < gamma {
                        let interval = (a + 1, a + r);
                        let blamed = overlapping([i, j, c3], m, interval.0, interval.1);
                        let w = Witness {
                            codewords: vec![i, j, c3],
                            interval,
                            measured: v as f64,
                            required: gamma as f64,
                            note: "nowhere-vertical self distance below wildcard count".into(),
                        };
                        if collect {
                            fails.push((text[..r].to_vec(), w.clone(), blamed.clone()));
                        }
                        acc.fail(w, &blamed);
                        scope.failed();
                    }
                };
                for r in 1..=shared {
                    gamma += u32::from(text[r - 1] == WILD);
                    let v = dp.step(&text);
                    if covered {
                        check(r, v, gamma, &text, first_c3, &mut acc);
                    }
                }
                for &l in &tails {
                    text.truncate(two);
                    text.extend_from_slice(&cw[l]);
                    let mut d = dp.clone();
                    let mut g = gamma;
                    for r in shared + 1..=max_len {
                        g += u32::from(text[r - 1] == WILD);
                        let v = d.step(&text);
                        check(r, v, g, &text, l, &mut acc);
                    }
                }
            }
            (acc, fails)
        })
        .collect();
    let mut total = Acc::new(k);
    let mut failures: HashMap<Vec<u8>, ShortFailure> = HashMap::new();
    for (acc, fails) in parts {
        total = total.merge(acc);
        for (content, witness, blamed) in fails {
            let entry = failures.entry(content).or_insert_with(|| ShortFailure {
                witness,
                occurrences: 0,
                blame: vec![0; k],
            });
            entry.occurrences += 1;
            for b in blamed {
                entry.blame[b] += 1;
            }
        }
    }
    (total, failures)
}

/// Outcome of the exhaustive instantiation check of one substring.
enum Exact {
    Holds,
    Violated { x: u64, y: u64, edit: u32, hamming: u32 },
    TooManyWildcards,
}

/// Tries every pair of instantiations `(x, y)` of `s` and checks
/// `edit(s_x, s_y) = hamming(s_x, s_y)`.
fn exact_short_interval(s: &[u8], cap: usize) -> Exact {
    let wild: Vec<usize> = s
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == WILD)
        .map(|(p, _)| p)
        .collect();
    let g = wild.len();
    if g > cap {
        return Exact::TooManyWildcards;
    }
    let mut sx = s.to_vec();
    let mut sy = s.to_vec();
    let fill = |buf: &mut [u8], bits: u64| {
        for (b, &p) in wild.iter().enumerate() {
            buf[p] = ((bits >> b) & 1) as u8;
        }
    };
    let eq = |a: u8, b: u8| a == b;
    for x in 0..1u64 << g {
        fill(&mut sx, x);
        for y in x + 1..1u64 << g {
            let hamming = (x ^ y).count_ones();
            // equal-length strings at Hamming distance <= 2 cannot do better
            if hamming <= 2 {
                continue;
            }
            fill(&mut sy, y);
            let edit = edit_banded(&sx, &sy, eq, false, hamming - 1);
            if edit < hamming {
                return Exact::Violated { x, y, edit, hamming };
            }
        }
    }
    Exact::Holds
}

/// Property 2 (short intervals).
///
/// A violating instantiation pair of some substring yields, through its
/// optimal alignment, a nowhere-vertical interval whose cost is below its
/// Hamming distance and hence below its wildcard count. So the
/// conservative test `nvEditWild(s, s) >= Γ(s)` on all short substrings
/// implies the property, and in exact mode only the substrings failing it
/// need the exhaustive check.
pub fn check_short_intervals(mis: &Misaligner, mode: CheckMode) -> PropertyReport {
    check_short_intervals_inner(mis, mode, &Scope::full()).0
}

fn check_short_intervals_inner(
    mis: &Misaligner,
    mode: CheckMode,
    scope: &Scope,
) -> (PropertyReport, Vec<u64>) {
    let cw = mis.bytes();
    let k = cw.len();
    let p = mis.params;
    match mode {
        CheckMode::Conservative => {
            let (acc, _) = short_intervals_conservative(&cw, p.m, p.t, false, scope);
            acc.report(Property::ShortIntervals)
        }
        CheckMode::Exact { gamma_cap } => {
            let (acc, failures) = short_intervals_conservative(&cw, p.m, p.t, true, scope);
            let mut exact = Acc::new(k);
            exact.checked = acc.checked;
            exact.min = acc.min;
            let mut keys: Vec<&Vec<u8>> = failures.keys().collect();
            keys.sort_by(|a, b| {
                let fa = &failures[*a].witness;
                let fb = &failures[*b].witness;
                (&fa.codewords, fa.interval).cmp(&(&fb.codewords, fb.interval))
            });
            let outcomes: Vec<(Exact, &Vec<u8>)> = keys
                .par_iter()
                .map(|&s| (exact_short_interval(s, gamma_cap), s))
                .collect();
            for (outcome, s) in outcomes {
                let f = &failures[s];
                let mut w = f.witness.clone();
                match outcome {
                    Exact::Holds => continue,
                    Exact::Violated { x, y, edit, hamming } => {
                        w.measured = edit as f64;
                        w.required = hamming as f64;
                        w.note = format!(
                            "instantiations x={x:b} y={y:b} (wildcards in order, least significant first): edit {edit} < hamming {hamming}"
                        );
                    }
                    Exact::TooManyWildcards => {
                        w.note = format!(
                            "conservative check failed and {} wildcards exceed the exact cap {gamma_cap}",
                            w.required
                        );
                    }
                }
                exact.fail(w, &[]);
                exact.failures += f.occurrences - 1;
                for (b, c) in f.blame.iter().enumerate() {
                    exact.blame[b] += c;
                }
            }
            exact.report(Property::ShortIntervals)
        }
    }
}

/// Property 3 (block vs. substring): every codeword stays at edit distance
/// at least `alpha m` from every substring of `c1 ∘ c2 ∘ c3`, where a
/// codeword occurring in the triple may not be aligned position-for-position
/// with its own occurrence.
pub fn check_block_vs_substring(mis: &Misaligner) -> PropertyReport {
    check_block_vs_substring_inner(mis, &Scope::full()).0
}

fn check_block_vs_substring_inner(mis: &Misaligner, scope: &Scope) -> (PropertyReport, Vec<u64>) {
    let cw = mis.bytes();
    let k = cw.len();
    let m = mis.params.m;
    let need = mis.params.alpha * m as f64;
    let parts: Vec<Acc> = pairs(k)
        .into_par_iter()
        .map(|(i, j)| {
            let mut acc = Acc::new(k);
            for (p, pattern) in cw.iter().enumerate() {
                if scope.halted() {
                    break;
                }
                let covered = scope.covers(i, j) || scope.focus == Some(p);
                let offset = if p == i {
                    Some(0)
                } else if p == j {
                    Some(m)
                } else {
                    None
                };
                let mut base = SubstringMatcher::new(pattern);
                base.feed(&cw[i], offset);
                base.feed(&cw[j], offset);
                for l in scope.tails(k, i, j, covered) {
                    let mut mm = base.clone();
                    let off = if l == p { Some(2 * m) } else { offset };
                    mm.feed(&cw[l], off);
                    let (cost, span) = mm.best();
                    acc.record(cost as f64 / m as f64);
                    if (cost as f64) + TOL < need {
                        let mut blamed = overlapping([i, j, l], m, span.0, span.1);
                        blamed.push(p);
                        let which = if off.is_some() { "3b" } else { "3a" };
                        acc.fail(
                            Witness {
                                codewords: vec![p, i, j, l],
                                interval: span,
                                measured: cost as f64,
                                required: need,
                                note: format!("{which}: codeword {p} vs substring"),
                            },
                            &blamed,
                        );
                        scope.failed();
                    }
                }
            }
            acc
        })
        .collect();
    merge_all(parts, k).report(Property::BlockVsSubstring)
}

/// One direction of property 4: `s = suffix(head) ∘ body`, `s' = s ∘
/// prefix(tail)`, nowhere-vertical cost at least `alpha |s|`.
#[allow(clippy::too_many_arguments)]
fn block_half_direction(
    acc: &mut Acc,
    head: &[u8],
    body: &[u8],
    tails: &[(usize, Vec<u8>)],
    alpha: f64,
    triple_of: impl Fn(usize) -> [usize; 3],
    lengths_of: impl Fn(usize, usize) -> (usize, usize),
    note: &str,
    head_idx: usize,
    body_idx: usize,
    scope: &Scope,
) {
    let m = head.len();
    let covered = scope.covers(head_idx, body_idx);
    let mut s = Vec::with_capacity(2 * m);
    for lh in 0..m {
        if scope.halted() {
            return;
        }
        s.clear();
        s.extend_from_slice(&head[m - lh..]);
        s.extend_from_slice(body);
        let mut dp = NvColumnDp::new(&s);
        for &c in &s {
            dp.push(c);
        }
        let len = s.len();
        let need = alpha * len as f64;
        let visit = |cost: u32, lt: usize, tail: Option<usize>, acc: &mut Acc| {
            acc.record(cost as f64 / len as f64);
            if (cost as f64) + TOL < need {
                let (l1, l3) = lengths_of(lh, lt);
                let triple = tail.map(&triple_of);
                let mut blamed = vec![body_idx];
                if lh > 0 {
                    blamed.push(head_idx);
                }
                if let (Some(l), true) = (tail, lt > 0) {
                    blamed.push(l);
                }
                let codewords = match triple {
                    Some(tr) => tr.to_vec(),
                    None => {
                        let mut v = vec![head_idx, body_idx];
                        if note == "4b" {
                            v.reverse();
                        }
                        v
                    }
                };
                acc.fail(
                    Witness {
                        codewords,
                        interval: (m - l1 + 1, 2 * m + l3),
                        measured: cost as f64,
                        required: need,
                        note: format!("{note}: suffix length {l1}, prefix length {l3}"),
                    },
                    &blamed,
                );
                scope.failed();
            }
        };
        if covered {
            visit(dp.bottom(), 0, None, acc);
        }
        for (l, tail) in tails {
            let mut d = dp.clone();
            for (pos, &c) in tail.iter().enumerate() {
                d.push(c);
                visit(d.bottom(), pos + 1, Some(*l), acc);
            }
        }
    }
}

/// Property 4 (block and a half vs. substring), both directions. The
/// reversed direction runs the same kernel on reversed codewords.
pub fn check_block_and_half(mis: &Misaligner) -> PropertyReport {
    check_block_and_half_inner(mis, &Scope::full()).0
}

fn check_block_and_half_inner(mis: &Misaligner, scope: &Scope) -> (PropertyReport, Vec<u64>) {
    let cw = mis.bytes();
    let rev: Vec<Vec<u8>> = cw
        .iter()
        .map(|c| c.iter().rev().copied().collect())
        .collect();
    let k = cw.len();
    let alpha = mis.params.alpha;
    let parts: Vec<Acc> = pairs(k)
        .into_par_iter()
        .map(|(i, j)| {
            let mut acc = Acc::new(k);
            let others = |a: usize, b: usize, src: &[Vec<u8>]| -> Vec<(usize, Vec<u8>)> {
                scope
                    .tails(k, a, b, scope.covers(a, b))
                    .into_iter()
                    .map(|l| (l, src[l].clone()))
                    .collect()
            };
            // (a): c1 = i, c2 = j, tails are c3
            block_half_direction(
                &mut acc,
                &cw[i],
                &cw[j],
                &others(i, j, &cw),
                alpha,
                |l| [i, j, l],
                |lh, lt| (lh, lt),
                "4a",
                i,
                j,
                scope,
            );
            // (b): reversed, c3 = i, c2 = j, tails are reversed c1
            block_half_direction(
                &mut acc,
                &rev[i],
                &rev[j],
                &others(i, j, &rev),
                alpha,
                |l| [l, j, i],
                |lh, lt| (lt, lh),
                "4b",
                i,
                j,
                scope,
            );
            acc
        })
        .collect();
    merge_all(parts, k).report(Property::BlockAndHalf)
}

/// Runs all four property checks at the misaligner's own alpha.
pub fn verify(mis: &Misaligner, mode: CheckMode) -> VerifyReport {
    let k = mis.codewords.len();
    let (p1, mut blame) = check_wildcard_inner(mis);
    let scope = Scope::full();
    let (p2, b2) = check_short_intervals_inner(mis, mode, &scope);
    let (p3, b3) = check_block_vs_substring_inner(mis, &scope);
    let (p4, b4) = check_block_and_half_inner(mis, &scope);
    for b in [b2, b3, b4] {
        for (x, y) in blame.iter_mut().zip(b) {
            *x += y;
        }
    }
    let achieved_alpha = (p1.pass && p2.pass).then(|| {
        [p3.min_measured, p4.min_measured]
            .into_iter()
            .flatten()
            .fold(0.5f64, f64::min)
    });
    let mut removal_suggestions: Vec<usize> = (0..k).filter(|&c| blame[c] > 0).collect();
    removal_suggestions.sort_by(|&a, &b| blame[b].cmp(&blame[a]).then(a.cmp(&b)));
    let properties = vec![p1, p2, p3, p4];
    VerifyReport {
        mode,
        alpha: mis.params.alpha,
        pass: properties.iter().all(|r| r.pass),
        properties,
        achieved_alpha,
        blame,
        removal_suggestions,
    }
}

/// True iff adding codeword `new` keeps properties 2 to 4 (conservatively)
/// intact, assuming they held for the others. Stops at the first failure.
pub(crate) fn newcomer_passes(mis: &Misaligner, new: usize) -> bool {
    let scope = Scope::newcomer(new);
    check_block_vs_substring_inner(mis, &scope).0.pass
        && check_block_and_half_inner(mis, &scope).0.pass
        && check_short_intervals_inner(mis, CheckMode::Conservative, &scope).0.pass
}
