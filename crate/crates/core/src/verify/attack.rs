use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::structure::InterleavedStructure;
use crate::error::{Error, Result};
use crate::metrics::{alignment_cost, Alignment, CostBreakdown};
use crate::strings::Symbol;

/// Cost of the shift alignment for one shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftOutcome {
    pub delta: isize,
    pub cost: CostBreakdown,
}

/// The cheapest shift found. `x` and `y` differ in every position, so the
/// map is not an isometry whenever `cost.total < n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackResult {
    pub n: usize,
    pub max_delta: usize,
    pub delta: isize,
    pub x: Vec<Symbol>,
    pub y: Vec<Symbol>,
    pub fx: Vec<Symbol>,
    pub fy: Vec<Symbol>,
    pub alignment: Alignment,
    pub cost: CostBreakdown,
    pub hamming: usize,
    pub violation: bool,
    pub shifts: Vec<ShiftOutcome>,
}

/// A binary interleaved map of the given rate: input `i` sits at output
/// position `floor(i N / n)` with `N = ceil(n / rate)`, every other position
/// holds `frozen_symbol`.
pub fn synthetic_interleaved(n: usize, rate: f64, frozen_symbol: Symbol) -> Result<InterleavedStructure> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::OutOfRange(format!("rate {rate} not in (0, 1]")));
    }
    if frozen_symbol > 1 {
        return Err(Error::OutOfRange("frozen symbol must be binary".into()));
    }
    let len = (n as f64 / rate).ceil() as usize;
    let eta = (0..n).map(|i| i * len / n.max(1)).collect();
    InterleavedStructure::with_identity_maps(eta, len, |_| frozen_symbol, 2)
}

struct Built {
    x: Vec<Symbol>,
    y: Vec<Symbol>,
    fx: Vec<Symbol>,
    fy: Vec<Symbol>,
}

/// Picks `x`, `y` so that each mutable output symbol of `f(x)` equals its
/// shift partner in `f(y)` and each mutable symbol of `f(y)` differs from
/// the one above it in `f(x)`. Positions are visited so that the partner is
/// always fixed first.
fn build_pair(s: &InterleavedStructure, delta: isize) -> Built {
    let len = s.output_len as isize;
    let mut fx = s.reconstruct(&vec![0; s.n]);
    let mut fy = fx.clone();
    let mut x = vec![0; s.n];
    let mut y = vec![0; s.n];
    let mut order: Vec<usize> = (0..s.n).collect();
    order.sort_by_key(|&i| s.eta[i]);
    if delta > 0 {
        order.reverse();
    }
    let mut mutable = vec![false; s.output_len];
    for &p in &s.eta {
        mutable[p] = true;
    }
    for i in order {
        let p = s.eta[i] as isize;
        let known: Vec<Symbol> = s.pi[i].keys().copied().collect();
        let partner = p + delta;
        let xi = if (0..len).contains(&partner) {
            s.preimage(i, fy[partner as usize]).unwrap_or(known[0])
        } else {
            known[0]
        };
        // prefer matching the frozen symbol that the shift puts above us
        let back = p - delta;
        let wanted = ((0..len).contains(&back) && !mutable[back as usize])
            .then(|| s.preimage(i, fx[back as usize]))
            .flatten()
            .filter(|&v| v != xi);
        let yi = wanted.unwrap_or_else(|| *known.iter().find(|&&v| v != xi).expect("two known symbols"));
        x[i] = xi;
        y[i] = yi;
        fx[p as usize] = s.pi[i][&xi];
        fy[p as usize] = s.pi[i][&yi];
    }
    Built { x, y, fx, fy }
}

/// Tries every shift `0 < |delta| < max_delta` and keeps the cheapest
/// (ties go to the smaller shift).
pub fn shift_attack(s: &InterleavedStructure, max_delta: usize) -> Result<AttackResult> {
    if max_delta < 2 {
        return Err(Error::OutOfRange(format!("max_delta = {max_delta} must be at least 2")));
    }
    if s.input_alphabet < 2 || s.pi.iter().any(|m| m.len() < 2) {
        return Err(Error::Unsupported("need two distinct symbols at every position".into()));
    }
    let d = max_delta as isize;
    let deltas: Vec<isize> = (-(d - 1)..d).filter(|&v| v != 0).collect();
    let mut runs: Vec<(isize, Built, Alignment, CostBreakdown)> = deltas
        .par_iter()
        .map(|&delta| {
            let built = build_pair(s, delta);
            let alignment = Alignment::shift(s.output_len, delta);
            let cost = alignment_cost(&alignment, &built.fx, &built.fy).expect("shift fits");
            (delta, built, alignment, cost)
        })
        .collect();
    let shifts = runs.iter().map(|(delta, _, _, cost)| ShiftOutcome { delta: *delta, cost: *cost }).collect();
    let best = (0..runs.len())
        .min_by_key(|&k| (runs[k].3.total, runs[k].0.unsigned_abs(), runs[k].0))
        .expect("at least two shifts");
    let (delta, built, alignment, cost) = runs.swap_remove(best);
    Ok(AttackResult {
        n: s.n,
        max_delta,
        delta,
        hamming: s.n,
        violation: cost.total < s.n,
        x: built.x,
        y: built.y,
        fx: built.fx,
        fy: built.fy,
        alignment,
        cost,
        shifts,
    })
}
