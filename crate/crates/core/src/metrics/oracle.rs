//! Exhaustive reference implementations for small inputs.
//!
//! Plain distances enumerate every monotone matching. Wildcard distances
//! enumerate every instantiation of the wildcards and take the best plain
//! distance, without relying on the free-pair convention used by the fast
//! kernels. Instantiations range over the symbols already present plus one
//! fresh symbol, which is enough: in an optimal alignment each wildcard
//! either copies its partner or is unpaired.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strings::{Symbol, WILDCARD};

pub const DEFAULT_ORACLE_MAX_LEN: usize = 8;
pub const MAX_WILDCARDS: usize = 8;

/// Upper bound on instantiations times matchings explored per call.
const WORK_LIMIT: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OracleKind {
    Edit,
    NvEdit,
    Lcs,
    NvLcs,
    EditWild,
    NvEditWild,
    NvLcsWild,
}

impl OracleKind {
    fn nv(self) -> bool {
        matches!(self, OracleKind::NvEdit | OracleKind::NvLcs | OracleKind::NvEditWild | OracleKind::NvLcsWild)
    }

    fn is_lcs(self) -> bool {
        matches!(self, OracleKind::Lcs | OracleKind::NvLcs | OracleKind::NvLcsWild)
    }

    fn is_wild(self) -> bool {
        matches!(self, OracleKind::EditWild | OracleKind::NvEditWild | OracleKind::NvLcsWild)
    }
}

/// Exhaustive value of `kind` on `x`, `y`. Wildcards are only allowed for
/// the wildcard kinds.
pub fn brute_force_oracle(kind: OracleKind, x: &[Symbol], y: &[Symbol], max_len: usize) -> Result<usize> {
    if x.len() > max_len || y.len() > max_len {
        return Err(Error::TooLarge(format!(
            "oracle inputs of lengths {} and {} exceed {max_len}",
            x.len(),
            y.len()
        )));
    }
    let wild_count = x.iter().chain(y).filter(|&&s| s == WILDCARD).count();
    if wild_count > 0 && !kind.is_wild() {
        return Err(Error::Preconditions(format!("{kind:?} does not accept wildcards")));
    }
    if wild_count > MAX_WILDCARDS {
        return Err(Error::TooLarge(format!(
            "{wild_count} wildcards exceed the oracle limit of {MAX_WILDCARDS}"
        )));
    }
    let mut domain: Vec<Symbol> = x.iter().chain(y).copied().filter(|&s| s != WILDCARD).collect();
    domain.sort_unstable();
    domain.dedup();
    let fresh = (0..).find(|s| !domain.contains(s)).expect("finite domain");
    domain.push(fresh);

    let matchings = count_matchings(x.len(), y.len());
    let inst = (domain.len() as u128).checked_pow(wild_count as u32).unwrap_or(u128::MAX);
    if inst.saturating_mul(matchings) > WORK_LIMIT {
        return Err(Error::TooLarge(format!(
            "{inst} instantiations x {matchings} matchings is too much work"
        )));
    }

    let mut a = x.to_vec();
    let mut b = y.to_vec();
    let slots: Vec<(bool, usize)> = x
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == WILDCARD)
        .map(|(i, _)| (true, i))
        .chain(y.iter().enumerate().filter(|(_, &s)| s == WILDCARD).map(|(i, _)| (false, i)))
        .collect();
    let mut digits = vec![0usize; slots.len()];
    let mut best: Option<usize> = None;
    loop {
        for (&(left, i), &d) in slots.iter().zip(&digits) {
            if left {
                a[i] = domain[d];
            } else {
                b[i] = domain[d];
            }
        }
        let v = plain(kind, &a, &b);
        best = Some(match best {
            None => v,
            Some(cur) if kind.is_lcs() => cur.max(v),
            Some(cur) => cur.min(v),
        });
        // odometer increment
        let mut k = 0;
        while k < digits.len() {
            digits[k] += 1;
            if digits[k] < domain.len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            break;
        }
    }
    Ok(best.expect("at least one instantiation"))
}

fn count_matchings(n: usize, m: usize) -> u128 {
    // sum_k C(n,k) C(m,k) = C(n+m, n)
    let mut c: u128 = 1;
    for i in 0..n as u128 {
        c = c * (m as u128 + i + 1) / (i + 1);
    }
    c
}

fn plain(kind: OracleKind, x: &[Symbol], y: &[Symbol]) -> usize {
    let mut best = if kind.is_lcs() { 0 } else { usize::MAX };
    walk(kind, x, y, 0, 0, 0, 0, &mut best);
    best
}

/// Visits every matching extending the current one with pairs beyond
/// `(i0, j0)` (1-based; 0 means nothing chosen yet).
#[allow(clippy::too_many_arguments)]
fn walk(kind: OracleKind, x: &[Symbol], y: &[Symbol], i0: usize, j0: usize, pairs: usize, subs: usize, best: &mut usize) {
    if kind.is_lcs() {
        *best = (*best).max(pairs);
    } else {
        let cost = subs + (x.len() - pairs) + (y.len() - pairs);
        *best = (*best).min(cost);
    }
    for i in i0 + 1..=x.len() {
        for j in j0 + 1..=y.len() {
            if kind.nv() && i == j {
                continue;
            }
            let same = x[i - 1] == y[j - 1];
            if kind.is_lcs() && !same {
                continue;
            }
            walk(kind, x, y, i, j, pairs + 1, subs + usize::from(!same), best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: Symbol = WILDCARD;

    #[test]
    fn known_values() {
        let o = |k, x: &[Symbol], y: &[Symbol]| brute_force_oracle(k, x, y, 8).unwrap();
        assert_eq!(o(OracleKind::Edit, &[0, 1, 0, 1], &[1, 0, 1, 0]), 2);
        assert_eq!(o(OracleKind::NvEdit, &[0, 0], &[0, 0]), 2);
        assert_eq!(o(OracleKind::NvEdit, &[0, 1, 2], &[0, 1, 2]), 4);
        assert_eq!(o(OracleKind::Lcs, &[0, 1, 0, 1], &[1, 0, 1, 0]), 3);
        assert_eq!(o(OracleKind::NvLcs, &[0, 1, 2, 0, 1, 2], &[0, 1, 2, 0, 1, 2]), 3);
        assert_eq!(o(OracleKind::EditWild, &[0, W], &[1, W]), 1);
        assert_eq!(o(OracleKind::EditWild, &[W, W], &[0, 1]), 0);
        assert_eq!(o(OracleKind::NvEditWild, &[W], &[W]), 2);
        assert_eq!(o(OracleKind::NvEditWild, &[0, 1, W], &[0, 1, W]), 3);
    }

    #[test]
    fn limits() {
        assert!(matches!(
            brute_force_oracle(OracleKind::Edit, &[0; 9], &[0], 8),
            Err(Error::TooLarge(_))
        ));
        assert!(brute_force_oracle(OracleKind::Edit, &[W], &[0], 8).is_err());
    }
}
