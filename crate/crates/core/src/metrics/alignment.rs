use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strings::{Symbol, SymbolLike};

/// A monotone partial matching between two strings, as 1-based `(i, j)`
/// pairs strictly increasing in both coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Alignment {
    pairs: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        for w in pairs.windows(2) {
            let ((i0, j0), (i1, j1)) = (w[0], w[1]);
            if i1 <= i0 || j1 <= j0 {
                return Err(Error::InvalidAlignment(format!(
                    "pairs {:?} and {:?} are not strictly increasing",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i == 0 || j == 0) {
            return Err(Error::InvalidAlignment(format!(
                "pair ({i}, {j}) is not 1-based"
            )));
        }
        Ok(Alignment { pairs })
    }

    pub fn empty() -> Self {
        Alignment { pairs: Vec::new() }
    }

    /// `(1,1), ..., (n,n)`.
    pub fn identity(n: usize) -> Self {
        Alignment {
            pairs: (1..=n).map(|i| (i, i)).collect(),
        }
    }

    /// The shift alignment pairing `i` with `i + delta` wherever both
    /// positions exist in `[1, len]`.
    pub fn shift(len: usize, delta: isize) -> Self {
        let lo = 1.max(1 - delta);
        let hi = (len as isize).min(len as isize - delta);
        Alignment {
            pairs: (lo..=hi)
                .map(|i| (i as usize, (i + delta) as usize))
                .collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_nowhere_vertical(&self) -> bool {
        self.pairs.iter().all(|&(i, j)| i != j)
    }

    /// Checks that every pair fits strings of lengths `n` and `m`.
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        match self.pairs.iter().find(|&&(i, j)| i > n || j > m) {
            Some(&(i, j)) => Err(Error::InvalidAlignment(format!(
                "pair ({i}, {j}) exceeds lengths ({n}, {m})"
            ))),
            None => Ok(()),
        }
    }

    /// Pairs whose first coordinate lies in the 1-based interval.
    pub fn restrict(&self, start: usize, end: usize) -> Alignment {
        Alignment {
            pairs: self
                .pairs
                .iter()
                .copied()
                .filter(|&(i, _)| i >= start && i <= end)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub total: usize,
}

/// Substitutions, deletions and insertions induced by `a` on `x`, `y`.
///
/// Works for plain and wildcard symbols alike: a pair touching a wildcard is
/// never a substitution.
pub fn alignment_cost(a: &Alignment, x: &[Symbol], y: &[Symbol]) -> Result<CostBreakdown> {
    a.validate(x.len(), y.len())?;
    let substitutions = a
        .pairs
        .iter()
        .filter(|&&(i, j)| !x[i - 1].matches(y[j - 1]))
        .count();
    let deletions = x.len() - a.len();
    let insertions = y.len() - a.len();
    Ok(CostBreakdown {
        substitutions,
        deletions,
        insertions,
        total: substitutions + deletions + insertions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IntervalKind {
    Vertical,
    NowhereVertical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDecomposition {
    /// 1-based inclusive intervals in increasing order.
    pub intervals: Vec<((usize, usize), IntervalKind)>,
}

/// Splits `[1, n]` into alternating maximal vertical and maximal
/// nowhere-vertical intervals of an alignment between two length-`n`
/// strings.
///
/// Position `p` is vertical when `(p, p)` is in the alignment. Monotonicity
/// keeps every other pair inside the gap between consecutive vertical
/// pairs, so each piece restricts to an alignment of the matching
/// substrings.
pub fn decompose_alignment(a: &Alignment, n: usize) -> IntervalDecomposition {
    let mut vertical = vec![false; n + 1];
    for &(i, j) in a.pairs() {
        if i == j && i <= n {
            vertical[i] = true;
        }
    }
    let mut intervals = Vec::new();
    let mut p = 1;
    while p <= n {
        let kind = vertical[p];
        let start = p;
        while p <= n && vertical[p] == kind {
            p += 1;
        }
        let k = if kind {
            IntervalKind::Vertical
        } else {
            IntervalKind::NowhereVertical
        };
        intervals.push(((start, p - 1), k));
    }
    IntervalDecomposition { intervals }
}

/// An optimal edit alignment and its cost.
///
/// Traceback prefers match, then substitution, then deletion, then
/// insertion, so the result is deterministic among equal-cost alignments.
pub fn optimal_alignment(x: &[Symbol], y: &[Symbol], nowhere_vertical: bool) -> (usize, Alignment) {
    let n = x.len();
    let m = y.len();
    let w = m + 1;
    let mut d = vec![0u32; (n + 1) * w];
    for j in 0..=m {
        d[j] = j as u32;
    }
    for i in 1..=n {
        d[i * w] = i as u32;
        for j in 1..=m {
            let mut best = d[(i - 1) * w + j].min(d[i * w + j - 1]) + 1;
            if !(nowhere_vertical && i == j) {
                best = best.min(d[(i - 1) * w + j - 1] + u32::from(!x[i - 1].matches(y[j - 1])));
            }
            d[i * w + j] = best;
        }
    }
    let mut pairs = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 && !(nowhere_vertical && i == j) {
            let same = x[i - 1].matches(y[j - 1]);
            let diag = d[(i - 1) * w + j - 1];
            if (same && here == diag) || (!same && here == diag + 1) {
                pairs.push((i, j));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == d[(i - 1) * w + j] + 1 {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    (d[n * w + m] as usize, Alignment { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::{Str, WILDCARD};

    #[test]
    fn rejects_non_monotone() {
        assert!(Alignment::new(vec![(1, 2), (2, 1)]).is_err());
        assert!(Alignment::new(vec![(0, 1)]).is_err());
        assert!(Alignment::new(vec![(1, 1), (3, 2)]).is_ok());
    }

    #[test]
    fn cost_examples() {
        let aa = Str::letters("aa").unwrap();
        let c = alignment_cost(&Alignment::identity(2), aa.symbols(), aa.symbols()).unwrap();
        assert_eq!(c, CostBreakdown { substitutions: 0, deletions: 0, insertions: 0, total: 0 });
        let c = alignment_cost(&Alignment::new(vec![(1, 2)]).unwrap(), aa.symbols(), aa.symbols())
            .unwrap();
        assert_eq!((c.substitutions, c.deletions, c.insertions, c.total), (0, 1, 1, 2));
        let ab = Str::letters("ab").unwrap();
        let cd = Str::letters("cd").unwrap();
        let c = alignment_cost(&Alignment::empty(), ab.symbols(), cd.symbols()).unwrap();
        assert_eq!((c.substitutions, c.deletions, c.insertions, c.total), (0, 2, 2, 4));
        assert!(alignment_cost(&Alignment::new(vec![(3, 1)]).unwrap(), ab.symbols(), cd.symbols())
            .is_err());
    }

    #[test]
    fn wildcard_pairs_are_free() {
        let x = [WILDCARD, 0];
        let y = [1, 1];
        let c = alignment_cost(&Alignment::identity(2), &x, &y).unwrap();
        assert_eq!(c.substitutions, 1);
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_alignment(&Alignment::identity(3), 3);
        assert_eq!(d.intervals, vec![((1, 3), IntervalKind::Vertical)]);
        let d = decompose_alignment(&Alignment::empty(), 3);
        assert_eq!(d.intervals, vec![((1, 3), IntervalKind::NowhereVertical)]);
        let a = Alignment::new(vec![(1, 1), (3, 2)]).unwrap();
        let d = decompose_alignment(&a, 3);
        assert_eq!(
            d.intervals,
            vec![((1, 1), IntervalKind::Vertical), ((2, 3), IntervalKind::NowhereVertical)]
        );
    }

    #[test]
    fn shift_alignment_shape() {
        assert_eq!(Alignment::shift(4, 1).pairs(), &[(1, 2), (2, 3), (3, 4)]);
        assert_eq!(Alignment::shift(4, -2).pairs(), &[(3, 1), (4, 2)]);
    }

    #[test]
    fn traceback_prefers_matches() {
        let x = Str::binary("0101").unwrap();
        let y = Str::binary("1010").unwrap();
        let (cost, a) = optimal_alignment(x.symbols(), y.symbols(), false);
        assert_eq!(cost, 2);
        assert_eq!(alignment_cost(&a, x.symbols(), y.symbols()).unwrap().total, 2);
        let (nv, a) = optimal_alignment(x.symbols(), x.symbols(), true);
        assert!(a.is_nowhere_vertical());
        assert_eq!(alignment_cost(&a, x.symbols(), x.symbols()).unwrap().total, nv);
    }
}
