//! Exact string distances: Hamming, edit, LCS and their nowhere-vertical
//! and wildcard variants, plus alignments and brute-force oracles.

mod alignment;
pub mod kernels;
pub mod oracle;

pub use alignment::{
    alignment_cost, decompose_alignment, optimal_alignment, Alignment, CostBreakdown,
    IntervalDecomposition, IntervalKind,
};
pub use oracle::{brute_force_oracle, OracleKind, DEFAULT_ORACLE_MAX_LEN};

use crate::error::{Error, Result};
use crate::strings::{Str, Symbol, SymbolLike, WildStr};

#[inline]
fn eq(a: Symbol, b: Symbol) -> bool {
    a == b
}

#[inline]
fn wild(a: Symbol, b: Symbol) -> bool {
    a.matches(b)
}

pub fn hamming_distance(x: &Str, y: &Str) -> Result<usize> {
    hamming_slices(x.symbols(), y.symbols())
}

pub fn hamming_slices<T: PartialEq>(x: &[T], y: &[T]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

/// Unit-cost Levenshtein distance.
pub fn edit_distance(x: &Str, y: &Str) -> usize {
    kernels::edit_dp(x.symbols(), y.symbols(), eq, false) as usize
}

/// Cheapest alignment that never pairs position `i` with position `i`.
pub fn nv_edit_distance(x: &Str, y: &Str) -> usize {
    kernels::edit_dp(x.symbols(), y.symbols(), eq, true) as usize
}

pub fn lcs(x: &Str, y: &Str) -> usize {
    kernels::lcs_dp(x.symbols(), y.symbols(), eq, false) as usize
}

pub fn nv_lcs(x: &Str, y: &Str) -> usize {
    kernels::lcs_dp(x.symbols(), y.symbols(), eq, true) as usize
}

/// Minimum edit distance over all instantiations of both strings.
///
/// Each wildcard position is paired with at most one partner in any
/// alignment, so charging nothing for a pair that touches a wildcard is
/// exactly the minimum over instantiations.
pub fn edit_distance_wild(u: &WildStr, v: &WildStr) -> usize {
    kernels::edit_dp(u.symbols(), v.symbols(), wild, false) as usize
}

pub fn nv_edit_distance_wild(u: &WildStr, v: &WildStr) -> usize {
    kernels::edit_dp(u.symbols(), v.symbols(), wild, true) as usize
}

/// Maximum nowhere-vertical common subsequence over all instantiations.
pub fn nv_lcs_wild(u: &WildStr, v: &WildStr) -> usize {
    kernels::lcs_dp(u.symbols(), v.symbols(), wild, true) as usize
}

/// Edit distance of two symbol slices, exact when at most `limit`;
/// otherwise returns `limit + 1`.
pub fn edit_distance_within(x: &[Symbol], y: &[Symbol], limit: usize) -> usize {
    kernels::edit_banded(x, y, eq, false, limit.min(u32::MAX as usize / 8) as u32) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Str {
        Str::binary(s).unwrap()
    }

    fn l(s: &str) -> Str {
        Str::letters(s).unwrap()
    }

    fn w(s: &str) -> WildStr {
        WildStr::binary(s).unwrap()
    }

    fn wl(s: &str) -> WildStr {
        WildStr::letters(s).unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&b("0101"), &b("0011")).unwrap(), 2);
        assert_eq!(hamming_distance(&b("0110"), &b("0110")).unwrap(), 0);
        assert_eq!(hamming_distance(&b("0000"), &b("1111")).unwrap(), 4);
        assert!(matches!(
            hamming_distance(&b("01"), &b("011")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn edit_examples() {
        assert_eq!(edit_distance(&b("0101"), &b("1010")), 2);
        assert_eq!(edit_distance(&l("abcab"), &l("abcab")), 0);
        assert_eq!(edit_distance(&l("ab"), &l("ba")), 2);
    }

    #[test]
    fn nv_edit_examples() {
        assert_eq!(nv_edit_distance(&l("aa"), &l("aa")), 2);
        assert_eq!(nv_edit_distance(&l("ab"), &l("ab")), 3);
        assert_eq!(nv_edit_distance(&l("abc"), &l("abc")), 4);
        assert_eq!(nv_edit_distance(&l("aaa"), &l("aaa")), 2);
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(lcs(&b("0101"), &b("1010")), 3);
        assert_eq!(lcs(&l("abcd"), &l("abcd")), 4);
        assert_eq!(lcs(&l("abc"), &l("xyz")), 0);
        assert_eq!(nv_lcs(&l("aa"), &l("aa")), 1);
        assert_eq!(nv_lcs(&l("abcdef"), &l("abcdef")), 0);
        assert_eq!(nv_lcs(&l("abcabc"), &l("abcabc")), 3);
    }

    #[test]
    fn wildcard_examples() {
        assert_eq!(edit_distance_wild(&w("0*"), &w("1*")), 1);
        assert_eq!(edit_distance_wild(&w("**"), &w("01")), 0);
        assert_eq!(edit_distance_wild(&w("0*0"), &w("010")), 0);
        assert_eq!(nv_edit_distance_wild(&wl("*a"), &wl("*a")), 2);
        assert_eq!(nv_edit_distance_wild(&w("*"), &w("*")), 2);
        assert_eq!(nv_edit_distance_wild(&wl("ab*"), &wl("ab*")), 3);
        assert_eq!(nv_lcs_wild(&wl("aa"), &wl("aa")), 1);
        assert_eq!(nv_lcs_wild(&wl("abcabc"), &wl("abcabc")), 3);
        // a wildcard can pair with the neighbouring symbol
        assert_eq!(nv_lcs_wild(&wl("a*"), &wl("a*")), 1);
    }

    #[test]
    fn within_is_exact_below_limit() {
        let x = b("0101").into_symbols();
        let y = b("1010").into_symbols();
        assert_eq!(edit_distance_within(&x, &y, 4), 2);
        assert_eq!(edit_distance_within(&x, &y, 1), 2);
        assert_eq!(edit_distance_within(&x, &y, 0), 1);
    }
}
