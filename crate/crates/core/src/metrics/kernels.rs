//! Dynamic-programming kernels shared by the public distance functions and
//! the misaligner checkers.
//!
//! All kernels use unit costs. "Nowhere-vertical" (`nv`) means the
//! match/substitute transition into cell `(i, i)` is forbidden; indel
//! transitions through `(i, i)` stay legal.

use crate::strings::SymbolLike;

pub(crate) const INF: u32 = u32::MAX / 4;

/// Full edit distance with a pluggable "free pair" predicate.
pub fn edit_dp<T: Copy, M: Fn(T, T) -> bool>(x: &[T], y: &[T], matches: M, nv: bool) -> u32 {
    let m = y.len();
    let mut prev: Vec<u32> = (0..=m as u32).collect();
    let mut cur = vec![0u32; m + 1];
    for (i, &a) in x.iter().enumerate() {
        let row = i + 1;
        cur[0] = row as u32;
        for (j, &b) in y.iter().enumerate() {
            let col = j + 1;
            let mut best = prev[col].min(cur[j]) + 1;
            if !(nv && row == col) {
                let diag = prev[j] + u32::from(!matches(a, b));
                best = best.min(diag);
            }
            cur[col] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Longest common subsequence (matched pairs), optionally nowhere-vertical.
pub fn lcs_dp<T: Copy, M: Fn(T, T) -> bool>(x: &[T], y: &[T], matches: M, nv: bool) -> u32 {
    let m = y.len();
    let mut prev = vec![0u32; m + 1];
    let mut cur = vec![0u32; m + 1];
    for (i, &a) in x.iter().enumerate() {
        let row = i + 1;
        cur[0] = 0;
        for (j, &b) in y.iter().enumerate() {
            let col = j + 1;
            let mut best = prev[col].max(cur[j]);
            if !(nv && row == col) && matches(a, b) {
                best = best.max(prev[j] + 1);
            }
            cur[col] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Edit distance restricted to the diagonal band `|i - j| <= limit`.
///
/// Returns the exact distance when it is at most `limit`, otherwise some
/// value greater than `limit` (capped at `limit + 1`). Any alignment of cost
/// `c` only visits cells with `|i - j| <= c`, so the band loses nothing below
/// the cap.
pub fn edit_banded<T: Copy, M: Fn(T, T) -> bool>(
    x: &[T],
    y: &[T],
    matches: M,
    nv: bool,
    limit: u32,
) -> u32 {
    let n = x.len();
    let m = y.len();
    let cap = limit + 1;
    if n.abs_diff(m) > limit as usize {
        return cap;
    }
    let band = limit as usize;
    let width = 2 * band + 1;
    // Row i stores columns i - band ..= i + band at offsets 0..width.
    let mut prev = vec![INF; width];
    let mut cur = vec![INF; width];
    for (off, cell) in prev.iter_mut().enumerate() {
        // row 0: column c = off - band
        if off >= band && off - band <= m {
            *cell = (off - band) as u32;
        }
    }
    for row in 1..=n {
        let a = x[row - 1];
        let mut row_min = INF;
        for off in 0..width {
            let col = row as isize + off as isize - band as isize;
            if col < 0 || col as usize > m {
                cur[off] = INF;
                continue;
            }
            let col = col as usize;
            let mut best = INF;
            if col == 0 {
                best = row as u32;
            } else {
                // up: (row-1, col) sits at offset off+1 in prev
                if off + 1 < width {
                    best = best.min(prev[off + 1].saturating_add(1));
                }
                // left: (row, col-1) at offset off-1 in cur
                if off >= 1 {
                    best = best.min(cur[off - 1].saturating_add(1));
                }
                if !(nv && row == col) {
                    let d = prev[off].saturating_add(u32::from(!matches(a, y[col - 1])));
                    best = best.min(d);
                }
            }
            cur[off] = best.min(INF);
            row_min = row_min.min(cur[off]);
        }
        std::mem::swap(&mut prev, &mut cur);
        if row_min > limit {
            return cap;
        }
    }
    let off = (m as isize - n as isize + band as isize) as usize;
    prev[off].min(cap)
}

/// Nowhere-vertical wildcard self-distances of every prefix of `s`.
///
/// Entry `l - 1` holds the nowhere-vertical edit distance of `s[..l]` against
/// itself (wildcards instantiated independently on each side), capped at
/// `limit + 1`. One banded pass over `s` x `s` yields all prefixes, because
/// the diagonal cell `(l, l)` of the big table is exactly the answer for the
/// length-`l` prefix.
pub fn nv_self_edit_prefixes<T: SymbolLike>(s: &[T], limit: u32) -> Vec<u32> {
    let mut dp = BandedSelfDp::new(limit);
    (0..s.len()).map(|_| dp.step(s)).collect()
}

/// Resumable form of [`nv_self_edit_prefixes`].
///
/// Row `r` only reads columns up to `r + limit`, so the state after row `r`
/// stays valid for any text that agrees with the current one on its first
/// `r + limit` symbols. Cloning the state lets callers share rows between
/// texts with a common prefix.
#[derive(Clone, Debug)]
pub struct BandedSelfDp {
    band: usize,
    row: usize,
    prev: Vec<u32>,
    cur: Vec<u32>,
}

impl BandedSelfDp {
    pub fn new(limit: u32) -> Self {
        let band = limit as usize;
        let width = 2 * band + 1;
        let prev = (0..width)
            .map(|off| if off >= band { (off - band) as u32 } else { INF })
            .collect();
        BandedSelfDp {
            band,
            row: 0,
            prev,
            cur: vec![INF; width],
        }
    }

    /// Rows computed so far.
    pub fn rows(&self) -> usize {
        self.row
    }

    /// Computes the next row against `s` and returns its diagonal cell,
    /// capped at `limit + 1`.
    pub fn step<T: SymbolLike>(&mut self, s: &[T]) -> u32 {
        let band = self.band;
        let width = 2 * band + 1;
        let row = self.row + 1;
        let a = s[row - 1];
        let n = s.len();
        for off in 0..width {
            let col = row + off;
            if col < band || col - band > n {
                self.cur[off] = INF;
                continue;
            }
            let col = col - band;
            let mut best = INF;
            if col == 0 {
                best = row as u32;
            } else {
                if off + 1 < width {
                    best = best.min(self.prev[off + 1].saturating_add(1));
                }
                if off >= 1 {
                    best = best.min(self.cur[off - 1].saturating_add(1));
                }
                if row != col {
                    best = best.min(self.prev[off].saturating_add(u32::from(!a.matches(s[col - 1]))));
                }
            }
            self.cur[off] = best.min(INF);
        }
        std::mem::swap(&mut self.prev, &mut self.cur);
        self.row = row;
        self.prev[band].min(band as u32 + 1)
    }
}

/// Streaming approximate matcher: minimum wildcard edit distance between a
/// fixed pattern and any substring of a text fed one symbol at a time.
///
/// A forbidden cell pairs pattern row `i` (1-based) with the text position
/// `offset + i`; such a pair may not be matched or substituted. Cloning the
/// state lets callers share work across texts with a common prefix.
#[derive(Clone, Debug)]
pub struct SubstringMatcher<'p, T> {
    pattern: &'p [T],
    col: Vec<u32>,
    start: Vec<u32>,
    pos: usize,
    best: u32,
    best_span: (usize, usize),
}

impl<'p, T: SymbolLike> SubstringMatcher<'p, T> {
    pub fn new(pattern: &'p [T]) -> Self {
        let m = pattern.len();
        SubstringMatcher {
            pattern,
            col: (0..=m as u32).collect(),
            start: vec![1; m + 1],
            pos: 0,
            best: m as u32,
            best_span: (1, 0),
        }
    }

    /// Feeds the next text symbol. `forbidden_offset` marks the diagonal
    /// `(i, offset + i)` as unusable.
    #[inline]
    pub fn push(&mut self, symbol: T, forbidden_offset: Option<usize>) {
        self.pos += 1;
        let p = self.pos;
        let m = self.pattern.len();
        let forbidden_row = forbidden_offset
            .and_then(|o| p.checked_sub(o))
            .filter(|&r| r >= 1 && r <= m);
        // Row 0 is free: a substring may start anywhere.
        let mut diag = self.col[0];
        let mut diag_start = self.start[0];
        self.col[0] = 0;
        self.start[0] = p as u32 + 1;
        for i in 1..=m {
            let up_prev = self.col[i];
            let up_prev_start = self.start[i];
            // candidates in tie-break order: diagonal, skip text (insertion),
            // skip pattern (deletion)
            let mut best = INF;
            let mut best_start = 0;
            if forbidden_row != Some(i) {
                let d = diag + u32::from(!self.pattern[i - 1].matches(symbol));
                best = d;
                best_start = diag_start;
            }
            let ins = up_prev + 1;
            if ins < best {
                best = ins;
                best_start = up_prev_start;
            }
            let del = self.col[i - 1] + 1;
            if del < best {
                best = del;
                best_start = self.start[i - 1];
            }
            diag = up_prev;
            diag_start = up_prev_start;
            self.col[i] = best;
            self.start[i] = best_start;
        }
        let last = self.col[m];
        if last < self.best {
            self.best = last;
            self.best_span = (self.start[m] as usize, p);
        }
    }

    pub fn feed(&mut self, text: &[T], forbidden_offset: Option<usize>) {
        for &s in text {
            self.push(s, forbidden_offset);
        }
    }

    /// Best cost so far and the 1-based text span achieving it (`end <
    /// start` encodes the empty substring).
    pub fn best(&self) -> (u32, (usize, usize)) {
        (self.best, self.best_span)
    }
}

/// Column-streaming nowhere-vertical distance of a fixed string `s` against
/// `s` followed by arbitrary extensions.
///
/// After feeding column `j`, `bottom()` is the distance between all of `s`
/// and the first `j` fed symbols. The diagonal `(i, i)` is forbidden, so when
/// the fed columns start with `s` itself this is the nowhere-vertical
/// distance of `s` against `s` extended.
#[derive(Clone, Debug)]
pub struct NvColumnDp<'s, T> {
    s: &'s [T],
    col: Vec<u32>,
    pos: usize,
}

impl<'s, T: SymbolLike> NvColumnDp<'s, T> {
    pub fn new(s: &'s [T]) -> Self {
        NvColumnDp {
            s,
            col: (0..=s.len() as u32).collect(),
            pos: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, symbol: T) {
        self.pos += 1;
        let j = self.pos;
        let mut diag = self.col[0];
        self.col[0] = j as u32;
        for i in 1..=self.s.len() {
            let up_prev = self.col[i];
            let mut best = up_prev.min(self.col[i - 1]) + 1;
            if i != j {
                best = best.min(diag + u32::from(!self.s[i - 1].matches(symbol)));
            }
            diag = up_prev;
            self.col[i] = best;
        }
    }

    pub fn bottom(&self) -> u32 {
        self.col[self.s.len()]
    }

    pub fn fed(&self) -> usize {
        self.pos
    }
}
