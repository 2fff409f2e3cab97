use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::strings::Symbol;

/// Positions, per-position symbol maps and the fixed remainder of an
/// interleaved map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleavedStructure {
    pub n: usize,
    pub output_len: usize,
    pub input_alphabet: u64,
    /// `eta[i]`: 0-based output position of input `i`.
    pub eta: Vec<usize>,
    /// `pi[i][v]`: output symbol at `eta[i]` when input `i` is `v`. Complete
    /// when `pi_complete`; otherwise only the probed symbols are listed.
    pub pi: Vec<BTreeMap<Symbol, Symbol>>,
    pub pi_complete: bool,
    /// Output symbols outside the image of `eta`, in position order.
    pub frozen: Vec<Symbol>,
    pub frozen_indices: Vec<usize>,
}

impl InterleavedStructure {
    /// Builds a structure with identity symbol maps.
    pub fn with_identity_maps(
        eta: Vec<usize>,
        output_len: usize,
        frozen_fill: impl Fn(usize) -> Symbol,
        input_alphabet: u64,
    ) -> Result<Self> {
        let mut used = vec![false; output_len];
        for &p in &eta {
            if p >= output_len || used[p] {
                return Err(Error::OutOfRange(format!("position map is not injective into 0..{output_len}")));
            }
            used[p] = true;
        }
        let frozen_indices: Vec<usize> = (0..output_len).filter(|&p| !used[p]).collect();
        let frozen = frozen_indices.iter().map(|&p| frozen_fill(p)).collect();
        let identity: BTreeMap<Symbol, Symbol> = (0..input_alphabet).map(|v| (v, v)).collect();
        Ok(InterleavedStructure {
            n: eta.len(),
            output_len,
            input_alphabet,
            pi: vec![identity; eta.len()],
            pi_complete: true,
            eta,
            frozen,
            frozen_indices,
        })
    }

    /// The map described by the structure. Symbols missing from an
    /// incomplete `pi` are passed through unchanged.
    pub fn reconstruct(&self, x: &[Symbol]) -> Vec<Symbol> {
        let mut out = vec![0; self.output_len];
        for (&p, &s) in self.frozen_indices.iter().zip(&self.frozen) {
            out[p] = s;
        }
        for (i, &v) in x.iter().enumerate() {
            out[self.eta[i]] = self.pi[i].get(&v).copied().unwrap_or(v);
        }
        out
    }

    /// `pi[i]` inverse at `out`, if known.
    pub fn preimage(&self, i: usize, out: Symbol) -> Option<Symbol> {
        self.pi[i].iter().find(|(_, &o)| o == out).map(|(&v, _)| v)
    }
}

impl Embedding for InterleavedStructure {
    fn n(&self) -> usize {
        self.n
    }

    fn input_alphabet(&self) -> u64 {
        self.input_alphabet
    }

    fn output_alphabet(&self) -> u64 {
        let max_pi = self.pi.iter().flat_map(|m| m.values()).copied().max().unwrap_or(0);
        let max_frozen = self.frozen.iter().copied().max().unwrap_or(0);
        max_pi.max(max_frozen).max(self.input_alphabet.saturating_sub(1)) + 1
    }

    fn apply(&self, x: &[Symbol]) -> Vec<Symbol> {
        self.reconstruct(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ViolationKind {
    /// Changing one input symbol changed `changed.len() != 1` outputs.
    ProbeChangesPositions { changed: Vec<usize> },
    /// Two changes at the same input hit different outputs.
    PositionNotFixed { index: usize, positions: [usize; 2] },
    /// Two inputs share an output position.
    PositionCollision { indices: [usize; 2], position: usize },
    /// Two symbols at one input give the same output symbol.
    NotInjective { index: usize, symbols: [Symbol; 2], output: Symbol },
    /// The output differs from what the structure predicts.
    ReconstructionMismatch { position: usize, expected: Symbol, actual: Symbol },
}

/// A violation with the inputs that exhibit it. Replaying the inputs
/// through the map reproduces it (see [`replay_violation`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureViolation {
    pub kind: ViolationKind,
    /// `probes[0]` is the base point; the others differ from it in one
    /// position each (except for reconstruction mismatches, which carry
    /// the structure's prediction instead).
    pub probes: Vec<Vec<Symbol>>,
    pub expected_output: Option<Vec<Symbol>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum StructureOutcome {
    Structure(InterleavedStructure),
    Violation(StructureViolation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractConfig {
    /// Random base points used to cross-check that positions and symbol
    /// maps do not depend on the rest of the input.
    pub probe_budget: usize,
    /// Alphabets up to this size are probed with every symbol; larger ones
    /// with `symbol_samples` random symbols per position.
    pub full_alphabet_limit: u64,
    pub symbol_samples: usize,
    pub seed: u64,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            probe_budget: 64,
            full_alphabet_limit: 4096,
            symbol_samples: 16,
            seed: 0,
        }
    }
}

fn diff(a: &[Symbol], b: &[Symbol]) -> Vec<usize> {
    a.iter().zip(b).enumerate().filter(|(_, (x, y))| x != y).map(|(p, _)| p).collect()
}

fn eval<E: Embedding + ?Sized>(emb: &E, x: &[Symbol], len: usize) -> Result<Vec<Symbol>> {
    let out = emb.apply(x);
    if out.len() != len {
        return Err(Error::LengthMismatch {
            left: out.len(),
            right: len,
        });
    }
    Ok(out)
}

fn with(base: &[Symbol], i: usize, v: Symbol) -> Vec<Symbol> {
    let mut x = base.to_vec();
    x[i] = v;
    x
}

fn violation(kind: ViolationKind, probes: Vec<Vec<Symbol>>) -> StructureOutcome {
    StructureOutcome::Violation(StructureViolation {
        kind,
        probes,
        expected_output: None,
    })
}

/// Recovers positions, symbol maps and frozen symbols by changing one input
/// symbol at a time from the all-zeros input, then cross-checks from
/// random base points.
pub fn extract_interleaved_structure<E: Embedding + ?Sized>(
    emb: &E,
    config: ExtractConfig,
) -> Result<StructureOutcome> {
    let n = emb.n();
    let q = emb.input_alphabet();
    let zero = vec![0; n];
    let base = emb.apply(&zero);
    let len = base.len();
    let mut rng = seeded(config.seed);
    let full = q <= config.full_alphabet_limit;

    let mut eta = Vec::with_capacity(n);
    let mut pi = Vec::with_capacity(n);
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..n {
        let symbols: Vec<Symbol> = if full {
            (1..q).collect()
        } else {
            let mut s: Vec<Symbol> = (0..config.symbol_samples).map(|_| rng.gen_range(1..q)).collect();
            s.sort_unstable();
            s.dedup();
            s
        };
        let mut map = BTreeMap::new();
        let mut position: Option<(usize, Symbol)> = None;
        for &v in &symbols {
            let probe = with(&zero, i, v);
            let out = eval(emb, &probe, len)?;
            let changed = diff(&base, &out);
            if changed.len() != 1 {
                return Ok(violation(ViolationKind::ProbeChangesPositions { changed }, vec![zero, probe]));
            }
            let p = changed[0];
            match position {
                None => position = Some((p, v)),
                Some((p0, v0)) if p0 != p => {
                    return Ok(violation(
                        ViolationKind::PositionNotFixed {
                            index: i,
                            positions: [p0, p],
                        },
                        vec![zero.clone(), with(&zero, i, v0), probe],
                    ))
                }
                _ => {}
            }
            map.insert(v, out[p]);
        }
        let Some((p, v)) = position else {
            // one-symbol alphabet: nothing can change
            return Err(Error::Unsupported("input alphabet has a single symbol".into()));
        };
        if let Some(&j) = owner.get(&p) {
            let vj = *pi_first_key(&pi[j]);
            return Ok(violation(
                ViolationKind::PositionCollision {
                    indices: [j, i],
                    position: p,
                },
                vec![zero.clone(), with(&zero, j, vj), with(&zero, i, v)],
            ));
        }
        owner.insert(p, i);
        map.insert(0, base[p]);
        if let Some(v) = injectivity_failure(&map) {
            let (a, b, o) = v;
            let probe = |s: Symbol| with(&zero, i, s);
            return Ok(violation(
                ViolationKind::NotInjective {
                    index: i,
                    symbols: [a, b],
                    output: o,
                },
                vec![zero.clone(), probe(a), probe(b)],
            ));
        }
        eta.push(p);
        pi.push(map);
    }
    let mut is_mutable = vec![false; len];
    for &p in &eta {
        is_mutable[p] = true;
    }
    let frozen_indices: Vec<usize> = (0..len).filter(|&p| !is_mutable[p]).collect();
    let frozen = frozen_indices.iter().map(|&p| base[p]).collect();
    let mut structure = InterleavedStructure {
        n,
        output_len: len,
        input_alphabet: q,
        eta,
        pi,
        pi_complete: full,
        frozen,
        frozen_indices,
    };

    // cross-check from random base points: one change per position
    for _ in 0..config.probe_budget {
        if n == 0 {
            break;
        }
        let y: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        let fy = eval(emb, &y, len)?;
        if let Some(bad) = first_mismatch(&mut structure, emb, &y, &fy, !full)? {
            return Ok(StructureOutcome::Violation(bad));
        }
        for i in 0..n {
            let v = (y[i] + rng.gen_range(1..q)) % q;
            let probe = with(&y, i, v);
            let out = eval(emb, &probe, len)?;
            let changed = diff(&fy, &out);
            if changed != [structure.eta[i]] {
                return Ok(violation(ViolationKind::ProbeChangesPositions { changed }, vec![y, probe]));
            }
            if let Some(bad) = first_mismatch(&mut structure, emb, &probe, &out, !full)? {
                return Ok(StructureOutcome::Violation(bad));
            }
        }
    }
    Ok(StructureOutcome::Structure(structure))
}

fn pi_first_key(map: &BTreeMap<Symbol, Symbol>) -> &Symbol {
    map.keys().next().expect("probed at least one symbol")
}

fn injectivity_failure(map: &BTreeMap<Symbol, Symbol>) -> Option<(Symbol, Symbol, Symbol)> {
    let mut seen: BTreeMap<Symbol, Symbol> = BTreeMap::new();
    for (&v, &o) in map {
        if let Some(&u) = seen.get(&o) {
            return Some((u, v, o));
        }
        seen.insert(o, v);
    }
    None
}

/// Compares `fx = emb(x)` with the structure's prediction. With `learn`,
/// symbols missing from an incomplete `pi` are filled in from the output
/// (and then checked for injectivity).
fn first_mismatch<E: Embedding + ?Sized>(
    s: &mut InterleavedStructure,
    emb: &E,
    x: &[Symbol],
    fx: &[Symbol],
    learn: bool,
) -> Result<Option<StructureViolation>> {
    if learn {
        for (i, &v) in x.iter().enumerate() {
            if !s.pi[i].contains_key(&v) {
                // the value at a fresh symbol comes from a single change of
                // the all-zeros input, so it is checked like any other probe
                let zero = vec![0; s.n];
                let probe = with(&zero, i, v);
                let out = eval(emb, &probe, s.output_len)?;
                s.pi[i].insert(v, out[s.eta[i]]);
                if let Some((a, b, o)) = injectivity_failure(&s.pi[i]) {
                    return Ok(Some(StructureViolation {
                        kind: ViolationKind::NotInjective {
                            index: i,
                            symbols: [a, b],
                            output: o,
                        },
                        probes: vec![zero.clone(), with(&zero, i, a), with(&zero, i, b)],
                        expected_output: None,
                    }));
                }
            }
        }
    }
    let expected = s.reconstruct(x);
    Ok(diff(&expected, fx).first().map(|&p| StructureViolation {
        kind: ViolationKind::ReconstructionMismatch {
            position: p,
            expected: expected[p],
            actual: fx[p],
        },
        probes: vec![x.to_vec()],
        expected_output: Some(expected),
    }))
}

/// Checks `emb(x) = reconstruct(x)` on `probes` fresh random inputs.
pub fn check_reconstruction<E: Embedding + ?Sized>(
    emb: &E,
    structure: &InterleavedStructure,
    probes: usize,
    seed: u64,
) -> Result<Option<StructureViolation>> {
    let mut s = structure.clone();
    let mut rng = seeded(seed);
    let q = s.input_alphabet;
    let learn = !s.pi_complete;
    for _ in 0..probes {
        let x: Vec<Symbol> = (0..s.n).map(|_| rng.gen_range(0..q)).collect();
        let fx = eval(emb, &x, s.output_len)?;
        if let Some(bad) = first_mismatch(&mut s, emb, &x, &fx, learn)? {
            return Ok(Some(bad));
        }
    }
    Ok(None)
}

/// Re-runs the probes of a violation and confirms the inconsistency.
pub fn replay_violation<E: Embedding + ?Sized>(emb: &E, v: &StructureViolation) -> bool {
    let outs: Vec<Vec<Symbol>> = v.probes.iter().map(|x| emb.apply(x)).collect();
    match &v.kind {
        ViolationKind::ProbeChangesPositions { changed } => {
            outs.len() == 2 && diff(&outs[0], &outs[1]) == *changed && changed.len() != 1
        }
        ViolationKind::PositionNotFixed { positions, .. } => {
            outs.len() == 3
                && diff(&outs[0], &outs[1]) == [positions[0]]
                && diff(&outs[0], &outs[2]) == [positions[1]]
                && positions[0] != positions[1]
        }
        ViolationKind::PositionCollision { position, .. } => {
            outs.len() == 3
                && diff(&outs[0], &outs[1]) == [*position]
                && diff(&outs[0], &outs[2]) == [*position]
        }
        ViolationKind::NotInjective { index, symbols, output } => {
            // both symbols yield the same output everywhere
            outs.len() == 3
                && v.probes[1][*index] == symbols[0]
                && v.probes[2][*index] == symbols[1]
                && symbols[0] != symbols[1]
                && outs[1] == outs[2]
                && outs[1].contains(output)
        }
        ViolationKind::ReconstructionMismatch { position, expected, actual } => {
            v.expected_output.as_ref().is_some_and(|e| e[*position] == *expected)
                && outs.len() == 1
                && outs[0].get(*position) == Some(actual)
                && expected != actual
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::FnEmbedding;

    #[test]
    fn duplicated_symbol_is_caught() {
        let emb = FnEmbedding {
            n: 4,
            input_alphabet: 2,
            output_alphabet: 2,
            f: |x: &[Symbol]| {
                let mut out = vec![0];
                out.extend_from_slice(x);
                out.push(x[0]);
                out
            },
        };
        let StructureOutcome::Violation(v) = extract_interleaved_structure(&emb, ExtractConfig::default()).unwrap() else {
            panic!("expected a violation");
        };
        assert_eq!(v.kind, ViolationKind::ProbeChangesPositions { changed: vec![1, 5] });
        assert!(replay_violation(&emb, &v));
    }

    #[test]
    fn permuted_interleaving_is_recovered() {
        // x[i] at position 2i + 1, flipped at odd i; frozen 1s elsewhere
        let emb = FnEmbedding {
            n: 5,
            input_alphabet: 2,
            output_alphabet: 2,
            f: |x: &[Symbol]| {
                let mut out = vec![1; 11];
                for (i, &b) in x.iter().enumerate() {
                    out[2 * i + 1] = if i % 2 == 1 { 1 - b } else { b };
                }
                out
            },
        };
        let StructureOutcome::Structure(s) = extract_interleaved_structure(&emb, ExtractConfig::default()).unwrap() else {
            panic!("expected a structure");
        };
        assert_eq!(s.eta, vec![1, 3, 5, 7, 9]);
        assert_eq!(s.pi[1].get(&0), Some(&1));
        assert_eq!(s.frozen, vec![1; 6]);
        assert_eq!(check_reconstruction(&emb, &s, 100, 3).unwrap(), None);
    }

    #[test]
    fn constant_map_is_not_injective() {
        let emb = FnEmbedding {
            n: 2,
            input_alphabet: 3,
            output_alphabet: 3,
            f: |x: &[Symbol]| vec![x[0].min(1), x[1]],
        };
        let StructureOutcome::Violation(v) = extract_interleaved_structure(&emb, ExtractConfig::default()).unwrap() else {
            panic!("expected a violation");
        };
        assert!(matches!(v.kind, ViolationKind::NotInjective { index: 0, .. }));
        assert!(replay_violation(&emb, &v));
    }
}
