//! Empirical checks on embeddings: isometry (exhaustive and sampled),
//! recovery of the interleaved structure, and the shift-alignment attack
//! on interleaved maps of high rate.

mod attack;
mod isometry;
mod structure;

pub use attack::{shift_attack, synthetic_interleaved, AttackResult, ShiftOutcome};
pub use isometry::{
    verify_isometry_exhaustive, verify_isometry_sampled, Counterexample, IsometryReport,
    SampleConfig, EXHAUSTIVE_INPUT_LIMIT,
};
pub use structure::{
    check_reconstruction, extract_interleaved_structure, replay_violation, ExtractConfig,
    InterleavedStructure, StructureOutcome, StructureViolation, ViolationKind,
};
