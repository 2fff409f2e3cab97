//! Isometric embeddings of Hamming space into edit space: string metrics,
//! locally self-matching strings, misaligner codebooks, embedding
//! families and their verification.

pub mod embed;
pub mod error;
pub mod lsm;
pub mod metrics;
pub mod misaligner;
pub mod rng;
pub mod strings;
pub mod verify;

pub use error::{Error, Result};
pub use strings::{Alphabet, Str, Symbol, WildStr, WILDCARD};
