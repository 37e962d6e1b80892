//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller passed arguments that violate an operation precondition.
    #[error("usage: {0}")]
    Usage(String),

    /// `a` and `q` do not describe a reduced residue class.
    #[error("invalid progression: a={a}, q={q} (need 1 <= a <= q and gcd(a, q) = 1)")]
    InvalidProgression { q: u64, a: u64 },

    /// 1-indexed access outside the sieved part of a sequence. A sequence
    /// only knows its members up to `limit`; a larger index is not "missing",
    /// it is merely not yet sieved.
    #[error(
        "index {n} out of range: sequence holds {len} primes up to limit {limit} \
             ({detail})"
    )]
    IndexOutOfRange {
        n: usize,
        len: usize,
        limit: u64,
        detail: &'static str,
    },

    /// Argument outside the mathematical domain of a function.
    #[error("domain: {0}")]
    Domain(String),

    /// A precondition that guards the validity of a reported error bound.
    #[error("precondition: {0}")]
    Precondition(String),

    /// Two supposedly equivalent numerical routes disagreed beyond tolerance.
    #[error("numerics: {0}")]
    Numerics(String),

    /// Work or memory budget exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Malformed cache or subset file.
    #[error("file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
