use thiserror::Error;

/// Errors surfaced by the exact-arithmetic kernels and the group operations
/// built on top of them.
///
/// `InvariantViolation` is reserved for conditions that a theorem rules out;
/// hitting one means a bug, not bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in Q(zeta_{n})")]
    DivisionByZero { n: u64 },
    #[error("cyclotomic level mismatch: {left} vs {right}")]
    LevelMismatch { left: u64, right: u64 },
    #[error("zeta_{n} -> zeta_{n}^{k} is not an automorphism: gcd({k}, {n}) != 1")]
    NotAutomorphism { n: u64, k: i64 },
    #[error("denominator is not a power of two")]
    NotTwoLocal,
    #[error("element is not fixed by complex conjugation")]
    NotReal,
    #[error("squareness undecided after {primes} split primes at modulus exponent {cap}")]
    Undecided { primes: usize, cap: u32 },
    #[error("matrix is not special unitary over R_n")]
    NotSpecialUnitary,
    #[error("matrix is not unitary over R_n")]
    NotUnitary,
    #[error("4 does not divide {n}: K_{n} contains no square root of -1")]
    LevelLacksI { n: u64 },
    #[error("matrix is not in SO3(R_n^+)")]
    NotSpecialOrthogonal,
    #[error("level {n} unsupported: {reason}")]
    UnsupportedLevel { n: u64, reason: String },
    #[error("matrix is not in U2(R_{n})")]
    NotInGroup { n: u64 },
    #[error("gate word does not evaluate to determinant 1")]
    NotSpecial,
    #[error("letter is not an element of either amalgam factor")]
    NotAGenerator,
    #[error("synthesis abandoned after {steps} descent steps")]
    Unsynthesized { steps: usize },
    #[error("invariant violation (bug): {0}")]
    InvariantViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn unsupported(n: u64, reason: impl Into<String>) -> Self {
        Error::UnsupportedLevel {
            n,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
