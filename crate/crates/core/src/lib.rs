//! Exact computation of universal point-count polynomials for moduli spaces
//! of twisted Higgs bundles on curves, their cyclotomic twists, and the
//! derived Poincaré polynomials, Euler characteristics and finite-field
//! point counts.
//!
//! The layers, bottom up:
//!
//! * [`scalars`]: rationals, cyclotomic numbers, Möbius and friends.
//! * [`partitions`]: Young-diagram statistics and multiset decompositions.
//! * [`polyalg`]: Laurent polynomials, factored rational functions, series.
//! * [`universal`]: the universal polynomials themselves.
//! * [`twist`]: root-of-unity averages and one-variable specializations.
//! * [`topology`]: Betti numbers and Euler characteristics.
//! * [`counting`]: numeric evaluation at Frobenius eigenvalues.
//! * [`oracle`]: brute-force counts on the projective line.
//! * [`checks`]: the acceptance suite, shared by tests and the CLI.

pub mod checks;
pub mod counting;
pub mod oracle;
pub mod partitions;
pub mod polyalg;
pub mod scalars;
pub mod topology;
pub mod twist;
pub mod universal;

use thiserror::Error;

/// Version tag mixed into provenance hashes and cache keys.
pub const ENGINE_VERSION: &str = concat!("hitchin-core/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("variable sets differ: {0:?} vs {1:?}")]
    VarSetMismatch(Vec<String>, Vec<String>),
    #[error("cyclotomic orders differ: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("exact division failed, nonzero remainder {remainder}")]
    NotDivisible { remainder: String },
    #[error("series has the wrong constant term: {0}")]
    WrongConstantTerm(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("functional equation violated: {0}")]
    FunctionalEquationViolated(String),
    #[error("root modulus violated: {0}")]
    RootModulusViolated(String),
    #[error("result {value} is not within {tolerance} of an integer")]
    IntegralityFailed { value: String, tolerance: String },
    #[error("inconsistent cover datum: {0}")]
    CoverInconsistent(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
}

impl Error {
    /// Whether the error signals an internal inconsistency (a bug or a
    /// violated theorem) rather than bad user input.
    pub fn is_bug(&self) -> bool {
        matches!(self, Error::NotDivisible { .. } | Error::InvariantViolation(_))
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::VarSetMismatch(..) => "varset_mismatch",
            Error::OrderMismatch(..) => "order_mismatch",
            Error::NotDivisible { .. } => "not_divisible",
            Error::WrongConstantTerm(_) => "wrong_constant_term",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::FunctionalEquationViolated(_) => "functional_equation_violated",
            Error::RootModulusViolated(_) => "root_modulus_violated",
            Error::IntegralityFailed { .. } => "integrality_failed",
            Error::CoverInconsistent(_) => "cover_inconsistent",
            Error::BudgetExceeded(_) => "budget_exceeded",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
