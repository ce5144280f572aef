//! Certified construction and verification of k-wise coprime windows
//! `⌊f(n+1)⌋, …, ⌊f(n+H)⌋` for power-sum functions `f`.
//!
//! The crate is organized bottom-up:
//!
//! * [`powersum`]: the function class, its parser and exact derivatives;
//! * [`rigor`]: rigorous enclosures, exact floors and Taylor remainder bounds;
//! * [`arith`]: primorials, tuple gcds, Vandermonde systems, `1/ζ(s)`;
//! * [`certificate`]: the four sufficient conditions at a point `n` and
//!   independent verification of their conclusion;
//! * [`search`]: brute-force scans and the constructive derivative ladder;
//! * [`density`]: coprimality frequencies against `1/ζ(s)`;
//! * [`banach`]: block sets whose elements are k-wise coprime.

pub mod arith;
pub mod banach;
pub mod certificate;
pub mod density;
pub mod json;
pub mod powersum;
pub mod rigor;
pub mod search;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

pub use certificate::{check_conditions, reconstruct_window, verify_window, VerificationReport, WindowCertificate};
pub use powersum::{check_hypotheses, parse_function, HypothesisReport, PowerSumExpr};
pub use rigor::{Enclosure, EvalError, FloorFrac, Precision};
pub use search::{build_constants, construct_witness, ConstantLadder, LadderOverrides};

/// Errors surfaced by the higher-level operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] powersum::ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("hypotheses fail for k = {k}: vanishing k-th derivative = {vanishing}, unbounded (k-1)-th derivative = {unbounded}")]
    Hypothesis { k: u32, vanishing: bool, unbounded: bool },
    #[error("inadmissible constants: {}", .0.join("; "))]
    Inadmissible(Vec<String>),
    #[error("certificate does not satisfy {0}")]
    CertificateInvalid(String),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    #[error("witness provider failed: {0}")]
    Provider(String),
}

impl Error {
    /// True when the failure means "could not decide" rather than "false" or
    /// "bad input".
    pub fn is_undecidable(&self) -> bool {
        matches!(self, Error::Eval(EvalError::Undecidable { .. }) | Error::Eval(EvalError::PrecisionCap { .. }))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
