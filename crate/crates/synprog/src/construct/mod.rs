//! Executable constructions: CRT shift certificates, the gap-or-progression
//! dichotomy, greedy pairwise-prime extraction, gcd-controlled families,
//! interval embeddings, offset alignment, and Triveni-triplet machinery.
//!
//! Each construction verifies its own output by exact re-substitution before
//! returning it, and infeasible or window-limited outcomes are reported as
//! typed errors carrying diagnostics rather than booleans: on a finite
//! window the underlying statements can only fail softly.

mod align;
mod dichotomy;
mod family;
mod greedy;
mod shift;
mod stream;
mod triveni;

pub use align::{align_offsets, AlignmentSolution};
pub use dichotomy::{gap_or_gp, gp_from_pairwise_prime, GapCertificate, GapOrGp};
pub use family::{
    embed_family, gcd_controlled_family, EmbeddedFamily, GcdControlledFamily, MAX_FAMILY_H,
};
pub use greedy::{
    divisor_escape_support, greedy_maximal_pairwise_prime, greedy_pairwise_prime_prefix,
    order_one_triveni, OrderOneOutcome,
};
pub use shift::{crt_shift, crt_shift_u64, ShiftCertificate};
pub use stream::PairwisePrimeStream;
pub use triveni::{
    extend_triveni, grow_triveni_order, lambda, verify_triveni, ExtendOutcome, GrowOutcome,
    TriveniBudget, TriveniTriplet,
};

use crate::arith::ArithError;
use crate::lattice::LatticeError;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("moduli not pairwise coprime: {0}")]
    NonCoprimeModuli(String),
    #[error("alignment positions not pairwise coprime: {0}")]
    NonCoprimeX(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("growth guard exceeded: {0}")]
    GrowthGuardExceeded(String),
    #[error("not found in window: {0}")]
    NotFoundInWindow(String),
    #[error("order bound reached: {0}")]
    OrderBoundReached(String),
    #[error("window claim contradicted: {0}")]
    SyndeticityContradicted(String),
    #[error("internal verification failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl From<ArithError> for ConstructError {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::NonCoprimeModuli { .. } => ConstructError::NonCoprimeModuli(e.to_string()),
            other => ConstructError::PreconditionViolated(other.to_string()),
        }
    }
}
