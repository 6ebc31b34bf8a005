//! Projective amalgamation for weld-division maps.
//!
//! Every construction here is checked pointwise before it is returned.

mod base;
mod coinit;
mod main_lemma;
mod order;

pub use base::{amalgamate_base, amalgamate_over_welds, AmalgamationResult};
pub use coinit::{amalgamate, coinitiality, Coinitial, WeldChain};
pub use main_lemma::{describe_preimage, main_lemma_certificate, PureCertificate, PureCertificateJson};
pub use order::{separating_order, SeparatingOrder};

use crate::seqcalc::SeqError;
use crate::simap::MapError;

#[derive(Debug, thiserror::Error)]
pub enum AmalgamError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("precondition {condition} failed: {detail}")]
    PreconditionFailed { condition: &'static str, detail: String },
    #[error("unsupported provenance: {0}")]
    UnsupportedProvenance(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub(crate) fn precondition(condition: &'static str, detail: impl Into<String>) -> AmalgamError {
    AmalgamError::PreconditionFailed {
        condition,
        detail: detail.into(),
    }
}

pub(crate) fn unverified(detail: impl Into<String>) -> AmalgamError {
    AmalgamError::VerificationFailed(detail.into())
}
