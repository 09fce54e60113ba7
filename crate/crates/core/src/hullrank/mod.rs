//! Hulls `A(X) = span{F_i X}` of affinor bases, weak and generic rank
//! certification, and certificate auditing.

mod basis;
mod certificate;
mod hull;
mod search;

use thiserror::Error;

pub use basis::{AffinorBasis, FloatBasis};
pub use certificate::{
    verify_certificate, BasisSource, CertificateAudit, CertificateKind, GenericSupport,
    RankCertificate,
};
pub use hull::{
    hull, pair_span_dim, scalar_multiple_check, scalar_multiple_of_identity, Hull, ScalarMultiple,
};
pub(crate) use search::weak_search;
pub use search::{
    certificate_for_vector, certify_generic_rank, inversion_probe, weak_rank_witness, AbsenceProof, GenericOutcome,
    Inapplicability, InversionProbe, SearchOptions, WeakRankOutcome, DEFAULT_SEED,
    DEFAULT_SYMBOLIC_THRESHOLD, DEFAULT_TRIALS, INITIAL_BOUND, MAX_SYMBOLIC_MINORS, THM_CLOSED_ALGEBRA,
    THM_INVERSION, THM_NONSCALAR_PAIR, THM_WITNESS, TRIALS_PER_ROUND,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("affinor basis is empty")]
    Empty,
    #[error("affinor {index} has shape {found:?}, expected {expected}x{expected}")]
    Shape {
        index: usize,
        found: (usize, usize),
        expected: usize,
    },
    #[error("first affinor must be the identity")]
    FirstNotIdentity,
    #[error("rank {n} must be below the dimension {m}")]
    RankNotBelowDimension { n: usize, m: usize },
    #[error("affinors are linearly dependent (rank {rank} of {n})")]
    Dependent { rank: usize, n: usize },
    #[error("invalid basis document: {0}")]
    Parse(String),
    #[error("{0}")]
    Mode(String),
    #[error("vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}
