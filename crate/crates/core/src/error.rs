use thiserror::Error;

use crate::protocol::Stage;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: shape mismatch, {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("invalid subsystem layout: {0}")]
    InvalidLayout(String),

    #[error("matrix is not Hermitian (max |m - m†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("density matrix trace is {re} + {im}i, expected 1")]
    NotNormalized { re: f64, im: f64 },

    #[error("Kraus operators violate trace preservation: ||Σ K†K - I||_max = {deviation:e}")]
    NotTracePreserving { deviation: f64 },

    #[error("map is not completely positive (dynamical matrix eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("reliability r = {0} outside [0, 1]")]
    ReliabilityOutOfRange(f64),

    #[error("stage mismatch: expected {expected}, found {found}")]
    StageMismatch { expected: Stage, found: Stage },

    #[error("ill-formed eavesdropper action: {0}")]
    InvalidEveAction(String),

    #[error("conditioning on {event} with probability {probability:e}")]
    ZeroProbability {
        event: &'static str,
        probability: f64,
    },

    #[error("eigendecomposition did not converge")]
    EigenConvergence,
}
