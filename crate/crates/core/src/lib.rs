//! Density-operator analysis of the ping-pong quantum direct communication
//! protocol over noisy channels.
//!
//! The crate is organized bottom-up:
//!
//! * [`matrix`]: dense complex matrices, Kronecker products, partial traces,
//!   row-wise vectorization and Hermitian spectral routines.
//! * [`channel`]: Kraus lists, supermatrices, dynamical matrices and the
//!   conversions among them, plus subsystem extension of a channel.
//! * [`protocol`]: stage-by-stage evolution of the protocol state.
//! * [`discrimination`]: QBER and QLOSS from Bob's pair of candidate states.

pub mod channel;
pub mod density;
pub mod discrimination;
pub mod error;
pub mod matrix;
pub mod protocol;
pub mod random;

pub use channel::{
    apply_kraus, depolarize_composite, dynamical_to_kraus, extend_channel, kraus_to_supermatrix,
    reshuffle_matrix, supermatrix_to_dynamical, DynamicalMatrix, KrausChannel, NoiseModel,
    Supermatrix,
};
pub use density::DensityMatrix;
pub use discrimination::{
    fidelity, min_error_probability, trace_distance, unambiguous_failure, DiscriminationResult,
};
pub use error::{Error, Result};
pub use matrix::{
    hermitian_eig, kron, partial_trace, psd_sqrt, res, trace_norm, unres, ComplexMatrix,
    HermitianEigen, SubsystemLayout, DEFAULT_TOL,
};
pub use num_complex::Complex64;
pub use protocol::{
    bob_states, control_mode_error, encode, eve_intervene, eve_measured_state, eve_states,
    forward_leg, initial_state, initial_state_with_eve, return_leg, ConditionalState, EncodingBit,
    EveAction, ProtocolState, Stage,
};
