//! Parameter sweeps of the ping-pong security figures (`P_EC`, QBER, QLOSS)
//! over a family of noisy channels, and the file formats they use.

pub mod emit;
pub mod error;
pub mod grid;
pub mod spec;
pub mod sweep;

pub use emit::{emit, format_sig, render, OutputFormat};
pub use error::CliError;
pub use grid::Grid;
pub use spec::{load_channel_spec, parse_channel_spec, ChannelSpec};
pub use sweep::{evaluate_point, run_sweep, ChannelFamily, SweepConfig, SweepRow};
