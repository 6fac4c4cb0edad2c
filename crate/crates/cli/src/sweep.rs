use std::path::PathBuf;

use pingpong_core::{
    bob_states, control_mode_error, encode, eve_intervene, forward_leg, initial_state, return_leg,
    DiscriminationResult, EncodingBit, EveAction, KrausChannel, NoiseModel,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::emit::OutputFormat;
use crate::error::CliError;
use crate::grid::Grid;

/// One-parameter family of single-qubit channels indexed by reliability `r`.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelFamily {
    Identity,
    Depolarizing,
    /// `ρ ↦ r ρ + (1 - r) N(ρ)` for a user-supplied channel `N`.
    Custom(KrausChannel),
}

impl ChannelFamily {
    pub fn noise_at(&self, r: f64) -> Result<NoiseModel, CliError> {
        Ok(match self {
            ChannelFamily::Identity => NoiseModel::Identity,
            ChannelFamily::Depolarizing => NoiseModel::depolarizing(r)?,
            ChannelFamily::Custom(base) => {
                NoiseModel::Custom(KrausChannel::reliability_mixture(r, base)?)
            }
        })
    }

    /// Inverse of `P_EC(r)`, where the family has one.
    pub fn reliability_from_control_error(&self, p_ec: f64) -> Option<f64> {
        match self {
            ChannelFamily::Depolarizing => Some((1.0 - 2.0 * p_ec).clamp(0.0, 1.0)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub channel: ChannelFamily,
    pub grid: Grid,
    /// `None` writes to stdout.
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl SweepConfig {
    pub fn new(channel: ChannelFamily) -> Self {
        Self {
            channel,
            grid: Grid::default(),
            output_path: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.grid.validate()?;
        if let ChannelFamily::Custom(ch) = &self.channel {
            if ch.dim() != 2 {
                return Err(CliError::Config(format!(
                    "custom channel acts on dimension {}, the signal is a qubit",
                    ch.dim()
                )));
            }
        }
        if matches!(self.grid, Grid::ControlError(_))
            && self.channel.reliability_from_control_error(0.0).is_none()
        {
            return Err(CliError::Config(
                "P_EC grids need a channel with an invertible P_EC(r), i.e. depolarizing".into(),
            ));
        }
        Ok(())
    }

    /// Reliability for each grid point, in grid order.
    pub fn reliabilities(&self) -> Result<Vec<f64>, CliError> {
        self.validate()?;
        Ok(match &self.grid {
            Grid::Reliability(v) => v.clone(),
            Grid::ControlError(v) => v
                .iter()
                .map(|&p| {
                    self.channel
                        .reliability_from_control_error(p)
                        .expect("checked by validate")
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub p_ec: f64,
    pub qber: f64,
    pub qloss: f64,
}

/// Runs the full protocol pipeline for one noise model with Eve passive.
pub fn evaluate_point(r: f64, noise: &NoiseModel) -> Result<SweepRow, CliError> {
    let s0 = initial_state(None)?;
    let s1 = forward_leg(&s0, noise)?;
    let s2 = eve_intervene(&s1, &EveAction::Absent)?;
    let p_ec = control_mode_error(&s2)?;
    let received = EncodingBit::BOTH
        .iter()
        .map(|&mu| return_leg(&encode(&s2, mu)?, noise))
        .collect::<Result<Vec<_>, _>>()?;
    let (rho0, rho1) = bob_states(&received[0], &received[1])?;
    let merit = DiscriminationResult::evaluate(&rho0, &rho1)?;
    Ok(SweepRow {
        r,
        p_ec,
        qber: merit.qber,
        qloss: merit.qloss,
    })
}

/// Evaluates every grid point; rows come back in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    let rs = cfg.reliabilities()?;
    rs.par_iter()
        .map(|&r| evaluate_point(r, &cfg.channel.noise_at(r)?))
        .collect()
}
