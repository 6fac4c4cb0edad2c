//! Density-operator evolution of the ping-pong protocol.
//!
//! Bob holds qubit `B` of the pair `|φ⁺⟩ = (|00⟩ + |11⟩)/√2` and sends qubit
//! `A` to Alice. An eavesdropper may hold an ancilla `E`. The stages are
//!
//! 0. prepared pair (and Eve's pure ancilla),
//! 1. after channel noise on the forward leg,
//! 2. after Eve's action, where Alice either measures (control mode) or
//! 3. encodes a bit with `Z_A^μ` (message mode),
//! 4. after channel noise on the return leg.
//!
//! Eve sits next to Alice: on the forward leg she acts on the qubit already
//! affected by noise. Every operation checks the stage tag of its input.

use std::fmt;

use crate::channel::{KrausChannel, NoiseModel};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::{
    cr, gates, kron, kron_all, partial_trace, ComplexMatrix, SubsystemLayout, DEFAULT_TOL,
};

pub const LABEL_B: &str = "B";
pub const LABEL_A: &str = "A";
pub const LABEL_E: &str = "E";

/// Default dimension of Eve's ancilla.
pub const DEFAULT_EVE_DIM: usize = 2;

/// Outcomes rarer than this cannot be conditioned on.
pub const MIN_CONDITIONING_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Prepared = 0,
    ForwardNoise = 1,
    AtAlice = 2,
    Encoded = 3,
    Received = 4,
}

impl Stage {
    pub fn index(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Prepared => "prepared",
            Stage::ForwardNoise => "forward noise",
            Stage::AtAlice => "at Alice",
            Stage::Encoded => "encoded",
            Stage::Received => "received",
        };
        write!(f, "stage {} ({name})", self.index())
    }
}

/// Message bit `μ`; Alice applies `Z_A^μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncodingBit {
    Zero,
    One,
}

impl EncodingBit {
    pub const BOTH: [EncodingBit; 2] = [EncodingBit::Zero, EncodingBit::One];

    pub fn value(self) -> u8 {
        match self {
            EncodingBit::Zero => 0,
            EncodingBit::One => 1,
        }
    }
}

impl TryFrom<u8> for EncodingBit {
    type Error = Error;

    fn try_from(mu: u8) -> Result<Self> {
        match mu {
            0 => Ok(EncodingBit::Zero),
            1 => Ok(EncodingBit::One),
            _ => Err(Error::InvalidShape(format!(
                "encoding bit must be 0 or 1, got {mu}"
            ))),
        }
    }
}

impl From<bool> for EncodingBit {
    fn from(bit: bool) -> Self {
        if bit {
            EncodingBit::One
        } else {
            EncodingBit::Zero
        }
    }
}

/// What Eve does to the forward-travelling qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum EveAction {
    Absent,
    /// Channel on `A ⊗ E`; identity on `B`.
    Entangle(KrausChannel),
    /// Projective measurement of `E` with the outcome discarded.
    Measure(Vec<ComplexMatrix>),
}

impl EveAction {
    fn validate(&self, layout: &SubsystemLayout) -> Result<()> {
        let eve_dim = layout.dim_of(LABEL_E);
        match self {
            EveAction::Absent => Ok(()),
            EveAction::Entangle(ch) => {
                let e = eve_dim.ok_or_else(|| {
                    Error::InvalidEveAction("entangling attack needs an E subsystem".into())
                })?;
                let a = layout.dim_of(LABEL_A).unwrap_or(1);
                if ch.dim() != a * e {
                    return Err(Error::InvalidEveAction(format!(
                        "entangling channel has dimension {}, A⊗E has {}",
                        ch.dim(),
                        a * e
                    )));
                }
                Ok(())
            }
            EveAction::Measure(projectors) => validate_projectors(projectors, eve_dim.unwrap_or(1)),
        }
    }
}

/// Checks `Σ M = I` and `M_a M_b = δ_ab M_a`.
pub fn validate_projectors(projectors: &[ComplexMatrix], dim: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::InvalidEveAction("empty projector set".into()));
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for (a, pa) in projectors.iter().enumerate() {
        if pa.shape() != (dim, dim) {
            return Err(Error::InvalidEveAction(format!(
                "projector {a} is {}x{}, E has dimension {dim}",
                pa.rows(),
                pa.cols()
            )));
        }
        if !pa.is_hermitian(DEFAULT_TOL) {
            return Err(Error::InvalidEveAction(format!(
                "projector {a} is not Hermitian"
            )));
        }
        for (b, pb) in projectors.iter().enumerate() {
            let expected = if a == b {
                pa.clone()
            } else {
                ComplexMatrix::zeros(dim, dim)
            };
            if !(pa * pb).approx_eq(&expected, DEFAULT_TOL) {
                return Err(Error::InvalidEveAction(format!(
                    "projectors {a} and {b} are not orthogonal idempotents"
                )));
            }
        }
        sum = &sum + pa;
    }
    if !sum.approx_eq(&ComplexMatrix::identity(dim), DEFAULT_TOL) {
        return Err(Error::InvalidEveAction(
            "projectors do not sum to identity".into(),
        ));
    }
    Ok(())
}

/// Computational-basis projectors `{|k⟩⟨k|}` on a `dim`-level system.
pub fn computational_projectors(dim: usize) -> Vec<ComplexMatrix> {
    (0..dim)
        .map(|k| ComplexMatrix::projector(&ComplexMatrix::basis_ket(dim, k)))
        .collect()
}

/// Joint state of `B`, `A` and optionally `E` at a given protocol stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolState {
    rho: DensityMatrix,
    layout: SubsystemLayout,
    stage: Stage,
}

impl ProtocolState {
    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn has_eve(&self) -> bool {
        self.layout.contains(LABEL_E)
    }

    /// Dimension of `E`, 1 when Eve has no system.
    pub fn eve_dim(&self) -> usize {
        self.layout.dim_of(LABEL_E).unwrap_or(1)
    }

    /// Reduced state over the listed labels.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityMatrix> {
        DensityMatrix::new(partial_trace(&self.rho, &self.layout, keep)?)
    }

    fn expect_stage(&self, expected: Stage) -> Result<()> {
        if self.stage != expected {
            return Err(Error::StageMismatch {
                expected,
                found: self.stage,
            });
        }
        Ok(())
    }

    fn advance(&self, rho: ComplexMatrix, stage: Stage) -> Result<Self> {
        Ok(Self {
            rho: DensityMatrix::new(rho)?,
            layout: self.layout.clone(),
            stage,
        })
    }

    /// `I_B ⊗ op_A ⊗ I_E`.
    fn on_a(&self, op: &ComplexMatrix) -> ComplexMatrix {
        kron_all([
            &ComplexMatrix::identity(2),
            op,
            &ComplexMatrix::identity(self.eve_dim()),
        ])
    }

    /// `I_BA ⊗ op_E`.
    fn on_e(&self, op: &ComplexMatrix) -> ComplexMatrix {
        kron(&ComplexMatrix::identity(4), op)
    }
}

fn bell_phi_plus() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::column(&[cr(h), cr(0.0), cr(0.0), cr(h)])
}

/// Stage-0 state; with `Some(d)`, Eve holds a `d`-level ancilla in `|0⟩`.
pub fn initial_state(eve_dim: Option<usize>) -> Result<ProtocolState> {
    match eve_dim {
        None => {
            let layout = SubsystemLayout::new([(LABEL_B, 2), (LABEL_A, 2)])?;
            Ok(ProtocolState {
                rho: DensityMatrix::pure(&bell_phi_plus())?,
                layout,
                stage: Stage::Prepared,
            })
        }
        Some(0) => Err(Error::InvalidLayout(
            "Eve's system needs dimension ≥ 1".into(),
        )),
        Some(d) => initial_state_with_eve(&ComplexMatrix::basis_ket(d, 0)),
    }
}

/// Stage-0 state `|φ⁺⟩⟨φ⁺| ⊗ |χ⟩⟨χ|` for an arbitrary (normalized on entry)
/// ancilla ket `|χ⟩`.
pub fn initial_state_with_eve(chi: &ComplexMatrix) -> Result<ProtocolState> {
    let chi_rho = DensityMatrix::pure(chi)?;
    let layout = SubsystemLayout::new([(LABEL_B, 2), (LABEL_A, 2), (LABEL_E, chi.rows())])?;
    let rho = kron(&ComplexMatrix::projector(&bell_phi_plus()), &chi_rho);
    Ok(ProtocolState {
        rho: DensityMatrix::new(rho)?,
        layout,
        stage: Stage::Prepared,
    })
}

/// `(I_B ⊗ N_A) ⊗ I_E`, with the `B ⊗ A` Kraus set recovered from the
/// extended supermatrix.
fn apply_noise(s: &ProtocolState, noise: &NoiseModel, next: Stage) -> Result<ProtocolState> {
    noise.validate()?;
    if noise.dim() != 2 {
        return Err(Error::InvalidShape(format!(
            "noise acts on a {}-level system, signal is a qubit",
            noise.dim()
        )));
    }
    let channel = noise.extended_kraus(2)?.lift(1, s.eve_dim());
    s.advance(channel.apply_matrix(&s.rho)?, next)
}

pub fn forward_leg(s: &ProtocolState, noise: &NoiseModel) -> Result<ProtocolState> {
    s.expect_stage(Stage::Prepared)?;
    apply_noise(s, noise, Stage::ForwardNoise)
}

pub fn eve_intervene(s: &ProtocolState, action: &EveAction) -> Result<ProtocolState> {
    s.expect_stage(Stage::ForwardNoise)?;
    action.validate(&s.layout)?;
    let rho = match action {
        EveAction::Absent => s.rho.matrix().clone(),
        EveAction::Entangle(ch) => ch.lift(2, 1).apply_matrix(&s.rho)?,
        EveAction::Measure(projectors) => projectors
            .iter()
            .map(|m| s.on_e(m))
            .fold(ComplexMatrix::zeros(s.rho.dim(), s.rho.dim()), |acc, m| {
                &acc + &(&(&m * &s.rho) * &m)
            }),
    };
    s.advance(rho, Stage::AtAlice)
}

/// Probability that Alice's and Bob's computational-basis outcomes
/// disagree in control mode.
pub fn control_mode_error(s: &ProtocolState) -> Result<f64> {
    s.expect_stage(Stage::AtAlice)?;
    let dim_rest = 2 * s.eve_dim();
    let mut p_ec = 0.0;
    for x in 0..2 {
        let proj = ComplexMatrix::projector(&ComplexMatrix::basis_ket(2, x));
        let m_a = s.on_a(&proj);
        let p_a = (&*s.rho * &m_a).trace().re;
        if p_a < MIN_CONDITIONING_PROBABILITY {
            return Err(Error::ZeroProbability {
                event: "Alice's control-mode outcome",
                probability: p_a,
            });
        }
        let sigma = (&(&m_a * &s.rho) * &m_a).scale_real(1.0 / p_a);
        let y = 1 - x;
        let proj_b = ComplexMatrix::projector(&ComplexMatrix::basis_ket(2, y));
        let m_b = kron(&proj_b, &ComplexMatrix::identity(dim_rest));
        let p_b_given_a = (&sigma * &m_b).trace().re;
        p_ec += p_b_given_a * p_a;
    }
    Ok(p_ec)
}

pub fn encode(s: &ProtocolState, mu: EncodingBit) -> Result<ProtocolState> {
    s.expect_stage(Stage::AtAlice)?;
    let rho = match mu {
        EncodingBit::Zero => s.rho.matrix().clone(),
        EncodingBit::One => s.rho.conjugate_by(&s.on_a(&gates::pauli_z())),
    };
    s.advance(rho, Stage::Encoded)
}

pub fn return_leg(s: &ProtocolState, noise: &NoiseModel) -> Result<ProtocolState> {
    s.expect_stage(Stage::Encoded)?;
    apply_noise(s, noise, Stage::Received)
}

fn expect_pair(s0: &ProtocolState, s1: &ProtocolState, stage: Stage) -> Result<()> {
    s0.expect_stage(stage)?;
    s1.expect_stage(stage)?;
    if s0.layout != s1.layout {
        return Err(Error::InvalidLayout(format!(
            "state pair layouts differ: {} vs {}",
            s0.layout, s1.layout
        )));
    }
    Ok(())
}

/// The two `B ⊗ A` states Bob must tell apart.
pub fn bob_states(
    s0: &ProtocolState,
    s1: &ProtocolState,
) -> Result<(DensityMatrix, DensityMatrix)> {
    expect_pair(s0, s1, Stage::Received)?;
    let keep = [LABEL_B, LABEL_A];
    Ok((s0.reduced(&keep)?, s1.reduced(&keep)?))
}

/// The two states accessible to Eve after encoding: `tr_B` of each, over
/// `A ⊗ E` or just `A` when Eve holds no system.
pub fn eve_states(
    s0: &ProtocolState,
    s1: &ProtocolState,
) -> Result<(DensityMatrix, DensityMatrix)> {
    expect_pair(s0, s1, Stage::Encoded)?;
    let keep: &[&str] = if s0.has_eve() {
        &[LABEL_A, LABEL_E]
    } else {
        &[LABEL_A]
    };
    Ok((s0.reduced(keep)?, s1.reduced(keep)?))
}

/// Bob's state conditioned on one outcome of a measurement Eve makes on
/// her ancilla after Alice's encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalState {
    pub probability: f64,
    pub rho: DensityMatrix,
}

/// `tr_E (N ⊗ I_E)(M_α ρ M_α / tr(ρ M_α))` for a stage-3 state.
///
/// Without an `E` factor the ancilla is one-dimensional and the only valid
/// projector set is `{[1]}`.
pub fn eve_measured_state(
    s3: &ProtocolState,
    projectors: &[ComplexMatrix],
    alpha: usize,
    noise: &NoiseModel,
) -> Result<ConditionalState> {
    s3.expect_stage(Stage::Encoded)?;
    validate_projectors(projectors, s3.eve_dim())?;
    let m = projectors.get(alpha).ok_or_else(|| {
        Error::InvalidEveAction(format!(
            "outcome {alpha} out of range for {} projectors",
            projectors.len()
        ))
    })?;
    let m = s3.on_e(m);
    let probability = (&*s3.rho * &m).trace().re;
    if probability < MIN_CONDITIONING_PROBABILITY {
        return Err(Error::ZeroProbability {
            event: "Eve's measurement outcome",
            probability,
        });
    }
    let collapsed = s3.advance(
        (&(&m * &s3.rho) * &m).scale_real(1.0 / probability),
        Stage::Encoded,
    )?;
    let received = return_leg(&collapsed, noise)?;
    Ok(ConditionalState {
        probability,
        rho: received.reduced(&[LABEL_B, LABEL_A])?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::trace_norm;

    fn cnot_eve() -> EveAction {
        EveAction::Entangle(KrausChannel::unitary(gates::cnot()).unwrap())
    }

    fn bell_bitflip_closed_form(r: f64, sign: f64) -> ComplexMatrix {
        let (p, q) = ((1.0 + r) / 4.0, (1.0 - r) / 4.0);
        let c = sign * r / 2.0;
        ComplexMatrix::from_real_rows(&[
            &[p, 0.0, 0.0, c],
            &[0.0, q, 0.0, 0.0],
            &[0.0, 0.0, q, 0.0],
            &[c, 0.0, 0.0, p],
        ])
    }

    #[test]
    fn initial_states() {
        let s = initial_state(None).unwrap();
        assert_eq!(s.stage(), Stage::Prepared);
        assert!((s.rho().get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((s.rho().get(0, 3).re - 0.5).abs() < 1e-15);
        assert!((s.rho().get(3, 3).re - 0.5).abs() < 1e-15);

        let se = initial_state(Some(2)).unwrap();
        assert_eq!(se.rho().dim(), 8);
        assert!((se.rho().trace().re - 1.0).abs() < 1e-15);
        assert!(se
            .reduced(&[LABEL_B, LABEL_A])
            .unwrap()
            .approx_eq(s.rho(), 1e-15));
        assert!(initial_state(Some(0)).is_err());
    }

    #[test]
    fn forward_leg_examples() {
        let s = initial_state(None).unwrap();
        let s1 = forward_leg(&s, &NoiseModel::Identity).unwrap();
        assert_eq!(s1.stage(), Stage::ForwardNoise);
        assert!(s1.rho().approx_eq(s.rho(), 1e-14));

        let r = 0.6;
        let s1 = forward_leg(&s, &NoiseModel::depolarizing(r).unwrap()).unwrap();
        assert!(s1.rho().approx_eq(&bell_bitflip_closed_form(r, 1.0), 1e-14));

        let se = initial_state(Some(2)).unwrap();
        let s1 = forward_leg(&se, &NoiseModel::depolarizing(0.0).unwrap()).unwrap();
        let e0 = ComplexMatrix::projector(&ComplexMatrix::basis_ket(2, 0));
        let expected = kron(&ComplexMatrix::identity(4).scale_real(0.25), &e0);
        assert!(s1.rho().approx_eq(&expected, 1e-14));
    }

    #[test]
    fn stage_enforcement() {
        let s = initial_state(None).unwrap();
        assert_eq!(
            encode(&s, EncodingBit::One),
            Err(Error::StageMismatch {
                expected: Stage::AtAlice,
                found: Stage::Prepared
            })
        );
        assert!(control_mode_error(&s).is_err());
        assert!(return_leg(&s, &NoiseModel::Identity).is_err());
        assert!(eve_intervene(&s, &EveAction::Absent).is_err());
        let s1 = forward_leg(&s, &NoiseModel::Identity).unwrap();
        assert!(forward_leg(&s1, &NoiseModel::Identity).is_err());
        assert!(bob_states(&s1, &s1).is_err());
        assert!(eve_states(&s1, &s1).is_err());
    }

    #[test]
    fn eve_actions() {
        let s1 = forward_leg(&initial_state(Some(2)).unwrap(), &NoiseModel::Identity).unwrap();
        let s2 = eve_intervene(&s1, &EveAction::Absent).unwrap();
        assert_eq!(s2.stage(), Stage::AtAlice);
        assert!(s2.rho().approx_eq(s1.rho(), 0.0));

        let id = EveAction::Entangle(KrausChannel::identity(4));
        assert!(eve_intervene(&s1, &id)
            .unwrap()
            .rho()
            .approx_eq(s1.rho(), 1e-15));

        // CNOT(A→E) on |φ⁺⟩|0⟩ gives (|000⟩ + |111⟩)/√2
        let ghz = eve_intervene(&s1, &cnot_eve()).unwrap();
        let expected = ComplexMatrix::from_fn(8, 8, |i, j| {
            if (i == 0 || i == 7) && (j == 0 || j == 7) {
                cr(0.5)
            } else {
                cr(0.0)
            }
        });
        assert!(ghz.rho().approx_eq(&expected, 1e-15));
    }

    #[test]
    fn ill_formed_eve_actions() {
        let s1 = forward_leg(&initial_state(None).unwrap(), &NoiseModel::Identity).unwrap();
        assert!(matches!(
            eve_intervene(&s1, &cnot_eve()),
            Err(Error::InvalidEveAction(_))
        ));
        let se1 = forward_leg(&initial_state(Some(3)).unwrap(), &NoiseModel::Identity).unwrap();
        assert!(eve_intervene(&se1, &cnot_eve()).is_err());
        let incomplete = EveAction::Measure(vec![computational_projectors(3)[0].clone()]);
        assert!(eve_intervene(&se1, &incomplete).is_err());
        let overlapping = EveAction::Measure(vec![
            ComplexMatrix::identity(3),
            computational_projectors(3)[0].clone(),
        ]);
        assert!(eve_intervene(&se1, &overlapping).is_err());
    }

    #[test]
    fn eve_nonselective_measurement_dephases_ancilla() {
        let s1 = forward_leg(&initial_state(Some(2)).unwrap(), &NoiseModel::Identity).unwrap();
        let ghz = eve_intervene(&s1, &cnot_eve()).unwrap();
        // rebuild a stage-1 state from the GHZ matrix to apply a measurement
        let s1_ghz = s1
            .advance(ghz.rho().matrix().clone(), Stage::ForwardNoise)
            .unwrap();
        let measured =
            eve_intervene(&s1_ghz, &EveAction::Measure(computational_projectors(2))).unwrap();
        assert!(measured.rho().get(0, 7).norm() < 1e-15);
        assert!((measured.rho().get(0, 0).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn control_mode_examples() {
        let run = |noise: NoiseModel| {
            let s1 = forward_leg(&initial_state(None).unwrap(), &noise).unwrap();
            control_mode_error(&eve_intervene(&s1, &EveAction::Absent).unwrap()).unwrap()
        };
        assert!(run(NoiseModel::Identity).abs() < 1e-15);
        assert!((run(NoiseModel::depolarizing(0.8).unwrap()) - 0.1).abs() < 1e-14);
        assert!((run(NoiseModel::depolarizing(0.0).unwrap()) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn control_mode_zero_probability_is_an_error() {
        // Eve's entangling channel resets A to |0⟩ by swapping it into E.
        let swap = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        let s1 = forward_leg(&initial_state(Some(2)).unwrap(), &NoiseModel::Identity).unwrap();
        let s2 = eve_intervene(
            &s1,
            &EveAction::Entangle(KrausChannel::unitary(swap).unwrap()),
        )
        .unwrap();
        assert!(matches!(
            control_mode_error(&s2),
            Err(Error::ZeroProbability { .. })
        ));
    }

    #[test]
    fn encode_examples() {
        let r = 0.4;
        let s1 = forward_leg(
            &initial_state(None).unwrap(),
            &NoiseModel::depolarizing(r).unwrap(),
        )
        .unwrap();
        let s2 = eve_intervene(&s1, &EveAction::Absent).unwrap();
        let e0 = encode(&s2, EncodingBit::Zero).unwrap();
        assert!(e0.rho().approx_eq(s2.rho(), 0.0));
        let e1 = encode(&s2, EncodingBit::One).unwrap();
        assert!(e1
            .rho()
            .approx_eq(&bell_bitflip_closed_form(r, -1.0), 1e-14));
        // Z² = I
        let back = s2
            .advance(e1.rho().matrix().clone(), Stage::AtAlice)
            .unwrap();
        let twice = encode(&back, EncodingBit::One).unwrap();
        assert!(twice.rho().approx_eq(s2.rho(), 1e-15));
        assert!(EncodingBit::try_from(2).is_err());
        assert_eq!(EncodingBit::try_from(1).unwrap(), EncodingBit::One);
    }

    fn received(noise: &NoiseModel, eve: Option<usize>, mu: EncodingBit) -> ProtocolState {
        let s1 = forward_leg(&initial_state(eve).unwrap(), noise).unwrap();
        let s2 = eve_intervene(&s1, &EveAction::Absent).unwrap();
        return_leg(&encode(&s2, mu).unwrap(), noise).unwrap()
    }

    #[test]
    fn return_leg_examples() {
        let r: f64 = 0.6;
        let noise = NoiseModel::depolarizing(r).unwrap();
        for (mu, sign) in [(EncodingBit::Zero, 1.0), (EncodingBit::One, -1.0)] {
            let s4 = received(&noise, None, mu);
            assert_eq!(s4.stage(), Stage::Received);
            assert!(s4
                .rho()
                .approx_eq(&bell_bitflip_closed_form(r * r, sign), 1e-14));
        }
        let pure = received(
            &NoiseModel::depolarizing(1.0).unwrap(),
            None,
            EncodingBit::One,
        );
        assert!(pure
            .rho()
            .approx_eq(&bell_bitflip_closed_form(1.0, -1.0), 1e-14));
    }

    #[test]
    fn bob_states_with_inert_eve_match_no_eve() {
        let noise = NoiseModel::depolarizing(0.6).unwrap();
        let plain = bob_states(
            &received(&noise, None, EncodingBit::Zero),
            &received(&noise, None, EncodingBit::One),
        )
        .unwrap();
        let with_e = bob_states(
            &received(&noise, Some(2), EncodingBit::Zero),
            &received(&noise, Some(2), EncodingBit::One),
        )
        .unwrap();
        assert!(plain.0.approx_eq(&with_e.0, 1e-14));
        assert!(plain.1.approx_eq(&with_e.1, 1e-14));
        let mixed = bob_states(
            &received(&noise, None, EncodingBit::Zero),
            &received(&noise, Some(2), EncodingBit::One),
        );
        assert!(mixed.is_err());
    }

    #[test]
    fn eve_states_passive_and_entangling() {
        let noise = NoiseModel::depolarizing(0.3).unwrap();
        let s1 = forward_leg(&initial_state(None).unwrap(), &noise).unwrap();
        let s2 = eve_intervene(&s1, &EveAction::Absent).unwrap();
        let (a0, a1) = eve_states(
            &encode(&s2, EncodingBit::Zero).unwrap(),
            &encode(&s2, EncodingBit::One).unwrap(),
        )
        .unwrap();
        let half = DensityMatrix::maximally_mixed(2);
        assert!(a0.approx_eq(&half, 1e-14) && a1.approx_eq(&half, 1e-14));

        // CNOT controlled by A leaves tr_B blind to the phase
        let s1 = forward_leg(&initial_state(Some(2)).unwrap(), &NoiseModel::Identity).unwrap();
        let s2 = eve_intervene(&s1, &cnot_eve()).unwrap();
        let (ae0, ae1) = eve_pair(&s2);
        assert_eq!(ae0.dim(), 4);
        assert!(trace_norm(&(&*ae0 - &*ae1)) < 1e-14);

        // CNOT controlled by an ancilla in |+⟩ makes the two encodings orthogonal
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::column(&[cr(h), cr(h)]);
        let e_controls_a = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
        ]);
        let attack = EveAction::Entangle(KrausChannel::unitary(e_controls_a).unwrap());
        let s1 = forward_leg(
            &initial_state_with_eve(&plus).unwrap(),
            &NoiseModel::Identity,
        )
        .unwrap();
        let s2 = eve_intervene(&s1, &attack).unwrap();
        let (ae0, ae1) = eve_pair(&s2);
        assert!((trace_norm(&(&*ae0 - &*ae1)) - 2.0).abs() < 1e-12);
    }

    fn eve_pair(s2: &ProtocolState) -> (DensityMatrix, DensityMatrix) {
        eve_states(
            &encode(s2, EncodingBit::Zero).unwrap(),
            &encode(s2, EncodingBit::One).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn eve_measured_state_examples() {
        // no ancilla: the trivial projector reproduces the plain run
        let noise = NoiseModel::depolarizing(0.5).unwrap();
        let s1 = forward_leg(&initial_state(None).unwrap(), &noise).unwrap();
        let s3 = encode(
            &eve_intervene(&s1, &EveAction::Absent).unwrap(),
            EncodingBit::One,
        )
        .unwrap();
        let trivial = [ComplexMatrix::identity(1)];
        let cond = eve_measured_state(&s3, &trivial, 0, &noise).unwrap();
        assert!((cond.probability - 1.0).abs() < 1e-15);
        let plain = return_leg(&s3, &noise).unwrap();
        assert!(cond.rho.approx_eq(plain.rho(), 1e-14));

        // CNOT-entangled ancilla collapses BA onto |00⟩ or |11⟩
        let s1 = forward_leg(&initial_state(Some(2)).unwrap(), &NoiseModel::Identity).unwrap();
        let s3 = encode(&eve_intervene(&s1, &cnot_eve()).unwrap(), EncodingBit::Zero).unwrap();
        let projectors = computational_projectors(2);
        for alpha in 0..2 {
            let cond = eve_measured_state(&s3, &projectors, alpha, &NoiseModel::Identity).unwrap();
            assert!((cond.probability - 0.5).abs() < 1e-14);
            let ket = ComplexMatrix::basis_ket(4, 3 * alpha);
            assert!(cond.rho.approx_eq(&ComplexMatrix::projector(&ket), 1e-14));
        }
        assert!(eve_measured_state(&s3, &projectors, 2, &NoiseModel::Identity).is_err());
    }

    #[test]
    fn eve_measured_state_zero_probability() {
        let s1 = forward_leg(&initial_state(Some(2)).unwrap(), &NoiseModel::Identity).unwrap();
        let s3 = encode(
            &eve_intervene(&s1, &EveAction::Absent).unwrap(),
            EncodingBit::Zero,
        )
        .unwrap();
        // ancilla is |0⟩, so outcome 1 never happens
        let err = eve_measured_state(&s3, &computational_projectors(2), 1, &NoiseModel::Identity);
        assert!(matches!(err, Err(Error::ZeroProbability { .. })));
    }
}
