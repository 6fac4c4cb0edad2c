//! Two-state discrimination figures of merit, equal priors throughout.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::{psd_sqrt, trace_norm};

/// Figures of merit for Bob's pair of candidate states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminationResult {
    /// Minimum-error (Helstrom) decoding failure probability.
    pub qber: f64,
    /// Inconclusive-outcome probability of unambiguous discrimination.
    pub qloss: f64,
    /// `‖ρ₀ - ρ₁‖₁`, in `[0, 2]`.
    pub trace_distance: f64,
    /// Square-root fidelity `tr √(√ρ₀ ρ₁ √ρ₀)`.
    pub fidelity: f64,
}

impl DiscriminationResult {
    pub fn evaluate(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<Self> {
        let trace_distance = trace_distance(rho0, rho1)?;
        let fidelity = fidelity(rho0, rho1)?;
        Ok(Self {
            qber: helstrom(trace_distance),
            qloss: fidelity,
            trace_distance,
            fidelity,
        })
    }
}

fn check_dims(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<()> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::ShapeMismatch {
            op: "discrimination",
            left: rho0.shape(),
            right: rho1.shape(),
        });
    }
    Ok(())
}

/// Trace norm of the difference (no factor ½).
pub fn trace_distance(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    check_dims(rho0, rho1)?;
    Ok(trace_norm(&(&**rho0 - &**rho1)).clamp(0.0, 2.0))
}

/// Square-root fidelity, computed as `‖√ρ₀ √ρ₁‖₁` so that only one square
/// root is taken per state.
pub fn fidelity(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    check_dims(rho0, rho1)?;
    let s0 = psd_sqrt(rho0)?;
    let s1 = psd_sqrt(rho1)?;
    Ok(trace_norm(&(&s0 * &s1)).clamp(0.0, 1.0))
}

fn helstrom(trace_distance: f64) -> f64 {
    (0.5 * (1.0 - 0.5 * trace_distance)).clamp(0.0, 0.5)
}

/// Helstrom minimum-error probability `½(1 - ½‖ρ₀ - ρ₁‖₁)`.
pub fn min_error_probability(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    Ok(helstrom(trace_distance(rho0, rho1)?))
}

/// Failure probability of optimal unambiguous discrimination, taken as the
/// fidelity of the pair.
pub fn unambiguous_failure(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    fidelity(rho0, rho1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;

    fn ket(i: usize) -> DensityMatrix {
        DensityMatrix::pure(&ComplexMatrix::basis_ket(2, i)).unwrap()
    }

    /// Bob's received pair under depolarizing noise on both legs.
    fn received_pair(r: f64) -> (DensityMatrix, DensityMatrix) {
        let s = r * r;
        let make = |sign: f64| {
            let (p, q, c) = ((1.0 + s) / 4.0, (1.0 - s) / 4.0, sign * s / 2.0);
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[
                &[p, 0.0, 0.0, c],
                &[0.0, q, 0.0, 0.0],
                &[0.0, 0.0, q, 0.0],
                &[c, 0.0, 0.0, p],
            ]))
            .unwrap()
        };
        (make(1.0), make(-1.0))
    }

    #[test]
    fn identical_and_orthogonal() {
        let a = ket(0);
        let b = ket(1);
        assert!(trace_distance(&a, &a).unwrap().abs() < 1e-15);
        assert!((trace_distance(&a, &b).unwrap() - 2.0).abs() < 1e-15);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&a, &b).unwrap().abs() < 1e-15);
        assert!((min_error_probability(&a, &a).unwrap() - 0.5).abs() < 1e-15);
        assert!(min_error_probability(&a, &b).unwrap().abs() < 1e-15);
        assert!(unambiguous_failure(&a, &b).unwrap().abs() < 1e-15);
        assert!((unambiguous_failure(&a, &a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn received_pair_at_point_eight() {
        let (r0, r1) = received_pair(0.8);
        // 2r² = 1.28
        assert!((trace_distance(&r0, &r1).unwrap() - 1.28).abs() < 1e-12);
        assert!((min_error_probability(&r0, &r1).unwrap() - 0.18).abs() < 1e-12);
        let expected = 0.18 + 0.5 * (0.36f64 * 2.92).sqrt();
        assert!((fidelity(&r0, &r1).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.69264).abs() < 1e-5);
    }

    #[test]
    fn received_pair_at_zero_is_indistinguishable() {
        let (r0, r1) = received_pair(0.0);
        assert!((unambiguous_failure(&r0, &r1).unwrap() - 1.0).abs() < 1e-12);
        assert!((min_error_probability(&r0, &r1).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn result_invariants() {
        let (r0, r1) = received_pair(0.5);
        let res = DiscriminationResult::evaluate(&r0, &r1).unwrap();
        assert_eq!(res.qloss, res.fidelity);
        assert!((res.qber - (1.0 - res.trace_distance / 2.0) / 2.0).abs() < 1e-15);
        assert!((res.trace_distance - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let a = ket(0);
        let b = DensityMatrix::maximally_mixed(4);
        assert!(trace_distance(&a, &b).is_err());
        assert!(fidelity(&a, &b).is_err());
    }
}
