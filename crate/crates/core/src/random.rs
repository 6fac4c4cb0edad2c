//! Random states and channels for property tests and benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::channel::KrausChannel;
use crate::density::DensityMatrix;
use crate::matrix::ComplexMatrix;

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Full-rank random density matrix `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, dim);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr).hermitian_part()).expect("Wishart matrix is a state")
}

/// Haar-ish random pure state.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    DensityMatrix::pure(&ginibre(rng, dim, 1)).expect("nonzero Gaussian vector")
}

/// Random Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ginibre(rng, dim, dim).hermitian_part()
}

/// Random channel with `rank` Kraus operators, cut from a random isometry.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> KrausChannel {
    let g: DMatrix<Complex64> = ginibre(rng, dim * rank, dim).into_dmatrix();
    let q = g.qr().q();
    let operators = (0..rank)
        .map(|k| ComplexMatrix::from_dmatrix(q.rows(k * dim, dim).into_owned()))
        .collect();
    KrausChannel::new(operators).expect("isometry blocks are trace preserving")
}

/// Random mixed-unitary (hence unital) channel with `terms` unitaries.
pub fn random_unital_channel<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    terms: usize,
) -> KrausChannel {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let operators = weights
        .iter()
        .map(|w| {
            let u = random_channel(rng, dim, 1).operators()[0].clone();
            u.scale_real((w / total).sqrt())
        })
        .collect();
    KrausChannel::new(operators).expect("convex mixture of unitaries")
}
