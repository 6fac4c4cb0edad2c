//! Quantum channel representations and the conversions among them.
//!
//! A channel is stored as a Kraus list `{K_k}` acting as `ρ ↦ Σ K ρ K†`.
//! Its supermatrix acts on row-wise vectorized states, so with `res` from
//! [`crate::matrix`] we have `res(K ρ K†) = (K ⊗ K*) res(ρ)` and the
//! supermatrix of the channel is `Σ K ⊗ K*`. The dynamical (Choi) matrix is
//! the index reshuffle `D[(i,k),(j,l)] = M[(i,j),(k,l)]`, which equals
//! `Σ res(K) res(K)†` and is therefore Hermitian PSD for every CP map.

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::{
    cr, gates, hermitian_eig_tol, kron, kron_all, partial_trace, res, unres, ComplexMatrix,
    SubsystemLayout, DEFAULT_TOL,
};

/// Kraus operators whose dynamical-matrix eigenvalue falls at or below this
/// are dropped during recovery.
pub const KRAUS_DROP_TOL: f64 = 1e-12;

/// Completely positive trace-preserving map as an operator-sum list.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    dim: usize,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(operators, DEFAULT_TOL)
    }

    /// Validates shape consistency and `Σ K†K = I` within `tol`.
    pub fn with_tolerance(operators: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidShape("empty Kraus operator list".into()))?;
        let dim = first.rows();
        for op in &operators {
            if op.shape() != (dim, dim) {
                return Err(Error::ShapeMismatch {
                    op: "KrausChannel::new",
                    left: op.shape(),
                    right: (dim, dim),
                });
            }
        }
        let channel = Self { operators, dim };
        let deviation = channel.completeness_deviation();
        if deviation.is_nan() || deviation > tol {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(channel)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(dim)],
            dim,
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Single-qubit depolarizing channel with reliability `r`:
    /// `ρ ↦ r ρ + (1 - r)/4 Σ_k σ_k ρ σ_k`.
    pub fn depolarizing(r: f64) -> Result<Self> {
        check_reliability(r)?;
        let [id, x, y, z] = gates::paulis();
        let keep = ((1.0 + 3.0 * r) / 4.0).sqrt();
        let flip = ((1.0 - r) / 4.0).sqrt();
        Ok(Self {
            operators: vec![
                id.scale_real(keep),
                x.scale_real(flip),
                y.scale_real(flip),
                z.scale_real(flip),
            ],
            dim: 2,
        })
    }

    /// `ρ ↦ r ρ + (1 - r) base(ρ)`.
    pub fn reliability_mixture(r: f64, base: &KrausChannel) -> Result<Self> {
        check_reliability(r)?;
        let mut operators = Vec::with_capacity(base.len() + 1);
        operators.push(ComplexMatrix::identity(base.dim).scale_real(r.sqrt()));
        let w = (1.0 - r).sqrt();
        operators.extend(base.operators.iter().map(|k| k.scale_real(w)));
        Ok(Self {
            operators,
            dim: base.dim,
        })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `max |Σ K†K - I|` over entries.
    pub fn completeness_deviation(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
                &acc + &(&k.adjoint() * k)
            });
        (&sum - &ComplexMatrix::identity(self.dim)).max_abs()
    }

    /// Whether `Σ K K† = I` within `tol` (the map fixes `I`).
    pub fn is_unital(&self, tol: f64) -> bool {
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
                &acc + &(k * &k.adjoint())
            });
        sum.approx_eq(&ComplexMatrix::identity(self.dim), tol)
    }

    /// `Σ K m K†` for any square matrix of matching dimension.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.shape() != (self.dim, self.dim) {
            return Err(Error::ShapeMismatch {
                op: "apply_kraus",
                left: m.shape(),
                right: (self.dim, self.dim),
            });
        }
        Ok(self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
                &acc + &m.conjugate_by(k)
            }))
    }

    /// `I_left ⊗ K ⊗ I_right` for every operator.
    pub fn lift(&self, left_dim: usize, right_dim: usize) -> KrausChannel {
        let left = ComplexMatrix::identity(left_dim);
        let right = ComplexMatrix::identity(right_dim);
        KrausChannel {
            operators: self
                .operators
                .iter()
                .map(|k| kron_all([&left, k, &right]))
                .collect(),
            dim: left_dim * self.dim * right_dim,
        }
    }

    pub fn supermatrix(&self) -> Supermatrix {
        kraus_to_supermatrix(self)
    }

    /// Action equivalence: equal supermatrices within `tol`.
    pub fn same_action(&self, other: &KrausChannel, tol: f64) -> bool {
        self.dim == other.dim && self.supermatrix().approx_eq(&other.supermatrix(), tol)
    }
}

/// `Σ K ρ K†`, validated as a density matrix.
pub fn apply_kraus(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(ch.apply_matrix(rho)?)
}

/// Channel matrix acting on row-wise vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Supermatrix {
    m: ComplexMatrix,
    dim: usize,
}

/// Returns `d` such that `n == d * d`.
fn exact_sqrt(n: usize) -> Option<usize> {
    let d = (n as f64).sqrt().round() as usize;
    (d * d == n).then_some(d)
}

fn block_dim(m: &ComplexMatrix, what: &str) -> Result<usize> {
    let (r, c) = m.shape();
    match exact_sqrt(r) {
        Some(d) if r == c && d > 0 => Ok(d),
        _ => Err(Error::InvalidShape(format!(
            "{what} must be d²×d², got {r}x{c}"
        ))),
    }
}

impl Supermatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let dim = block_dim(&m, "supermatrix")?;
        Ok(Self { m, dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(dim * dim),
            dim,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `unres(M res(ρ))`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.dim, self.dim) {
            return Err(Error::ShapeMismatch {
                op: "Supermatrix::apply",
                left: rho.shape(),
                right: (self.dim, self.dim),
            });
        }
        unres(&(&self.m * &res(rho)), self.dim, self.dim)
    }

    pub fn approx_eq(&self, other: &Supermatrix, tol: f64) -> bool {
        self.dim == other.dim && self.m.approx_eq(&other.m, tol)
    }
}

/// `Σ K ⊗ K*`, so that `res(Σ K ρ K†) = M res(ρ)` under row-wise `res`.
pub fn kraus_to_supermatrix(ch: &KrausChannel) -> Supermatrix {
    let n = ch.dim * ch.dim;
    let m = ch
        .operators
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, k| {
            &acc + &kron(k, &k.conjugate())
        });
    Supermatrix { m, dim: ch.dim }
}

/// Dynamical (Choi) matrix of a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalMatrix {
    d: ComplexMatrix,
    dim: usize,
}

impl DynamicalMatrix {
    pub fn new(d: ComplexMatrix) -> Result<Self> {
        let dim = block_dim(&d, "dynamical matrix")?;
        Ok(Self { d, dim })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        self.d.trace()
    }

    pub fn to_supermatrix(&self) -> Supermatrix {
        Supermatrix {
            m: reshuffle(&self.d, self.dim),
            dim: self.dim,
        }
    }

    /// `tr_out D`: the identity exactly when the channel is trace preserving.
    pub fn input_marginal(&self) -> ComplexMatrix {
        let layout =
            SubsystemLayout::new([("out", self.dim), ("in", self.dim)]).expect("positive dims");
        partial_trace(&self.d, &layout, &["in"]).expect("shape checked at construction")
    }
}

/// `X[(i,k),(j,l)] = Y[(i,j),(k,l)]`; an involution.
fn reshuffle(m: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let n = d * d;
    ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, k) = (row / d, row % d);
        let (j, l) = (col / d, col % d);
        m.get(i * d + j, k * d + l)
    })
}

pub fn supermatrix_to_dynamical(sm: &Supermatrix) -> DynamicalMatrix {
    DynamicalMatrix {
        d: reshuffle(&sm.m, sm.dim),
        dim: sm.dim,
    }
}

/// Recovers a canonical Kraus list from the spectrum of the dynamical
/// matrix: `K_i = √λ_i unres(v_i)`, by descending `λ_i`, with eigenvalues
/// at or below [`KRAUS_DROP_TOL`] dropped.
pub fn dynamical_to_kraus(dm: &DynamicalMatrix) -> Result<KrausChannel> {
    let eig = hermitian_eig_tol(&dm.d, DEFAULT_TOL)?;
    let min_eigenvalue = eig.eigenvalues[0];
    if min_eigenvalue < -DEFAULT_TOL {
        return Err(Error::NotCompletelyPositive { min_eigenvalue });
    }
    let mut operators = Vec::new();
    for k in (0..eig.eigenvalues.len()).rev() {
        let lambda = eig.eigenvalues[k];
        if lambda <= KRAUS_DROP_TOL {
            break;
        }
        let v = eig.eigenvector(k).scale_real(lambda.sqrt());
        operators.push(unres(&v, dm.dim, dm.dim)?);
    }
    if operators.is_empty() {
        return Err(Error::NotTracePreserving { deviation: 1.0 });
    }
    KrausChannel::new(operators)
}

/// Permutation taking the row-wise vectorization of an operator on
/// `B ⊗ A` (indices `(b, a, b', a')`) to the product ordering
/// `(b, b', a, a')` of `res(X_B) ⊗ res(X_A)`.
///
/// For `dim_b == dim_a` it is symmetric and self-inverse.
pub fn reshuffle_matrix(dim_b: usize, dim_a: usize) -> ComplexMatrix {
    let n = (dim_b * dim_a).pow(2);
    let mut p = ComplexMatrix::zeros(n, n);
    for b in 0..dim_b {
        for a in 0..dim_a {
            for b2 in 0..dim_b {
                for a2 in 0..dim_a {
                    let composite = ((b * dim_a + a) * dim_b + b2) * dim_a + a2;
                    let product = ((b * dim_b + b2) * dim_a + a) * dim_a + a2;
                    p.set(product, composite, cr(1.0));
                }
            }
        }
    }
    p
}

/// Supermatrix of `N_B ⊗ N_A` on the composite system:
/// `M_Rᵀ (M_B ⊗ M_A) M_R`, which is `M_R (M_B ⊗ M_A) M_R` for equal dims.
pub fn extend_channel(ch_b: &Supermatrix, ch_a: &Supermatrix) -> Supermatrix {
    let p = reshuffle_matrix(ch_b.dim, ch_a.dim);
    let product = kron(&ch_b.m, &ch_a.m);
    Supermatrix {
        m: &(&p.transpose() * &product) * &p,
        dim: ch_b.dim * ch_a.dim,
    }
}

/// `(I_B ⊗ N_A) ρ = r ρ + (1 - r)/2 tr_A(ρ) ⊗ I_A` for a two-qubit `ρ_BA`
/// under depolarizing noise on `A`.
pub fn depolarize_composite(rho: &DensityMatrix, r: f64) -> Result<DensityMatrix> {
    check_reliability(r)?;
    if rho.shape() != (4, 4) {
        return Err(Error::ShapeMismatch {
            op: "depolarize_composite",
            left: rho.shape(),
            right: (4, 4),
        });
    }
    let layout = SubsystemLayout::new([("B", 2), ("A", 2)])?;
    let rho_b = partial_trace(rho, &layout, &["B"])?;
    let mixed = kron(&rho_b, &ComplexMatrix::identity(2)).scale_real((1.0 - r) / 2.0);
    DensityMatrix::new(&rho.scale_real(r) + &mixed)
}

fn check_reliability(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::ReliabilityOutOfRange(r))
    }
}

/// Noise acting on the travelling qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    Identity,
    Depolarizing { r: f64 },
    Custom(KrausChannel),
}

impl NoiseModel {
    pub fn depolarizing(r: f64) -> Result<Self> {
        check_reliability(r)?;
        Ok(Self::Depolarizing { r })
    }

    /// Rejects out-of-range parameters on variants built directly.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Depolarizing { r } => check_reliability(*r),
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Identity | Self::Depolarizing { .. } => 2,
            Self::Custom(ch) => ch.dim(),
        }
    }

    pub fn kraus(&self) -> Result<KrausChannel> {
        match self {
            Self::Identity => Ok(KrausChannel::identity(2)),
            Self::Depolarizing { r } => KrausChannel::depolarizing(*r),
            Self::Custom(ch) => Ok(ch.clone()),
        }
    }

    pub fn supermatrix(&self) -> Result<Supermatrix> {
        Ok(self.kraus()?.supermatrix())
    }

    /// Kraus list of `I_B ⊗ N` on `B ⊗ A`, derived from the extended
    /// supermatrix through its dynamical matrix.
    pub fn extended_kraus(&self, dim_b: usize) -> Result<KrausChannel> {
        let extended = extend_channel(&Supermatrix::identity(dim_b), &self.supermatrix()?);
        dynamical_to_kraus(&supermatrix_to_dynamical(&extended))
    }
}
