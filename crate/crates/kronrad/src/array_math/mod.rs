//! Array-domain primitives: steering vectors, Kronecker products, and the
//! orthogonal/regularized projections every detector is built from.
//!
//! A uniform linear array with spatial frequency `f` (cycles per element)
//! responds with the steering vector `a(f) = [1, e^{-j2πf}, …,
//! e^{-j2πf(L-1)}]`. Decoded MIMO snapshots factor as Kronecker products of
//! transmit and receive steering vectors, so interference suppression
//! reduces to projections acting on the receive factor:
//!
//! * [`proj`]/[`proj_perp`] — exact orthogonal projection onto (or away
//!   from) the span of known interference directions;
//! * [`reg_proj`] — the power-weighted soft projection
//!   `P̃ = M·Ã(Λ^{-1} + M·Ã^H Ã)^{-1}Ã^H`, which interpolates between "no
//!   suppression" (λ → 0) and the hard projection (λ → ∞) as the
//!   interference-to-noise ratios λ_q grow.

pub mod dense;

use crate::error::{Error, Result};
use crate::scalar::{cis, RadarScalar, C};
use crate::Tolerances;
use dense::CMat;
use num_complex::Complex;

// ───────────────────────── steering vectors ─────────────────────────

/// Steering vector of a uniform linear array: unit-modulus phase ramp at a
/// fixed spatial frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector<T: RadarScalar> {
    spatial_freq: T,
    entries: Vec<C<T>>,
}

impl<T: RadarScalar> SteeringVector<T> {
    /// Number of array elements.
    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True for a zero-element vector (never produced by [`steering`]).
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Spatial frequency in cycles per element.
    #[inline]
    pub fn freq(&self) -> T {
        self.spatial_freq
    }

    /// Entries as a slice.
    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.entries
    }

    /// Consumes the vector into its entries.
    pub fn into_vec(self) -> Vec<C<T>> {
        self.entries
    }
}

impl<T: RadarScalar> std::ops::Deref for SteeringVector<T> {
    type Target = [C<T>];
    #[inline]
    fn deref(&self) -> &[C<T>] {
        &self.entries
    }
}

/// Builds the steering vector `a(f)[i] = e^{-j2πf·i}` for `i = 0..len`.
///
/// `‖a(f)‖² = len` for every `f`; the phase convention matches the decoded
/// snapshot model, so matched filtering uses plain inner products.
///
/// # Errors
///
/// [`Error::InvalidDimension`] when `len == 0`.
pub fn steering<T: RadarScalar>(len: usize, spatial_freq: T) -> Result<SteeringVector<T>> {
    if len == 0 {
        return Err(Error::InvalidDimension(
            "steering: array length must be positive".into(),
        ));
    }
    let entries = (0..len)
        .map(|i| cis(-T::TAU() * spatial_freq * T::idx(i)))
        .collect();
    Ok(SteeringVector {
        spatial_freq,
        entries,
    })
}

/// Kronecker product of two vectors: `(a ⊗ b)[i·len(b) + j] = a_i · b_j`.
///
/// With `a` a transmit steering vector and `b` a receive steering vector,
/// this is exactly the virtual-array response in transmit-major order.
pub fn kron<T: RadarScalar>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &ai in a {
        for &bj in b {
            out.push(ai * bj);
        }
    }
    out
}

// ───────────────────────── orthogonal projections ─────────────────────────

/// Orthogonal projection matrix `P = H(H^H H)^{-1}H^H` (or its complement),
/// kept as an explicit dense matrix.
///
/// Idempotent and Hermitian by construction; every eigenvalue is 0 or 1 up
/// to round-off.
#[derive(Debug, Clone)]
pub struct ProjectionMatrix<T: RadarScalar> {
    mat: CMat<T>,
}

impl<T: RadarScalar> ProjectionMatrix<T> {
    /// The projection as a dense matrix.
    #[inline]
    pub fn mat(&self) -> &CMat<T> {
        &self.mat
    }

    /// Ambient dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Applies the projection to a vector.
    pub fn apply(&self, x: &[C<T>]) -> Vec<C<T>> {
        self.mat.mul_vec(x)
    }

    /// Real quadratic form `x^H P x`, evaluated as `‖Px‖²` — identical for
    /// an idempotent Hermitian `P`, nonnegative by construction, and with
    /// full cancellation accuracy for `x` near the null space.
    pub fn quad(&self, x: &[C<T>]) -> T {
        dense::norm2(&self.apply(x))
    }
}

/// Projection onto the column span of `basis` with default tolerances.
///
/// # Errors
///
/// * [`Error::InvalidDimension`] for an empty basis.
/// * [`Error::DimensionMismatch`] when there are more columns than rows.
/// * [`Error::SingularSubspace`] when the columns are numerically
///   rank-deficient; the error carries the condition estimate.
pub fn proj<T: RadarScalar>(basis: &CMat<T>) -> Result<ProjectionMatrix<T>> {
    proj_with(basis, &Tolerances::default())
}

/// [`proj`] with caller-specified tolerances.
pub fn proj_with<T: RadarScalar>(
    basis: &CMat<T>,
    tol: &Tolerances,
) -> Result<ProjectionMatrix<T>> {
    let (n, q) = (basis.rows(), basis.cols());
    if n == 0 || q == 0 {
        return Err(Error::InvalidDimension(
            "proj: basis must have at least one row and column".into(),
        ));
    }
    if q > n {
        return Err(Error::DimensionMismatch(format!(
            "proj: {q} columns cannot be independent in dimension {n}"
        )));
    }
    // Rank guard on the singular values before inverting the Gram matrix.
    let sv = basis.singular_values()?;
    let (s_max, s_min) = (sv[0], sv[q - 1]);
    if s_min <= T::lit(tol.rank_rel) * s_max {
        let cond = if s_min > T::zero() {
            (s_max / s_min).as_f64()
        } else {
            f64::INFINITY
        };
        return Err(Error::SingularSubspace { cond });
    }
    let gram = basis.hermitian().matmul(basis);
    let chol = gram.cholesky(tol.pivot_rel).map_err(|_| {
        Error::SingularSubspace {
            cond: (s_max / s_min.max(T::min_positive_value())).as_f64(),
        }
    })?;
    let p = basis.matmul(&chol.inverse()).matmul(&basis.hermitian());
    Ok(ProjectionMatrix { mat: p })
}

/// Complementary projection `P^⊥ = I - P` away from the span of `basis`.
///
/// Shares the error behaviour of [`proj`].
pub fn proj_perp<T: RadarScalar>(basis: &CMat<T>) -> Result<ProjectionMatrix<T>> {
    proj_perp_with(basis, &Tolerances::default())
}

/// [`proj_perp`] with caller-specified tolerances.
pub fn proj_perp_with<T: RadarScalar>(
    basis: &CMat<T>,
    tol: &Tolerances,
) -> Result<ProjectionMatrix<T>> {
    let p = proj_with(basis, tol)?;
    let mat = CMat::identity(p.dim()).sub(p.mat());
    Ok(ProjectionMatrix { mat })
}

// ───────────────────────── regularized projection ─────────────────────────

/// The soft interference projection `P̃` together with the regularization
/// weights it was built from.
///
/// `P̃` is Hermitian positive semidefinite with `0 ⪯ P̃ ⪯ P_Ã`: its
/// eigenvalues lie in `[0, 1]`, approaching the hard projection `P_Ã` as
/// every weight grows and the zero matrix as they vanish.
#[derive(Debug, Clone)]
pub struct RegularizedProjection<T: RadarScalar> {
    mat: CMat<T>,
    lambdas: Vec<T>,
}

impl<T: RadarScalar> RegularizedProjection<T> {
    /// The projection as a dense matrix.
    #[inline]
    pub fn mat(&self) -> &CMat<T> {
        &self.mat
    }

    /// Ambient dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Regularization weights (one per interference direction).
    #[inline]
    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    /// Applies `P̃` to a vector.
    pub fn apply(&self, x: &[C<T>]) -> Vec<C<T>> {
        self.mat.mul_vec(x)
    }

    /// Applies the complement `(I - P̃)` to a vector.
    pub fn apply_perp(&self, x: &[C<T>]) -> Vec<C<T>> {
        let px = self.apply(x);
        x.iter().zip(px).map(|(&xi, pi)| xi - pi).collect()
    }

    /// Real quadratic form `x^H (I - P̃) x`, clamped at zero.
    pub fn perp_quad(&self, x: &[C<T>]) -> T {
        let quad = dense::inner(x, &self.apply(x)).re;
        (dense::norm2(x) - quad).max(T::zero())
    }
}

/// Builds the regularized projection
/// `P̃ = M·Ã(Λ^{-1} + M·Ã^H Ã)^{-1}Ã^H` for receive directions `Ã`
/// (columns of `rx_dirs`), weights `Λ = diag(lambdas)`, and transmit array
/// size `m`.
///
/// Directions with zero weight drop out exactly. Internally the
/// push-through form `M·W(I + M·W^H W)^{-1}W^H` with `W = Ã·Λ^{1/2}` is
/// factored instead of the literal formula: it is algebraically identical
/// for positive weights, handles zero weights without special-casing, and
/// keeps the factorization well-conditioned for wildly mixed weight scales.
///
/// # Errors
///
/// * [`Error::DimensionMismatch`] when `lambdas` and the columns disagree.
/// * [`Error::InvalidParameter`] for `m == 0` or a negative/non-finite
///   weight.
/// * [`Error::OverDeterminedInterference`] when there are more directions
///   than receive elements.
pub fn reg_proj<T: RadarScalar>(
    rx_dirs: &CMat<T>,
    lambdas: &[T],
    m: usize,
) -> Result<RegularizedProjection<T>> {
    let (n, q) = (rx_dirs.rows(), rx_dirs.cols());
    if n == 0 {
        return Err(Error::InvalidDimension(
            "reg_proj: receive dimension must be positive".into(),
        ));
    }
    if q != lambdas.len() {
        return Err(Error::DimensionMismatch(format!(
            "reg_proj: {} directions but {} weights",
            q,
            lambdas.len()
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter(
            "reg_proj: transmit array size must be positive".into(),
        ));
    }
    if q > n {
        return Err(Error::OverDeterminedInterference { q, n });
    }
    for (i, &l) in lambdas.iter().enumerate() {
        if !(l >= T::zero()) || !l.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reg_proj: weight {i} must be finite and non-negative, got {l}"
            )));
        }
    }
    let mt = T::idx(m);
    if q == 0 || lambdas.iter().all(|&l| l == T::zero()) {
        return Ok(RegularizedProjection {
            mat: CMat::zeros(n, n),
            lambdas: lambdas.to_vec(),
        });
    }
    // W = Ã·Λ^{1/2}; S = I + M·W^H W; P̃ = M·W S^{-1} W^H.
    let w = CMat::from_fn(n, q, |i, j| {
        rx_dirs[(i, j)] * Complex::new(lambdas[j].sqrt(), T::zero())
    });
    let s = CMat::identity(q).add(
        &w.hermitian()
            .matmul(&w)
            .scale(Complex::new(mt, T::zero())),
    );
    let chol = s
        .cholesky(Tolerances::default().pivot_rel)
        .map_err(|e| match e {
            Error::NotPositiveDefinite(msg) => Error::NotPositiveDefinite(format!(
                "reg_proj: regularized Gram factorization failed: {msg}"
            )),
            other => other,
        })?;
    let mat = w
        .matmul(&chol.inverse())
        .matmul(&w.hermitian())
        .scale(Complex::new(mt, T::zero()));
    Ok(RegularizedProjection {
        mat,
        lambdas: lambdas.to_vec(),
    })
}
