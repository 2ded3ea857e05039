//! Interference and noise statistics: the perturbed-covariance model used
//! by synthetic experiments and the adaptive per-bin estimators that
//! recover `σ²`, `h_q²`, and the transmit covariances from object-free
//! training bins.
//!
//! # Perturbation model
//!
//! Synthetic experiments draw the interference transmit factor from
//! `𝒞𝒩(0, σ̃²_q R̃_{t,q})` with the exponential-correlation covariance
//! `R̃_{t,q} = [ρ_q^{|i-j|}]`. To mimic covariance estimation error, the
//! matrix handed to the covariance-dependent detectors is perturbed
//! entrywise:
//!
//! ```text
//! R̃_{t,q,est} = σ̃²_q R̃_{t,q} ⊙ (1 1ᴴ + E),
//! ```
//!
//! with `E` real symmetric and its upper triangle (diagonal included)
//! i.i.d. `N(0, σ²_pert)`; `⊙` is the Hadamard product. The full
//! normalized interference-plus-noise covariance follows as
//!
//! ```text
//! R̃_est = Σ_q R̃_{t,q,est}/σ² ⊗ (ã_{r,q} ã_{r,q}ᴴ) + I_MN,
//! ```
//!
//! and the essential-interference power along the object transmit
//! direction as `h²_{q,est} = a_tᴴ R̃_{t,q,est} a_t / ‖a_t‖⁴`.
//!
//! # Adaptive estimation
//!
//! At an object-free bin the decoded snapshot is
//! `y = Σ_q ã′_{t,q} ⊗ ã_{r,q} + z`. With `Ã_r` the `N×Q` matrix of
//! interference receive directions and `P^⊥` the projector onto its null
//! space, per bin:
//!
//! ```text
//! σ̂²       = ‖(I_M ⊗ P^⊥) y‖² / (M(N−Q))
//! â′_{t,q} = (I_M ⊗ (Ã_r b_q)ᴴ) y,   b_q = q-th column of (Ã_rᴴÃ_r)⁻¹
//! b̂_q      = a_tᴴ â′_{t,q} / ‖a_t‖²
//! ```
//!
//! and across a set of training bins the estimates are averaged:
//! `σ̂²` and `|b̂_q|²` arithmetically (the latter giving `ĥ_q²`), and
//! `R̂_{t,q}` as the mean of the outer products `â′_{t,q} â′ᴴ_{t,q}`.
//! The outer-product average retains the estimation-noise bias — no
//! subtraction is applied, which is a documented property of the
//! estimator, not an accident.

use crate::array_math::dense::{inner, norm2, CMat};
use crate::array_math::{proj_perp, SteeringVector};
use crate::detectors::InterferenceSideInfo;
use crate::error::{Error, Result};
use crate::scalar::{czero, RadarScalar, C};
use crate::signal_chain::{RangeDopplerCube, Snapshot};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

// ───────────────────────── perturbation model ─────────────────────────

/// Exponential-correlation matrix `[ρ^{|i-j|}]` of size `m×m`.
///
/// # Errors
///
/// [`Error::InvalidParameter`] unless `|ρ| < 1` and `m ≥ 1`.
pub fn exp_corr_matrix<T: RadarScalar>(m: usize, rho: T) -> Result<CMat<T>> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "correlation matrix needs at least one dimension".into(),
        ));
    }
    if !(rho.abs() < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "exponential correlation needs |rho| < 1, got {rho}"
        )));
    }
    Ok(CMat::from_fn(m, m, |i, j| {
        Complex::new(rho.powi((i as i32 - j as i32).abs()), T::zero())
    }))
}

/// Per-interferer transmit-covariance description plus the perturbation
/// variance used to mimic covariance estimation error.
#[derive(Debug, Clone)]
pub struct PerturbationModel<T: RadarScalar> {
    /// Exponential correlation coefficient per interferer, `|ρ_q| < 1`.
    pub rho: Vec<T>,
    /// Interference power `σ̃²_q` per interferer.
    pub sigma_tilde2: Vec<T>,
    /// Variance of the symmetric entrywise perturbation.
    pub sigma2_pert: T,
    /// Base seed for reproducible perturbation draws.
    pub seed: u64,
}

impl<T: RadarScalar> PerturbationModel<T> {
    /// Validates the model invariants.
    ///
    /// # Errors
    ///
    /// [`Error::DimensionMismatch`] when the per-interferer vectors differ
    /// in length; [`Error::InvalidParameter`] for `|ρ_q| ≥ 1` or negative
    /// variances.
    pub fn validate(&self) -> Result<()> {
        if self.rho.len() != self.sigma_tilde2.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} correlation coefficients vs {} interference powers",
                self.rho.len(),
                self.sigma_tilde2.len()
            )));
        }
        for (q, &r) in self.rho.iter().enumerate() {
            if !r.is_finite() || !(r.abs() < T::one()) {
                return Err(Error::InvalidParameter(format!(
                    "interferer {q}: |rho| must be < 1, got {r}"
                )));
            }
        }
        for (q, &s) in self.sigma_tilde2.iter().enumerate() {
            if !s.is_finite() || !(s >= T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "interferer {q}: power must be >= 0, got {s}"
                )));
            }
        }
        if !self.sigma2_pert.is_finite() || !(self.sigma2_pert >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "perturbation variance must be >= 0, got {}",
                self.sigma2_pert
            )));
        }
        Ok(())
    }

    /// Number of interferers described.
    #[inline]
    #[must_use]
    pub fn q(&self) -> usize {
        self.rho.len()
    }

    /// The unperturbed power-carrying transmit covariance
    /// `σ̃²_q [ρ_q^{|i-j|}]` for interferer `q` on an `m`-element array.
    ///
    /// # Errors
    ///
    /// Model validation errors, or `q` out of range.
    pub fn tx_cov(&self, q: usize, m: usize) -> Result<CMat<T>> {
        self.validate()?;
        if q >= self.q() {
            return Err(Error::InvalidParameter(format!(
                "interferer index {q} out of range (Q = {})",
                self.q()
            )));
        }
        Ok(exp_corr_matrix(m, self.rho[q])?
            .scale(Complex::new(self.sigma_tilde2[q], T::zero())))
    }

    /// A reproducible perturbed covariance draw for interferer `q`, trial
    /// `trial`: seeds a dedicated counter stream so distinct `(trial, q)`
    /// pairs (with `q < 2¹⁶`) never share randomness and any draw can be
    /// regenerated independently of evaluation order.
    ///
    /// # Errors
    ///
    /// As for [`PerturbationModel::tx_cov`].
    pub fn sample_perturbed(&self, q: usize, m: usize, trial: u64) -> Result<CMat<T>>
    where
        StandardNormal: Distribution<T>,
    {
        let base = self.tx_cov(q, m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial.wrapping_mul(1 << 16).wrapping_add(q as u64));
        perturb_cov(&base, T::one(), self.sigma2_pert, &mut rng)
    }
}

/// Entrywise-perturbed covariance `σ̃²·R ⊙ (1 1ᴴ + E)` with `E` real
/// symmetric, upper triangle (diagonal included) i.i.d. `N(0, σ²_pert)`.
///
/// The output stays Hermitian because a Hermitian matrix multiplied
/// entrywise by a real symmetric one is Hermitian.
///
/// # Errors
///
/// [`Error::InvalidDimension`] for a non-square `R`;
/// [`Error::InvalidParameter`] for a non-Hermitian `R` or negative
/// `σ̃²`/`σ²_pert`.
pub fn perturb_cov<T, R>(
    r_t: &CMat<T>,
    sigma_tilde2: T,
    sigma2_pert: T,
    rng: &mut R,
) -> Result<CMat<T>>
where
    T: RadarScalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let m = r_t.rows();
    if r_t.cols() != m {
        return Err(Error::InvalidDimension(format!(
            "covariance must be square, got {}x{}",
            m,
            r_t.cols()
        )));
    }
    if !r_t.is_hermitian(T::lit(1e-9)) {
        return Err(Error::InvalidParameter(
            "covariance to perturb must be Hermitian".into(),
        ));
    }
    if !(sigma_tilde2 >= T::zero()) || !(sigma2_pert >= T::zero()) {
        return Err(Error::InvalidParameter(
            "perturbation needs non-negative variances".into(),
        ));
    }
    let sd = sigma2_pert.sqrt();
    let mut e = vec![T::zero(); m * m];
    for i in 0..m {
        for j in i..m {
            let v: T = StandardNormal.sample(rng);
            let v = v * sd;
            e[i * m + j] = v;
            e[j * m + i] = v;
        }
    }
    let s = Complex::new(sigma_tilde2, T::zero());
    Ok(CMat::from_fn(m, m, |i, j| {
        r_t[(i, j)] * s * Complex::new(T::one() + e[i * m + j], T::zero())
    }))
}

/// Normalized interference-plus-noise covariance
/// `Σ_q R_q/σ² ⊗ (ã_{r,q} ã_{r,q}ᴴ) + I_MN` from power-carrying
/// per-interferer transmit covariances `R_q` (perturbed or estimated) and
/// the `N×Q` receive-direction matrix.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] when the matrix count differs from `Q` or
/// the `R_q` sizes disagree; [`Error::InvalidDimension`] for an empty
/// list (the transmit dimension would be unknown);
/// [`Error::InvalidParameter`] for a non-positive `σ²`.
pub fn build_rtilde_est<T: RadarScalar>(
    r_t_q: &[CMat<T>],
    rx_dirs: &CMat<T>,
    sigma2: T,
) -> Result<CMat<T>> {
    if r_t_q.is_empty() {
        return Err(Error::InvalidDimension(
            "need at least one transmit covariance to size the output".into(),
        ));
    }
    if r_t_q.len() != rx_dirs.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} transmit covariances vs {} receive directions",
            r_t_q.len(),
            rx_dirs.cols()
        )));
    }
    if !(sigma2 > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be positive, got {sigma2}"
        )));
    }
    let m = r_t_q[0].rows();
    for (q, r) in r_t_q.iter().enumerate() {
        if r.rows() != m || r.cols() != m {
            return Err(Error::DimensionMismatch(format!(
                "transmit covariance {q} is {}x{}, expected {m}x{m}",
                r.rows(),
                r.cols()
            )));
        }
    }
    let n = rx_dirs.rows();
    let inv_s = Complex::new(T::one() / sigma2, T::zero());
    let mut out = CMat::identity(m * n);
    for (q, r) in r_t_q.iter().enumerate() {
        let dir = rx_dirs.col(q);
        let rx_outer = CMat::outer(&dir, &dir);
        out = out.add(&r.scale(inv_s).kron(&rx_outer));
    }
    Ok(out)
}

/// Essential-interference power along the object transmit direction:
/// `a_tᴴ R a_t / ‖a_t‖⁴`, clamped at zero against roundoff.
///
/// # Errors
///
/// [`Error::InvalidDimension`]/[`Error::DimensionMismatch`] for a
/// non-square `R` or a size mismatch with `a_t`.
pub fn h2_from_cov<T: RadarScalar>(r_t_est: &CMat<T>, a_t: &SteeringVector<T>) -> Result<T> {
    let m = a_t.len();
    if r_t_est.rows() != r_t_est.cols() {
        return Err(Error::InvalidDimension(format!(
            "covariance must be square, got {}x{}",
            r_t_est.rows(),
            r_t_est.cols()
        )));
    }
    if r_t_est.rows() != m {
        return Err(Error::DimensionMismatch(format!(
            "covariance is {}x{} but the steering vector has {m} elements",
            r_t_est.rows(),
            r_t_est.cols()
        )));
    }
    let ra = r_t_est.mul_vec(a_t.as_slice());
    let quad = inner(a_t.as_slice(), &ra).re;
    let n2 = norm2(a_t.as_slice());
    Ok((quad / (n2 * n2)).max(T::zero()))
}

// ───────────────────────── per-bin estimation ─────────────────────────

/// Raw estimates from a single object-free training bin.
#[derive(Debug, Clone)]
pub struct BinEstimate<T: RadarScalar> {
    /// Noise power estimate `σ̂²`.
    pub sigma2_hat: T,
    /// Estimated interference transmit factors `â′_{t,q}`, one `M`-vector
    /// per interferer.
    pub a_t_hat: Vec<Vec<C<T>>>,
    /// Essential amplitudes `b̂_q = a_tᴴ â′_{t,q} / ‖a_t‖²`.
    pub b_hat: Vec<C<T>>,
}

/// Estimates noise power, interference transmit factors, and essential
/// amplitudes from one decoded object-free snapshot.
///
/// `rx_dirs` is the `N×Q` matrix of interference receive directions. The
/// noise estimate divides by `M(N−Q)` — the dimension of the subspace the
/// projected snapshot lives in — which makes it unbiased for
/// `y ~ 𝒞𝒩(·, σ² I)`.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] when `y` is not `M·N` long;
/// [`Error::InvalidParameter`] when `Q > N−1` (no noise subspace is
/// left); a rank-deficient `rx_dirs` surfaces as the factorization error
/// of its Gram matrix.
pub fn estimate_bin_stats<T: RadarScalar>(
    y: &Snapshot<T>,
    a_t: &SteeringVector<T>,
    rx_dirs: &CMat<T>,
) -> Result<BinEstimate<T>> {
    let m = a_t.len();
    let n = rx_dirs.rows();
    let q_count = rx_dirs.cols();
    if y.len() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "snapshot has {} entries, expected M·N = {}",
            y.len(),
            m * n
        )));
    }
    if q_count + 1 > n {
        return Err(Error::InvalidParameter(format!(
            "noise estimation needs Q <= N-1, got Q = {q_count}, N = {n}"
        )));
    }
    let blocks: Vec<&[C<T>]> = (0..m).map(|i| &y.as_slice()[i * n..(i + 1) * n]).collect();

    // Noise: project each receive block onto the interference-free
    // subspace and average the residual power over its M(N−Q) dimensions.
    let denom = T::idx(m * (n - q_count));
    let sigma2_hat = if q_count == 0 {
        blocks.iter().map(|b| norm2(b)).fold(T::zero(), |a, v| a + v) / denom
    } else {
        let perp = proj_perp(rx_dirs)?;
        blocks
            .iter()
            .map(|b| perp.quad(b))
            .fold(T::zero(), |a, v| a + v)
            / denom
    };
    let sigma2_hat = sigma2_hat.max(T::zero());

    // Transmit factors: least-squares receive-side separation per block.
    let mut a_t_hat = Vec::with_capacity(q_count);
    let mut b_hat = Vec::with_capacity(q_count);
    if q_count > 0 {
        let gram = rx_dirs.hermitian().matmul(rx_dirs);
        let chol = gram.cholesky(1e-12)?;
        let n2 = norm2(a_t.as_slice());
        for q in 0..q_count {
            let mut e_q = vec![czero::<T>(); q_count];
            e_q[q] = Complex::new(T::one(), T::zero());
            let b_q = chol.solve(&e_q);
            let c_q = rx_dirs.mul_vec(&b_q);
            let a_hat: Vec<C<T>> = blocks.iter().map(|b| inner(&c_q, b)).collect();
            b_hat.push(inner(a_t.as_slice(), &a_hat) / Complex::new(n2, T::zero()));
            a_t_hat.push(a_hat);
        }
    }
    Ok(BinEstimate {
        sigma2_hat,
        a_t_hat,
        b_hat,
    })
}

// ───────────────────────── training bins ─────────────────────────

/// The object-free range-Doppler bins statistics are trained on, kept
/// clear of a cell under test by a one-side guard interval.
#[derive(Debug, Clone)]
pub struct TrainingBins {
    range_bins: Vec<usize>,
    doppler_bins: Vec<usize>,
    guard: usize,
}

impl TrainingBins {
    /// Validates explicit training sets against the cell under test
    /// `cut = (range, doppler)`: every training index must differ from the
    /// cell's index on its axis by at least `guard` (and by at least one).
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] for an empty axis or an index inside
    /// the guard band.
    pub fn new(
        range_bins: Vec<usize>,
        doppler_bins: Vec<usize>,
        guard: usize,
        cut: (usize, usize),
    ) -> Result<Self> {
        if range_bins.is_empty() || doppler_bins.is_empty() {
            return Err(Error::InvalidParameter(
                "training needs at least one range and one Doppler bin".into(),
            ));
        }
        let check = |bins: &[usize], center: usize, axis: &str| -> Result<()> {
            for &b in bins {
                let dist = b.abs_diff(center);
                if dist == 0 || dist < guard {
                    return Err(Error::InvalidParameter(format!(
                        "{axis} bin {b} lies inside the guard band around {center}"
                    )));
                }
            }
            Ok(())
        };
        check(&range_bins, cut.0, "range")?;
        check(&doppler_bins, cut.1, "doppler")?;
        Ok(TrainingBins {
            range_bins,
            doppler_bins,
            guard,
        })
    }

    /// Symmetric training bins at `±offset` from the cell under test on
    /// both axes, clipped to `dims = (range_bins, doppler_bins)`; sides
    /// that fall off the grid are dropped.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] when `offset < guard.max(1)` or an
    /// axis loses both sides.
    pub fn around(
        cut: (usize, usize),
        offset: usize,
        guard: usize,
        dims: (usize, usize),
    ) -> Result<Self> {
        if offset < guard.max(1) {
            return Err(Error::InvalidParameter(format!(
                "offset {offset} cannot be inside the guard interval {guard}"
            )));
        }
        let sides = |center: usize, len: usize| -> Vec<usize> {
            let mut v = Vec::with_capacity(2);
            if let Some(lo) = center.checked_sub(offset) {
                v.push(lo);
            }
            if center + offset < len {
                v.push(center + offset);
            }
            v
        };
        Self::new(sides(cut.0, dims.0), sides(cut.1, dims.1), guard, cut)
    }

    /// The conventional layout: two bins per axis at `±2` with a one-side
    /// guard interval of `2`.
    ///
    /// # Errors
    ///
    /// As for [`TrainingBins::around`].
    pub fn default_around(cut: (usize, usize), dims: (usize, usize)) -> Result<Self> {
        Self::around(cut, 2, 2, dims)
    }

    /// Training range bins `𝓛̃`.
    #[must_use]
    pub fn range_bins(&self) -> &[usize] {
        &self.range_bins
    }

    /// Training Doppler bins `𝓚̃`.
    #[must_use]
    pub fn doppler_bins(&self) -> &[usize] {
        &self.doppler_bins
    }

    /// One-side guard interval in bins.
    #[must_use]
    pub fn guard(&self) -> usize {
        self.guard
    }

    /// All `(range, doppler)` training cells, the Cartesian product of the
    /// two axes.
    #[must_use]
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::with_capacity(self.len());
        for &l in &self.range_bins {
            for &k in &self.doppler_bins {
                v.push((l, k));
            }
        }
        v
    }

    /// Number of training cells.
    #[must_use]
    pub fn len(&self) -> usize {
        self.range_bins.len() * self.doppler_bins.len()
    }

    /// Never true for a validated instance; present for container-like
    /// completeness.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

// ───────────────────────── aggregation ─────────────────────────

/// Statistics aggregated over training bins, ready to drive the
/// covariance-dependent detectors.
#[derive(Debug, Clone)]
pub struct EstimatedStats<T: RadarScalar> {
    /// Mean noise power `σ̂²`.
    pub sigma2_hat: T,
    /// Mean essential-interference powers `ĥ_q² = mean |b̂_q|²`.
    pub h2_hat: Vec<T>,
    /// Mean outer products `R̂_{t,q} = mean â′_{t,q} â′ᴴ_{t,q}`
    /// (Hermitian PSD by construction).
    pub r_t_hat: Vec<CMat<T>>,
}

impl<T: RadarScalar> EstimatedStats<T> {
    /// Bundles the estimates into detector side information with
    /// `λ_q = ĥ_q² / σ̂²`.
    ///
    /// # Errors
    ///
    /// Validation errors of the side-information constructor (e.g. a
    /// direction that is not unit modulus).
    pub fn side_info(&self, rx_dirs: CMat<T>) -> Result<InterferenceSideInfo<T>> {
        let lambdas: Vec<T> = self.h2_hat.iter().map(|&h| h / self.sigma2_hat).collect();
        InterferenceSideInfo::new(rx_dirs, lambdas, self.sigma2_hat)
    }

    /// The estimated normalized interference-plus-noise covariance
    /// `Σ_q R̂_{t,q}/σ̂² ⊗ (ã_{r,q} ã_{r,q}ᴴ) + I`.
    ///
    /// # Errors
    ///
    /// As for [`build_rtilde_est`].
    pub fn rtilde(&self, rx_dirs: &CMat<T>) -> Result<CMat<T>> {
        build_rtilde_est(&self.r_t_hat, rx_dirs, self.sigma2_hat)
    }
}

/// Averages per-bin estimates: arithmetic means of `σ̂²` and `|b̂_q|²`,
/// and the mean outer product for each `R̂_{t,q}`.
///
/// # Errors
///
/// [`Error::InvalidParameter`] on an empty slice;
/// [`Error::DimensionMismatch`] when bins disagree on `Q` or `M`.
pub fn aggregate_stats<T: RadarScalar>(bins: &[BinEstimate<T>]) -> Result<EstimatedStats<T>> {
    let first = bins.first().ok_or_else(|| {
        Error::InvalidParameter("aggregation needs at least one training bin".into())
    })?;
    let q_count = first.b_hat.len();
    let m = first.a_t_hat.first().map_or(0, Vec::len);
    for (i, b) in bins.iter().enumerate() {
        if b.b_hat.len() != q_count
            || b.a_t_hat.len() != q_count
            || b.a_t_hat.iter().any(|a| a.len() != m)
        {
            return Err(Error::DimensionMismatch(format!(
                "training bin {i} disagrees with the first bin's dimensions"
            )));
        }
    }
    let count = T::idx(bins.len());
    let sigma2_hat = bins
        .iter()
        .map(|b| b.sigma2_hat)
        .fold(T::zero(), |a, v| a + v)
        / count;
    let mut h2_hat = Vec::with_capacity(q_count);
    let mut r_t_hat = Vec::with_capacity(q_count);
    let inv = Complex::new(T::one() / count, T::zero());
    for q in 0..q_count {
        let h2 = bins
            .iter()
            .map(|b| b.b_hat[q].norm_sqr())
            .fold(T::zero(), |a, v| a + v)
            / count;
        h2_hat.push(h2);
        let mut r = CMat::zeros(m, m);
        for b in bins {
            r = r.add(&CMat::outer(&b.a_t_hat[q], &b.a_t_hat[q]));
        }
        r_t_hat.push(r.scale(inv));
    }
    Ok(EstimatedStats {
        sigma2_hat,
        h2_hat,
        r_t_hat,
    })
}

/// Runs [`estimate_bin_stats`] over every training cell of a decoded cube
/// and aggregates the results.
///
/// # Errors
///
/// Snapshot extraction, per-bin estimation, or aggregation errors.
pub fn estimate_from_cube<T: RadarScalar>(
    cube: &RangeDopplerCube<T>,
    bins: &TrainingBins,
    a_t: &SteeringVector<T>,
    rx_dirs: &CMat<T>,
) -> Result<EstimatedStats<T>> {
    let mut per_bin = Vec::with_capacity(bins.len());
    for (l, k) in bins.cells() {
        let snap = cube.snapshot(l, k)?;
        per_bin.push(estimate_bin_stats(&snap, a_t, rx_dirs)?);
    }
    aggregate_stats(&per_bin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_math::{kron, steering};
    use crate::signal_chain::awgn_vector;
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type C64 = Complex<f64>;

    fn snapshot(entries: Vec<C64>) -> Snapshot<f64> {
        Snapshot { entries, bin: (0, 0) }
    }

    #[test]
    fn exp_corr_matrix_values_and_bounds() {
        let r = exp_corr_matrix(4, 0.6f64).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = 0.6f64.powi((i as i32 - j as i32).abs());
                assert!((r[(i, j)] - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        let id = exp_corr_matrix(3, 0.0f64).unwrap();
        assert!(id.max_abs_diff(&CMat::identity(3)) < 1e-15);
        assert!(exp_corr_matrix(3, 1.0f64).is_err());
        assert!(exp_corr_matrix(3, -1.2f64).is_err());
        assert!(exp_corr_matrix::<f64>(0, 0.5).is_err());
    }

    #[test]
    fn zero_perturbation_reproduces_the_scaled_covariance() {
        let r = exp_corr_matrix(4, 0.5f64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let got = perturb_cov(&r, 2.5, 0.0, &mut rng).unwrap();
        let want = r.scale(C64::new(2.5, 0.0));
        assert!(got.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn perturbed_covariance_stays_hermitian() {
        let r = exp_corr_matrix(5, -0.7f64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = perturb_cov(&r, 1.3, 0.8, &mut rng).unwrap();
            assert!(p.is_hermitian(1e-12));
        }
        let bad = CMat::from_fn(2, 2, |i, j| C64::new(i as f64, j as f64));
        assert!(perturb_cov(&bad, 1.0, 0.1, &mut rng).is_err());
        assert!(perturb_cov(&r, -1.0, 0.1, &mut rng).is_err());
    }

    #[test]
    fn perturbation_entry_variance_matches_the_model() {
        // R_est(i,j) = σ̃²ρ^{|i-j|}(1 + E_ij), so the entry variance over
        // draws is σ²_pert·(σ̃²ρ^{|i-j|})².
        let (rho, s2, pert) = (0.6f64, 2.0f64, 0.3f64);
        let r = exp_corr_matrix(4, rho).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 10_000usize;
        let probes = [(0usize, 1usize), (1, 1), (0, 2)];
        let mut sums = [0.0f64; 3];
        let mut sq = [0.0f64; 3];
        for _ in 0..draws {
            let p = perturb_cov(&r, s2, pert, &mut rng).unwrap();
            for (t, &(i, j)) in probes.iter().enumerate() {
                let v = p[(i, j)].re;
                sums[t] += v;
                sq[t] += v * v;
            }
        }
        for (t, &(i, j)) in probes.iter().enumerate() {
            let mean = sums[t] / draws as f64;
            let var = sq[t] / draws as f64 - mean * mean;
            let entry = s2 * rho.powi((i as i32 - j as i32).abs());
            assert!(
                (mean - entry).abs() < 0.05 * entry.abs().max(0.1),
                "entry ({i},{j}) mean {mean} vs {entry}"
            );
            let want = pert * entry * entry;
            assert!(
                (var - want).abs() < 0.05 * want,
                "entry ({i},{j}) variance {var} vs {want}"
            );
        }
    }

    #[test]
    fn seeded_draws_are_reproducible_and_stream_separated() {
        let model = PerturbationModel {
            rho: vec![0.6, 0.5],
            sigma_tilde2: vec![2.0, 1.5],
            sigma2_pert: 0.5,
            seed: 42,
        };
        model.validate().unwrap();
        let a = model.sample_perturbed(0, 4, 3).unwrap();
        let b = model.sample_perturbed(0, 4, 3).unwrap();
        assert!(a.max_abs_diff(&b) == 0.0);
        let c = model.sample_perturbed(0, 4, 4).unwrap();
        assert!(a.max_abs_diff(&c) > 0.0);
        let d = model.sample_perturbed(1, 4, 3).unwrap();
        assert!(a.max_abs_diff(&d) > 0.0);
        // The draw carries the power scaling.
        let zero_pert = PerturbationModel {
            sigma2_pert: 0.0,
            ..model.clone()
        };
        let p = zero_pert.sample_perturbed(1, 4, 0).unwrap();
        assert!(p.max_abs_diff(&zero_pert.tx_cov(1, 4).unwrap()) < 1e-15);
    }

    #[test]
    fn perturbation_model_invariants() {
        let bad_rho = PerturbationModel {
            rho: vec![1.0],
            sigma_tilde2: vec![1.0],
            sigma2_pert: 0.0,
            seed: 0,
        };
        assert!(bad_rho.validate().is_err());
        let bad_len = PerturbationModel {
            rho: vec![0.5, 0.2],
            sigma_tilde2: vec![1.0],
            sigma2_pert: 0.0,
            seed: 0,
        };
        assert!(bad_len.validate().is_err());
        let bad_pert = PerturbationModel {
            rho: vec![0.5],
            sigma_tilde2: vec![1.0],
            sigma2_pert: -0.1,
            seed: 0,
        };
        assert!(bad_pert.validate().is_err());
    }

    #[test]
    fn rtilde_from_zero_powers_is_identity() {
        let (m, n) = (3usize, 4usize);
        let dirs = CMat::from_fn(n, 2, |i, j| {
            crate::scalar::cis_cycles::<f64>(-0.1 * (j as f64 + 1.0) * i as f64)
        });
        let zeros = vec![CMat::<f64>::zeros(m, m), CMat::zeros(m, m)];
        let r = build_rtilde_est(&zeros, &dirs, 1.7).unwrap();
        assert!(r.max_abs_diff(&CMat::identity(m * n)) < 1e-15);
        assert!(build_rtilde_est::<f64>(&[], &CMat::zeros(n, 0), 1.0).is_err());
        assert!(build_rtilde_est(&zeros[..1], &dirs, 1.0).is_err());
        assert!(build_rtilde_est(&zeros, &dirs, 0.0).is_err());
    }

    #[test]
    fn rtilde_is_hermitian_psd() {
        let model = PerturbationModel {
            rho: vec![0.6, 0.5],
            sigma_tilde2: vec![1.2, 0.9],
            sigma2_pert: 0.0,
            seed: 1,
        };
        let (m, n) = (4usize, 4usize);
        let dirs = CMat::from_fn(n, 2, |i, j| {
            crate::scalar::cis_cycles::<f64>(0.21 * (j as f64 - 0.4) * i as f64)
        });
        let mats = vec![
            model.tx_cov(0, m).unwrap(),
            model.tx_cov(1, m).unwrap(),
        ];
        let r = build_rtilde_est(&mats, &dirs, 2.0).unwrap();
        assert!(r.is_hermitian(1e-12));
        let evals = r.hermitian_eigenvalues().unwrap();
        assert!(evals[0] >= 1.0 - 1e-9, "min eigenvalue {}", evals[0]);
    }

    #[test]
    fn single_interferer_rtilde_matches_kronecker_eigen_oracle() {
        // R = c·R_t ⊗ ã ãᴴ + I: eigenvalues are c·N·μ_i + 1 for each
        // transmit eigenvalue μ_i and 1 with multiplicity M(N-1).
        let (m, n, s2) = (4usize, 3usize, 1.6f64);
        let rt = exp_corr_matrix(m, 0.55f64)
            .unwrap()
            .scale(C64::new(1.3, 0.0));
        let a_r = steering(n, 0.21f64).unwrap();
        let dirs = CMat::from_fn(n, 1, |i, _| a_r.as_slice()[i]);
        let big = build_rtilde_est(std::slice::from_ref(&rt), &dirs, s2).unwrap();
        let got = big.hermitian_eigenvalues().unwrap();
        let mut want: Vec<f64> = rt
            .hermitian_eigenvalues()
            .unwrap()
            .into_iter()
            .map(|mu| mu / s2 * n as f64 + 1.0)
            .collect();
        want.extend(std::iter::repeat(1.0).take(m * (n - 1)));
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn h2_from_cov_known_values_and_oracle() {
        let a_t = steering(4, 0.3f64).unwrap();
        // Rank-one covariance along a_t gives exactly one.
        let r1 = CMat::outer(a_t.as_slice(), a_t.as_slice());
        assert!((h2_from_cov(&r1, &a_t).unwrap() - 1.0).abs() < 1e-12);
        // Identity: M/M² = 1/M.
        let h = h2_from_cov(&CMat::identity(4), &a_t).unwrap();
        assert!((h - 0.25).abs() < 1e-12);
        // Random PSD against a direct quadratic-form evaluation.
        let b = CMat::from_fn(4, 4, |i, j| {
            C64::new(
                (0.3 + i as f64 * 0.7 - j as f64 * 0.2).sin(),
                (1.1 * i as f64 + 0.5 * j as f64).cos(),
            )
        });
        let psd = b.hermitian().matmul(&b);
        let mut quad = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                quad += a_t.as_slice()[i].conj() * psd[(i, j)] * a_t.as_slice()[j];
            }
        }
        let want = quad.re / 16.0;
        assert!((h2_from_cov(&psd, &a_t).unwrap() - want).abs() < 1e-12);
        assert!(h2_from_cov(&CMat::identity(3), &a_t).is_err());
    }

    #[test]
    fn noiseless_single_interferer_bin_is_recovered_exactly() {
        let (m, n) = (4usize, 4usize);
        let a_t = steering(m, 1.0f64).unwrap();
        let a_r1 = steering(n, 0.31f64).unwrap();
        let dirs = CMat::from_fn(n, 1, |i, _| a_r1.as_slice()[i]);
        let v: Vec<C64> = (0..m)
            .map(|i| C64::new(0.4 + 0.3 * i as f64, 1.0 - 0.2 * i as f64))
            .collect();
        let y = snapshot(kron(&v, a_r1.as_slice()));
        let est = estimate_bin_stats(&y, &a_t, &dirs).unwrap();
        assert!(est.sigma2_hat < 1e-24);
        for (got, want) in est.a_t_hat[0].iter().zip(&v) {
            assert!((got - want).norm() < 1e-12);
        }
        let want_b = inner(a_t.as_slice(), &v) / C64::new(m as f64, 0.0);
        assert!((est.b_hat[0] - want_b).norm() < 1e-12);
    }

    #[test]
    fn pure_noise_sigma2_estimate_is_unbiased() {
        let (m, n, s2) = (4usize, 4usize, 2.0f64);
        let a_t = steering(m, 0.5f64).unwrap();
        let a_r1 = steering(n, 0.2f64).unwrap();
        let dirs = CMat::from_fn(n, 1, |i, _| a_r1.as_slice()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 10_000usize;
        let mut acc = 0.0f64;
        for _ in 0..draws {
            let y = snapshot(awgn_vector(m * n, s2, &mut rng));
            acc += estimate_bin_stats(&y, &a_t, &dirs).unwrap().sigma2_hat;
        }
        let mean = acc / draws as f64;
        assert!((mean - s2).abs() < 0.03 * s2, "mean {mean} vs {s2}");
    }

    #[test]
    fn essential_amplitude_estimate_is_unbiased_under_noise() {
        let (m, n, s2) = (4usize, 4usize, 1.0f64);
        let a_t = steering(m, 1.0f64).unwrap();
        let a_r1 = steering(n, 0.27f64).unwrap();
        let dirs = CMat::from_fn(n, 1, |i, _| a_r1.as_slice()[i]);
        let v: Vec<C64> = (0..m)
            .map(|i| C64::new(1.0 - 0.1 * i as f64, 0.2 * i as f64))
            .collect();
        let clean = kron(&v, a_r1.as_slice());
        let want_b = inner(a_t.as_slice(), &v) / C64::new(m as f64, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = 10_000usize;
        let mut acc = C64::new(0.0, 0.0);
        for _ in 0..draws {
            let noise = awgn_vector(m * n, s2, &mut rng);
            let y: Vec<C64> = clean.iter().zip(&noise).map(|(c, z)| c + z).collect();
            acc += estimate_bin_stats(&snapshot(y), &a_t, &dirs).unwrap().b_hat[0];
        }
        let mean = acc / draws as f64;
        assert!(
            (mean - want_b).norm() < 0.03 * want_b.norm(),
            "mean {mean} vs {want_b}"
        );
    }

    #[test]
    fn bin_estimation_rejects_bad_setups() {
        let a_t = steering(4, 0.5f64).unwrap();
        // Q = N: no noise subspace.
        let dirs = CMat::from_fn(4, 4, |i, j| {
            crate::scalar::cis_cycles::<f64>(0.13 * i as f64 * (j as f64 + 1.0))
        });
        let y = snapshot(vec![C64::new(1.0, 0.0); 16]);
        assert!(estimate_bin_stats(&y, &a_t, &dirs).is_err());
        // Rank-deficient directions (two identical columns).
        let a_r = steering(4, 0.2f64).unwrap();
        let dup = CMat::from_fn(4, 2, |i, _| a_r.as_slice()[i]);
        assert!(estimate_bin_stats(&y, &a_t, &dup).is_err());
        // Wrong snapshot length.
        let short = snapshot(vec![C64::new(1.0, 0.0); 12]);
        let one = CMat::from_fn(4, 1, |i, _| a_r.as_slice()[i]);
        assert!(estimate_bin_stats(&short, &a_t, &one).is_err());
    }

    #[test]
    fn training_bins_enforce_the_guard_band() {
        let tb = TrainingBins::default_around((517, 128), (1024, 256)).unwrap();
        assert_eq!(tb.range_bins(), &[515, 519]);
        assert_eq!(tb.doppler_bins(), &[126, 130]);
        assert_eq!(tb.guard(), 2);
        assert_eq!(tb.len(), 4);
        assert!(!tb.is_empty());
        let cells = tb.cells();
        assert!(cells.contains(&(515, 126)) && cells.contains(&(519, 130)));

        // Explicit sets: inside-guard and cell-under-test rejections.
        assert!(TrainingBins::new(vec![516], vec![126], 2, (517, 128)).is_err());
        assert!(TrainingBins::new(vec![515], vec![128], 2, (517, 128)).is_err());
        assert!(TrainingBins::new(vec![], vec![126], 2, (517, 128)).is_err());
        // Guard zero still excludes the cell itself.
        assert!(TrainingBins::new(vec![517], vec![126], 0, (517, 128)).is_err());
        assert!(TrainingBins::new(vec![516], vec![126], 0, (517, 128)).is_ok());
        // Offsets below the guard are contradictory.
        assert!(TrainingBins::around((10, 10), 1, 2, (64, 64)).is_err());
        // Clipping at the grid edge keeps the surviving side.
        let edge = TrainingBins::around((1, 128), 2, 2, (1024, 256)).unwrap();
        assert_eq!(edge.range_bins(), &[3]);
    }

    #[test]
    fn aggregation_is_identity_on_a_single_bin_and_averages_otherwise() {
        let one = BinEstimate {
            sigma2_hat: 1.5f64,
            a_t_hat: vec![vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]],
            b_hat: vec![C64::new(0.5, 0.5)],
        };
        let s = aggregate_stats(std::slice::from_ref(&one)).unwrap();
        assert_eq!(s.sigma2_hat, 1.5);
        assert!((s.h2_hat[0] - 0.5).abs() < 1e-15);
        let want_r = CMat::outer(&one.a_t_hat[0], &one.a_t_hat[0]);
        assert!(s.r_t_hat[0].max_abs_diff(&want_r) < 1e-15);

        // Constant inputs aggregate to the same constant.
        let s4 = aggregate_stats(&vec![one.clone(); 4]).unwrap();
        assert_eq!(s4.sigma2_hat, 1.5);
        assert!(s4.r_t_hat[0].max_abs_diff(&want_r) < 1e-15);

        // Two distinct bins: arithmetic means.
        let two = BinEstimate {
            sigma2_hat: 2.5f64,
            a_t_hat: vec![vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0)]],
            b_hat: vec![C64::new(0.0, 1.0)],
        };
        let s2 = aggregate_stats(&[one.clone(), two]).unwrap();
        assert!((s2.sigma2_hat - 2.0).abs() < 1e-15);
        assert!((s2.h2_hat[0] - (0.5 + 1.0) / 2.0).abs() < 1e-15);

        assert!(aggregate_stats::<f64>(&[]).is_err());
        let mismatched = BinEstimate {
            sigma2_hat: 1.0f64,
            a_t_hat: vec![],
            b_hat: vec![],
        };
        assert!(aggregate_stats(&[one, mismatched]).is_err());
    }

    #[test]
    fn estimated_stats_bridge_to_side_info_and_rtilde() {
        let (m, n) = (4usize, 4usize);
        let a_r1 = steering(n, 0.22f64).unwrap();
        let dirs = CMat::from_fn(n, 1, |i, _| a_r1.as_slice()[i]);
        let stats = EstimatedStats {
            sigma2_hat: 2.0f64,
            h2_hat: vec![0.5],
            r_t_hat: vec![exp_corr_matrix(m, 0.6).unwrap()],
        };
        let side = stats.side_info(dirs.clone()).unwrap();
        assert_eq!(side.q(), 1);
        assert!((side.lambdas()[0] - 0.25).abs() < 1e-15);
        assert!((side.sigma2() - 2.0).abs() < 1e-15);
        let rt = stats.rtilde(&dirs).unwrap();
        assert_eq!(rt.rows(), m * n);
        assert!(rt.is_hermitian(1e-12));
    }

    #[test]
    fn cube_estimation_runs_end_to_end_without_noise() {
        use crate::signal_chain::{
            range_doppler_decode, simulate_interference, InterfererTruth,
        };
        use crate::waveform::{make_codes, ArrayGeometry, ChirpParams, CodeMode};
        let victim = ChirpParams {
            beta: 1e12,
            t_chirp: 32.5e-6,
            t_pri: 40e-6,
            f_c: 76.92e9,
            f_l: 10e6,
            delta_t: 32e-6 / 32.0,
            samples_per_pulse: 32,
            pulses_per_cpi: 16,
        };
        let lambda = victim.wavelength();
        let geom = ArrayGeometry {
            tx_count: 4,
            rx_count: 4,
            tx_spacing: 2.0 * lambda,
            rx_spacing: 0.5 * lambda,
            wavelength: lambda,
        };
        let vcodes = make_codes(CodeMode::DdmHadamard, 16, 4).unwrap();
        let mut ichirp = victim;
        ichirp.beta = 0.9e12;
        ichirp.t_pri = 43e-6;
        let intf = InterfererTruth {
            range: 2.0,
            velocity: 5.0,
            tx_angle_deg: -20.0,
            rx_angle_deg: 35.0,
            alpha: C64::new(1.0, 0.0),
            chirp: ichirp,
            tau_syn: 3.0e-6,
            codes: make_codes(CodeMode::DdmChu, 16, 2).unwrap(),
            tx_spacing: 0.5 * lambda,
            tx_weights: None,
        };
        let raw = simulate_interference(&victim, &geom, &intf).unwrap();
        let cube = range_doppler_decode(&raw, &vcodes, (32, 16)).unwrap();
        let a_t = steering(4, geom.tx_spatial_freq(0.0)).unwrap();
        let a_r1 = steering(4, geom.rx_spatial_freq(35.0)).unwrap();
        let dirs = CMat::from_fn(4, 1, |i, _| a_r1.as_slice()[i]);
        let tb = TrainingBins::default_around((8, 8), (32, 16)).unwrap();
        let stats = estimate_from_cube(&cube, &tb, &a_t, &dirs).unwrap();
        // Noise-free interference along ã_r: the receive-side projection
        // removes it entirely, so the noise estimate collapses relative to
        // the interference power it separated out.
        let power: f64 = stats.r_t_hat[0].max_abs();
        assert!(stats.sigma2_hat <= 1e-20 * power.max(1.0));
        assert_eq!(stats.h2_hat.len(), 1);
        assert!(stats.r_t_hat[0].is_hermitian(1e-10));
    }
}
