//! The four spatial-domain detector statistics over decoded virtual-array
//! snapshots, plus the essential-interference algebra they share.
//!
//! All detectors test for an object response `b·(a_t ⊗ a_r)` buried in
//! interference whose decoded form is a sum of Kronecker terms
//! `ã'_{t,q} ⊗ ã_{r,q}` plus white noise of power `σ²`:
//!
//! * [`t_clairvoyant`] — subtracts the true interference, then matched
//!   filters (an upper benchmark, not realizable);
//! * [`t_rs`] — hard-projects the receive factor away from the known
//!   interference directions (a GLRT when nothing else is known);
//! * [`t_lcmv`] — minimum-variance distortionless response against a given
//!   interference-plus-noise covariance;
//! * [`t_gs`] — the regularized-projection detector driven by
//!   [`InterferenceSideInfo`]: interference directions plus per-direction
//!   essential-interference-to-noise ratios. It interpolates between the
//!   matched filter (λ → 0) and the RS detector (λ → ∞) and is equivalent
//!   to LCMV under the essential-interference covariance model.
//!
//! Every statistic is scaled so that, under noise only, it is chi-square
//! with 2 degrees of freedom; the companion [`theory`](crate::theory)
//! module turns that into thresholds and detection probabilities.

use crate::array_math::dense::{inner, norm2, CMat};
use crate::array_math::{kron, proj_perp, reg_proj, RegularizedProjection, SteeringVector};
use crate::error::{Error, Result};
use crate::scalar::{RadarScalar, C};
use crate::Tolerances;
use num_complex::Complex;

// ───────────────────────── side information ─────────────────────────

/// What the GS detector knows about the interference: the receive steering
/// vectors of the `Q` interferers (columns of an `N×Q` matrix), their
/// essential-interference-to-noise ratios `λ_q = h_q²/σ²`, and the noise
/// power `σ²`.
#[derive(Debug, Clone)]
pub struct InterferenceSideInfo<T: RadarScalar> {
    rx_dirs: CMat<T>,
    lambdas: Vec<T>,
    sigma2: T,
}

impl<T: RadarScalar> InterferenceSideInfo<T> {
    /// Validates and bundles side information.
    ///
    /// # Errors
    ///
    /// * [`Error::OverDeterminedInterference`] when `Q > N`.
    /// * [`Error::DimensionMismatch`] when the weight count differs from
    ///   the column count.
    /// * [`Error::InvalidParameter`] for negative/non-finite ratios,
    ///   non-positive noise power, or a column that is not a unit-modulus
    ///   steering vector.
    pub fn new(rx_dirs: CMat<T>, lambdas: Vec<T>, sigma2: T) -> Result<Self> {
        let (n, q) = (rx_dirs.rows(), rx_dirs.cols());
        if q > n {
            return Err(Error::OverDeterminedInterference { q, n });
        }
        if lambdas.len() != q {
            return Err(Error::DimensionMismatch(format!(
                "side info: {} directions but {} EINR weights",
                q,
                lambdas.len()
            )));
        }
        if !(sigma2 > T::zero()) || !sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "side info: noise power must be positive, got {sigma2}"
            )));
        }
        for (i, &l) in lambdas.iter().enumerate() {
            if !(l >= T::zero()) || !l.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "side info: EINR {i} must be finite and non-negative, got {l}"
                )));
            }
        }
        for j in 0..q {
            for i in 0..n {
                if (rx_dirs[(i, j)].norm() - T::one()).abs() > T::lit(1e-6) {
                    return Err(Error::InvalidParameter(format!(
                        "side info: direction {j} entry {i} is not unit modulus"
                    )));
                }
            }
        }
        Ok(InterferenceSideInfo {
            rx_dirs,
            lambdas,
            sigma2,
        })
    }

    /// Side information with no interference (`Q = 0`).
    pub fn empty(n: usize, sigma2: T) -> Result<Self> {
        Self::new(CMat::zeros(n, 0), Vec::new(), sigma2)
    }

    /// Number of interference directions `Q`.
    #[inline]
    pub fn q(&self) -> usize {
        self.rx_dirs.cols()
    }

    /// Receive array size `N`.
    #[inline]
    pub fn n(&self) -> usize {
        self.rx_dirs.rows()
    }

    /// The `N×Q` matrix of interference receive directions.
    #[inline]
    pub fn rx_dirs(&self) -> &CMat<T> {
        &self.rx_dirs
    }

    /// EINR weights `λ_q`.
    #[inline]
    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    /// Noise power `σ²`.
    #[inline]
    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    /// The regularized projection `P̃` induced by this side information for
    /// a transmit array of size `m`.
    pub fn reg_projection(&self, m: usize) -> Result<RegularizedProjection<T>> {
        reg_proj(&self.rx_dirs, &self.lambdas, m)
    }
}

/// Distortionless beamforming weights of the GS detector.
///
/// Satisfies `(a_t ⊗ a_r)^H w = 1` and, for every interference direction
/// `q`, `(P^⊥_{a_t} ⊗ ã_{r,q})^H w = 0` (all `M` components), both to
/// 1e-10 — the feasibility conditions of the variance-minimization problem
/// it solves.
#[derive(Debug, Clone)]
pub struct GsWeights<T: RadarScalar> {
    w: Vec<C<T>>,
}

impl<T: RadarScalar> GsWeights<T> {
    /// Weight vector of length `M·N`.
    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.w
    }

    /// Consumes into the raw vector.
    pub fn into_vec(self) -> Vec<C<T>> {
        self.w
    }
}

/// A nonnegative detector test statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorStatistic<T: RadarScalar> {
    /// The statistic value; under noise only this is chi-square(2).
    pub value: T,
}

// ───────────────────────── essential algebra ─────────────────────────

/// Amplitude of the decoded interference transmit factor along the object
/// transmit steering vector: `b̃ = a_t^H ã'_t / ‖a_t‖²`.
///
/// This is the only part of an interferer's transmit factor a distortionless
/// beamformer cannot remove; the orthogonal remainder
/// `P^⊥_{a_t} ã'_t` is cancelled exactly by the GS constraints.
pub fn essential_amplitude<T: RadarScalar>(
    a_t_tilde: &[C<T>],
    a_t: &SteeringVector<T>,
) -> C<T> {
    debug_assert_eq!(a_t_tilde.len(), a_t.len());
    inner(a_t.as_slice(), a_t_tilde) / Complex::new(T::idx(a_t.len()), T::zero())
}

/// The normalized essential-interference covariance
/// `R = Σ_q λ_q (a_t ⊗ ã_{r,q})(a_t ⊗ ã_{r,q})^H + I` and its inverse.
///
/// The inverse is assembled structurally as `I - P_{a_t} ⊗ P̃` (with
/// `P_{a_t} = a_t a_t^H / M` and `P̃` the regularized projection), not by a
/// dense solve — the identity holds exactly because every interference term
/// shares the transmit factor `a_t`.
pub fn essential_covariance<T: RadarScalar>(
    a_t: &SteeringVector<T>,
    side: &InterferenceSideInfo<T>,
) -> Result<(CMat<T>, CMat<T>)> {
    let m = a_t.len();
    let n = side.n();
    let mn = m * n;
    let mut r = CMat::identity(mn);
    for q in 0..side.q() {
        let dir = kron(a_t, &side.rx_dirs.col(q));
        let lam = Complex::new(side.lambdas[q], T::zero());
        r = r.add(&CMat::outer(&dir, &dir).scale(lam));
    }
    // Structural inverse: I - P_{a_t} ⊗ P̃.
    let p_at = CMat::outer(a_t, a_t).scale(Complex::new(
        T::one() / T::idx(m),
        T::zero(),
    ));
    let p_tilde = side.reg_projection(m)?;
    let r_inv = CMat::identity(mn).sub(&p_at.kron(p_tilde.mat()));
    Ok((r, r_inv))
}

// ───────────────────────── weights & statistics ─────────────────────────

/// GS beamforming weights
/// `w = (a_t ⊗ P̃^⊥ a_r) / (M · a_r^H P̃^⊥ a_r)`.
///
/// # Errors
///
/// [`Error::DegenerateParameters`] when the normalizer `M·a_r^H P̃^⊥ a_r`
/// collapses below `1e-12·MN` (the object receive direction lies inside an
/// interference subspace of effectively infinite EINR); plus any side-info
/// weight validation error from the projection build.
pub fn gs_weights<T: RadarScalar>(
    a_t: &SteeringVector<T>,
    a_r: &SteeringVector<T>,
    side: &InterferenceSideInfo<T>,
) -> Result<GsWeights<T>> {
    let (m, n) = (a_t.len(), a_r.len());
    let p_tilde = side.reg_projection(m)?;
    let perp = p_tilde.apply_perp(a_r);
    let denom = T::idx(m) * p_tilde.perp_quad(a_r);
    if denom <= T::lit(1e-12) * T::idx(m * n) {
        return Err(Error::DegenerateParameters(format!(
            "GS normalizer {:.3e} collapsed: object receive direction lies in the \
             interference subspace at effectively infinite EINR",
            denom.as_f64()
        )));
    }
    let scale = Complex::new(T::one() / denom, T::zero());
    let w = kron(a_t, &perp).into_iter().map(|z| z * scale).collect();
    Ok(GsWeights { w })
}

/// Clairvoyant detector: subtracts the true decoded interference terms and
/// matched-filters the remainder,
/// `T = (2/σ²)·|u^H(y - Σ_q y_q)|²/‖u‖²` with `u = a_t ⊗ a_r`.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] when the snapshot or an interference term
/// has length other than `M·N`.
pub fn t_clairvoyant<T: RadarScalar>(
    y: &[C<T>],
    a_t: &SteeringVector<T>,
    a_r: &SteeringVector<T>,
    intf_terms: &[Vec<C<T>>],
    sigma2: T,
) -> Result<DetectorStatistic<T>> {
    let mn = a_t.len() * a_r.len();
    check_snapshot_len(y.len(), mn)?;
    check_sigma2(sigma2)?;
    let mut resid = y.to_vec();
    for term in intf_terms {
        check_snapshot_len(term.len(), mn)?;
        for (r, t) in resid.iter_mut().zip(term.iter()) {
            *r -= *t;
        }
    }
    let u = kron(a_t, a_r);
    let num = inner(&u, &resid).norm_sqr();
    let value = (T::lit(2.0) / sigma2) * num / T::idx(mn);
    Ok(DetectorStatistic { value })
}

/// Matched-filter statistic `T = (2/σ²)|u^H y|²/‖u‖²` — the Q = 0
/// reduction shared by every detector, and the "angle-FFT" baseline that
/// scans angles with no interference handling at all.
pub fn matched_filter<T: RadarScalar>(
    y: &[C<T>],
    a_t: &SteeringVector<T>,
    a_r: &SteeringVector<T>,
    sigma2: T,
) -> Result<DetectorStatistic<T>> {
    t_clairvoyant(y, a_t, a_r, &[], sigma2)
}

/// RS (null-steering) detector:
/// `T = (2/σ²)·|(a_t ⊗ P^⊥ a_r)^H y|² / ‖a_t ⊗ P^⊥ a_r‖²` with `P^⊥` the
/// hard projection away from the interference receive directions.
///
/// # Errors
///
/// * [`Error::DegenerateParameters`] when `a_r` lies in the interference
///   subspace numerically (the beamformer has no energy left).
/// * [`Error::SingularSubspace`] when the direction columns are dependent.
pub fn t_rs<T: RadarScalar>(
    y: &[C<T>],
    a_t: &SteeringVector<T>,
    a_r: &SteeringVector<T>,
    rx_dirs: &CMat<T>,
    sigma2: T,
) -> Result<DetectorStatistic<T>> {
    let (m, n) = (a_t.len(), a_r.len());
    check_snapshot_len(y.len(), m * n)?;
    check_sigma2(sigma2)?;
    if rx_dirs.cols() == 0 {
        return matched_filter(y, a_t, a_r, sigma2);
    }
    if rx_dirs.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "t_rs: directions have {} rows for a receive array of {}",
            rx_dirs.rows(),
            n
        )));
    }
    let perp = proj_perp(rx_dirs)?;
    let pr = perp.apply(a_r);
    let denom = T::idx(m) * norm2(&pr);
    if denom <= T::lit(1e-12) * T::idx(m * n) {
        return Err(Error::DegenerateParameters(
            "t_rs: object receive direction lies in the interference subspace".into(),
        ));
    }
    let w = kron(a_t, &pr);
    let num = inner(&w, y).norm_sqr();
    let value = (T::lit(2.0) / sigma2) * num / denom;
    Ok(DetectorStatistic { value })
}

/// LCMV detector against an explicit interference-plus-noise covariance:
/// `T = (2/σ²)·|(R̃^{-1}u)^H y|² / (u^H R̃^{-1} u)`.
///
/// # Errors
///
/// * [`Error::NotPositiveDefinite`] when `R̃` fails its Cholesky
///   factorization.
/// * [`Error::DimensionMismatch`] for shape disagreements.
pub fn t_lcmv<T: RadarScalar>(
    y: &[C<T>],
    a_t: &SteeringVector<T>,
    a_r: &SteeringVector<T>,
    r_tilde: &CMat<T>,
    sigma2: T,
) -> Result<DetectorStatistic<T>> {
    let mn = a_t.len() * a_r.len();
    check_snapshot_len(y.len(), mn)?;
    check_sigma2(sigma2)?;
    if r_tilde.rows() != mn || r_tilde.cols() != mn {
        return Err(Error::DimensionMismatch(format!(
            "t_lcmv: covariance is {}x{}, snapshot dimension is {}",
            r_tilde.rows(),
            r_tilde.cols(),
            mn
        )));
    }
    let chol = r_tilde.cholesky(Tolerances::default().pivot_rel)?;
    let u = kron(a_t, a_r);
    let ri_u = chol.solve(&u);
    let denom = inner(&u, &ri_u).re;
    if !(denom > T::zero()) {
        return Err(Error::NotPositiveDefinite(
            "t_lcmv: quadratic form u^H R̃^{-1} u is not positive".into(),
        ));
    }
    let num = inner(&ri_u, y).norm_sqr();
    let value = (T::lit(2.0) / sigma2) * num / denom;
    Ok(DetectorStatistic { value })
}

/// GS detector:
/// `T = (2/σ²)·|(a_t ⊗ P̃^⊥ a_r)^H y|² / (M · a_r^H P̃^⊥ a_r)`.
///
/// Shares the degenerate-geometry error of [`gs_weights`]. With all-zero
/// EINRs this is exactly the matched filter; as every EINR grows it
/// approaches [`t_rs`].
pub fn t_gs<T: RadarScalar>(
    y: &[C<T>],
    a_t: &SteeringVector<T>,
    a_r: &SteeringVector<T>,
    side: &InterferenceSideInfo<T>,
) -> Result<DetectorStatistic<T>> {
    let (m, n) = (a_t.len(), a_r.len());
    check_snapshot_len(y.len(), m * n)?;
    let p_tilde = side.reg_projection(m)?;
    let perp = p_tilde.apply_perp(a_r);
    let denom = T::idx(m) * p_tilde.perp_quad(a_r);
    if denom <= T::lit(1e-12) * T::idx(m * n) {
        return Err(Error::DegenerateParameters(
            "t_gs: normalizer collapsed (infinite-EINR subspace contains a_r)".into(),
        ));
    }
    let w = kron(a_t, &perp);
    let num = inner(&w, y).norm_sqr();
    let value = (T::lit(2.0) / side.sigma2()) * num / denom;
    Ok(DetectorStatistic { value })
}

fn check_snapshot_len(got: usize, want: usize) -> Result<(), Error> {
    if got != want {
        return Err(Error::DimensionMismatch(format!(
            "snapshot length {got} does not match virtual array size {want}"
        )));
    }
    Ok(())
}

fn check_sigma2<T: RadarScalar>(sigma2: T) -> Result<()> {
    if !(sigma2 > T::zero()) || !sigma2.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise power must be positive and finite, got {sigma2}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_math::steering;
    use crate::scalar::cis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C64 = Complex<f64>;

    /// Standard 4x4 test geometry: object at 30°, interferers at 40°/10°,
    /// half-wavelength receive spacing, d_t = N·d_r.
    struct Scene {
        a_t: SteeringVector<f64>,
        a_r: SteeringVector<f64>,
        side: InterferenceSideInfo<f64>,
    }

    fn rx_freq(angle_deg: f64) -> f64 {
        0.5 * angle_deg.to_radians().sin()
    }

    fn tx_freq(angle_deg: f64) -> f64 {
        2.0 * angle_deg.to_radians().sin()
    }

    fn scene(lambdas: [f64; 2], sigma2: f64) -> Scene {
        let a_t = steering(4, tx_freq(30.0)).unwrap();
        let a_r = steering(4, rx_freq(30.0)).unwrap();
        let dirs = CMat::from_cols(&[
            steering(4, rx_freq(40.0)).unwrap().into_vec(),
            steering(4, rx_freq(10.0)).unwrap().into_vec(),
        ])
        .unwrap();
        let side = InterferenceSideInfo::new(dirs, lambdas.to_vec(), sigma2).unwrap();
        Scene { a_t, a_r, side }
    }

    fn random_cvec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect()
    }

    #[test]
    fn essential_amplitude_extracts_aligned_component() {
        let a_t = steering(4, 0.2).unwrap();
        // Along a_t itself: exactly 1.
        let b = essential_amplitude(a_t.as_slice(), &a_t);
        assert!((b - C64::new(1.0, 0.0)).norm() < 1e-14);
        // Orthogonal vector: exactly 0 (quarter-cycle shifted steering).
        let orth = steering(4, 0.2 + 0.25).unwrap();
        assert!(essential_amplitude(orth.as_slice(), &a_t).norm() < 1e-14);
        // a_t plus an orthogonal residual still gives 1, and the
        // decomposition b̃·a_t + residual reconstructs the input.
        let mixed: Vec<C64> = a_t
            .iter()
            .zip(orth.iter())
            .map(|(x, r)| x + C64::new(0.0, 2.5) * r)
            .collect();
        let b2 = essential_amplitude(&mixed, &a_t);
        assert!((b2 - C64::new(1.0, 0.0)).norm() < 1e-12);
        for i in 0..4 {
            let recon = b2 * a_t[i] + (mixed[i] - b2 * a_t[i]);
            assert!((recon - mixed[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn essential_covariance_identity_when_no_interference() {
        let a_t = steering(4, 0.1).unwrap();
        let side = InterferenceSideInfo::empty(4, 1.0).unwrap();
        let (r, r_inv) = essential_covariance(&a_t, &side).unwrap();
        assert!(r.max_abs_diff(&CMat::identity(16)) < 1e-14);
        assert!(r_inv.max_abs_diff(&CMat::identity(16)) < 1e-14);
    }

    #[test]
    fn essential_covariance_structural_inverse_matches_dense() {
        let sc = scene([2.3, 0.7], 1.0);
        let (r, r_inv) = essential_covariance(&sc.a_t, &sc.side).unwrap();
        let prod = r.matmul(&r_inv);
        assert!(
            prod.max_abs_diff(&CMat::identity(16)) < 1e-8,
            "R·R^{{-1}} deviates by {}",
            prod.max_abs_diff(&CMat::identity(16))
        );
    }

    #[test]
    fn essential_covariance_rank_one_eigenvalue() {
        // Single interferer, M = N = 4, λ = 1: the interference direction
        // carries eigenvalue 1 + λ·MN = 17.
        let a_t = steering(4, 0.3).unwrap();
        let dirs = CMat::from_cols(&[steering(4, 0.05).unwrap().into_vec()]).unwrap();
        let side = InterferenceSideInfo::new(dirs, vec![1.0], 1.0).unwrap();
        let (r, _) = essential_covariance(&a_t, &side).unwrap();
        let ev: Vec<f64> = r.hermitian_eigenvalues().unwrap();
        assert!((ev[15] - 17.0).abs() < 1e-10, "top eigenvalue {}", ev[15]);
        assert!((ev[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gs_weights_zero_einr_is_matched_filter() {
        let sc = scene([0.0, 0.0], 1.0);
        let w = gs_weights(&sc.a_t, &sc.a_r, &sc.side).unwrap();
        let u = kron(&sc.a_t, &sc.a_r);
        for i in 0..16 {
            let want = u[i] / C64::new(16.0, 0.0);
            assert!((w.as_slice()[i] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn gs_weights_huge_einr_approach_rs_weights() {
        let sc = scene([1e8, 1e8], 1.0);
        let w = gs_weights(&sc.a_t, &sc.a_r, &sc.side).unwrap();
        let perp = proj_perp(sc.side.rx_dirs()).unwrap();
        let pr = perp.apply(&sc.a_r);
        let rs_denom = 4.0 * norm2(&pr);
        let rs_w = kron(&sc.a_t, &pr);
        for i in 0..16 {
            let want = rs_w[i] / C64::new(rs_denom, 0.0);
            assert!(
                (w.as_slice()[i] - want).norm() < 1e-4,
                "entry {i}: {} vs {}",
                w.as_slice()[i],
                want
            );
        }
    }

    #[test]
    fn gs_weights_satisfy_both_constraint_families() {
        let sc = scene([3.0, 0.5], 1.0);
        let w = gs_weights(&sc.a_t, &sc.a_r, &sc.side).unwrap();
        let u = kron(&sc.a_t, &sc.a_r);
        // Distortionless constraint.
        let g = inner(&u, w.as_slice());
        assert!((g - C64::new(1.0, 0.0)).norm() < 1e-10);
        // Orthogonal-transmit interference constraints: for every q and
        // every column of P^⊥_{a_t} ⊗ ã_{r,q}.
        let m = 4;
        let p_at_perp = CMat::identity(m).sub(
            &CMat::outer(&sc.a_t, &sc.a_t).scale(C64::new(1.0 / m as f64, 0.0)),
        );
        for q in 0..2 {
            let dir = sc.side.rx_dirs().col(q);
            for col in 0..m {
                let constraint = kron(&p_at_perp.col(col), &dir);
                let r = inner(&constraint, w.as_slice());
                assert!(r.norm() < 1e-10, "q={q} col={col}: residual {}", r.norm());
            }
        }
    }

    #[test]
    fn clairvoyant_cancels_interference_exactly() {
        let sc = scene([1.0, 1.0], 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Interference terms with random transmit factors.
        let intf: Vec<Vec<C64>> = (0..2)
            .map(|q| kron(&random_cvec(&mut rng, 4), &sc.side.rx_dirs().col(q)))
            .collect();
        let mut y = vec![C64::new(0.0, 0.0); 16];
        for term in &intf {
            for i in 0..16 {
                y[i] += term[i];
            }
        }
        let t = t_clairvoyant(&y, &sc.a_t, &sc.a_r, &intf, 0.5).unwrap();
        assert!(t.value < 1e-18);
    }

    #[test]
    fn clairvoyant_pure_object_is_matched_filter_peak() {
        let sc = scene([0.0, 0.0], 2.0);
        let b = C64::new(0.8, -0.3);
        let y: Vec<C64> = kron(&sc.a_t, &sc.a_r).into_iter().map(|z| z * b).collect();
        let t = t_clairvoyant(&y, &sc.a_t, &sc.a_r, &[], 2.0).unwrap();
        // (2/σ²)·MN·|b|².
        let want = 2.0 / 2.0 * 16.0 * b.norm_sqr();
        assert!((t.value - want).abs() < 1e-10 * want);
    }

    #[test]
    fn clairvoyant_matches_essential_amplitude_rewrite() {
        // Subtracting the full interference is the same as subtracting only
        // the essential amplitudes from the matched-filter output.
        let sc = scene([1.0, 1.0], 1.3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tx_factors: Vec<Vec<C64>> = (0..2).map(|_| random_cvec(&mut rng, 4)).collect();
        let intf: Vec<Vec<C64>> = (0..2)
            .map(|q| kron(&tx_factors[q], &sc.side.rx_dirs().col(q)))
            .collect();
        let mut y = random_cvec(&mut rng, 16);
        for term in &intf {
            for i in 0..16 {
                y[i] += term[i];
            }
        }
        let direct = t_clairvoyant(&y, &sc.a_t, &sc.a_r, &intf, 1.3).unwrap();
        // Rewritten form: u^H y - Σ_q b̃_q·M·(a_r^H ã_{r,q}).
        let u = kron(&sc.a_t, &sc.a_r);
        let mut g = inner(&u, &y);
        for q in 0..2 {
            let b_ess = essential_amplitude(&tx_factors[q], &sc.a_t);
            let rr = inner(&sc.a_r, &sc.side.rx_dirs().col(q));
            g -= b_ess * C64::new(4.0, 0.0) * rr;
        }
        let rewritten = (2.0 / 1.3) * g.norm_sqr() / 16.0;
        assert!(
            (direct.value - rewritten).abs() < 1e-10 * rewritten.max(1.0),
            "{} vs {rewritten}",
            direct.value
        );
    }

    #[test]
    fn rs_nulls_interference_receive_directions_exactly() {
        let sc = scene([1.0, 1.0], 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for q in 0..2 {
            let y = kron(&random_cvec(&mut rng, 4), &sc.side.rx_dirs().col(q));
            let t = t_rs(&y, &sc.a_t, &sc.a_r, sc.side.rx_dirs(), 1.0).unwrap();
            assert!(t.value < 1e-20, "direction {q} leaked {}", t.value);
        }
    }

    #[test]
    fn rs_empty_subspace_is_matched_filter() {
        let sc = scene([0.0, 0.0], 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = random_cvec(&mut rng, 16);
        let empty = CMat::zeros(4, 0);
        let t1 = t_rs(&y, &sc.a_t, &sc.a_r, &empty, 1.0).unwrap();
        let t2 = matched_filter(&y, &sc.a_t, &sc.a_r, 1.0).unwrap();
        assert!((t1.value - t2.value).abs() < 1e-12);
    }

    #[test]
    fn rs_degenerate_when_object_inside_subspace() {
        // Interference direction identical to the object receive direction.
        let a_t = steering(4, 0.3).unwrap();
        let a_r = steering(4, 0.11).unwrap();
        let dirs = CMat::from_cols(&[a_r.as_slice().to_vec()]).unwrap();
        let y = vec![C64::new(1.0, 0.0); 16];
        match t_rs(&y, &a_t, &a_r, &dirs, 1.0) {
            Err(Error::DegenerateParameters(_)) => {}
            other => panic!("expected degenerate geometry, got {other:?}"),
        }
    }

    #[test]
    fn lcmv_identity_covariance_is_matched_filter() {
        let sc = scene([0.0, 0.0], 1.7);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = random_cvec(&mut rng, 16);
        let t1 = t_lcmv(&y, &sc.a_t, &sc.a_r, &CMat::identity(16), 1.7).unwrap();
        let t2 = matched_filter(&y, &sc.a_t, &sc.a_r, 1.7).unwrap();
        assert!((t1.value - t2.value).abs() < 1e-10 * t2.value.max(1.0));
    }

    #[test]
    fn lcmv_with_essential_covariance_equals_gs() {
        let sc = scene([2.0, 0.6], 0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (r, _) = essential_covariance(&sc.a_t, &sc.side).unwrap();
        for _ in 0..20 {
            let y = random_cvec(&mut rng, 16);
            let lcmv = t_lcmv(&y, &sc.a_t, &sc.a_r, &r, 0.9).unwrap();
            let gs = t_gs(&y, &sc.a_t, &sc.a_r, &sc.side).unwrap();
            let rel = (lcmv.value - gs.value).abs() / gs.value.max(1e-30);
            assert!(rel < 1e-8, "relative gap {rel}");
        }
    }

    #[test]
    fn lcmv_changes_under_covariance_perturbation() {
        let sc = scene([2.0, 0.6], 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let (r, _) = essential_covariance(&sc.a_t, &sc.side).unwrap();
        // A diagonal inflation is a crude stand-in for estimation error.
        let mut r_pert = r.clone();
        for i in 0..16 {
            r_pert[(i, i)] = r_pert[(i, i)] + C64::new(0.5 * (i % 3) as f64, 0.0);
        }
        let y = random_cvec(&mut rng, 16);
        let a = t_lcmv(&y, &sc.a_t, &sc.a_r, &r, 1.0).unwrap();
        let b = t_lcmv(&y, &sc.a_t, &sc.a_r, &r_pert, 1.0).unwrap();
        assert!((a.value - b.value).abs() > 1e-12);
    }

    #[test]
    fn lcmv_rejects_indefinite_covariance() {
        let sc = scene([0.0, 0.0], 1.0);
        let mut r = CMat::identity(16);
        r[(3, 3)] = C64::new(-2.0, 0.0);
        let y = vec![C64::new(1.0, 0.0); 16];
        assert!(matches!(
            t_lcmv(&y, &sc.a_t, &sc.a_r, &r, 1.0),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn gs_zero_einr_equals_clairvoyant_without_interference() {
        let sc = scene([0.0, 0.0], 0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let y = random_cvec(&mut rng, 16);
        let gs = t_gs(&y, &sc.a_t, &sc.a_r, &sc.side).unwrap();
        let cl = t_clairvoyant(&y, &sc.a_t, &sc.a_r, &[], 0.8).unwrap();
        assert!((gs.value - cl.value).abs() < 1e-10 * cl.value.max(1.0));
    }

    #[test]
    fn gs_huge_einr_equals_rs() {
        let sc = scene([1e8, 1e8], 1.1);
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let y = random_cvec(&mut rng, 16);
            let gs = t_gs(&y, &sc.a_t, &sc.a_r, &sc.side).unwrap();
            let rs = t_rs(&y, &sc.a_t, &sc.a_r, sc.side.rx_dirs(), 1.1).unwrap();
            let rel = (gs.value - rs.value).abs() / rs.value.max(1e-12);
            assert!(rel < 1e-4, "relative gap {rel}");
        }
    }

    #[test]
    fn gs_interference_residual_identity() {
        // After GS beamforming, an interference term ã'_t ⊗ ã_r leaves
        // exactly b̃·M·a_r^H P̃^⊥ ã_r (scaled by the normalizer).
        let sc = scene([1.4, 0.9], 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p_tilde = sc.side.reg_projection(4).unwrap();
        let denom = 4.0 * p_tilde.perp_quad(&sc.a_r);
        for q in 0..2 {
            let txf = random_cvec(&mut rng, 4);
            let term = kron(&txf, &sc.side.rx_dirs().col(q));
            let w = gs_weights(&sc.a_t, &sc.a_r, &sc.side).unwrap();
            let got = inner(w.as_slice(), &term) * C64::new(denom, 0.0);
            let b_ess = essential_amplitude(&txf, &sc.a_t);
            let perp_r = p_tilde.apply_perp(&sc.a_r);
            let want = b_ess * C64::new(4.0, 0.0) * inner(&perp_r, &sc.side.rx_dirs().col(q));
            assert!(
                (got - want).norm() < 1e-10,
                "q={q}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn statistic_ordering_of_normalizers() {
        // ‖a_t ⊗ P^⊥ a_r‖² ≤ M·a_r^H P̃^⊥ a_r ≤ MN for any finite EINRs.
        let sc = scene([0.9, 4.2], 1.0);
        let perp = proj_perp(sc.side.rx_dirs()).unwrap();
        let rs_norm = 4.0 * norm2(&perp.apply(&sc.a_r));
        let p_tilde = sc.side.reg_projection(4).unwrap();
        let gs_norm = 4.0 * p_tilde.perp_quad(&sc.a_r);
        assert!(rs_norm <= gs_norm + 1e-10, "{rs_norm} vs {gs_norm}");
        assert!(gs_norm <= 16.0 + 1e-10);
    }

    #[test]
    fn statistics_invariant_under_global_phase() {
        let sc = scene([1.2, 0.4], 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let y = random_cvec(&mut rng, 16);
        let phase = cis(1.234f64);
        let y_rot: Vec<C64> = y.iter().map(|&z| z * phase).collect();
        let (r, _) = essential_covariance(&sc.a_t, &sc.side).unwrap();
        let intf: Vec<Vec<C64>> = Vec::new();
        let pairs = [
            (
                t_clairvoyant(&y, &sc.a_t, &sc.a_r, &intf, 1.0).unwrap().value,
                t_clairvoyant(&y_rot, &sc.a_t, &sc.a_r, &intf, 1.0).unwrap().value,
            ),
            (
                t_rs(&y, &sc.a_t, &sc.a_r, sc.side.rx_dirs(), 1.0).unwrap().value,
                t_rs(&y_rot, &sc.a_t, &sc.a_r, sc.side.rx_dirs(), 1.0).unwrap().value,
            ),
            (
                t_lcmv(&y, &sc.a_t, &sc.a_r, &r, 1.0).unwrap().value,
                t_lcmv(&y_rot, &sc.a_t, &sc.a_r, &r, 1.0).unwrap().value,
            ),
            (
                t_gs(&y, &sc.a_t, &sc.a_r, &sc.side).unwrap().value,
                t_gs(&y_rot, &sc.a_t, &sc.a_r, &sc.side).unwrap().value,
            ),
        ];
        for (a, b) in pairs {
            assert!((a - b).abs() < 1e-9 * a.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn side_info_validation() {
        let dirs = CMat::from_cols(&[steering(4, 0.1).unwrap().into_vec()]).unwrap();
        assert!(InterferenceSideInfo::new(dirs.clone(), vec![1.0], 1.0).is_ok());
        assert!(matches!(
            InterferenceSideInfo::new(dirs.clone(), vec![-1.0], 1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            InterferenceSideInfo::new(dirs.clone(), vec![1.0, 2.0], 1.0),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            InterferenceSideInfo::new(dirs, vec![1.0], 0.0),
            Err(Error::InvalidParameter(_))
        ));
        // Non-unit-modulus column.
        let bad = CMat::from_fn(4, 1, |i, _| C64::new(i as f64, 0.0));
        assert!(InterferenceSideInfo::new(bad, vec![1.0], 1.0).is_err());
        // Q > N.
        let fat = CMat::from_fn(2, 3, |i, j| cis(0.3 * (i + j) as f64));
        assert!(matches!(
            InterferenceSideInfo::new(fat, vec![1.0; 3], 1.0),
            Err(Error::OverDeterminedInterference { .. })
        ));
    }
}
