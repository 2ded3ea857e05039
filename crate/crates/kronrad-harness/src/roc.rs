//! Monte Carlo ROC sweeps in the virtual-array domain.
//!
//! Draws decoded snapshots from the essential signal model — steering
//! vectors for the object, correlated Gaussian amplitudes along the
//! interference directions, white noise — and compares the empirical
//! false-alarm and detection rates of every detector against the
//! closed-form chi-square predictions on a shared threshold grid.
//!
//! With `sigma2_pert > 0` the side information handed to the selective
//! detectors is rebuilt each trial from a randomly perturbed transmit
//! covariance, which measures robustness to estimation error; the theory
//! columns keep the unperturbed prediction. A heavily perturbed covariance
//! can lose positive definiteness; the sweep evaluates the LCMV statistic
//! from the estimate as-is (through a pivoted LU solve), exactly as an
//! adaptive system that trusts its estimate would, and reports how many
//! trials hit an indefinite matrix.

use std::sync::atomic::{AtomicUsize, Ordering};

use kronrad::array_math::dense::{inner, CMat};
use kronrad::array_math::{kron, steering, SteeringVector};
use kronrad::detectors::{t_clairvoyant, t_gs, t_rs, InterferenceSideInfo};
use kronrad::estimation::{
    build_rtilde_est, exp_corr_matrix, h2_from_cov, PerturbationModel,
};
use kronrad::signal_chain::awgn_vector;
use kronrad::theory::{curve, Detector};
use kronrad::C64;
use rayon::prelude::*;

use crate::config::{Mode, ScenarioConfig};
use crate::rng::trial_rng;
use crate::{HarnessError, Result};

/// One threshold on a ROC curve, with theory and simulation side by side.
#[derive(Debug, Clone)]
pub struct RocPoint {
    /// Detection threshold `γ`.
    pub gamma: f64,
    pub pfa_theory: f64,
    pub pfa_empirical: f64,
    pub pd_theory: f64,
    pub pd_empirical: f64,
    /// Wilson 95% half-width of the empirical detection rate.
    pub ci_halfwidth: f64,
}

/// Full ROC of one detector.
#[derive(Debug, Clone)]
pub struct RocCurve {
    pub detector: Detector,
    /// Theoretical non-centrality of the detector under the signal.
    pub lambda: f64,
    pub trials: usize,
    pub points: Vec<RocPoint>,
}

/// Result of a ROC sweep.
#[derive(Debug, Clone)]
pub struct RocSummary {
    pub curves: Vec<RocCurve>,
    /// Trials whose perturbed covariance came out indefinite; the LCMV
    /// statistic is still computed from the estimate as-is.
    pub rejected_covariances: usize,
}

/// Wilson 95% confidence half-width for a proportion `p` over `n` trials.
#[must_use]
pub fn wilson_halfwidth(p: f64, n: usize) -> f64 {
    let z = 1.96f64;
    let n = n as f64;
    z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / (1.0 + z * z / n)
}

/// Solves `a x = b` for a square complex matrix by Gaussian elimination
/// with partial pivoting. Unlike a Cholesky solve this accepts indefinite
/// Hermitian matrices; `None` only for an exactly singular pivot.
fn lu_solve(a: &CMat<f64>, b: &[C64]) -> Option<Vec<C64>> {
    let n = a.rows();
    debug_assert_eq!(a.cols(), n);
    debug_assert_eq!(b.len(), n);
    let mut m: Vec<C64> = (0..n * n).map(|i| a[(i / n, i % n)]).collect();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                m[r1 * n + col]
                    .norm_sqr()
                    .partial_cmp(&m[r2 * n + col].norm_sqr())
                    .expect("pivot magnitudes are finite")
            })
            .expect("column range is non-empty");
        if m[pivot_row * n + col].norm_sqr() == 0.0 {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let pivot = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / pivot;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for j in col..n {
                let sub = factor * m[col * n + j];
                m[row * n + j] -= sub;
            }
            let sub = factor * x[col];
            x[row] -= sub;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in col + 1..n {
            acc -= m[col * n + j] * x[j];
        }
        x[col] = acc / m[col * n + col];
    }
    Some(x)
}

/// LCMV statistic computed from a covariance estimate as-is: an indefinite
/// estimate yields whatever the algebra produces (possibly a negative or
/// wild value) rather than an error, matching an adaptive receiver that
/// does not validate its estimate.
fn t_lcmv_asis(
    y: &[C64],
    a_t: &SteeringVector<f64>,
    a_r: &SteeringVector<f64>,
    r_tilde: &CMat<f64>,
    sigma2: f64,
) -> f64 {
    let u = kron(a_t.as_slice(), a_r.as_slice());
    let Some(x) = lu_solve(r_tilde, &u) else {
        return 0.0;
    };
    let den = inner(&u, &x).re;
    let g = inner(&x, y);
    let t = (2.0 / sigma2) * g.norm_sqr() / den;
    if t.is_finite() {
        t
    } else {
        0.0
    }
}

/// Fixed ingredients of the synthetic scene, shared by theory and trials.
struct SceneModel {
    a_t: SteeringVector<f64>,
    a_r: SteeringVector<f64>,
    /// Receive steering of each interference direction, as columns.
    rx_dirs: CMat<f64>,
    /// Unit-amplitude receive steering vectors, one per interferer.
    rx_dir_vecs: Vec<Vec<C64>>,
    /// Transmit-channel covariance of each interferer (power included).
    r_t: Vec<CMat<f64>>,
    /// Cholesky factors of `r_t` for drawing amplitudes.
    chol: Vec<CMat<f64>>,
    side: InterferenceSideInfo<f64>,
    r_tilde: CMat<f64>,
    b: C64,
    sigma2: f64,
}

fn build_scene(cfg: &ScenarioConfig) -> Result<SceneModel> {
    let geom = cfg.victim.geometry();
    let m = geom.tx_count;
    let n = geom.rx_count;
    let obj = &cfg.objects[0];
    let a_t = steering(m, geom.tx_spatial_freq(obj.angle_deg))?;
    let a_r = steering(n, geom.rx_spatial_freq(obj.angle_deg))?;
    let q = cfg.synthetic_interference.len();

    let mut rx_dir_vecs = Vec::with_capacity(q);
    let mut r_t = Vec::with_capacity(q);
    let mut chol = Vec::with_capacity(q);
    let mut lambdas = Vec::with_capacity(q);
    for s in &cfg.synthetic_interference {
        let dir = steering(n, geom.rx_spatial_freq(s.angle_deg))?;
        let inr = s.inr_db.unwrap_or(cfg.inr_db);
        let power = cfg.sigma2 * 10f64.powf(inr / 10.0);
        let r_q = exp_corr_matrix(m, s.rho)?.scale(C64::new(power, 0.0));
        chol.push(r_q.cholesky(1e-12)?.factor().clone());
        lambdas.push(h2_from_cov(&r_q, &a_t)? / cfg.sigma2);
        r_t.push(r_q);
        rx_dir_vecs.push(dir.into_vec());
    }
    let rx_dirs = CMat::from_fn(n, q, |i, j| rx_dir_vecs[j][i]);
    let side = InterferenceSideInfo::new(rx_dirs.clone(), lambdas, cfg.sigma2)?;
    let r_tilde = if q == 0 {
        CMat::identity(m * n)
    } else {
        build_rtilde_est(&r_t, &rx_dirs, cfg.sigma2)?
    };
    Ok(SceneModel {
        a_t,
        a_r,
        rx_dirs,
        rx_dir_vecs,
        r_t,
        chol,
        side,
        r_tilde,
        b: cfg.object_b(),
        sigma2: cfg.sigma2,
    })
}

/// Evaluates one detector on one snapshot. LCMV runs on the covariance
/// as-is so that estimation error shows up in the statistic instead of
/// being masked by a factorization failure.
fn eval_detector(
    det: Detector,
    y: &[C64],
    scene: &SceneModel,
    side: &InterferenceSideInfo<f64>,
    r_tilde: &CMat<f64>,
    intf_terms: &[Vec<C64>],
) -> Result<f64> {
    let stat = match det {
        Detector::Clairvoyant => {
            t_clairvoyant(y, &scene.a_t, &scene.a_r, intf_terms, scene.sigma2)
        }
        Detector::Rs => t_rs(y, &scene.a_t, &scene.a_r, &scene.rx_dirs, scene.sigma2),
        Detector::Lcmv => {
            return Ok(t_lcmv_asis(y, &scene.a_t, &scene.a_r, r_tilde, scene.sigma2));
        }
        Detector::Gs => t_gs(y, &scene.a_t, &scene.a_r, side),
    };
    Ok(stat?.value)
}

/// Analytical ROC curves of the synthetic scenario, no simulation.
pub fn theory_curves(
    cfg: &ScenarioConfig,
    detectors: &[Detector],
) -> Result<Vec<kronrad::theory::DetectionCurve<f64>>> {
    if cfg.mode != Mode::Synthetic {
        return Err(HarnessError::Config(
            "analytical curves need a synthetic-mode scenario".into(),
        ));
    }
    cfg.validate()?;
    let scene = build_scene(cfg)?;
    let pfa_grid = cfg.pfa_grid();
    detectors
        .iter()
        .map(|&det| {
            Ok(curve(
                det,
                scene.b,
                scene.sigma2,
                &scene.a_t,
                &scene.a_r,
                Some(&scene.side),
                Some(&scene.r_tilde),
                &pfa_grid,
            )?)
        })
        .collect()
}

/// Runs the synthetic Monte Carlo ROC sweep.
///
/// Each trial draws one interference-plus-noise snapshot (H0) and adds the
/// object to it (H1), so the two hypotheses share their noise realization.
/// Returns one curve per requested detector, in order.
pub fn run_roc(cfg: &ScenarioConfig, detectors: &[Detector]) -> Result<RocSummary> {
    if cfg.mode != Mode::Synthetic {
        return Err(HarnessError::Config(
            "ROC sweeps need a synthetic-mode scenario".into(),
        ));
    }
    cfg.validate()?;
    if detectors.is_empty() {
        return Err(HarnessError::Config("no detectors requested".into()));
    }
    let scene = build_scene(cfg)?;
    let m = scene.a_t.len();
    let n = scene.a_r.len();
    let q = scene.r_t.len();
    let pfa_grid = cfg.pfa_grid();

    let theory: Vec<_> = detectors
        .iter()
        .map(|&det| {
            curve(
                det,
                scene.b,
                scene.sigma2,
                &scene.a_t,
                &scene.a_r,
                Some(&scene.side),
                Some(&scene.r_tilde),
                &pfa_grid,
            )
        })
        .collect::<kronrad::Result<_>>()?;

    let perturb = (cfg.sigma2_pert > 0.0).then(|| PerturbationModel {
        rho: cfg.synthetic_interference.iter().map(|s| s.rho).collect(),
        sigma_tilde2: cfg
            .synthetic_interference
            .iter()
            .map(|s| cfg.sigma2 * 10f64.powf(s.inr_db.unwrap_or(cfg.inr_db) / 10.0))
            .collect(),
        sigma2_pert: cfg.sigma2_pert,
        seed: cfg.seed ^ 0x7065_7274,
    });

    let signal = {
        let v = kron(scene.a_t.as_slice(), scene.a_r.as_slice());
        v.into_iter().map(|x| x * scene.b).collect::<Vec<_>>()
    };
    let rejected = AtomicUsize::new(0);

    // Per trial: the (H0, H1) statistic pair of every detector.
    let stats: Vec<Vec<(f64, f64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<(f64, f64)>> {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let mut intf_terms = Vec::with_capacity(q);
            for qi in 0..q {
                let z = awgn_vector(m, 1.0, &mut rng);
                let c = scene.chol[qi].mul_vec(&z);
                intf_terms.push(kron(&c, &scene.rx_dir_vecs[qi]));
            }
            let noise = awgn_vector(m * n, scene.sigma2, &mut rng);
            let mut y0 = noise;
            for term in &intf_terms {
                for (acc, v) in y0.iter_mut().zip(term) {
                    *acc += v;
                }
            }
            let y1: Vec<C64> = y0.iter().zip(&signal).map(|(a, s)| a + s).collect();

            let (side_t, rtilde_t) = match &perturb {
                None => (None, None),
                Some(pm) => {
                    let mut r_est = Vec::with_capacity(q);
                    let mut lambdas = Vec::with_capacity(q);
                    for qi in 0..q {
                        let r_hat = pm.sample_perturbed(qi, m, t as u64)?;
                        lambdas.push(h2_from_cov(&r_hat, &scene.a_t)? / scene.sigma2);
                        r_est.push(r_hat);
                    }
                    let side = InterferenceSideInfo::new(
                        scene.rx_dirs.clone(),
                        lambdas,
                        scene.sigma2,
                    )?;
                    let rt = build_rtilde_est(&r_est, &scene.rx_dirs, scene.sigma2)?;
                    if rt.cholesky(1e-12).is_err() {
                        rejected.fetch_add(1, Ordering::Relaxed);
                    }
                    (Some(side), Some(rt))
                }
            };
            let side = side_t.as_ref().unwrap_or(&scene.side);
            let rtilde = rtilde_t.as_ref().unwrap_or(&scene.r_tilde);

            detectors
                .iter()
                .map(|&det| {
                    let s0 = eval_detector(det, &y0, &scene, side, rtilde, &intf_terms)?;
                    let s1 = eval_detector(det, &y1, &scene, side, rtilde, &intf_terms)?;
                    Ok((s0, s1))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let curves = detectors
        .iter()
        .enumerate()
        .map(|(di, &det)| {
            let th = &theory[di];
            let points = th
                .gamma_grid
                .iter()
                .enumerate()
                .map(|(gi, &gamma)| {
                    let fa = stats.iter().filter(|s| s[di].0 > gamma).count();
                    let hit = stats.iter().filter(|s| s[di].1 > gamma).count();
                    let pfa_empirical = fa as f64 / cfg.trials as f64;
                    let pd_empirical = hit as f64 / cfg.trials as f64;
                    RocPoint {
                        gamma,
                        pfa_theory: th.pfa[gi],
                        pfa_empirical,
                        pd_theory: th.pd[gi],
                        pd_empirical,
                        ci_halfwidth: wilson_halfwidth(pd_empirical, cfg.trials),
                    }
                })
                .collect();
            RocCurve {
                detector: det,
                lambda: th.lambda,
                trials: cfg.trials,
                points,
            }
        })
        .collect();

    let rejected = rejected.into_inner();
    if rejected > 0 {
        log::warn!("{rejected} detector evaluations rejected a perturbed covariance");
    }
    Ok(RocSummary {
        curves,
        rejected_covariances: rejected,
    })
}
