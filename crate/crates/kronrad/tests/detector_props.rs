//! Randomized property checks of the detector family.
//!
//! Three exact identities are exercised across random geometries: the GS
//! weights meet their gain constraint and minimize the output interference
//! power among *all* unit-gain beamformers (not just separable ones); the
//! LCMV detector fed the essential covariance reproduces the GS statistic
//! bit-for-bit in exact arithmetic; and the regularization interpolates
//! between the matched filter (vanishing interference) and hard null
//! steering (dominant interference). A Kolmogorov–Smirnov test then checks
//! that every statistic is chi-square with two degrees of freedom under the
//! null hypothesis, which is what makes their thresholds comparable.

use kronrad::array_math::dense::{inner, CMat};
use kronrad::array_math::{kron, steering};
use kronrad::detectors::{
    essential_covariance, gs_weights, matched_filter, t_clairvoyant, t_gs, t_lcmv, t_rs,
    InterferenceSideInfo,
};
use kronrad::signal_chain::awgn_vector;
use kronrad::C64;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Scene {
    a_t: kronrad::array_math::SteeringVector<f64>,
    a_r: kronrad::array_math::SteeringVector<f64>,
    side: InterferenceSideInfo<f64>,
}

/// Draws a random array size, object direction, and interference side
/// information with log-uniform EINRs spanning 1e-3 … 1e3.
fn random_scene(rng: &mut ChaCha8Rng) -> Scene {
    let m = rng.gen_range(1..=8usize);
    let n = rng.gen_range(2..=8usize);
    let q = rng.gen_range(0..=3usize.min(n - 1));
    let a_t = steering(m, rng.gen_range(-0.5..0.5)).unwrap();
    let a_r = steering(n, rng.gen_range(-0.5..0.5)).unwrap();
    let cols: Vec<Vec<C64>> = (0..q)
        .map(|_| steering(n, rng.gen_range(-0.5..0.5)).unwrap().into_vec())
        .collect();
    let rx_dirs = CMat::from_fn(n, q, |i, j| cols[j][i]);
    let lambdas: Vec<f64> = (0..q).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
    let sigma2 = 10f64.powf(rng.gen_range(-1.0..1.0));
    let side = InterferenceSideInfo::new(rx_dirs, lambdas, sigma2).unwrap();
    Scene { a_t, a_r, side }
}

fn random_cn(len: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    awgn_vector(len, 2.0, rng)
}

#[test]
fn gs_weights_have_unit_gain_and_minimum_output_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a11);
    let mut ran = 0usize;
    for _ in 0..300 {
        let sc = random_scene(&mut rng);
        let Ok(wgt) = gs_weights(&sc.a_t, &sc.a_r, &sc.side) else {
            continue; // a_r drawn inside an effectively infinite-EINR subspace
        };
        ran += 1;
        let (m, n) = (sc.a_t.len(), sc.a_r.len());
        let u = kron(sc.a_t.as_slice(), sc.a_r.as_slice());
        let gain = inner(&u, wgt.as_slice());
        assert!((gain - Complex::new(1.0, 0.0)).norm() <= 1e-8, "gain {gain}");

        // Output power under the essential interference-plus-noise
        // covariance. Any other unit-gain weight — separable or not — must
        // do no better; this is the defining optimality of the detector.
        let (r, _) = essential_covariance(&sc.a_t, &sc.side).unwrap();
        let quad = |w: &[C64]| inner(w, &r.mul_vec(w)).re;
        let q0 = quad(wgt.as_slice());
        for _ in 0..8 {
            // Separable competitor with the gain split across the factors.
            let vt = random_cn(m, &mut rng);
            let vr = random_cn(n, &mut rng);
            let gt = inner(sc.a_t.as_slice(), &vt);
            let gr = inner(sc.a_r.as_slice(), &vr);
            if gt.norm() < 1e-6 || gr.norm() < 1e-6 {
                continue;
            }
            let w: Vec<C64> = kron(&vt, &vr)
                .into_iter()
                .map(|z| z / (gt * gr))
                .collect();
            assert!(quad(&w) >= q0 * (1.0 - 1e-9));

            // Unstructured competitor: project out the gain violation.
            let vf = random_cn(m * n, &mut rng);
            let gf = inner(&u, &vf);
            if gf.norm() < 1e-6 {
                continue;
            }
            let wf: Vec<C64> = vf.into_iter().map(|z| z / gf).collect();
            assert!(quad(&wf) >= q0 * (1.0 - 1e-9));
        }
    }
    assert!(ran >= 270, "too many degenerate draws: {ran}/300");
}

#[test]
fn lcmv_with_essential_covariance_reproduces_gs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a12);
    for _ in 0..200 {
        let sc = random_scene(&mut rng);
        let (r, r_inv) = essential_covariance(&sc.a_t, &sc.side).unwrap();
        let mn = sc.a_t.len() * sc.a_r.len();

        // The structural inverse really is the inverse.
        let prod = r.matmul(&r_inv);
        for i in 0..mn {
            for j in 0..mn {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - Complex::new(want, 0.0)).norm() <= 1e-8 * mn as f64);
            }
        }

        let y = random_cn(mn, &mut rng);
        let gs = match t_gs(&y, &sc.a_t, &sc.a_r, &sc.side) {
            Ok(st) => st.value,
            Err(_) => continue,
        };
        let lcmv = t_lcmv(&y, &sc.a_t, &sc.a_r, &r, sc.side.sigma2())
            .unwrap()
            .value;
        assert!(
            (lcmv - gs).abs() <= 1e-8 * gs.max(1.0),
            "lcmv {lcmv} vs gs {gs}"
        );
    }
}

#[test]
fn regularization_interpolates_between_matched_filter_and_null_steering() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a13);
    for _ in 0..200 {
        let sc = random_scene(&mut rng);
        let q = sc.side.q();
        let n = sc.a_r.len();
        let mn = sc.a_t.len() * n;
        let y = random_cn(mn, &mut rng);
        let sigma2 = sc.side.sigma2();

        // Vanishing EINR: the projection dies and GS is the matched filter.
        let weak = InterferenceSideInfo::new(
            sc.side.rx_dirs().clone(),
            vec![1e-18; q],
            sigma2,
        )
        .unwrap();
        let t0 = t_gs(&y, &sc.a_t, &sc.a_r, &weak).unwrap().value;
        let mf = matched_filter(&y, &sc.a_t, &sc.a_r, sigma2).unwrap().value;
        assert!((t0 - mf).abs() <= 1e-9 * mf.max(1.0), "weak {t0} vs mf {mf}");

        // Dominant EINR: GS approaches the hard null-steering detector.
        let strong =
            InterferenceSideInfo::new(sc.side.rx_dirs().clone(), vec![1e12; q], sigma2).unwrap();
        match (
            t_gs(&y, &sc.a_t, &sc.a_r, &strong),
            t_rs(&y, &sc.a_t, &sc.a_r, sc.side.rx_dirs(), sigma2),
        ) {
            (Ok(g), Ok(r)) => {
                assert!(
                    (g.value - r.value).abs() <= 1e-4 * r.value.max(1.0),
                    "strong {} vs rs {}",
                    g.value,
                    r.value
                );
            }
            // Both reject geometries where a_r falls into the nulled span.
            (Err(_), Err(_)) => {}
            (g, r) => panic!("inconsistent degeneracy handling: {g:?} vs {r:?}"),
        }
    }
}

/// One-sample Kolmogorov–Smirnov distance against a CDF.
fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

#[test]
fn null_statistics_are_chi_square_with_two_dof() {
    // Fixed, unremarkable geometry: 4×6 array, two interferers of moderate
    // and strong EINR, noise power 1.7.
    let (m, n) = (4usize, 6usize);
    let a_t = steering(m, 0.31).unwrap();
    let a_r = steering(n, -0.04).unwrap();
    let dirs = [0.18f64, -0.07];
    let lambdas = [5.0f64, 0.8];
    let sigma2 = 1.7f64;
    let cols: Vec<Vec<C64>> = dirs.iter().map(|&f| steering(n, f).unwrap().into_vec()).collect();
    let rx_dirs = CMat::from_fn(n, 2, |i, j| cols[j][i]);
    let side = InterferenceSideInfo::new(rx_dirs.clone(), lambdas.to_vec(), sigma2).unwrap();

    let trials = 20_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a14);
    let mut s_gs = Vec::with_capacity(trials);
    let mut s_rs = Vec::with_capacity(trials);
    let mut s_cv = Vec::with_capacity(trials);
    for _ in 0..trials {
        // Null hypothesis: essential interference plus noise, no object.
        // Each interferer contributes c_q·(a_t ⊗ ã_q) with c_q of power
        // λ_q σ², which is exactly the covariance the detectors assume.
        let mut y = awgn_vector(m * n, sigma2, &mut rng);
        let mut terms = Vec::new();
        for (q, &lam) in lambdas.iter().enumerate() {
            let c = awgn_vector(1, lam * sigma2, &mut rng)[0];
            let dir = kron(a_t.as_slice(), &cols[q]);
            let term: Vec<C64> = dir.into_iter().map(|z| z * c).collect();
            for (yi, ti) in y.iter_mut().zip(term.iter()) {
                *yi += *ti;
            }
            terms.push(term);
        }
        s_gs.push(t_gs(&y, &a_t, &a_r, &side).unwrap().value);
        s_rs.push(t_rs(&y, &a_t, &a_r, &rx_dirs, sigma2).unwrap().value);
        s_cv.push(t_clairvoyant(&y, &a_t, &a_r, &terms, sigma2).unwrap().value);
    }

    // χ²₂ CDF; critical KS distance at the 1% level is 1.628/√n.
    let cdf = |t: f64| 1.0 - (-t / 2.0).exp();
    let crit = 1.628 / (trials as f64).sqrt();
    for (name, series) in [("gs", &mut s_gs), ("rs", &mut s_rs), ("clairvoyant", &mut s_cv)] {
        let d = ks_distance(series, cdf);
        assert!(d < crit, "{name}: KS distance {d:.5} exceeds {crit:.5}");
    }

    // Mean sanity: E[χ²₂] = 2 within Monte Carlo error.
    for series in [&s_gs, &s_rs, &s_cv] {
        let mean = series.iter().sum::<f64>() / trials as f64;
        assert!((mean - 2.0).abs() < 0.06, "mean {mean}");
    }
}
