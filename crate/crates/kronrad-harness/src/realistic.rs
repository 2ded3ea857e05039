//! Full-chain experiments: range-angle heatmaps and output interference
//! power (OIP) sweeps.
//!
//! Both experiments run the complete pipeline — sample-level simulation of
//! objects and interfering radars, range-Doppler decoding, side-information
//! estimation from training bins — and then score detector statistics on
//! the decoded snapshots.
//!
//! Two modeling choices shape the results and are deliberate:
//!
//! * Heatmaps score the CFAR detection statistic; the OIP sweep scores the
//!   *output power* of each detector's unit-gain beamformer at the
//!   interference bin. The statistic normalizes a detector's noise gain
//!   away by construction (that is what makes it CFAR), so it cannot show
//!   the cost of steering a hard null next to the probe direction; output
//!   power is the quantity that does.
//! * The probe steering in the OIP sweep sits on the processing angle grid
//!   (the interference lands in a *bin*), while the side-information
//!   direction is the drawn bearing itself. The residual bin-to-bearing
//!   mismatch drives the noise-gain blow-up of hard null-steering and the
//!   covariance-inverting beamformer; the regularized projection bounds it.
//!   The rest of the side information (noise power, transmit covariance,
//!   essential powers) is always estimated from training bins of the same
//!   decoded data, never taken from the configuration.

use kronrad::array_math::dense::{inner, CMat};
use kronrad::array_math::{kron, proj_perp, steering, SteeringVector};
use kronrad::detectors::{
    gs_weights, matched_filter, t_clairvoyant, t_gs, t_lcmv, t_rs, InterferenceSideInfo,
};
use kronrad::estimation::{
    aggregate_stats, estimate_bin_stats, h2_from_cov, EstimatedStats, TrainingBins,
};
use kronrad::signal_chain::{
    add_awgn, decode_bin, decode_doppler_slice, simulate_interference, simulate_object,
    InterfererTruth, ObjectDerived, ObjectTruth, SampleTensor, Snapshot,
};
use kronrad::theory::Detector;
use kronrad::waveform::{ArrayGeometry, ChirpParams, CodeMatrix};
use kronrad::C64;
use rand::Rng;
use rayon::prelude::*;

use crate::config::{Mode, ScenarioConfig};
use crate::rng::trial_rng;
use crate::{HarnessError, Result};

/// Floor applied before dB conversion so emitted grids stay finite.
const DB_FLOOR: f64 = 1e-30;

/// Stream offsets keeping experiment kinds on disjoint RNG substreams.
const HEATMAP_STREAM: u64 = 1 << 33;
const OIP_STREAM: u64 = 1 << 34;

/// Detector-statistic map over range bins and angle-grid points at a fixed
/// Doppler bin, in dB.
#[derive(Debug, Clone)]
pub struct HeatmapGrid {
    /// Detector label; the plain beamforming baseline is `angle-fft`.
    pub detector: String,
    pub doppler_bin: usize,
    /// Angle of each column in degrees.
    pub angles_deg: Vec<f64>,
    /// `rows[l][a]` = `10·log10 T` at range bin `l`, angle column `a`.
    pub rows: Vec<Vec<f64>>,
}

/// One randomized interferer draw of the OIP sweep.
#[derive(Debug, Clone)]
pub struct OipRun {
    pub run: usize,
    /// Drawn interferer bearing in degrees.
    pub angle_deg: f64,
    /// Drawn interferer range in meters.
    pub range_m: f64,
    /// Probed `(range, Doppler)` bin.
    pub bin: (usize, usize),
    /// `(detector label, statistic at the probe bin in dB)`.
    pub values: Vec<(String, f64)>,
}

/// Empirical CDF of one detector's OIP.
#[derive(Debug, Clone)]
pub struct OipCdf {
    pub detector: String,
    /// Sorted OIP values in dB.
    pub oip_db: Vec<f64>,
    /// `cdf[i]` = fraction of runs at or below `oip_db[i]`.
    pub cdf: Vec<f64>,
}

/// Validated fixed ingredients of a realistic scene.
struct Scene {
    chirp: ChirpParams<f64>,
    geom: ArrayGeometry<f64>,
    codes: CodeMatrix<f64>,
    objects: Vec<ObjectTruth<f64>>,
    interferers: Vec<InterfererTruth<f64>>,
    fft: (usize, usize),
}

fn build_scene(cfg: &ScenarioConfig) -> Result<Scene> {
    if cfg.mode != Mode::Realistic {
        return Err(HarnessError::Config(
            "this experiment needs a realistic-mode scenario".into(),
        ));
    }
    cfg.validate()?;
    let chirp = cfg.victim.chirp();
    let objects = cfg
        .objects
        .iter()
        .map(|o| ObjectTruth {
            range: o.range,
            velocity: o.velocity,
            angle_deg: o.angle_deg,
            alpha: o.alpha(),
        })
        .collect();
    let interferers = cfg
        .interferers
        .iter()
        .map(|i| i.truth(&chirp))
        .collect::<Result<_>>()?;
    Ok(Scene {
        chirp,
        geom: cfg.victim.geometry(),
        codes: cfg.victim.codes()?,
        objects,
        interferers,
        fft: (cfg.fft_sizes[0], cfg.fft_sizes[1]),
    })
}

/// Maps a normalized frequency to its decoded DFT bin. The decode uses the
/// negative-exponent convention, so a component at frequency `f` lands on
/// bin `(-round(f·len)) mod len`.
#[must_use]
pub fn freq_to_bin(f: f64, len: usize) -> usize {
    let l = len as i64;
    let r = (f * len as f64).round() as i64;
    (((-r) % l + l) % l) as usize
}

/// FFT-aligned angle grid: `(angle in degrees, receive spatial frequency)`
/// for each grid point whose spatial frequency maps into visible space.
#[must_use]
pub fn fft_angle_grid(geom: &ArrayGeometry<f64>, bins: usize) -> Vec<(f64, f64)> {
    let mut grid = Vec::with_capacity(bins);
    for i in 0..bins {
        let f = (i as i64 - (bins / 2) as i64) as f64 / bins as f64;
        let s = f * geom.wavelength / geom.rx_spacing;
        // Tolerate roundoff at the endfire points from the wavelength
        // division; anything genuinely past ±1 is invisible space.
        if s.abs() <= 1.0 + 1e-9 {
            grid.push((s.clamp(-1.0, 1.0).asin().to_degrees(), f));
        }
    }
    grid.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("angles are finite"));
    grid
}

/// Default cell under test: the decoded bin of the first object, or the
/// configured training cut when present.
fn cut_bin(cfg: &ScenarioConfig, scene: &Scene) -> Result<(usize, usize)> {
    if let Some(t) = &cfg.training {
        return Ok((t.cut[0], t.cut[1]));
    }
    let obj = scene.objects.first().ok_or_else(|| {
        HarnessError::Config(
            "no training cut configured and no object to derive one from".into(),
        )
    })?;
    let d = ObjectDerived::new(&scene.chirp, &scene.geom, obj)?;
    Ok((
        freq_to_bin(d.f_r, scene.fft.0),
        freq_to_bin(d.f_d, scene.fft.1),
    ))
}

fn training_bins(cfg: &ScenarioConfig, scene: &Scene, cut: (usize, usize)) -> Result<TrainingBins> {
    let (offset, guard) = cfg.training.as_ref().map_or((2, 2), |t| (t.offset, t.guard));
    Ok(TrainingBins::around(cut, offset, guard, scene.fft)?)
}

/// Estimates side information from training bins of a raw tensor.
fn estimate_from_raw(
    raw: &SampleTensor<f64>,
    scene: &Scene,
    bins: &TrainingBins,
    a_t: &SteeringVector<f64>,
    rx_dirs: &CMat<f64>,
) -> Result<EstimatedStats<f64>> {
    let mut per_bin = Vec::with_capacity(bins.len());
    for (l, k) in bins.cells() {
        let snap = decode_bin(raw, &scene.codes, scene.fft, l, k)?;
        per_bin.push(estimate_bin_stats(&snap, a_t, rx_dirs)?);
    }
    Ok(aggregate_stats(&per_bin)?)
}

/// Scores one detector on one snapshot, in dB. Degenerate statistics
/// (for example an exactly null-steered probe direction) score the floor.
fn stat_db(
    det: Option<Detector>,
    y: &[C64],
    a_t: &SteeringVector<f64>,
    a_r: &SteeringVector<f64>,
    side: &InterferenceSideInfo<f64>,
    rx_dirs: &CMat<f64>,
    r_tilde: &CMat<f64>,
    intf_terms: &[Vec<C64>],
    sigma2: f64,
) -> f64 {
    let stat = match det {
        None => matched_filter(y, a_t, a_r, sigma2),
        Some(Detector::Clairvoyant) => t_clairvoyant(y, a_t, a_r, intf_terms, sigma2),
        Some(Detector::Rs) => t_rs(y, a_t, a_r, rx_dirs, sigma2),
        Some(Detector::Lcmv) => t_lcmv(y, a_t, a_r, r_tilde, sigma2),
        Some(Detector::Gs) => t_gs(y, a_t, a_r, side),
    };
    10.0 * stat.map_or(DB_FLOOR, |s| s.value.max(DB_FLOOR)).log10()
}

/// Runs the heatmap experiment: every requested detector plus the plain
/// `angle-fft` beamforming baseline, scored on every (range bin, angle)
/// cell at one Doppler bin of the fully simulated, decoded scene.
///
/// Side information is estimated once from the training bins around the
/// cell under test; the interference transmit covariance estimate is then
/// re-projected onto each probe direction, so the regularization the GS
/// detector applies is angle-dependent exactly as its definition requires.
pub fn run_heatmap(
    cfg: &ScenarioConfig,
    detectors: &[Detector],
    doppler_bin: Option<usize>,
) -> Result<Vec<HeatmapGrid>> {
    let scene = build_scene(cfg)?;
    let cut = cut_bin(cfg, &scene)?;
    let k_probe = doppler_bin.unwrap_or(cut.1);
    if k_probe >= scene.fft.1 {
        return Err(HarnessError::Config(format!(
            "doppler bin {k_probe} outside the {}-point Doppler grid",
            scene.fft.1
        )));
    }
    let (n_rx, l_len, k_len) = (
        scene.geom.rx_count,
        scene.chirp.samples_per_pulse,
        scene.chirp.pulses_per_cpi,
    );

    // Simulate: objects + interferers + noise. Interferer tensors are kept
    // separately so the clairvoyant detector can subtract its true decoded
    // interference.
    let mut raw = SampleTensor::zeros(n_rx, l_len, k_len);
    for obj in &scene.objects {
        raw.add_assign(&simulate_object(&scene.chirp, &scene.geom, &scene.codes, obj)?)?;
    }
    let intf_tensors: Vec<SampleTensor<f64>> = scene
        .interferers
        .iter()
        .map(|i| simulate_interference(&scene.chirp, &scene.geom, i))
        .collect::<kronrad::Result<_>>()?;
    for t in &intf_tensors {
        raw.add_assign(t)?;
    }
    add_awgn(&mut raw, cfg.sigma2, &mut trial_rng(cfg.seed, HEATMAP_STREAM));

    // Decode the probed Doppler slice of the noisy scene and of each
    // interferer alone.
    let slice = decode_doppler_slice(&raw, &scene.codes, scene.fft, k_probe)?;
    let intf_slices: Vec<Vec<Snapshot<f64>>> = intf_tensors
        .iter()
        .map(|t| decode_doppler_slice(t, &scene.codes, scene.fft, k_probe))
        .collect::<kronrad::Result<_>>()?;

    // Side information: estimated around the CUT, with the configured
    // interferer bearings as known directions.
    let q = scene.interferers.len();
    let rx_freqs: Vec<f64> = scene
        .interferers
        .iter()
        .map(|i| scene.geom.rx_spatial_freq(i.rx_angle_deg))
        .collect();
    let rx_dirs = if q == 0 {
        CMat::zeros(n_rx, 0)
    } else {
        let cols: Vec<Vec<C64>> = rx_freqs
            .iter()
            .map(|&f| steering(n_rx, f).map(SteeringVector::into_vec))
            .collect::<kronrad::Result<_>>()?;
        CMat::from_fn(n_rx, q, |i, j| cols[j][i])
    };
    let cut_angle = scene.objects.first().map_or(0.0, |o| o.angle_deg);
    let a_t_cut = steering(scene.geom.tx_count, scene.geom.tx_spatial_freq(cut_angle))?;
    let bins = training_bins(cfg, &scene, cut)?;
    let stats = estimate_from_raw(&raw, &scene, &bins, &a_t_cut, &rx_dirs)?;
    let sigma2_hat = stats.sigma2_hat;
    let r_tilde = if q == 0 {
        CMat::identity(scene.geom.tx_count * n_rx)
    } else {
        stats.rtilde(&rx_dirs)?
    };

    // Probe steering and angle-dependent side information per grid column.
    let grid = fft_angle_grid(&scene.geom, cfg.angle_bins);
    let mut probes = Vec::with_capacity(grid.len());
    for &(deg, _) in &grid {
        let a_t = steering(scene.geom.tx_count, scene.geom.tx_spatial_freq(deg))?;
        let a_r = steering(n_rx, scene.geom.rx_spatial_freq(deg))?;
        let lambdas: Vec<f64> = stats
            .r_t_hat
            .iter()
            .map(|r| Ok(h2_from_cov(r, &a_t)? / sigma2_hat))
            .collect::<kronrad::Result<_>>()?;
        let side = InterferenceSideInfo::new(rx_dirs.clone(), lambdas, sigma2_hat)?;
        probes.push((a_t, a_r, side));
    }

    let angles_deg: Vec<f64> = grid.iter().map(|g| g.0).collect();
    let labels: Vec<(Option<Detector>, String)> = detectors
        .iter()
        .map(|&d| (Some(d), d.to_string()))
        .chain(std::iter::once((None, "angle-fft".to_owned())))
        .collect();

    let grids = labels
        .into_par_iter()
        .map(|(det, label)| {
            let rows: Vec<Vec<f64>> = (0..scene.fft.0)
                .map(|l| {
                    let y = &slice[l].entries;
                    let terms: Vec<Vec<C64>> = intf_slices
                        .iter()
                        .map(|s| s[l].entries.clone())
                        .collect();
                    probes
                        .iter()
                        .map(|(a_t, a_r, side)| {
                            stat_db(
                                det, y, a_t, a_r, side, &rx_dirs, &r_tilde, &terms,
                                sigma2_hat,
                            )
                        })
                        .collect()
                })
                .collect();
            HeatmapGrid {
                detector: label,
                doppler_bin: k_probe,
                angles_deg: angles_deg.clone(),
                rows,
            }
        })
        .collect();
    Ok(grids)
}

/// Unit-gain (distortionless toward `a_t ⊗ a_r`) beamforming weights of
/// one detector, for output-power measurements.
fn unit_gain_weights(
    det: Detector,
    a_t: &SteeringVector<f64>,
    a_r: &SteeringVector<f64>,
    side: &InterferenceSideInfo<f64>,
    rx_dirs: &CMat<f64>,
    r_tilde: &CMat<f64>,
    intf_terms: &[Vec<C64>],
) -> Result<Vec<C64>> {
    let v = kron(a_t.as_slice(), a_r.as_slice());
    let mn = v.len();
    let normalize = |mut w: Vec<C64>, denom: f64| -> Vec<C64> {
        let d = denom.max(DB_FLOOR);
        for x in &mut w {
            *x /= d;
        }
        w
    };
    Ok(match det {
        Detector::Clairvoyant => {
            let cols: Vec<&Vec<C64>> = intf_terms
                .iter()
                .filter(|t| t.iter().map(|x| x.norm_sqr()).sum::<f64>() > 0.0)
                .collect();
            if cols.is_empty() {
                return Ok(normalize(v, mn as f64));
            }
            let b = CMat::from_fn(mn, cols.len(), |i, j| cols[j][i]);
            let p = proj_perp(&b)?;
            let pv = p.apply(&v);
            let denom = inner(&v, &pv).re;
            normalize(pv, denom)
        }
        Detector::Rs => {
            if rx_dirs.cols() == 0 {
                return Ok(normalize(v, mn as f64));
            }
            let p = proj_perp(rx_dirs)?;
            let pr = p.apply(a_r.as_slice());
            let denom = a_t.len() as f64 * inner(a_r.as_slice(), &pr).re;
            normalize(kron(a_t.as_slice(), &pr), denom)
        }
        Detector::Lcmv => {
            let x = r_tilde.cholesky(1e-12)?.solve(&v);
            let denom = inner(&v, &x).re;
            normalize(x, denom)
        }
        Detector::Gs => gs_weights(a_t, a_r, side)?.into_vec(),
    })
}

/// Runs the OIP sweep: `cfg.trials` independent draws of the first
/// configured interferer with its bearing uniform in [-80°, 80°] and range
/// uniform in [1 m, 3 m], each scored at the decoded bin where that draw's
/// interference actually peaks.
///
/// Per draw, the full chain runs once: simulate, add noise, locate the
/// interference peak at the probe Doppler, estimate side information from
/// training bins around the probe, then evaluate every detector there. The
/// probe steering uses the drawn bearing; the side-information direction is
/// its nearest angle-grid point.
pub fn run_oip(cfg: &ScenarioConfig, detectors: &[Detector]) -> Result<Vec<OipRun>> {
    let scene = build_scene(cfg)?;
    let template = scene.interferers.first().ok_or_else(|| {
        HarnessError::Config("the OIP sweep needs at least one interferer".into())
    })?;
    let n_rx = scene.geom.rx_count;
    let k_probe = scene.fft.1 / 2;
    let grid = fft_angle_grid(&scene.geom, cfg.angle_bins);
    let labels: Vec<String> = detectors.iter().map(|d| d.to_string()).collect();

    (0..cfg.trials)
        .into_par_iter()
        .map(|run| -> Result<OipRun> {
            let mut rng = trial_rng(cfg.seed, OIP_STREAM + run as u64);
            let angle_deg: f64 = rng.gen_range(-80.0..=80.0);
            let range_m: f64 = rng.gen_range(1.0..=3.0);
            let mut intf = template.clone();
            intf.range = range_m;
            intf.tx_angle_deg = angle_deg;
            intf.rx_angle_deg = angle_deg;

            let clean = simulate_interference(&scene.chirp, &scene.geom, &intf)?;
            let mut raw = clean.clone();
            add_awgn(&mut raw, cfg.sigma2, &mut rng);

            // True interference bin: energy peak of the noise-free decode
            // at the probe Doppler.
            let intf_slice = decode_doppler_slice(&clean, &scene.codes, scene.fft, k_probe)?;
            let l_probe = intf_slice
                .iter()
                .enumerate()
                .max_by(|a, b| {
                    let pa: f64 = a.1.entries.iter().map(|v| v.norm_sqr()).sum();
                    let pb: f64 = b.1.entries.iter().map(|v| v.norm_sqr()).sum();
                    pa.partial_cmp(&pb).expect("powers are finite")
                })
                .map(|(l, _)| l)
                .expect("slice is non-empty");

            // Probe steering on the processing angle grid (detectors are
            // asked about a cell of the angle map); side-information
            // direction at the drawn bearing itself.
            let f_true = scene.geom.rx_spatial_freq(angle_deg);
            let (g_deg, f_grid) = grid
                .iter()
                .copied()
                .min_by(|a, b| {
                    (a.1 - f_true)
                        .abs()
                        .partial_cmp(&(b.1 - f_true).abs())
                        .expect("frequencies are finite")
                })
                .expect("angle grid is non-empty");
            let a_t = steering(scene.geom.tx_count, scene.geom.tx_spatial_freq(g_deg))?;
            let a_r = steering(n_rx, f_grid)?;
            let dir = steering(n_rx, f_true)?;
            let rx_dirs = CMat::from_fn(n_rx, 1, |i, _| dir.as_slice()[i]);

            let bins = TrainingBins::around((l_probe, k_probe), 2, 2, scene.fft)?;
            let stats = estimate_from_raw(&raw, &scene, &bins, &a_t, &rx_dirs)?;
            let side = stats.side_info(rx_dirs.clone())?;
            let r_tilde = stats.rtilde(&rx_dirs)?;
            let y = decode_bin(&raw, &scene.codes, scene.fft, l_probe, k_probe)?;
            let terms = vec![intf_slice[l_probe].entries.clone()];

            let values = detectors
                .iter()
                .zip(&labels)
                .map(|(&det, label)| {
                    let db = match unit_gain_weights(
                        det, &a_t, &a_r, &side, &rx_dirs, &r_tilde, &terms,
                    ) {
                        Ok(w) => {
                            let p = inner(&w, &y.entries).norm_sqr();
                            10.0 * p.clamp(DB_FLOOR, 1e300).log10()
                        }
                        Err(_) => 10.0 * DB_FLOOR.log10(),
                    };
                    (label.clone(), db)
                })
                .collect();
            Ok(OipRun {
                run,
                angle_deg,
                range_m,
                bin: (l_probe, k_probe),
                values,
            })
        })
        .collect()
}

/// Empirical CDFs per detector from an OIP sweep.
#[must_use]
pub fn oip_cdfs(runs: &[OipRun]) -> Vec<OipCdf> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    first
        .values
        .iter()
        .enumerate()
        .map(|(di, (label, _))| {
            let mut vals: Vec<f64> = runs.iter().map(|r| r.values[di].1).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).expect("dB values are finite"));
            let n = vals.len() as f64;
            let cdf = (1..=vals.len()).map(|i| i as f64 / n).collect();
            OipCdf {
                detector: label.clone(),
                oip_db: vals,
                cdf,
            }
        })
        .collect()
}

/// Linear-interpolation percentile of one detector's sorted OIP values.
#[must_use]
pub fn percentile(sorted_db: &[f64], p: f64) -> f64 {
    assert!(!sorted_db.is_empty() && (0.0..=1.0).contains(&p));
    let pos = p * (sorted_db.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted_db[lo] * (1.0 - frac) + sorted_db[hi] * frac
}
