//! Scenario configuration: JSON schema, defaults, and validation.
//!
//! A scenario file describes one experiment end to end: the victim radar
//! (chirp, array, code matrix), the scene content (objects, interferers or
//! synthetic interference directions), noise and signal levels, and the
//! processing grid. Every field has a default except the scene content, so
//! minimal configs stay short. [`load_scenario`] parses and validates in one
//! step; all downstream code can assume a validated config.

use kronrad::signal_chain::InterfererTruth;
use kronrad::waveform::{make_codes, ArrayGeometry, ChirpParams, CodeMatrix, CodeMode};
use kronrad::{C64, SPEED_OF_LIGHT};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// How snapshots are produced.
///
/// * `Synthetic` — snapshots are drawn directly in the virtual-array domain
///   from the essential signal model (steering vectors plus Gaussian
///   interference amplitudes). Fast; used for ROC sweeps.
/// * `Realistic` — snapshots come from the full sample-level chain:
///   time-domain simulation, range-Doppler decode, side-information
///   estimation from training bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Synthetic,
    Realistic,
}

/// Victim radar description. Defaults reproduce a 77 GHz MIMO-FMCW design
/// with a 4 Tx x 8 Rx array and Hadamard slow-time coding.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VictimConfig {
    /// Chirp slope in Hz/s.
    #[serde(default = "d_beta")]
    pub beta: f64,
    /// Chirp duration in seconds.
    #[serde(default = "d_t_chirp")]
    pub t_chirp: f64,
    /// Pulse repetition interval in seconds.
    #[serde(default = "d_t_pri")]
    pub t_pri: f64,
    /// Carrier frequency in Hz.
    #[serde(default = "d_f_c")]
    pub f_c: f64,
    /// Low-pass (anti-aliasing) cutoff in Hz.
    #[serde(default = "d_f_l")]
    pub f_l: f64,
    /// ADC sample interval in seconds.
    #[serde(default = "d_delta_t")]
    pub delta_t: f64,
    /// Fast-time samples per pulse.
    #[serde(default = "d_samples")]
    pub samples_per_pulse: usize,
    /// Slow-time pulses per CPI.
    #[serde(default = "d_pulses")]
    pub pulses_per_cpi: usize,
    /// Transmit element count.
    #[serde(default = "d_tx_count")]
    pub tx_count: usize,
    /// Receive element count.
    #[serde(default = "d_rx_count")]
    pub rx_count: usize,
    /// Transmit element spacing in meters.
    #[serde(default = "d_tx_spacing")]
    pub tx_spacing: f64,
    /// Receive element spacing in meters.
    #[serde(default = "d_rx_spacing")]
    pub rx_spacing: f64,
    /// Slow-time code family: `ddm-hadamard`, `ddm-chu`, `tdm`, or `phased`.
    #[serde(default = "d_code_mode")]
    pub code_mode: String,
}

fn d_beta() -> f64 {
    15e12
}
fn d_t_chirp() -> f64 {
    30.7e-6
}
fn d_t_pri() -> f64 {
    37.7e-6
}
fn d_f_c() -> f64 {
    SPEED_OF_LIGHT / 0.0039
}
fn d_f_l() -> f64 {
    15e6
}
fn d_delta_t() -> f64 {
    1.0 / 16.7e6
}
fn d_samples() -> usize {
    512
}
fn d_pulses() -> usize {
    256
}
fn d_tx_count() -> usize {
    4
}
fn d_rx_count() -> usize {
    8
}
fn d_tx_spacing() -> f64 {
    0.0156
}
fn d_rx_spacing() -> f64 {
    0.00195
}
fn d_code_mode() -> String {
    "ddm-hadamard".to_owned()
}

impl Default for VictimConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults are total")
    }
}

impl VictimConfig {
    /// Chirp parameters of the victim radar.
    #[must_use]
    pub fn chirp(&self) -> ChirpParams<f64> {
        ChirpParams {
            beta: self.beta,
            t_chirp: self.t_chirp,
            t_pri: self.t_pri,
            f_c: self.f_c,
            f_l: self.f_l,
            delta_t: self.delta_t,
            samples_per_pulse: self.samples_per_pulse,
            pulses_per_cpi: self.pulses_per_cpi,
        }
    }

    /// Array geometry of the victim radar. The array wavelength is tied to
    /// the carrier.
    #[must_use]
    pub fn geometry(&self) -> ArrayGeometry<f64> {
        ArrayGeometry {
            tx_count: self.tx_count,
            rx_count: self.rx_count,
            tx_spacing: self.tx_spacing,
            rx_spacing: self.rx_spacing,
            wavelength: SPEED_OF_LIGHT / self.f_c,
        }
    }

    /// Slow-time code matrix of the victim radar.
    pub fn codes(&self) -> Result<CodeMatrix<f64>> {
        let mode: CodeMode = self
            .code_mode
            .parse()
            .map_err(|e: kronrad::Error| HarnessError::Config(e.to_string()))?;
        Ok(make_codes(mode, self.pulses_per_cpi, self.tx_count)?)
    }
}

/// A point object in the scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectConfig {
    /// Range in meters.
    #[serde(default = "d_range")]
    pub range: f64,
    /// Radial velocity in m/s (positive = receding).
    #[serde(default)]
    pub velocity: f64,
    /// Direction of arrival in degrees off boresight.
    pub angle_deg: f64,
    /// Complex reflection amplitude `[re, im]`. Takes precedence over
    /// `rcs_dbsm` when both are given.
    #[serde(default)]
    pub amplitude: Option<[f64; 2]>,
    /// Radar cross-section in dBsm, mapped to a real amplitude
    /// `10^(rcs/20)` (no path-loss model; elements are isotropic).
    #[serde(default)]
    pub rcs_dbsm: Option<f64>,
}

fn d_range() -> f64 {
    50.0
}

impl ObjectConfig {
    /// Complex amplitude implied by the config (defaults to 1).
    #[must_use]
    pub fn alpha(&self) -> C64 {
        if let Some([re, im]) = self.amplitude {
            C64::new(re, im)
        } else if let Some(rcs) = self.rcs_dbsm {
            C64::new(10f64.powf(rcs / 20.0), 0.0)
        } else {
            C64::new(1.0, 0.0)
        }
    }
}

/// An interfering radar in a realistic scene.
///
/// The interferer's carrier, low-pass cutoff, sampling, and CPI length
/// default to the victim's; its chirp slope and timing are its own.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfererConfig {
    /// One-way range from the victim in meters.
    pub range: f64,
    /// Relative radial velocity in m/s.
    #[serde(default)]
    pub velocity: f64,
    /// Direction of the victim as seen from both arrays, in degrees.
    pub angle_deg: f64,
    /// Complex coupling amplitude `[re, im]`.
    #[serde(default = "d_unit_amp")]
    pub amplitude: [f64; 2],
    /// Interferer chirp slope in Hz/s.
    pub beta: f64,
    /// Interferer chirp duration in seconds.
    pub t_chirp: f64,
    /// Interferer pulse repetition interval in seconds.
    pub t_pri: f64,
    /// Start-of-CPI misalignment between the two radars, in seconds.
    #[serde(default)]
    pub tau_syn: f64,
    /// Interferer transmit element count.
    #[serde(default = "d_itx_count")]
    pub tx_count: usize,
    /// Interferer transmit element spacing in meters.
    #[serde(default = "d_itx_spacing")]
    pub tx_spacing: f64,
    /// Interferer slow-time code family.
    #[serde(default = "d_icode_mode")]
    pub code_mode: String,
    /// Interferer pulses per CPI (defaults to the victim's).
    #[serde(default)]
    pub pulses_per_cpi: Option<usize>,
    /// Optional per-transmitter beamforming weights `[re, im]`.
    #[serde(default)]
    pub tx_weights: Option<Vec<[f64; 2]>>,
}

fn d_unit_amp() -> [f64; 2] {
    [1.0, 0.0]
}
fn d_itx_count() -> usize {
    8
}
fn d_itx_spacing() -> f64 {
    0.0039
}
fn d_icode_mode() -> String {
    "ddm-chu".to_owned()
}

impl InterfererConfig {
    /// Builds the simulation-chain truth record for this interferer.
    ///
    /// `victim` supplies the receive-side parameters the interferer has no
    /// say in: carrier, low-pass cutoff, sample grid, and samples per pulse.
    pub fn truth(&self, victim: &ChirpParams<f64>) -> Result<InterfererTruth<f64>> {
        let pulses = self.pulses_per_cpi.unwrap_or(victim.pulses_per_cpi);
        let mode: CodeMode = self
            .code_mode
            .parse()
            .map_err(|e: kronrad::Error| HarnessError::Config(e.to_string()))?;
        let codes = make_codes(mode, pulses, self.tx_count)?;
        let chirp = ChirpParams {
            beta: self.beta,
            t_chirp: self.t_chirp,
            t_pri: self.t_pri,
            f_c: victim.f_c,
            f_l: victim.f_l,
            delta_t: victim.delta_t,
            samples_per_pulse: victim.samples_per_pulse,
            pulses_per_cpi: pulses,
        };
        Ok(InterfererTruth {
            range: self.range,
            velocity: self.velocity,
            tx_angle_deg: self.angle_deg,
            rx_angle_deg: self.angle_deg,
            alpha: C64::new(self.amplitude[0], self.amplitude[1]),
            chirp,
            tau_syn: self.tau_syn,
            codes,
            tx_spacing: self.tx_spacing,
            tx_weights: self
                .tx_weights
                .as_ref()
                .map(|w| w.iter().map(|[re, im]| C64::new(*re, *im)).collect()),
        })
    }
}

/// A synthetic interference direction for virtual-domain Monte Carlo.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticInterferer {
    /// Direction of arrival in degrees.
    pub angle_deg: f64,
    /// Exponential temporal-correlation coefficient of the decoded
    /// interference amplitudes across transmit channels, in `[0, 1)`.
    #[serde(default = "d_rho")]
    pub rho: f64,
    /// Per-interferer INR override in dB; the scenario-level `inr_db`
    /// applies when absent.
    #[serde(default)]
    pub inr_db: Option<f64>,
}

fn d_rho() -> f64 {
    0.6
}

/// Training-bin layout for side-information estimation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    /// Cell under test as `[range_bin, doppler_bin]` on the FFT grid.
    pub cut: [usize; 2],
    /// Training offset from the CUT in bins.
    #[serde(default = "d_two")]
    pub offset: usize,
    /// Guard width in bins.
    #[serde(default = "d_two")]
    pub guard: usize,
}

fn d_two() -> usize {
    2
}

/// Top-level scenario description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    /// Master RNG seed; every trial derives its own substream from it.
    #[serde(default = "d_seed")]
    pub seed: u64,
    /// Monte Carlo trials (ROC) or random draws (interference-power sweep).
    #[serde(default = "d_trials")]
    pub trials: usize,
    /// Object SNR in dB: `|b|^2 / sigma2` of the decoded object amplitude.
    #[serde(default = "d_snr")]
    pub snr_db: f64,
    /// Interference-to-noise ratio in dB for synthetic interference.
    #[serde(default)]
    pub inr_db: f64,
    /// Noise power. Virtual-array snapshot domain in synthetic mode;
    /// per raw sample in realistic mode.
    #[serde(default = "d_one")]
    pub sigma2: f64,
    /// Variance of the covariance-perturbation entries applied to the
    /// interference side information in synthetic mode. Zero disables it.
    #[serde(default)]
    pub sigma2_pert: f64,
    #[serde(default)]
    pub victim: VictimConfig,
    /// Point objects in the scene.
    #[serde(default)]
    pub objects: Vec<ObjectConfig>,
    /// Full interfering radars (realistic mode).
    #[serde(default)]
    pub interferers: Vec<InterfererConfig>,
    /// Interference directions for synthetic mode.
    #[serde(default)]
    pub synthetic_interference: Vec<SyntheticInterferer>,
    /// Range and Doppler FFT lengths `[range, doppler]`.
    #[serde(default = "d_fft")]
    pub fft_sizes: [usize; 2],
    /// Angle-grid bins for heatmaps.
    #[serde(default = "d_angle_bins")]
    pub angle_bins: usize,
    /// False-alarm grid for ROC sweeps; log-spaced default when absent.
    #[serde(default)]
    pub pfa_grid: Option<Vec<f64>>,
    /// Training-bin layout; defaults to bins around the first object.
    #[serde(default)]
    pub training: Option<TrainingConfig>,
}

fn d_seed() -> u64 {
    0x6b72_6e72
}
fn d_trials() -> usize {
    10_000
}
fn d_snr() -> f64 {
    -5.0
}
fn d_one() -> f64 {
    1.0
}
fn d_fft() -> [usize; 2] {
    [1024, 256]
}
fn d_angle_bins() -> usize {
    32
}

/// Default log-spaced false-alarm grid, 20 points from 1e-2 to 0.95.
#[must_use]
pub fn default_pfa_grid() -> Vec<f64> {
    let (lo, hi) = (1e-2f64.ln(), 0.95f64.ln());
    (0..20)
        .map(|i| (lo + (hi - lo) * i as f64 / 19.0).exp())
        .collect()
}

impl ScenarioConfig {
    /// Active false-alarm grid.
    #[must_use]
    pub fn pfa_grid(&self) -> Vec<f64> {
        self.pfa_grid.clone().unwrap_or_else(default_pfa_grid)
    }

    /// Validates cross-field consistency beyond what serde can express.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if !(self.sigma2 > 0.0) {
            return fail(format!("sigma2 must be positive, got {}", self.sigma2));
        }
        if self.sigma2_pert < 0.0 {
            return fail(format!(
                "sigma2_pert must be non-negative, got {}",
                self.sigma2_pert
            ));
        }
        self.victim.chirp().validate()?;
        self.victim.geometry().validate()?;
        self.victim.codes()?;
        if self.fft_sizes[0] < self.victim.samples_per_pulse {
            return fail(format!(
                "range FFT size {} is smaller than samples_per_pulse {}",
                self.fft_sizes[0], self.victim.samples_per_pulse
            ));
        }
        if self.fft_sizes[1] < self.victim.pulses_per_cpi {
            return fail(format!(
                "doppler FFT size {} is smaller than pulses_per_cpi {}",
                self.fft_sizes[1], self.victim.pulses_per_cpi
            ));
        }
        if self.angle_bins == 0 {
            return fail("angle_bins must be at least 1".into());
        }
        if let Some(grid) = &self.pfa_grid {
            if grid.is_empty() {
                return fail("pfa_grid must not be empty".into());
            }
            if grid.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
                return fail("pfa_grid entries must lie strictly in (0, 1)".into());
            }
        }
        if let Some(t) = &self.training {
            if t.cut[0] >= self.fft_sizes[0] || t.cut[1] >= self.fft_sizes[1] {
                return fail(format!(
                    "training cut ({}, {}) is outside the FFT grid ({}, {})",
                    t.cut[0], t.cut[1], self.fft_sizes[0], self.fft_sizes[1]
                ));
            }
            if t.offset == 0 {
                return fail("training offset must be at least 1".into());
            }
        }
        match self.mode {
            Mode::Synthetic => {
                if self.objects.is_empty() {
                    return fail("synthetic mode needs at least one object".into());
                }
                let q = self.synthetic_interference.len();
                if q >= self.victim.rx_count {
                    return fail(format!(
                        "{q} interference directions need at least {} receive \
                         elements, got {}",
                        q + 1,
                        self.victim.rx_count
                    ));
                }
                for s in &self.synthetic_interference {
                    if !(s.rho >= 0.0 && s.rho < 1.0) {
                        return fail(format!(
                            "correlation rho must lie in [0, 1), got {}",
                            s.rho
                        ));
                    }
                }
            }
            Mode::Realistic => {
                for i in &self.interferers {
                    i.truth(&self.victim.chirp())?.validate()?;
                }
                if self.interferers.len() >= self.victim.rx_count {
                    return fail(format!(
                        "{} interferers need at least {} receive elements, got {}",
                        self.interferers.len(),
                        self.interferers.len() + 1,
                        self.victim.rx_count
                    ));
                }
            }
        }
        Ok(())
    }

    /// Decoded-domain object amplitude implied by `snr_db` and `sigma2`.
    #[must_use]
    pub fn object_b(&self) -> C64 {
        C64::new(self.sigma2.sqrt() * 10f64.powf(self.snr_db / 20.0), 0.0)
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &std::path::Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        HarnessError::Config(format!("cannot read {}: {e}", path.display()))
    })?;
    let cfg: ScenarioConfig = serde_json::from_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}
