//! Uncoordinated-interferer path: pulse overlap bookkeeping, the low-pass
//! residency gate, and the sampled interference tensor.
//!
//! An interfering radar transmits its own FMCW pulse train with chirp rate
//! `β̃`, duration `T̃`, repetition interval `T̃_PRI`, and a start offset
//! `τ̃_syn` relative to the victim, reaching the victim after the one-way
//! delay `τ̃ = R̃/c`. Pulse `k̃` of the interferer lands on victim pulse `k`
//! with intra-pulse offset
//!
//! ```text
//! τ′_{k,k̃} = k̃·T̃_PRI + τ̃_syn − k·T_PRI,   −T̃_PRI < τ′_{k,k̃} < T_PRI,
//! ```
//!
//! and survives the victim's dechirp + low-pass filter on the fast-time
//! samples `l` where both the beat frequency and the residency window
//! admit it:
//!
//! ```text
//! 0 < β̃(τ′+τ̃) − (β̃−β)·lΔT < f_L,
//! τ′+τ̃ < lΔT < min{T, τ′+τ̃+T̃}.
//! ```
//!
//! Each surviving sample contributes
//!
//! ```text
//! α̃ e^{-j2π f_c τ̃} · G_k̃ · e^{jπβ̃(τ′+τ̃)²} e^{-j2π f_c τ′}
//!   · e^{jπ(β̃−β)(lΔT)²} e^{-j2π f̃_r l} · e^{-j2π f̃_d k} · e^{-j2π f̃_φr n},
//! ```
//!
//! with `f̃_r = (β̃(τ′+τ̃) + ṽ/λ)ΔT`, the one-way Doppler
//! `f̃_d = f_c ṽ T_PRI / c`, and the interferer's transmit side collapsed
//! into `G_k̃ = Σ_m̃ c̃_{k̃,m̃} w̃_m̃ e^{-j2π f̃_φt m̃}` — the victim cannot
//! resolve individual interfering transmitters inside one pulse.

use crate::error::{Error, Result};
use crate::scalar::{cis_cycles, cone, czero, RadarScalar, C};
use crate::waveform::{ArrayGeometry, ChirpParams, CodeMatrix};

use super::SampleTensor;

/// Ground-truth description of one interfering radar.
///
/// Only the waveform fields of `chirp` (`beta`, `t_chirp`, `t_pri`,
/// `pulses_per_cpi`) describe the interferer; its ADC-side fields are
/// unused by the interference path and should mirror the victim's so the
/// struct validates.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfererTruth<T: RadarScalar> {
    /// One-way distance `R̃` to the victim in meters (must be positive).
    pub range: T,
    /// Radial velocity `ṽ` in m/s.
    pub velocity: T,
    /// Angle `φ̃_t` of the victim as seen from the interferer's boresight,
    /// in degrees.
    pub tx_angle_deg: T,
    /// Angle `φ̃_r` of the interferer as seen from the victim's boresight,
    /// in degrees.
    pub rx_angle_deg: T,
    /// Complex path amplitude `α̃`.
    pub alpha: C<T>,
    /// Interferer waveform: `β̃`, `T̃`, `T̃_PRI`, `K̃`.
    pub chirp: ChirpParams<T>,
    /// Start-time offset `τ̃_syn` of the interferer's first pulse relative
    /// to the victim's, in seconds.
    pub tau_syn: T,
    /// Interferer slow-time codes, `K̃×M̃`.
    pub codes: CodeMatrix<T>,
    /// Interferer transmit element spacing `d̃_t` in meters.
    pub tx_spacing: T,
    /// Optional transmit beamforming weights `w̃` (length `M̃`);
    /// all-ones when absent.
    pub tx_weights: Option<Vec<C<T>>>,
}

impl<T: RadarScalar> InterfererTruth<T> {
    /// Validates geometry, waveform, and code/weight dimensions.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] for a non-positive range,
    /// [`Error::DimensionMismatch`] when codes or weights disagree with
    /// `K̃`/`M̃`, plus chirp validation errors.
    pub fn validate(&self) -> Result<()> {
        if !(self.range > T::zero()) || !self.range.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interferer range must be positive, got {}",
                self.range
            )));
        }
        self.chirp.validate()?;
        if self.codes.pulses() != self.chirp.pulses_per_cpi {
            return Err(Error::DimensionMismatch(format!(
                "interferer codes cover {} pulses but K̃ = {}",
                self.codes.pulses(),
                self.chirp.pulses_per_cpi
            )));
        }
        if let Some(w) = &self.tx_weights {
            if w.len() != self.codes.tx_count() {
                return Err(Error::DimensionMismatch(format!(
                    "{} transmit weights for {} interferer transmitters",
                    w.len(),
                    self.codes.tx_count()
                )));
            }
        }
        if !(self.tx_spacing > T::zero()) || !self.tx_spacing.is_finite() {
            return Err(Error::InvalidParameter(
                "interferer transmit spacing must be positive".into(),
            ));
        }
        Ok(())
    }

    /// One-way propagation delay `τ̃ = R̃/c` in seconds.
    #[inline]
    pub fn tau_tilde(&self) -> T {
        self.range / T::lit(crate::SPEED_OF_LIGHT)
    }

    /// Beamforming weight of transmitter `m̃` (defaults to one).
    #[inline]
    fn weight(&self, m: usize) -> C<T> {
        match &self.tx_weights {
            Some(w) => w[m],
            None => cone(),
        }
    }

    /// Transmit-side pulse factor `G_k̃ = Σ_m̃ c̃_{k̃,m̃} w̃_m̃ e^{-j2πf̃_φt m̃}`.
    fn tx_pulse_factor(&self, k_tilde: usize, f_phi_t: T) -> C<T> {
        let mut acc = czero::<T>();
        for m in 0..self.codes.tx_count() {
            acc += self.codes.entry(k_tilde, m) * self.weight(m) * cis_cycles(-f_phi_t * T::idx(m));
        }
        acc
    }
}

/// Victim pulses `k` hit by interferer pulse `k̃`, each with its offset
/// `τ′_{k,k̃}`; the strict window `−T̃_PRI < τ′ < T_PRI` keeps exactly the
/// pulses whose chirps can intersect in time.
///
/// # Errors
///
/// [`Error::InvalidParameter`] when `k̃ ≥ K̃`.
pub fn overlap_set<T: RadarScalar>(
    victim: &ChirpParams<T>,
    intf: &InterfererTruth<T>,
    k_tilde: usize,
) -> Result<Vec<(usize, T)>> {
    if k_tilde >= intf.chirp.pulses_per_cpi {
        return Err(Error::InvalidParameter(format!(
            "interferer pulse {k_tilde} outside K̃ = {}",
            intf.chirp.pulses_per_cpi
        )));
    }
    let base = T::idx(k_tilde) * intf.chirp.t_pri + intf.tau_syn;
    let mut out = Vec::new();
    for k in 0..victim.pulses_per_cpi {
        let tau_p = base - T::idx(k) * victim.t_pri;
        if tau_p > -intf.chirp.t_pri && tau_p < victim.t_pri {
            out.push((k, tau_p));
        }
    }
    Ok(out)
}

/// Fast-time samples of one victim pulse on which an interfering chirp at
/// offset `τ′` survives dechirp + low-pass filtering: all `l ∈ [0, L)`
/// with `0 < β̃(τ′+τ̃) − (β̃−β)·lΔT < f_L` and
/// `τ′+τ̃ < lΔT < min{T, τ′+τ̃+T̃}` (all strict).
pub fn lpf_gate<T: RadarScalar>(
    victim: &ChirpParams<T>,
    intf_chirp: &ChirpParams<T>,
    tau_prime: T,
    tau_tilde: T,
) -> Vec<usize> {
    let arrival = tau_prime + tau_tilde;
    let depart = (arrival + intf_chirp.t_chirp).min(victim.t_chirp);
    let beta_d = intf_chirp.beta - victim.beta;
    let mut out = Vec::new();
    for l in 0..victim.samples_per_pulse {
        let u = T::idx(l) * victim.delta_t;
        let beat = intf_chirp.beta * arrival - beta_d * u;
        if beat > T::zero() && beat < victim.f_l && u > arrival && u < depart {
            out.push(l);
        }
    }
    out
}

/// Synthesizes the sampled baseband interference tensor of one interferer
/// over the victim's CPI. An interferer that never overlaps the victim's
/// pulses (or never passes the low-pass gate) yields the zero tensor.
///
/// # Errors
///
/// Validation errors from the victim chirp, geometry, or interferer
/// description.
pub fn simulate_interference<T: RadarScalar>(
    victim: &ChirpParams<T>,
    geom: &ArrayGeometry<T>,
    intf: &InterfererTruth<T>,
) -> Result<SampleTensor<T>> {
    victim.validate()?;
    geom.validate()?;
    intf.validate()?;
    let lambda = victim.wavelength();
    let tau_t = intf.tau_tilde();
    let f_d = intf.velocity * victim.t_pri / lambda;
    let f_phi_t = intf.tx_spacing * intf.tx_angle_deg.to_radians().sin() / lambda;
    let f_phi_r = geom.rx_spatial_freq(intf.rx_angle_deg);
    let (n_rx, k_len) = (geom.rx_count, victim.pulses_per_cpi);
    let mut out = SampleTensor::zeros(n_rx, victim.samples_per_pulse, k_len);
    let scale0 = intf.alpha * cis_cycles(-victim.f_c * tau_t);
    let rx_ph: Vec<C<T>> = (0..n_rx)
        .map(|n| cis_cycles(-f_phi_r * T::idx(n)))
        .collect();
    let half = T::lit(0.5);
    for k_tilde in 0..intf.chirp.pulses_per_cpi {
        let g = intf.tx_pulse_factor(k_tilde, f_phi_t);
        for (k, tau_p) in overlap_set(victim, intf, k_tilde)? {
            let gate = lpf_gate(victim, &intf.chirp, tau_p, tau_t);
            if gate.is_empty() {
                continue;
            }
            let arrival = tau_p + tau_t;
            let f_r = (intf.chirp.beta * arrival + intf.velocity / lambda) * victim.delta_t;
            // Pulse-level phase: chirp offset, carrier offset, Doppler.
            let pulse = scale0
                * g
                * cis_cycles(intf.chirp.beta * arrival * arrival * half)
                * cis_cycles(-victim.f_c * tau_p)
                * cis_cycles(-f_d * T::idx(k));
            for &l in &gate {
                let u = T::idx(l) * victim.delta_t;
                let v = pulse
                    * cis_cycles((intf.chirp.beta - victim.beta) * u * u * half)
                    * cis_cycles(-f_r * T::idx(l));
                for n in 0..n_rx {
                    out[(n, l, k)] += v * rx_ph[n];
                }
            }
        }
    }
    Ok(out)
}
