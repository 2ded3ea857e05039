//! Canonical special-case reduction checks.
//!
//! Builds three limiting scenarios — a fully coherent interferer, a
//! phased-array (rank-one code) pair, and time-division multiplexing on
//! both sides — and runs the chain-versus-closed-form validators over a
//! sweep of CPI lengths. Any failed reduction is a numerical defect in the
//! simulation chain, so the runner reports it as [`HarnessError::Numerical`].

use kronrad::signal_chain::{
    validate_special_case, InterfererTruth, ReductionReport, SpecialCaseMode,
    SpecialCaseScenario,
};
use kronrad::waveform::{make_codes, ArrayGeometry, ChirpParams, CodeMode};
use kronrad::C64;

use crate::Result;

/// CPI lengths swept by default.
pub const DEFAULT_CPI_LENGTHS: [usize; 3] = [16, 64, 256];

/// Outcome of one validator run.
#[derive(Debug, Clone)]
pub struct SpecialCaseOutcome {
    pub mode: SpecialCaseMode,
    /// CPI length the scenario was built with.
    pub pulses: usize,
    pub report: ReductionReport<f64>,
}

fn base_chirp(samples: usize, pulses: usize) -> ChirpParams<f64> {
    ChirpParams {
        beta: 1e12,
        t_chirp: 32.5e-6,
        t_pri: 40e-6,
        f_c: 76.92e9,
        f_l: 10e6,
        delta_t: 32e-6 / samples as f64,
        samples_per_pulse: samples,
        pulses_per_cpi: pulses,
    }
}

fn geometry(chirp: &ChirpParams<f64>, m: usize, n: usize) -> ArrayGeometry<f64> {
    let lambda = chirp.wavelength();
    ArrayGeometry {
        tx_count: m,
        rx_count: n,
        tx_spacing: n as f64 * 0.5 * lambda,
        rx_spacing: 0.5 * lambda,
        wavelength: lambda,
    }
}

/// Velocity whose one-way Doppler lands exactly on slow-time DFT bin `d`.
fn on_bin_velocity(chirp: &ChirpParams<f64>, d: i64, pulses: usize) -> f64 {
    (d as f64 / pulses as f64) * chirp.wavelength() / chirp.t_pri
}

/// Coherent case: same chirp, same codes, zero misalignment, on-bin
/// Doppler — the interferer must decode exactly like a point object.
fn coherent_scenario(pulses: usize) -> Result<SpecialCaseScenario<f64>> {
    let victim = base_chirp(64, pulses);
    let geometry = geometry(&victim, 4, 4);
    let codes = make_codes(CodeMode::DdmHadamard, pulses, 4)?;
    let interferer = InterfererTruth {
        range: 84.0,
        velocity: on_bin_velocity(&victim, 3, pulses),
        tx_angle_deg: -25.0,
        rx_angle_deg: 40.0,
        alpha: C64::new(0.9, 0.4),
        chirp: victim,
        tau_syn: 0.0,
        codes: codes.clone(),
        tx_spacing: geometry.tx_spacing * 0.5,
        tx_weights: None,
    };
    Ok(SpecialCaseScenario {
        victim,
        geometry,
        victim_codes: codes,
        interferer,
    })
}

/// Phased-array case: constant codes on both sides, beamformed interferer
/// with a different sweep — the decoded snapshot must lose its transmit
/// dimension.
fn phased_scenario(pulses: usize) -> Result<SpecialCaseScenario<f64>> {
    let victim = base_chirp(48, pulses);
    let geometry = geometry(&victim, 3, 4);
    let victim_codes = make_codes(CodeMode::Phased, pulses, 3)?;
    let mut ichirp = victim;
    ichirp.beta = 1.2e12;
    ichirp.t_chirp = 29e-6;
    ichirp.t_pri = 46e-6;
    let interferer = InterfererTruth {
        range: 3.1,
        velocity: -7.0,
        tx_angle_deg: 33.0,
        rx_angle_deg: -21.0,
        alpha: C64::new(1.3, -0.2),
        chirp: ichirp,
        tau_syn: 4.7e-6,
        codes: make_codes(CodeMode::Phased, pulses, 5)?,
        tx_spacing: 0.5 * victim.wavelength(),
        tx_weights: Some(vec![
            C64::new(1.0, 0.0),
            C64::new(0.8, 0.2),
            C64::new(0.6, -0.4),
            C64::new(0.9, 0.1),
            C64::new(0.7, 0.5),
        ]),
    };
    Ok(SpecialCaseScenario {
        victim,
        geometry,
        victim_codes,
        interferer,
    })
}

/// TDM case: one active transmitter per pulse on both sides — the decoded
/// interference must stay Kronecker-separable (rank one as an M×N reshape).
fn tdm_scenario(pulses: usize) -> Result<SpecialCaseScenario<f64>> {
    let victim = base_chirp(48, pulses);
    let geometry = geometry(&victim, 4, 4);
    let victim_codes = make_codes(CodeMode::Tdm, pulses, 4)?;
    let mut ichirp = victim;
    ichirp.beta = 0.85e12;
    ichirp.t_pri = 44e-6;
    let interferer = InterfererTruth {
        range: 2.4,
        velocity: 11.0,
        tx_angle_deg: -40.0,
        rx_angle_deg: 28.0,
        alpha: C64::new(0.7, 0.7),
        chirp: ichirp,
        tau_syn: 2.2e-6,
        codes: make_codes(CodeMode::Tdm, pulses, 2)?,
        tx_spacing: 0.5 * victim.wavelength(),
        tx_weights: None,
    };
    Ok(SpecialCaseScenario {
        victim,
        geometry,
        victim_codes,
        interferer,
    })
}

/// Runs all three validators over the given CPI lengths.
///
/// Returns every outcome (passing and failing) so callers can print a
/// complete table before deciding on an exit code.
pub fn run_special_cases(cpi_lengths: &[usize]) -> Result<Vec<SpecialCaseOutcome>> {
    let mut outcomes = Vec::with_capacity(3 * cpi_lengths.len());
    for &pulses in cpi_lengths {
        for mode in [
            SpecialCaseMode::Coherent,
            SpecialCaseMode::Phased,
            SpecialCaseMode::Tdm,
        ] {
            let scenario = match mode {
                SpecialCaseMode::Coherent => coherent_scenario(pulses)?,
                SpecialCaseMode::Phased => phased_scenario(pulses)?,
                SpecialCaseMode::Tdm => tdm_scenario(pulses)?,
            };
            let report = validate_special_case(mode, &scenario)?;
            outcomes.push(SpecialCaseOutcome {
                mode,
                pulses,
                report,
            });
        }
    }
    Ok(outcomes)
}
