//! FMCW chirp parameterization, array geometry, and slow-time Tx-pulse
//! codes for the four MIMO operation modes.
//!
//! A victim radar transmits `K` chirped pulses per coherent processing
//! interval; transmit antenna `m` scales pulse `k` by the slow-time code
//! `c_{k,m}`. The choice of code family fixes the multiplexing mode:
//!
//! * `DdmHadamard` — Doppler-division via binary Sylvester-Hadamard columns
//!   (exactly orthogonal over the CPI),
//! * `DdmChu` — Doppler-division via polyphase Zadoff–Chu sequences
//!   `c_{k,m} = e^{jπ·u_m·k(k+1)/K}` with odd roots `u_m = 2m+1`,
//! * `Tdm` — time-division, one transmitter active per pulse,
//! * `Phased` — all-ones codes (classic phased array).

use crate::array_math::dense::CMat;
use crate::error::{Error, Result};
use crate::scalar::{cis_cycles, czero, RadarScalar, C};
use num_complex::Complex;

// ───────────────────────── chirp parameters ─────────────────────────

/// Victim-radar FMCW timing and sampling parameters.
///
/// * `beta` — chirp rate (Hz/s)
/// * `t_chirp` — chirp duration (s)
/// * `t_pri` — pulse repetition interval (s)
/// * `f_c` — carrier frequency (Hz)
/// * `f_l` — low-pass filter cutoff at the mixer output (Hz)
/// * `delta_t` — complex ADC sample interval (s)
/// * `samples_per_pulse` — fast-time samples `L` per pulse
/// * `pulses_per_cpi` — slow-time pulses `K` per coherent interval
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpParams<T: RadarScalar> {
    pub beta: T,
    pub t_chirp: T,
    pub t_pri: T,
    pub f_c: T,
    pub f_l: T,
    pub delta_t: T,
    pub samples_per_pulse: usize,
    pub pulses_per_cpi: usize,
}

impl<T: RadarScalar> ChirpParams<T> {
    /// Carrier wavelength `λ = c₀ / f_c` in meters.
    #[inline]
    pub fn wavelength(&self) -> T {
        T::lit(crate::SPEED_OF_LIGHT) / self.f_c
    }

    /// Swept bandwidth `β·T`.
    #[inline]
    pub fn bandwidth(&self) -> T {
        self.beta * self.t_chirp
    }

    /// Validates positivity and timing consistency.
    ///
    /// # Errors
    ///
    /// [`Error::DegenerateParameters`] when a field is non-positive, the
    /// chirp outlasts the PRI, or the ADC window outlasts the PRI.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            (self.beta, "beta"),
            (self.t_chirp, "t_chirp"),
            (self.t_pri, "t_pri"),
            (self.f_c, "f_c"),
            (self.f_l, "f_l"),
            (self.delta_t, "delta_t"),
        ];
        for (v, name) in fields {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::DegenerateParameters(format!(
                    "chirp parameter {name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.samples_per_pulse == 0 || self.pulses_per_cpi == 0 {
            return Err(Error::DegenerateParameters(
                "samples_per_pulse and pulses_per_cpi must be positive".into(),
            ));
        }
        if self.t_chirp > self.t_pri {
            return Err(Error::DegenerateParameters(format!(
                "chirp duration {} exceeds PRI {}",
                self.t_chirp, self.t_pri
            )));
        }
        if T::idx(self.samples_per_pulse) * self.delta_t > self.t_pri {
            return Err(Error::DegenerateParameters(
                "ADC window L·ΔT exceeds the PRI".into(),
            ));
        }
        Ok(())
    }
}

/// One sample of the unit-amplitude FMCW chirp `s(t) = e^{jπβt²}`, gated to
/// `0 ≤ t ≤ T` (exactly zero outside the gate).
pub fn chirp_sample<T: RadarScalar>(p: &ChirpParams<T>, t: T) -> C<T> {
    if t < T::zero() || t > p.t_chirp {
        return czero();
    }
    // πβt² radians = βt²/2 cycles.
    cis_cycles(p.beta * t * t * T::lit(0.5))
}

// ───────────────────────── array geometry ─────────────────────────

/// Colocated MIMO array layout: `M` transmit and `N` receive elements on
/// uniform linear grids with spacings `d_t`, `d_r`, at wavelength `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry<T: RadarScalar> {
    pub tx_count: usize,
    pub rx_count: usize,
    pub tx_spacing: T,
    pub rx_spacing: T,
    pub wavelength: T,
}

impl<T: RadarScalar> ArrayGeometry<T> {
    /// Virtual-array size `M·N`.
    #[inline]
    pub fn virtual_len(&self) -> usize {
        self.tx_count * self.rx_count
    }

    /// Transmit spatial frequency `f_φt = d_t·sin(φ)/λ` for an angle in
    /// degrees off boresight.
    #[inline]
    pub fn tx_spatial_freq(&self, angle_deg: T) -> T {
        self.tx_spacing * angle_deg.to_radians().sin() / self.wavelength
    }

    /// Receive spatial frequency `f_φr = d_r·sin(φ)/λ`.
    #[inline]
    pub fn rx_spatial_freq(&self, angle_deg: T) -> T {
        self.rx_spacing * angle_deg.to_radians().sin() / self.wavelength
    }

    /// Validates counts and spacings.
    ///
    /// # Errors
    ///
    /// [`Error::DegenerateParameters`] for zero element counts or
    /// non-positive spacings/wavelength.
    pub fn validate(&self) -> Result<()> {
        if self.tx_count == 0 || self.rx_count == 0 {
            return Err(Error::DegenerateParameters(
                "array must have at least one Tx and one Rx element".into(),
            ));
        }
        for (v, name) in [
            (self.tx_spacing, "tx_spacing"),
            (self.rx_spacing, "rx_spacing"),
            (self.wavelength, "wavelength"),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::DegenerateParameters(format!(
                    "geometry parameter {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

// ───────────────────────── slow-time codes ─────────────────────────

/// Slow-time code family selecting the MIMO multiplexing mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeMode {
    /// Binary Sylvester-Hadamard columns (requires `K` a power of two).
    DdmHadamard,
    /// Polyphase Zadoff–Chu sequences with roots `u_m = 2m+1`.
    DdmChu,
    /// Time-division: transmitter `k mod M` active on pulse `k`.
    Tdm,
    /// All-ones codes (single steered beam).
    Phased,
}

impl std::fmt::Display for CodeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CodeMode::DdmHadamard => "ddm-hadamard",
            CodeMode::DdmChu => "ddm-chu",
            CodeMode::Tdm => "tdm",
            CodeMode::Phased => "phased",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for CodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ddm-hadamard" => Ok(CodeMode::DdmHadamard),
            "ddm-chu" => Ok(CodeMode::DdmChu),
            "tdm" => Ok(CodeMode::Tdm),
            "phased" => Ok(CodeMode::Phased),
            other => Err(Error::InvalidParameter(format!(
                "unknown code mode '{other}' (expected ddm-hadamard, ddm-chu, tdm, or phased)"
            ))),
        }
    }
}

/// `K×M` slow-time code matrix: entry `(k, m)` scales pulse `k` at
/// transmitter `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeMatrix<T: RadarScalar> {
    mode: CodeMode,
    entries: CMat<T>,
}

impl<T: RadarScalar> CodeMatrix<T> {
    /// Code family this matrix was built from.
    #[inline]
    pub fn mode(&self) -> CodeMode {
        self.mode
    }

    /// Number of pulses `K`.
    #[inline]
    pub fn pulses(&self) -> usize {
        self.entries.rows()
    }

    /// Number of transmitters `M`.
    #[inline]
    pub fn tx_count(&self) -> usize {
        self.entries.cols()
    }

    /// Code value `c_{k,m}`.
    #[inline]
    pub fn entry(&self, k: usize, m: usize) -> C<T> {
        self.entries[(k, m)]
    }

    /// Column `m` (the full slow-time sequence of one transmitter).
    pub fn col(&self, m: usize) -> Vec<C<T>> {
        self.entries.col(m)
    }

    /// The raw `K×M` matrix.
    #[inline]
    pub fn entries(&self) -> &CMat<T> {
        &self.entries
    }

    /// Entrywise equality within an absolute tolerance.
    pub fn approx_eq(&self, other: &CodeMatrix<T>, tol: T) -> bool {
        self.pulses() == other.pulses()
            && self.tx_count() == other.tx_count()
            && self.entries.max_abs_diff(&other.entries) <= tol
    }
}

/// Builds the `K×M` slow-time code matrix for a multiplexing mode.
///
/// * `DdmHadamard` takes the first `M` columns of the order-`K` Sylvester
///   matrix `H(k, m) = (-1)^{popcount(k & m)}`; columns are exactly
///   orthogonal: `(1/K)Σ_k c_{k,m}c_{k,m'} = δ_{mm'}`.
/// * `DdmChu` uses `c_{k,m} = e^{jπ·u_m·k(k+1)/K}` with roots `u_m = 2m+1`,
///   each required to be coprime to `K`.
/// * `Tdm` sets `c_{k,m} = 1` iff `m = k mod M` (one-hot rows).
/// * `Phased` is all ones.
///
/// # Errors
///
/// [`Error::CodeConstruction`] when `K < M`, `M = 0`, Hadamard is requested
/// with `K` not a power of two, or a Chu root shares a factor with `K`.
pub fn make_codes<T: RadarScalar>(mode: CodeMode, k: usize, m: usize) -> Result<CodeMatrix<T>> {
    if m == 0 || k < m {
        return Err(Error::CodeConstruction(format!(
            "need K ≥ M ≥ 1, got K={k}, M={m}"
        )));
    }
    let one = Complex::new(T::one(), T::zero());
    let entries = match mode {
        CodeMode::DdmHadamard => {
            if !k.is_power_of_two() {
                return Err(Error::CodeConstruction(format!(
                    "Hadamard codes need a power-of-two pulse count, got K={k}"
                )));
            }
            CMat::from_fn(k, m, |kk, mm| {
                if (kk & mm).count_ones() % 2 == 0 {
                    one
                } else {
                    -one
                }
            })
        }
        CodeMode::DdmChu => {
            for mm in 0..m {
                let root = 2 * mm + 1;
                if gcd(root, k) != 1 {
                    return Err(Error::CodeConstruction(format!(
                        "Chu root u={root} shares factor {} with K={k}",
                        gcd(root, k)
                    )));
                }
            }
            let kt = T::idx(k);
            CMat::from_fn(k, m, |kk, mm| {
                let root = T::idx(2 * mm + 1);
                // πu·k(k+1)/K radians = u·k(k+1)/(2K) cycles.
                cis_cycles(root * T::idx(kk) * T::idx(kk + 1) / (kt + kt))
            })
        }
        CodeMode::Tdm => CMat::from_fn(k, m, |kk, mm| if kk % m == mm { one } else { czero() }),
        CodeMode::Phased => CMat::from_fn(k, m, |_, _| one),
    };
    Ok(CodeMatrix { mode, entries })
}

/// Worst-case normalized code cross-correlation
/// `max_{m≠m', f} |Σ_k c_{k,m} c*_{k,m'} e^{-j2πfk}| / K`
/// over a grid of normalized Doppler frequencies.
///
/// Returns 0 when there is only one transmitter or the grid is empty. This
/// is the quantity bounding waveform-separation leakage between transmit
/// channels across the whole Doppler axis.
pub fn code_crosscorr<T: RadarScalar>(codes: &CodeMatrix<T>, f_grid: &[T]) -> T {
    let (k, m) = (codes.pulses(), codes.tx_count());
    if m < 2 || f_grid.is_empty() {
        return T::zero();
    }
    let mut worst = T::zero();
    for m1 in 0..m {
        for m2 in 0..m {
            if m1 == m2 {
                continue;
            }
            // Pairwise product sequence, then a DFT sample per grid point.
            let prod: Vec<C<T>> = (0..k)
                .map(|kk| codes.entry(kk, m1) * codes.entry(kk, m2).conj())
                .collect();
            for &f in f_grid {
                let mut acc: C<T> = czero();
                for (kk, &p) in prod.iter().enumerate() {
                    acc += p * cis_cycles(-f * T::idx(kk));
                }
                worst = worst.max(acc.norm() / T::idx(k));
            }
        }
    }
    worst
}

/// Default frequency grid for [`code_crosscorr`]: `4K` uniform points in
/// `[0, 1)`, a 4× oversampling of the slow-time Doppler axis.
pub fn default_xcorr_grid<T: RadarScalar>(k: usize) -> Vec<T> {
    let n = 4 * k.max(1);
    (0..n).map(|i| T::idx(i) / T::idx(n)).collect()
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
