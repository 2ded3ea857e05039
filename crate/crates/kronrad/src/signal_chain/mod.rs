//! The victim receive chain: sampled baseband synthesis for objects and
//! interferers, range/Doppler decoding, and snapshot extraction.
//!
//! The chain follows the standard MIMO-FMCW processing order. A reflecting
//! object at range `R`, radial velocity `v`, and far-field angle `φ`
//! produces the dechirped, low-pass-filtered, sampled baseband tensor
//!
//! ```text
//! a_n(l,k) = α_τ e^{-j2π f_r l} · 1[l ∈ 𝓛] · Σ_m c_{k,m} e^{-j2π(f_d k + f_φt m + f_φr n)},
//! α_τ = α e^{-j2π f_c τ} e^{jπ β τ²},   τ = 2R/c,
//! ```
//!
//! with normalized range frequency `f_r = (βτ + 2v/λ)ΔT`, normalized
//! Doppler `f_d = 2 f_c T_PRI v/c`, spatial frequencies
//! `f_φt = d_t sinφ/λ`, `f_φr = d_r sinφ/λ`, and fast-time support
//! `𝓛 = {⌈τ/ΔT⌉, …, ⌊T/ΔT⌋}` clipped to the ADC window. The receiver then
//! applies a range DFT over `l`, a per-transmitter waveform decode with the
//! conjugated slow-time code, and a Doppler DFT over `k`:
//!
//! ```text
//! x_n(l',k)    = Σ_l a_n(l,k) e^{-j2π l'l/L_fft},
//! y_{m,n}(l',k') = Σ_k x_n(l',k) c*_{k,m} e^{-j2π k'k/K_fft},
//! ```
//!
//! both as plain unnormalized sums with a rectangular window. Stacking
//! `y_{m,n}` at one bin (m-major) gives the `MN×1` virtual-array snapshot;
//! for an on-bin object it is `b·(a_t ⊗ a_r)`, and for interference it is a
//! sum of Kronecker products `ã′_t ⊗ ã_r` (see [`interference`]).
//!
//! Phases are accumulated in units of cycles and reduced modulo one before
//! conversion to radians ([`cis_cycles`]); carrier terms like `f_c·τ′`
//! reach billions of cycles and would lose all angular precision if formed
//! in radians first.

mod interference;
pub mod dft;
mod special;

pub use dft::{dft, dft_bin};
pub use interference::{lpf_gate, overlap_set, simulate_interference, InterfererTruth};
pub use special::{
    tdm_range_doppler_decode, validate_special_case, ReductionReport, SpecialCaseMode,
    SpecialCaseScenario,
};

use crate::array_math::steering;
use crate::error::{Error, Result};
use crate::scalar::{cis_cycles, czero, RadarScalar, C};
use crate::waveform::{ArrayGeometry, ChirpParams, CodeMatrix};
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

// ───────────────────────── domain types ─────────────────────────

/// Ground-truth description of one reflecting object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectTruth<T: RadarScalar> {
    /// Range `R` in meters (must be positive).
    pub range: T,
    /// Radial velocity `v` in m/s (positive = receding).
    pub velocity: T,
    /// Far-field angle `φ` in degrees; transmit and receive angles
    /// coincide for a far-field object.
    pub angle_deg: T,
    /// Complex reflection amplitude `α`.
    pub alpha: C<T>,
}

/// Normalized frequencies and the fast-time support derived from an
/// [`ObjectTruth`] under a given chirp and array geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectDerived<T: RadarScalar> {
    /// Round-trip delay `τ = 2R/c` in seconds.
    pub tau: T,
    /// Normalized range frequency `f_r = (βτ + 2v/λ)·ΔT`.
    pub f_r: T,
    /// Normalized Doppler frequency `f_d = 2 f_c T_PRI v / c`.
    pub f_d: T,
    /// Transmit spatial frequency `d_t sinφ/λ`.
    pub f_phi_t: T,
    /// Receive spatial frequency `d_r sinφ/λ`.
    pub f_phi_r: T,
    /// Inclusive fast-time index range `𝓛 = {⌈τ/ΔT⌉ … ⌊T/ΔT⌋} ∩ [0, L)`,
    /// or `None` when the echo arrives after the ADC window closes.
    pub sample_range: Option<(usize, usize)>,
}

impl<T: RadarScalar> ObjectDerived<T> {
    /// Derives delay, normalized frequencies, and fast-time support.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] for a non-positive range;
    /// [`Error::DegenerateParameters`] from chirp/geometry validation.
    pub fn new(
        chirp: &ChirpParams<T>,
        geom: &ArrayGeometry<T>,
        obj: &ObjectTruth<T>,
    ) -> Result<Self> {
        chirp.validate()?;
        geom.validate()?;
        if !(obj.range > T::zero()) || !obj.range.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "object range must be positive, got {}",
                obj.range
            )));
        }
        let c0 = T::lit(crate::SPEED_OF_LIGHT);
        let lambda = chirp.wavelength();
        let tau = T::lit(2.0) * obj.range / c0;
        let f_r = (chirp.beta * tau + T::lit(2.0) * obj.velocity / lambda) * chirp.delta_t;
        let f_d = T::lit(2.0) * obj.velocity * chirp.t_pri / lambda;
        let start = (tau / chirp.delta_t).ceil();
        let end = (chirp.t_chirp / chirp.delta_t).floor();
        let last = T::idx(chirp.samples_per_pulse - 1);
        let sample_range = if start > end || start > last {
            None
        } else {
            let lo = start.max(T::zero()).as_f64() as usize;
            let hi = end.min(last).as_f64() as usize;
            Some((lo, hi))
        };
        Ok(ObjectDerived {
            tau,
            f_r,
            f_d,
            f_phi_t: geom.tx_spatial_freq(obj.angle_deg),
            f_phi_r: geom.rx_spatial_freq(obj.angle_deg),
            sample_range,
        })
    }
}

/// Raw sampled baseband tensor, indexed `(n, l, k)` = (receiver, fast-time
/// sample, pulse), dimensions `N×L×K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTensor<T: RadarScalar> {
    rx: usize,
    samples: usize,
    pulses: usize,
    data: Vec<C<T>>,
}

impl<T: RadarScalar> SampleTensor<T> {
    /// All-zero tensor of the given dimensions.
    #[must_use]
    pub fn zeros(rx: usize, samples: usize, pulses: usize) -> Self {
        SampleTensor {
            rx,
            samples,
            pulses,
            data: vec![czero(); rx * samples * pulses],
        }
    }

    /// Dimensions `(N, L, K)`.
    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.rx, self.samples, self.pulses)
    }

    /// Entrywise sum with another tensor of identical dimensions.
    ///
    /// # Errors
    ///
    /// [`Error::DimensionMismatch`] when shapes differ.
    pub fn add_assign(&mut self, other: &SampleTensor<T>) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "tensor sum: {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        Ok(())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    #[inline]
    fn offset(&self, n: usize, l: usize, k: usize) -> usize {
        debug_assert!(n < self.rx && l < self.samples && k < self.pulses);
        (n * self.samples + l) * self.pulses + k
    }
}

impl<T: RadarScalar> std::ops::Index<(usize, usize, usize)> for SampleTensor<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (n, l, k): (usize, usize, usize)) -> &C<T> {
        &self.data[self.offset(n, l, k)]
    }
}

impl<T: RadarScalar> std::ops::IndexMut<(usize, usize, usize)> for SampleTensor<T> {
    #[inline]
    fn index_mut(&mut self, (n, l, k): (usize, usize, usize)) -> &mut C<T> {
        let i = self.offset(n, l, k);
        &mut self.data[i]
    }
}

/// Decoded range-Doppler cube, indexed `(m, n, l', k')`, dimensions
/// `M×N×L_fft×K_fft`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerCube<T: RadarScalar> {
    tx: usize,
    rx: usize,
    range_bins: usize,
    doppler_bins: usize,
    data: Vec<C<T>>,
}

impl<T: RadarScalar> RangeDopplerCube<T> {
    /// All-zero cube of the given dimensions.
    #[must_use]
    pub fn zeros(tx: usize, rx: usize, range_bins: usize, doppler_bins: usize) -> Self {
        RangeDopplerCube {
            tx,
            rx,
            range_bins,
            doppler_bins,
            data: vec![czero(); tx * rx * range_bins * doppler_bins],
        }
    }

    /// Dimensions `(M, N, L_fft, K_fft)`.
    #[inline]
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.tx, self.rx, self.range_bins, self.doppler_bins)
    }

    /// Extracts the `MN×1` virtual-array snapshot at one bin, ordered with
    /// `m` major: entry `m·N + n` is `y_{m,n}(l',k')`.
    ///
    /// # Errors
    ///
    /// [`Error::BinOutOfRange`] for indices outside the cube.
    pub fn snapshot(&self, range_bin: usize, doppler_bin: usize) -> Result<Snapshot<T>> {
        if range_bin >= self.range_bins || doppler_bin >= self.doppler_bins {
            return Err(Error::BinOutOfRange(format!(
                "bin ({range_bin}, {doppler_bin}) outside {}×{} cube",
                self.range_bins, self.doppler_bins
            )));
        }
        let mut entries = Vec::with_capacity(self.tx * self.rx);
        for m in 0..self.tx {
            for n in 0..self.rx {
                entries.push(self[(m, n, range_bin, doppler_bin)]);
            }
        }
        Ok(Snapshot {
            entries,
            bin: (range_bin, doppler_bin),
        })
    }

    /// Bin `(l', k')` holding the largest entry magnitude, with that
    /// magnitude.
    pub fn peak_bin(&self) -> (usize, usize, T) {
        let mut best = (0, 0, T::zero());
        for m in 0..self.tx {
            for n in 0..self.rx {
                for l in 0..self.range_bins {
                    for k in 0..self.doppler_bins {
                        let a = self[(m, n, l, k)].norm();
                        if a > best.2 {
                            best = (l, k, a);
                        }
                    }
                }
            }
        }
        best
    }

    #[inline]
    fn offset(&self, m: usize, n: usize, l: usize, k: usize) -> usize {
        debug_assert!(
            m < self.tx && n < self.rx && l < self.range_bins && k < self.doppler_bins
        );
        ((m * self.rx + n) * self.range_bins + l) * self.doppler_bins + k
    }
}

impl<T: RadarScalar> std::ops::Index<(usize, usize, usize, usize)> for RangeDopplerCube<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (m, n, l, k): (usize, usize, usize, usize)) -> &C<T> {
        &self.data[self.offset(m, n, l, k)]
    }
}

impl<T: RadarScalar> std::ops::IndexMut<(usize, usize, usize, usize)> for RangeDopplerCube<T> {
    #[inline]
    fn index_mut(&mut self, (m, n, l, k): (usize, usize, usize, usize)) -> &mut C<T> {
        let i = self.offset(m, n, l, k);
        &mut self.data[i]
    }
}

/// One `MN×1` virtual-array snapshot at a range-Doppler bin, ordered to
/// match the Kronecker convention `a_t ⊗ a_r` (m-major, n-minor).
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T: RadarScalar> {
    /// The `MN` complex entries.
    pub entries: Vec<C<T>>,
    /// Originating `(l', k')` bin; `(0, 0)` for directly synthesized
    /// snapshots.
    pub bin: (usize, usize),
}

impl<T: RadarScalar> Snapshot<T> {
    /// Number of virtual channels `MN`.
    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when the snapshot has no entries.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries as a slice (the layout the detectors consume).
    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.entries
    }
}

// ───────────────────────── object simulation ─────────────────────────

/// Synthesizes the sampled baseband tensor of one object over a CPI.
///
/// An object whose beat frequency `βτ` falls at or above the low-pass
/// cutoff `f_L` is rejected by the receive filter: a warning is logged and
/// the all-zero tensor is returned.
///
/// # Errors
///
/// Parameter validation errors, and [`Error::DimensionMismatch`] when the
/// code matrix does not match the chirp/geometry dimensions.
pub fn simulate_object<T: RadarScalar>(
    chirp: &ChirpParams<T>,
    geom: &ArrayGeometry<T>,
    codes: &CodeMatrix<T>,
    obj: &ObjectTruth<T>,
) -> Result<SampleTensor<T>> {
    let derived = ObjectDerived::new(chirp, geom, obj)?;
    check_codes(chirp, geom, codes)?;
    let (n_rx, l_len, k_len) = (
        geom.rx_count,
        chirp.samples_per_pulse,
        chirp.pulses_per_cpi,
    );
    let mut out = SampleTensor::zeros(n_rx, l_len, k_len);
    if chirp.beta * derived.tau >= chirp.f_l {
        log::warn!(
            "object at beat frequency {:.3e} Hz is outside the low-pass band {:.3e} Hz; filtered out",
            (chirp.beta * derived.tau).as_f64(),
            chirp.f_l.as_f64()
        );
        return Ok(out);
    }
    let Some((l_lo, l_hi)) = derived.sample_range else {
        return Ok(out);
    };
    let alpha_tau = obj.alpha
        * cis_cycles(-chirp.f_c * derived.tau)
        * cis_cycles(chirp.beta * derived.tau * derived.tau * T::lit(0.5));
    // Tx-code sum Σ_m c_{k,m} e^{-j2π f_φt m}, one scalar per pulse.
    let tx_sum: Vec<C<T>> = (0..k_len)
        .map(|k| {
            let mut acc = czero::<T>();
            for m in 0..codes.tx_count() {
                acc += codes.entry(k, m) * cis_cycles(-derived.f_phi_t * T::idx(m));
            }
            acc
        })
        .collect();
    for n in 0..n_rx {
        let rx_ph = cis_cycles(-derived.f_phi_r * T::idx(n));
        for l in l_lo..=l_hi {
            let range_ph = alpha_tau * cis_cycles(-derived.f_r * T::idx(l)) * rx_ph;
            for k in 0..k_len {
                out[(n, l, k)] =
                    range_ph * tx_sum[k] * cis_cycles(-derived.f_d * T::idx(k));
            }
        }
    }
    Ok(out)
}

fn check_codes<T: RadarScalar>(
    chirp: &ChirpParams<T>,
    geom: &ArrayGeometry<T>,
    codes: &CodeMatrix<T>,
) -> Result<()> {
    if codes.pulses() != chirp.pulses_per_cpi || codes.tx_count() != geom.tx_count {
        return Err(Error::DimensionMismatch(format!(
            "code matrix is {}×{} but the chain needs K={}, M={}",
            codes.pulses(),
            codes.tx_count(),
            chirp.pulses_per_cpi,
            geom.tx_count
        )));
    }
    Ok(())
}

// ───────────────────────── range-Doppler decode ─────────────────────────

fn check_decode_dims<T: RadarScalar>(
    raw: &SampleTensor<T>,
    codes: &CodeMatrix<T>,
    (l_fft, k_fft): (usize, usize),
) -> Result<()> {
    let (_, l_len, k_len) = raw.dims();
    if codes.pulses() != k_len {
        return Err(Error::DimensionMismatch(format!(
            "codes cover {} pulses but the tensor has {k_len}",
            codes.pulses()
        )));
    }
    if l_fft < l_len || k_fft < k_len {
        return Err(Error::InvalidDimension(format!(
            "FFT sizes ({l_fft}, {k_fft}) must not truncate the {l_len}×{k_len} data"
        )));
    }
    Ok(())
}

/// Range transform of every `(n, k)` fast-time line: returns the tensor
/// `x_n(l', k)` laid out as `(n·L_fft + l')·K + k`.
fn range_stage<T: RadarScalar>(
    raw: &SampleTensor<T>,
    l_fft: usize,
) -> Result<Vec<C<T>>> {
    let (n_rx, l_len, k_len) = raw.dims();
    let mut x = vec![czero::<T>(); n_rx * l_fft * k_len];
    let mut line = vec![czero::<T>(); l_len];
    for n in 0..n_rx {
        for k in 0..k_len {
            for l in 0..l_len {
                line[l] = raw[(n, l, k)];
            }
            let spec = dft(&line, l_fft)?;
            for (lp, v) in spec.into_iter().enumerate() {
                x[(n * l_fft + lp) * k_len + k] = v;
            }
        }
    }
    Ok(x)
}

/// Full range-Doppler decode: range DFT, per-transmitter code conjugation,
/// Doppler DFT. Rectangular windows, no scaling.
///
/// # Errors
///
/// Dimension mismatches between the tensor, codes, and FFT sizes.
pub fn range_doppler_decode<T: RadarScalar>(
    raw: &SampleTensor<T>,
    codes: &CodeMatrix<T>,
    fft_sizes: (usize, usize),
) -> Result<RangeDopplerCube<T>> {
    check_decode_dims(raw, codes, fft_sizes)?;
    let (l_fft, k_fft) = fft_sizes;
    let (n_rx, _, k_len) = raw.dims();
    let m_tx = codes.tx_count();
    let x = range_stage(raw, l_fft)?;
    let mut cube = RangeDopplerCube::zeros(m_tx, n_rx, l_fft, k_fft);
    let mut line = vec![czero::<T>(); k_len];
    for m in 0..m_tx {
        let code: Vec<C<T>> = (0..k_len).map(|k| codes.entry(k, m).conj()).collect();
        for n in 0..n_rx {
            for lp in 0..l_fft {
                let base = (n * l_fft + lp) * k_len;
                for k in 0..k_len {
                    line[k] = x[base + k] * code[k];
                }
                let spec = dft(&line, k_fft)?;
                let out = cube.offset(m, n, lp, 0);
                cube.data[out..out + k_fft].copy_from_slice(&spec);
            }
        }
    }
    Ok(cube)
}

/// Decodes a single `(l', k')` bin without materializing the cube:
/// `O(NK(L+M))` instead of the full transform.
///
/// # Errors
///
/// Dimension errors as in [`range_doppler_decode`];
/// [`Error::BinOutOfRange`] for indices outside the FFT sizes.
pub fn decode_bin<T: RadarScalar>(
    raw: &SampleTensor<T>,
    codes: &CodeMatrix<T>,
    fft_sizes: (usize, usize),
    range_bin: usize,
    doppler_bin: usize,
) -> Result<Snapshot<T>> {
    check_decode_dims(raw, codes, fft_sizes)?;
    let (l_fft, k_fft) = fft_sizes;
    if range_bin >= l_fft || doppler_bin >= k_fft {
        return Err(Error::BinOutOfRange(format!(
            "bin ({range_bin}, {doppler_bin}) outside ({l_fft}, {k_fft})"
        )));
    }
    let (n_rx, l_len, k_len) = raw.dims();
    let m_tx = codes.tx_count();
    let kf = T::idx(k_fft);
    let mut line = vec![czero::<T>(); l_len];
    let mut entries = vec![czero::<T>(); m_tx * n_rx];
    for n in 0..n_rx {
        for k in 0..k_len {
            for l in 0..l_len {
                line[l] = raw[(n, l, k)];
            }
            let xv = dft_bin(&line, l_fft, range_bin)?;
            let dop = cis_cycles(-T::idx(doppler_bin * k) / kf);
            for m in 0..m_tx {
                entries[m * n_rx + n] += xv * codes.entry(k, m).conj() * dop;
            }
        }
    }
    Ok(Snapshot {
        entries,
        bin: (range_bin, doppler_bin),
    })
}

/// Decodes every range bin at one Doppler bin `k'`, returning `L_fft`
/// snapshots — the input for a range-angle map at fixed Doppler.
///
/// # Errors
///
/// Dimension errors as in [`range_doppler_decode`];
/// [`Error::BinOutOfRange`] when `k'` exceeds the Doppler FFT size.
pub fn decode_doppler_slice<T: RadarScalar>(
    raw: &SampleTensor<T>,
    codes: &CodeMatrix<T>,
    fft_sizes: (usize, usize),
    doppler_bin: usize,
) -> Result<Vec<Snapshot<T>>> {
    check_decode_dims(raw, codes, fft_sizes)?;
    let (l_fft, k_fft) = fft_sizes;
    if doppler_bin >= k_fft {
        return Err(Error::BinOutOfRange(format!(
            "Doppler bin {doppler_bin} outside {k_fft}"
        )));
    }
    let (n_rx, _, k_len) = raw.dims();
    let m_tx = codes.tx_count();
    let x = range_stage(raw, l_fft)?;
    let kf = T::idx(k_fft);
    let dop: Vec<C<T>> = (0..k_len)
        .map(|k| cis_cycles(-T::idx(doppler_bin * k) / kf))
        .collect();
    let mut out = Vec::with_capacity(l_fft);
    for lp in 0..l_fft {
        let mut entries = vec![czero::<T>(); m_tx * n_rx];
        for m in 0..m_tx {
            for n in 0..n_rx {
                let base = (n * l_fft + lp) * k_len;
                let mut acc = czero::<T>();
                for k in 0..k_len {
                    acc += x[base + k] * codes.entry(k, m).conj() * dop[k];
                }
                entries[m * n_rx + n] = acc;
            }
        }
        out.push(Snapshot {
            entries,
            bin: (lp, doppler_bin),
        });
    }
    Ok(out)
}

/// Extracts the snapshot at one bin of a decoded cube.
///
/// # Errors
///
/// [`Error::BinOutOfRange`] for indices outside the cube.
pub fn snapshot<T: RadarScalar>(
    cube: &RangeDopplerCube<T>,
    range_bin: usize,
    doppler_bin: usize,
) -> Result<Snapshot<T>> {
    cube.snapshot(range_bin, doppler_bin)
}

// ───────────────────────── direct snapshot synthesis ─────────────────────────

/// Synthesizes the ideal on-bin object snapshot `b·(a_t ⊗ a_r)`.
///
/// # Errors
///
/// Geometry validation errors.
pub fn synth_object_snapshot<T: RadarScalar>(
    b: C<T>,
    angle_deg: T,
    geom: &ArrayGeometry<T>,
) -> Result<Snapshot<T>> {
    geom.validate()?;
    let a_t = steering(geom.tx_count, geom.tx_spatial_freq(angle_deg))?;
    let a_r = steering(geom.rx_count, geom.rx_spatial_freq(angle_deg))?;
    let mut entries = crate::array_math::kron(&a_t, &a_r);
    for v in &mut entries {
        *v *= b;
    }
    Ok(Snapshot {
        entries,
        bin: (0, 0),
    })
}

/// Synthesizes one decoded interference snapshot `ã′_t ⊗ ã_r` from a given
/// transmit-side vector and the interferer's receive angle.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] when `a_t_tilde` is not length `M`;
/// geometry validation errors.
pub fn synth_interference_snapshot<T: RadarScalar>(
    a_t_tilde: &[C<T>],
    angle_deg: T,
    geom: &ArrayGeometry<T>,
) -> Result<Snapshot<T>> {
    geom.validate()?;
    if a_t_tilde.len() != geom.tx_count {
        return Err(Error::DimensionMismatch(format!(
            "transmit-side vector has length {} but the array has {} transmitters",
            a_t_tilde.len(),
            geom.tx_count
        )));
    }
    let a_r = steering(geom.rx_count, geom.rx_spatial_freq(angle_deg))?;
    Ok(Snapshot {
        entries: crate::array_math::kron(a_t_tilde, &a_r),
        bin: (0, 0),
    })
}

// ───────────────────────── noise ─────────────────────────

/// Draws a circularly symmetric complex Gaussian vector
/// `w ~ 𝒞𝒩(0, σ²I)` (independent real/imaginary parts of variance σ²/2).
pub fn awgn_vector<T, R>(len: usize, sigma2: T, rng: &mut R) -> Vec<C<T>>
where
    T: RadarScalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let scale = (sigma2 * T::lit(0.5)).sqrt();
    (0..len)
        .map(|_| {
            let re: T = StandardNormal.sample(rng);
            let im: T = StandardNormal.sample(rng);
            Complex::new(re * scale, im * scale)
        })
        .collect()
}

/// Adds per-sample white noise `𝒞𝒩(0, σ²)` to a raw tensor in place.
pub fn add_awgn<T, R>(tensor: &mut SampleTensor<T>, sigma2: T, rng: &mut R)
where
    T: RadarScalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let scale = (sigma2 * T::lit(0.5)).sqrt();
    for v in &mut tensor.data {
        let re: T = StandardNormal.sample(rng);
        let im: T = StandardNormal.sample(rng);
        *v += Complex::new(re * scale, im * scale);
    }
}
