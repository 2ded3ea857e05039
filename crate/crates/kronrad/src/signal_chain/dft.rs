//! Plain DFT sums used by the range/Doppler decode.
//!
//! The decode is defined as unnormalized, negative-exponent DFT sums with a
//! rectangular window:
//!
//! ```text
//! X[j] = Σ_i x[i] · e^{-j2π i j / N},   0 ≤ j < N,
//! ```
//!
//! where the input may be shorter than `N` (zero padding). Power-of-two
//! lengths go through an iterative radix-2 transform; anything else falls
//! back to the quadratic sum, which is exact and fast enough for the small
//! code-domain sizes used off the hot path. No scaling is applied anywhere.

use crate::error::{Error, Result};
use crate::scalar::{cis_cycles, czero, RadarScalar, C};

/// True when `n` is a positive power of two.
pub(crate) fn is_pow2(n: usize) -> bool {
    n > 0 && n & (n - 1) == 0
}

/// Unnormalized negative-exponent DFT of `input` zero-padded to `out_len`.
///
/// # Errors
///
/// [`Error::InvalidDimension`] when `out_len == 0` or the input is longer
/// than `out_len`.
pub fn dft<T: RadarScalar>(input: &[C<T>], out_len: usize) -> Result<Vec<C<T>>> {
    if out_len == 0 || input.len() > out_len {
        return Err(Error::InvalidDimension(format!(
            "dft: output length {out_len} incompatible with input length {}",
            input.len()
        )));
    }
    let mut buf = vec![czero::<T>(); out_len];
    buf[..input.len()].copy_from_slice(input);
    if is_pow2(out_len) {
        fft_pow2(&mut buf);
    } else {
        let naive = dft_naive(&buf, out_len);
        buf = naive;
    }
    Ok(buf)
}

/// Single output bin of the same transform: `Σ_i x[i]·e^{-j2π i·bin/out_len}`.
///
/// The sum runs over the input only, so this costs `O(len)` — used for
/// bin-targeted decodes where a full transform would be wasted.
pub fn dft_bin<T: RadarScalar>(input: &[C<T>], out_len: usize, bin: usize) -> Result<C<T>> {
    if out_len == 0 || input.len() > out_len || bin >= out_len {
        return Err(Error::InvalidDimension(format!(
            "dft_bin: bin {bin} / output length {out_len} incompatible with input length {}",
            input.len()
        )));
    }
    let nf = T::idx(out_len);
    let mut acc = czero::<T>();
    for (i, &x) in input.iter().enumerate() {
        // i·bin stays exactly representable (< 2^52 for any realistic size).
        acc += x * cis_cycles(-T::idx(i * bin) / nf);
    }
    Ok(acc)
}

fn dft_naive<T: RadarScalar>(buf: &[C<T>], n: usize) -> Vec<C<T>> {
    let nf = T::idx(n);
    (0..n)
        .map(|j| {
            let mut acc = czero::<T>();
            for (i, &x) in buf.iter().enumerate() {
                acc += x * cis_cycles(-T::idx(i * j) / nf);
            }
            acc
        })
        .collect()
}

/// In-place iterative radix-2 transform (negative exponent, no scaling).
fn fft_pow2<T: RadarScalar>(buf: &mut [C<T>]) {
    let n = buf.len();
    debug_assert!(is_pow2(n));
    if n == 1 {
        return;
    }
    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    // Twiddle table w[i] = e^{-j2π i/n} for i < n/2.
    let nf = T::idx(n);
    let twiddle: Vec<C<T>> = (0..n / 2).map(|i| cis_cycles(-T::idx(i) / nf)).collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for i in 0..half {
                let w = twiddle[i * step];
                let t = w * buf[start + half + i];
                let u = buf[start + i];
                buf[start + i] = u + t;
                buf[start + half + i] = u - t;
            }
        }
        len <<= 1;
    }
}
