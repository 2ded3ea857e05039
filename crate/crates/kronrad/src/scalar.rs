//! Real-scalar abstraction underlying all complex arithmetic in this crate.
//!
//! Every numeric routine is generic over a real floating-point type `T`
//! through [`RadarScalar`], so the same code instantiates at `f64` (the
//! default used by the harness and the test-suite) and at `f32`. Concrete
//! aliases live at the crate root ([`crate::Real`], [`crate::C64`],
//! [`crate::C32`]).

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real floating-point scalar for all radar math.
///
/// A blanket implementation covers every type satisfying the bounds, i.e.
/// `f32` and `f64` from the standard library. The two conversion helpers
/// panic only if the value is not representable, which cannot happen for
/// the in-range literals and array indices this crate feeds them.
pub trait RadarScalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into the scalar type. Used for literals
    /// such as tolerances and physical constants.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal must be representable in the scalar type")
    }

    /// Converts an index or length into the scalar type.
    #[inline]
    fn idx(n: usize) -> Self {
        Self::from_usize(n).expect("index must be representable in the scalar type")
    }

    /// Lossy view of the scalar as `f64`, used for diagnostics (condition
    /// numbers in errors, log messages).
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl<T> RadarScalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Complex number over the generic real scalar.
pub type C<T> = Complex<T>;

/// Complex zero.
#[inline]
pub fn czero<T: RadarScalar>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Complex one.
#[inline]
pub fn cone<T: RadarScalar>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// Unit phasor `exp(j·theta)` for a phase in radians.
#[inline]
pub fn cis<T: RadarScalar>(theta: T) -> C<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// Unit phasor `exp(j·2π·x)` where `x` is a phase measured in cycles.
///
/// The argument is reduced modulo one cycle *before* the multiplication by
/// 2π. Slow-time phase terms such as `f_c·τ` run to millions of cycles, and
/// reducing first keeps the fractional phase accurate to ~1e-10 cycles
/// instead of losing precision inside `sin`/`cos` argument reduction.
#[inline]
pub fn cis_cycles<T: RadarScalar>(x: T) -> C<T> {
    let frac = x - x.round();
    cis(T::TAU() * frac)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cis_matches_euler() {
        let z: C<f64> = cis(std::f64::consts::FRAC_PI_3);
        assert!((z.re - 0.5).abs() < 1e-15);
        assert!((z.im - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((z.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cis_cycles_reduces_large_arguments() {
        // 1.5e6 + 0.25 cycles must land exactly on +j.
        let z: C<f64> = cis_cycles(1_500_000.25);
        assert!(z.re.abs() < 1e-9, "re = {}", z.re);
        assert!((z.im - 1.0).abs() < 1e-9, "im = {}", z.im);
    }

    #[test]
    fn generic_over_f32() {
        let z: C<f32> = cis_cycles(0.5f32);
        assert!((z.re + 1.0).abs() < 1e-6);
        assert!(z.im.abs() < 1e-6);
        assert_eq!(f32::idx(7), 7.0f32);
        assert_eq!(f32::lit(0.25), 0.25f32);
    }
}
