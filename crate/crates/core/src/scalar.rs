//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Euclid, Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the library computes in (`f32` or `f64`).
///
/// The tolerance hooks scale the precondition checks with the precision of
/// the type: an `f32` Jones matrix built from trig functions is only unitary
/// to about `1e-6`.
pub trait Real:
    Float + FloatConst + Euclid + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Slack for unitarity and normalization preconditions.
    fn check_tol() -> Self;
    /// Magnitudes below this are treated as exact zeros when choosing branches.
    fn zero_tol() -> Self;
    /// Distance from 0 or π/2 below which an analyzer angle is degenerate.
    fn degenerate_tol() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f64 {
    fn check_tol() -> Self {
        1e-10
    }
    fn zero_tol() -> Self {
        1e-12
    }
    fn degenerate_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn check_tol() -> Self {
        1e-5
    }
    fn zero_tol() -> Self {
        1e-6
    }
    fn degenerate_tol() -> Self {
        1e-4
    }
}

/// Complex amplitude over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Reduce an angle to the canonical phase range (−π, π].
pub fn wrap_phase<T: Real>(x: T) -> T {
    let two_pi = T::two_pi();
    let mut r = x.rem_euclid(&two_pi);
    if r > T::PI() {
        r = r - two_pi;
    }
    r
}

/// Reduce an angle to [0, 2π).
pub fn wrap_turn<T: Real>(x: T) -> T {
    let r = x.rem_euclid(&T::two_pi());
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= T::two_pi() {
        T::zero()
    } else {
        r
    }
}

/// Reduce an angle to the half-open window [−p/2, p/2) for period `p`.
pub fn wrap_centered<T: Real>(x: T, period: T) -> T {
    let half = period / T::lit(2.0);
    let r = (x + half).rem_euclid(&period) - half;
    if r >= half {
        r - period
    } else {
        r
    }
}

pub(crate) fn check_finite<T: Real>(name: &str, x: T) -> Result<T, crate::Error> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(crate::Error::InvalidArgument(format!("{name} must be finite, got {x}")))
    }
}

pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
