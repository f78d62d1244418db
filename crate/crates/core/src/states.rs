//! Two-photon polarization states in the fixed basis order (HH, HV, VH, VV).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::jones::JonesMatrix;
use crate::scalar::{check_finite, Cplx, Real};
use crate::Error;

/// Which of the two maximally entangled families a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `(|HH⟩ + e^{iφ}|VV⟩)/√2`
    Phi,
    /// `(|HV⟩ + e^{iφ}|VH⟩)/√2`
    Psi,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Phi => "phi",
            Family::Psi => "psi",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(Family::Phi),
            "psi" => Ok(Family::Psi),
            _ => Err(Error::InvalidArgument(format!(
                "unknown state family '{s}' (expected phi or psi)"
            ))),
        }
    }
}

/// Index of `|HH⟩, |HV⟩, |VH⟩, |VV⟩` in [`TwoQubitState::amplitudes`].
pub const HH: usize = 0;
pub const HV: usize = 1;
pub const VH: usize = 2;
pub const VV: usize = 3;

/// Normalized pure state of the photon pair; channel A is the left factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState<T: Real> {
    amps: [Cplx<T>; 4],
}

impl<T: Real> TwoQubitState<T> {
    /// Wraps four amplitudes, requiring unit norm within [`Real::check_tol`].
    pub fn new(amps: [Cplx<T>; 4]) -> Result<Self, Error> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("amplitudes must be finite".into()));
        }
        let s = Self { amps };
        let n = s.norm_sqr();
        if (n - T::one()).abs() > T::check_tol() {
            return Err(Error::Precondition(format!("state norm² is {n}, expected 1")));
        }
        Ok(s)
    }

    pub fn amplitudes(&self) -> &[Cplx<T>; 4] {
        &self.amps
    }

    pub fn amplitude(&self, a: usize, b: usize) -> Cplx<T> {
        self.amps[2 * a + b]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// `|⟨other|self⟩|`, which is 1 exactly when the states agree up to a global phase.
    pub fn overlap(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + b.conj() * *a)
            .norm()
    }
}

/// `|Φ(φ)⟩` or `|Ψ(φ)⟩`.
pub fn make_state<T: Real>(family: Family, phi: T) -> Result<TwoQubitState<T>, Error> {
    check_finite("phi", phi)?;
    let k = T::FRAC_1_SQRT_2();
    let zero = Complex::new(T::zero(), T::zero());
    let first = Complex::new(k, T::zero());
    let second = Complex::from_polar(k, phi);
    let amps = match family {
        Family::Phi => [first, zero, zero, second],
        Family::Psi => [zero, first, second, zero],
    };
    Ok(TwoQubitState { amps })
}

/// Amplitudes on `|Φ₊⟩ = |Φ(0)⟩` and `|Φ₋⟩ = |Φ(π)⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellCoefficients<T: Real> {
    pub c_plus: Cplx<T>,
    pub c_minus: Cplx<T>,
}

/// Expands a state supported on `{HH, VV}` over `|Φ₊⟩, |Φ₋⟩`.
pub fn bell_coefficients<T: Real>(state: &TwoQubitState<T>) -> Result<BellCoefficients<T>, Error> {
    let leak = state.amps[HV].norm().max(state.amps[VH].norm());
    if leak > T::check_tol() {
        return Err(Error::Precondition(format!(
            "state has weight {leak} outside span{{HH, VV}}"
        )));
    }
    let k = T::FRAC_1_SQRT_2();
    let (hh, vv) = (state.amps[HH], state.amps[VV]);
    Ok(BellCoefficients {
        c_plus: (hh + vv) * k,
        c_minus: (hh - vv) * k,
    })
}

/// Applies `U_A ⊗ U_B` to the state.
pub fn apply_local<T: Real>(
    state: &TwoQubitState<T>,
    u_a: &JonesMatrix<T>,
    u_b: &JonesMatrix<T>,
) -> Result<TwoQubitState<T>, Error> {
    u_a.ensure_unitary()?;
    u_b.ensure_unitary()?;
    let mut out = [Complex::new(T::zero(), T::zero()); 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..2 {
                for l in 0..2 {
                    acc = acc + u_a.entry(i, k) * u_b.entry(j, l) * state.amplitude(k, l);
                }
            }
            out[2 * i + j] = acc;
        }
    }
    Ok(TwoQubitState { amps: out })
}
