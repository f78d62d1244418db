//! Jones matrices of retarders, their composition, and the SU(2)
//! parametrization `h = cos α·e^{iφ}`, `v = sin α·e^{iφ′}` used by the
//! effective-phase analysis.
//!
//! A matrix `T` is read in the analyzer convention: its first row `(h, v)`
//! defines the state `|+⟩ = h|H⟩ + v|V⟩` that leads to the "+" outcome, and
//! its second row defines `|−⟩`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex;

use crate::scalar::{check_finite, to_f64, wrap_centered, wrap_phase, Cplx, Real};
use crate::Error;

/// A 2×2 unitary polarization transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix<T: Real> {
    m: [[Cplx<T>; 2]; 2],
}

impl<T: Real> JonesMatrix<T> {
    /// Builds a matrix from its entries, rejecting anything that is not unitary
    /// within [`Real::check_tol`].
    pub fn new(m: [[Cplx<T>; 2]; 2]) -> Result<Self, Error> {
        if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        let j = Self { m };
        j.ensure_unitary()?;
        Ok(j)
    }

    pub(crate) fn from_entries(m: [[Cplx<T>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        Self { m: [[o, z], [z, o]] }
    }

    /// Ideal rotating analyzer at angle `theta` from `|H⟩`:
    /// `|+⟩ = cos θ|H⟩ + sin θ|V⟩`, `|−⟩ = −sin θ|H⟩ + cos θ|V⟩`.
    pub fn rotation(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            m: [[re(c), re(s)], [re(-s), re(c)]],
        }
    }

    /// SU(2) matrix `[[h, v], [−v*, h*]]`.
    pub fn from_hv(h: Cplx<T>, v: Cplx<T>) -> Self {
        Self {
            m: [[h, v], [-v.conj(), h.conj()]],
        }
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Cplx<T> {
        self.m[row][col]
    }

    #[inline]
    pub fn entries(&self) -> &[[Cplx<T>; 2]; 2] {
        &self.m
    }

    /// Row `0` is the "+" analyzer state, row `1` the "−" state.
    #[inline]
    pub fn row(&self, outcome: usize) -> [Cplx<T>; 2] {
        self.m[outcome]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    pub fn det(&self) -> Cplx<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Multiplies by the global phase factor `e^{iθ}`.
    pub fn with_global_phase(&self, theta: T) -> Self {
        let f = Complex::from_polar(T::one(), theta);
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|z| *z = *z * f);
        Self { m }
    }

    /// Largest entrywise deviation of `J†J` from the identity.
    pub fn unitarity_deviation(&self) -> T {
        let p = self.adjoint() * *self;
        let mut worst = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c { T::one() } else { T::zero() };
                let d = (p.m[r][c] - re(target)).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub(crate) fn ensure_unitary(&self) -> Result<(), Error> {
        let dev = self.unitarity_deviation();
        if dev <= T::check_tol() {
            Ok(())
        } else {
            Err(Error::NotUnitary { deviation: to_f64(dev) })
        }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Distance to `other` after removing the best global phase.
    pub fn diff_up_to_phase(&self, other: &Self) -> T {
        // overlap tr(other† self) carries the relative phase
        let ov = (other.adjoint() * *self).trace();
        let theta = if ov.norm() > T::zero_tol() { ov.arg() } else { T::zero() };
        other.with_global_phase(theta).max_abs_diff(self)
    }

    fn trace(&self) -> Cplx<T> {
        self.m[0][0] + self.m[1][1]
    }
}

impl<T: Real> Mul for JonesMatrix<T> {
    type Output = JonesMatrix<T>;

    fn mul(self, b: Self) -> Self {
        let a = &self.m;
        let b = &b.m;
        Self {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }
}

impl<T: Real> fmt::Display for JonesMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

#[inline]
fn re<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x, T::zero())
}

/// Retarder with its fast axis at `zeta` from `|H⟩` and retardation `chi`:
/// `R(ζ)⁻¹·P(χ)·R(ζ)` with `P = diag(e^{−iχ/2}, e^{iχ/2})`.
pub fn waveplate<T: Real>(zeta: T, chi: T) -> Result<JonesMatrix<T>, Error> {
    check_finite("zeta", zeta)?;
    check_finite("chi", chi)?;
    let half = chi / T::lit(2.0);
    let (s2, c2) = (zeta + zeta).sin_cos();
    let (sh, ch) = half.sin_cos();
    let h = Complex::new(ch, -sh * c2);
    let v = Complex::new(T::zero(), -sh * s2);
    Ok(JonesMatrix::from_hv(h, v))
}

/// The four fixed element families with closed-form Jones matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    /// Half-wave plate, parameter is the rotation ζ.
    HalfWave,
    /// Quarter-wave plate, parameter is the rotation ζ.
    QuarterWave,
    /// Variable compensator with axes at π/4, parameter is the retardation χ.
    CompAt45,
    /// Variable compensator aligned with H/V, parameter is the retardation χ.
    CompAt0,
}

impl ElementKind {
    pub const ALL: [ElementKind; 4] = [
        ElementKind::HalfWave,
        ElementKind::QuarterWave,
        ElementKind::CompAt45,
        ElementKind::CompAt0,
    ];

    /// The `(ζ, χ)` at which [`waveplate`] reproduces this element.
    pub fn waveplate_params<T: Real>(self, param: T) -> (T, T) {
        match self {
            ElementKind::HalfWave => (param, T::PI()),
            ElementKind::QuarterWave => (param, T::FRAC_PI_2()),
            ElementKind::CompAt45 => (T::FRAC_PI_4(), param),
            ElementKind::CompAt0 => (T::zero(), param),
        }
    }
}

impl FromStr for ElementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "halfwave" | "hwp" => Ok(ElementKind::HalfWave),
            "quarterwave" | "qwp" => Ok(ElementKind::QuarterWave),
            "compat45" => Ok(ElementKind::CompAt45),
            "compat0" => Ok(ElementKind::CompAt0),
            _ => Err(Error::InvalidArgument(format!("unknown element kind '{s}'"))),
        }
    }
}

/// Closed-form matrices of the named elements, including their `−i` prefactors.
pub fn named_element<T: Real>(kind: ElementKind, param: T) -> Result<JonesMatrix<T>, Error> {
    check_finite("param", param)?;
    let zero = T::zero();
    let m = match kind {
        ElementKind::HalfWave => {
            let (s, c) = (param + param).sin_cos();
            // −i·[[cos 2ζ, sin 2ζ], [sin 2ζ, −cos 2ζ]]
            [
                [Complex::new(zero, -c), Complex::new(zero, -s)],
                [Complex::new(zero, -s), Complex::new(zero, c)],
            ]
        }
        ElementKind::QuarterWave => {
            let (s, c) = (param + param).sin_cos();
            let k = T::FRAC_1_SQRT_2();
            // −i/√2·[[cos 2ζ + i, sin 2ζ], [sin 2ζ, i − cos 2ζ]]
            [
                [Complex::new(k, -k * c), Complex::new(zero, -k * s)],
                [Complex::new(zero, -k * s), Complex::new(k, k * c)],
            ]
        }
        ElementKind::CompAt45 => {
            let (s, c) = (param / T::lit(2.0)).sin_cos();
            [
                [Complex::new(c, zero), Complex::new(zero, -s)],
                [Complex::new(zero, -s), Complex::new(c, zero)],
            ]
        }
        ElementKind::CompAt0 => {
            let half = param / T::lit(2.0);
            [
                [Complex::from_polar(T::one(), -half), Complex::new(zero, zero)],
                [Complex::new(zero, zero), Complex::from_polar(T::one(), half)],
            ]
        }
    };
    Ok(JonesMatrix::from_entries(m))
}

/// Chains two devices in propagation order: `first` is traversed first, so the
/// result is `then · first`.
pub fn compose<T: Real>(first: &JonesMatrix<T>, then: &JonesMatrix<T>) -> JonesMatrix<T> {
    *then * *first
}

/// Rotation/retardation pair of a waveplate, canonicalized to
/// `zeta ∈ [−π/4, π/4]`, `chi ∈ [−π, π]`.
///
/// `(ζ + π/2, −χ)` is the same element and `χ + 2π` only flips the global
/// sign, so every waveplate has a representative in this window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateParams<T: Real> {
    zeta: T,
    chi: T,
}

impl<T: Real> WaveplateParams<T> {
    pub fn new(zeta: T, chi: T) -> Result<Self, Error> {
        check_finite("zeta", zeta)?;
        check_finite("chi", chi)?;
        let mut zeta = wrap_centered(zeta, T::PI());
        let mut chi = chi;
        if zeta > T::FRAC_PI_4() {
            zeta = zeta - T::FRAC_PI_2();
            chi = -chi;
        } else if zeta < -T::FRAC_PI_4() {
            zeta = zeta + T::FRAC_PI_2();
            chi = -chi;
        }
        Ok(Self {
            zeta,
            chi: wrap_phase(chi),
        })
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    pub fn chi(&self) -> T {
        self.chi
    }

    /// Equal to `waveplate(zeta, chi)` of the raw inputs up to a global sign.
    pub fn jones(&self) -> JonesMatrix<T> {
        waveplate(self.zeta, self.chi).expect("canonical parameters are finite")
    }
}

/// `J = e^{i·global_phase}·[[h, v], [−v*, h*]]` with `h = cos α·e^{iφ}`,
/// `v = sin α·e^{iφ′}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryDecomposition<T: Real> {
    pub alpha: T,
    pub phi: T,
    pub phi_prime: T,
    pub global_phase: T,
}

impl<T: Real> UnitaryDecomposition<T> {
    pub fn h(&self) -> Cplx<T> {
        Complex::from_polar(self.alpha.cos(), self.phi)
    }

    pub fn v(&self) -> Cplx<T> {
        Complex::from_polar(self.alpha.sin(), self.phi_prime)
    }

    pub fn reconstruct(&self) -> JonesMatrix<T> {
        JonesMatrix::from_hv(self.h(), self.v()).with_global_phase(self.global_phase)
    }

    /// True when α sits within [`Real::degenerate_tol`] of 0 or π/2.
    pub fn is_degenerate(&self) -> bool {
        let tol = T::degenerate_tol();
        self.alpha <= tol || (T::FRAC_PI_2() - self.alpha) <= tol
    }
}

/// Splits a unitary into its SU(2) part and a global phase.
///
/// The global phase is `arg(det J)/2`, with the remaining sign ambiguity fixed
/// by requiring `arg(h) ∈ (−π/2, π/2]` (or `arg(v)` when `h = 0`). Undefined
/// phases at α = 0 or π/2 are reported as 0.
pub fn decompose<T: Real>(j: &JonesMatrix<T>) -> Result<UnitaryDecomposition<T>, Error> {
    j.ensure_unitary()
        .map_err(|e| Error::Precondition(format!("decompose needs a unitary input: {e}")))?;
    let mut theta = j.det().arg() / T::lit(2.0);
    let u = j.with_global_phase(-theta);
    let two = T::lit(2.0);
    // average the redundant SU(2) entries to spread rounding error
    let mut h = (u.m[0][0] + u.m[1][1].conj()) / two;
    let mut v = (u.m[0][1] - u.m[1][0].conj()) / two;

    let zero_tol = T::zero_tol();
    let pivot = if h.norm() > zero_tol { h } else { v };
    let a = pivot.arg();
    if a <= -T::FRAC_PI_2() || a > T::FRAC_PI_2() {
        h = -h;
        v = -v;
        theta = theta + T::PI();
    }

    let alpha = v.norm().atan2(h.norm());
    let phi = if h.norm() > zero_tol { h.arg() } else { T::zero() };
    let phi_prime = if v.norm() > zero_tol { v.arg() } else { T::zero() };
    Ok(UnitaryDecomposition {
        alpha,
        phi,
        phi_prime,
        global_phase: wrap_phase(theta),
    })
}
