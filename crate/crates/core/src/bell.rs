//! Outcome probabilities, correlation, the CHSH Bell parameter, the
//! effective phase seen by a pair of analyzers, and optimal analyzer angles.

use num_complex::Complex;

use crate::jones::{JonesMatrix, UnitaryDecomposition};
use crate::optimize::{maximize_periodic, MaximizerConfig};
use crate::scalar::{check_finite, to_f64, wrap_centered, wrap_phase, Real};
use crate::states::{Family, TwoQubitState};
use crate::Error;

/// Joint outcome probabilities `P₊₊, P₊₋, P₋₊, P₋₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeProbs<T: Real> {
    pub p_pp: T,
    pub p_pm: T,
    pub p_mp: T,
    pub p_mm: T,
}

impl<T: Real> OutcomeProbs<T> {
    /// Clamps rounding excursions slightly outside [0, 1].
    pub fn new(p_pp: T, p_pm: T, p_mp: T, p_mm: T) -> Self {
        let c = |p: T| p.max(T::zero()).min(T::one());
        Self {
            p_pp: c(p_pp),
            p_pm: c(p_pm),
            p_mp: c(p_mp),
            p_mm: c(p_mm),
        }
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.p_pp, self.p_pm, self.p_mp, self.p_mm]
    }

    pub fn sum(&self) -> T {
        self.p_pp + self.p_pm + self.p_mp + self.p_mm
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }
}

/// CHSH analyzer angles `(a, a′, b, b′)`, each reduced modulo π into [−π/2, π/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSettings<T: Real> {
    pub a: T,
    pub a_prime: T,
    pub b: T,
    pub b_prime: T,
}

impl<T: Real> AnalyzerSettings<T> {
    pub fn new(a: T, a_prime: T, b: T, b_prime: T) -> Self {
        let w = |x: T| wrap_centered(x, T::PI());
        Self {
            a: w(a),
            a_prime: w(a_prime),
            b: w(b),
            b_prime: w(b_prime),
        }
    }

    /// The textbook quadruple `(0, π/4, π/8, −π/8)`.
    pub fn chsh_standard() -> Self {
        let e = T::FRAC_PI_8();
        Self::new(T::zero(), T::FRAC_PI_4(), e, -e)
    }

    /// The four `(A, B)` pairs in the order `S` sums them; the last enters with a minus sign.
    pub fn pairs(&self) -> [(T, T); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.a, self.a_prime, self.b, self.b_prime]
    }
}

/// Probabilities of the four joint outcomes for analyzers `T_A`, `T_B`, by
/// projecting the state on `⟨±_A ±_B|`, where `|+_I⟩`, `|−_I⟩` are the rows
/// of `T_I`.
pub fn outcome_probs<T: Real>(
    state: &TwoQubitState<T>,
    t_a: &JonesMatrix<T>,
    t_b: &JonesMatrix<T>,
) -> Result<OutcomeProbs<T>, Error> {
    t_a.ensure_unitary()
        .and_then(|_| t_b.ensure_unitary())
        .map_err(|e| Error::Precondition(format!("analyzers must be unitary: {e}")))?;
    let amp = |x: usize, y: usize| {
        let (ra, rb) = (t_a.row(x), t_b.row(y));
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..2 {
            for k in 0..2 {
                acc = acc + ra[j].conj() * rb[k].conj() * state.amplitude(j, k);
            }
        }
        acc.norm_sqr()
    };
    Ok(OutcomeProbs::new(amp(0, 0), amp(0, 1), amp(1, 0), amp(1, 1)))
}

/// Closed-form probabilities for `|Φ(φ)⟩` behind ideal rotating analyzers at `a`, `b`.
///
/// `(φ, b)` is first mapped to its representative with φ in [π, 2π) through
/// the identity `P(φ, a, b) = P(φ + π, a, −b)`, so both members of such a
/// pair evaluate the same floating-point expression.
pub fn rotating_analyzer_probs<T: Real>(phi: T, a: T, b: T) -> OutcomeProbs<T> {
    let two_pi = T::two_pi();
    let r = phi.rem_euclid(&two_pi);
    let (phi, b) = if r < T::PI() { (r + T::PI(), -b) } else { (r, b) };
    let half = phi / T::lit(2.0);
    let (sh, ch) = half.sin_cos();
    let (w_c, w_s) = (ch * ch, sh * sh);
    let (sd, cd) = (a - b).sin_cos();
    let (ss, cs) = (a + b).sin_cos();
    let h = T::lit(0.5);
    let same = h * (w_c * cd * cd + w_s * cs * cs);
    let diff = h * (w_c * sd * sd + w_s * ss * ss);
    OutcomeProbs::new(same, diff, diff, same)
}

/// `E = P₊₊ − P₊₋ − P₋₊ + P₋₋`.
pub fn correlation<T: Real>(p: &OutcomeProbs<T>) -> T {
    p.p_pp - p.p_pm - p.p_mp + p.p_mm
}

/// `S = E(a, b) + E(a, b′) + E(a′, b) − E(a′, b′)` for any probability model.
pub fn bell_parameter<T, M>(model: M, s: &AnalyzerSettings<T>) -> Result<T, Error>
where
    T: Real,
    M: Fn(T, T) -> Result<OutcomeProbs<T>, Error>,
{
    let [p1, p2, p3, p4] = s.pairs();
    let e = |(x, y): (T, T)| model(x, y).map(|p| correlation(&p));
    Ok(e(p1)? + e(p2)? + e(p3)? - e(p4)?)
}

/// Inputs to [`effective_phase`]: the state and the decompositions of both analyzers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePhaseInputs<T: Real> {
    pub family: Family,
    pub phi: T,
    pub decomp_a: UnitaryDecomposition<T>,
    pub decomp_b: UnitaryDecomposition<T>,
}

/// The single phase that, together with `α_A` and `α_B`, fixes every outcome
/// probability: `φ + φ_A + φ_B − φ′_A − φ′_B` for `|Φ⟩`.
///
/// For `|Ψ⟩` the roles of `φ_B` and `φ′_B` swap and a further π is added,
/// so that `φ_eff = 0` again means maximal `|S|` at the standard angles (with
/// the sign of every correlation flipped).
pub fn effective_phase<T: Real>(inp: &EffectivePhaseInputs<T>) -> Result<T, Error> {
    check_finite("phi", inp.phi)?;
    for d in [&inp.decomp_a, &inp.decomp_b] {
        if d.is_degenerate() {
            return Err(Error::DegenerateAnalyzer { alpha: to_f64(d.alpha) });
        }
    }
    let (a, b) = (&inp.decomp_a, &inp.decomp_b);
    let raw = match inp.family {
        Family::Phi => inp.phi + a.phi - a.phi_prime + b.phi - b.phi_prime,
        Family::Psi => inp.phi + a.phi - a.phi_prime - b.phi + b.phi_prime + T::PI(),
    };
    Ok(wrap_phase(raw))
}

/// Optimal angles `a = 0, a′ = π/4, b = −b′ = ½·arctan(cos φ)` and
/// `S_max = 2√(cos²φ + 1)`.
pub fn optimal_settings_closed<T: Real>(phi: T) -> (AnalyzerSettings<T>, T) {
    let c = phi.cos();
    let b = c.atan() / T::lit(2.0);
    let s = T::lit(2.0) * (c * c + T::one()).sqrt();
    (AnalyzerSettings::new(T::zero(), T::FRAC_PI_4(), b, -b), s)
}

/// Searches the 4-torus of analyzer angles for the largest `S` using the
/// closed-form probabilities, independently of [`optimal_settings_closed`].
///
/// The returned angles are one of several equivalent optima.
pub fn maximize_bell_numeric<T: Real>(phi: T, tol: T) -> Result<(AnalyzerSettings<T>, T), Error> {
    maximize_bell_numeric_with(phi, tol, &MaximizerConfig::default())
}

pub fn maximize_bell_numeric_with<T: Real>(
    phi: T,
    tol: T,
    cfg: &MaximizerConfig,
) -> Result<(AnalyzerSettings<T>, T), Error> {
    check_finite("phi", phi)?;
    let objective = |x: &[T]| {
        let s = AnalyzerSettings {
            a: x[0],
            a_prime: x[1],
            b: x[2],
            b_prime: x[3],
        };
        bell_parameter(|a, b| Ok(rotating_analyzer_probs(phi, a, b)), &s).expect("closed-form model is infallible")
    };
    let m = maximize_periodic(objective, 4, T::PI(), tol, cfg)?;
    let s = AnalyzerSettings::new(m.x[0], m.x[1], m.x[2], m.x[3]);
    Ok((s, m.value))
}
