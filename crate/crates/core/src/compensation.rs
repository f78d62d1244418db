//! Device settings that cancel the state phase for three analyzer layouts,
//! plus a matrix-level verification harness.
//!
//! Every layout is described by an analysis angle per channel, `α_A` and
//! `α_B`, and reaches `φ_eff = 0` by choosing its compensator settings. The
//! generators below produce settings from closed formulas and then check the
//! resulting matrices; the matrices are the ground truth.
//!
//! * [`SchemeKind::Rotating`]: a rotatable variable compensator on A, a
//!   compensator fixed at π/4 on B, polarizing beam splitters at H/V.
//! * [`SchemeKind::FixedPair`]: compensators at 0 and π/4 on A, one at π/4 on B.
//! * [`SchemeKind::Experimental`]: a compensator at 0 followed by a half-wave
//!   plate on A, a half-wave plate on B.

use std::fmt;
use std::str::FromStr;

use crate::bell::{correlation, effective_phase, outcome_probs, AnalyzerSettings, EffectivePhaseInputs};
use crate::jones::{compose, decompose, named_element, waveplate, ElementKind, JonesMatrix};
use crate::scalar::{check_finite, to_f64, wrap_centered, wrap_phase, wrap_turn, Real};
use crate::states::{make_state, Family};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Rotating,
    FixedPair,
    Experimental,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Rotating, SchemeKind::FixedPair, SchemeKind::Experimental];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Rotating => "rotating",
            SchemeKind::FixedPair => "fixed-pair",
            SchemeKind::Experimental => "experimental",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "rotating" => Ok(SchemeKind::Rotating),
            "fixedpair" => Ok(SchemeKind::FixedPair),
            "experimental" => Ok(SchemeKind::Experimental),
            _ => Err(Error::InvalidArgument(format!(
                "unknown scheme '{s}' (expected rotating, fixed-pair or experimental)"
            ))),
        }
    }
}

/// Rotatable compensator `(ζ_A, χ_A)` on A and a compensator at π/4 with
/// retardation `χ_B` on B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingCompSettings<T: Real> {
    pub chi_a: T,
    pub zeta_a: T,
    pub chi_b: T,
}

impl<T: Real> RotatingCompSettings<T> {
    pub fn devices(&self) -> Result<(JonesMatrix<T>, JonesMatrix<T>), Error> {
        Ok((
            waveplate(self.zeta_a, self.chi_a)?,
            named_element(ElementKind::CompAt45, self.chi_b)?,
        ))
    }
}

/// Compensators at 0 (`χ_1A`) then π/4 (`χ_2A`) on A, one at π/4 (`χ_B`) on B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPairSettings<T: Real> {
    pub chi_1a: T,
    pub chi_2a: T,
    pub chi_b: T,
}

impl<T: Real> FixedPairSettings<T> {
    pub fn devices(&self) -> Result<(JonesMatrix<T>, JonesMatrix<T>), Error> {
        let t_a = compose(
            &named_element(ElementKind::CompAt0, self.chi_1a)?,
            &named_element(ElementKind::CompAt45, self.chi_2a)?,
        );
        Ok((t_a, named_element(ElementKind::CompAt45, self.chi_b)?))
    }
}

/// Half-wave plate angles `ζ_1A`, `ζ_B` and the retardation `χ_2A` of the
/// compensator at 0 that precedes the plate on A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentalSettings<T: Real> {
    pub zeta_1a: T,
    pub chi_2a: T,
    pub zeta_b: T,
}

impl<T: Real> ExperimentalSettings<T> {
    /// Reduces plate angles into (−π/4, π/4]; a half-wave plate turned by π/2
    /// only changes sign.
    pub fn new(zeta_1a: T, chi_2a: T, zeta_b: T) -> Result<Self, Error> {
        check_finite("zeta_1a", zeta_1a)?;
        check_finite("chi_2a", chi_2a)?;
        check_finite("zeta_b", zeta_b)?;
        let plate = |z: T| -wrap_centered(-z, T::FRAC_PI_2());
        Ok(Self {
            zeta_1a: plate(zeta_1a),
            chi_2a,
            zeta_b: plate(zeta_b),
        })
    }

    pub fn devices(&self) -> Result<(JonesMatrix<T>, JonesMatrix<T>), Error> {
        experimental_chain(self)
    }
}

/// Settings of whichever layout produced a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeviceSettings<T: Real> {
    Rotating(RotatingCompSettings<T>),
    FixedPair(FixedPairSettings<T>),
    Experimental(ExperimentalSettings<T>),
    /// Fixed compensators followed by ideal rotating analyzers at these angles.
    Analyzers {
        alpha_a: T,
        alpha_b: T,
    },
}

impl<T: Real> DeviceSettings<T> {
    /// Named numeric fields, for reports.
    pub fn fields(&self) -> Vec<(&'static str, T)> {
        match *self {
            DeviceSettings::Rotating(s) => vec![("chi_a", s.chi_a), ("zeta_a", s.zeta_a), ("chi_b", s.chi_b)],
            DeviceSettings::FixedPair(s) => {
                vec![("chi_1a", s.chi_1a), ("chi_2a", s.chi_2a), ("chi_b", s.chi_b)]
            }
            DeviceSettings::Experimental(s) => {
                vec![("zeta_1a", s.zeta_1a), ("chi_2a", s.chi_2a), ("zeta_b", s.zeta_b)]
            }
            DeviceSettings::Analyzers { alpha_a, alpha_b } => vec![("alpha_a", alpha_a), ("alpha_b", alpha_b)],
        }
    }
}

/// Tolerance for the self-checks run by the generators.
fn verify_tol<T: Real>() -> T {
    T::check_tol() * T::lit(100.0)
}

fn half<T: Real>(x: T) -> T {
    x / T::lit(2.0)
}

/// Reduces φ to `φ_r ∈ [0, π]` and the sign of `ζ_A` that goes with it.
fn rotating_branch<T: Real>(phi: T) -> (T, T) {
    let r = wrap_turn(phi);
    if r <= T::PI() {
        (r, -T::one())
    } else {
        (r - T::PI(), T::one())
    }
}

/// `(χ_A/2, 2ζ_A)` for `φ_r ∈ [0, π]`, up to the sign of ζ.
///
/// With `s = sin(χ_A/2) = √(sin²α_A + cos²α_A·sin²φ_r)`, the arccos/arcsin
/// pair is evaluated through `atan2`, which stays accurate where their
/// arguments approach ±1.
fn rotating_angles<T: Real>(phi_r: T, alpha_a: T) -> (T, T) {
    let (sa, ca) = alpha_a.sin_cos();
    let (sp, cp) = phi_r.sin_cos();
    let s = sa.hypot(ca * sp);
    (s.atan2(ca * cp), sa.atan2(ca * sp))
}

/// `sin α_A / sin(χ_A/2)`, the argument of the arcsin that fixes `ζ_A`.
/// It never exceeds 1 because `sin(χ_A/2) = √(1 − cos²α_A·cos²φ) ≥ sin α_A`.
pub fn rotating_scheme_arcsin_argument<T: Real>(phi: T, alpha_a: T) -> Result<T, Error> {
    check_finite("phi", phi)?;
    check_finite("alpha_a", alpha_a)?;
    let (phi_r, _) = rotating_branch(phi);
    let s = rotating_angles(phi_r, alpha_a).0.sin();
    if s <= T::zero_tol() {
        return Ok(T::zero());
    }
    Ok(alpha_a.sin() / s)
}

fn check_asin_domain<T: Real>(x: T, what: &str) -> Result<(), Error> {
    let slack = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
    if x.abs() > T::one() + slack {
        return Err(Error::Domain(format!("{what}: arcsin argument {x} outside [-1, 1]")));
    }
    Ok(())
}

/// Settings of the rotating-compensator layout for analysis angles
/// `α_A ∈ [0, π/2]`, `α_B ∈ [−π/2, π/2]`.
///
/// `χ_A = 2·arccos(cos α_A·cos φ)`, `ζ_A = −½·arcsin(sin α_A / sin(χ_A/2))`
/// and `χ_B = 2α_B` for φ in [0, π]; other phases use `φ − π` with the
/// opposite sign of `ζ_A`.
pub fn rotating_scheme_settings<T: Real>(phi: T, alpha_a: T, alpha_b: T) -> Result<RotatingCompSettings<T>, Error> {
    check_finite("phi", phi)?;
    check_finite("alpha_a", alpha_a)?;
    check_finite("alpha_b", alpha_b)?;
    if alpha_a < T::zero() || alpha_a > T::FRAC_PI_2() {
        return Err(Error::Precondition(format!("alpha_a = {alpha_a} outside [0, pi/2]")));
    }
    if alpha_b.abs() > T::FRAC_PI_2() {
        return Err(Error::Precondition(format!(
            "alpha_b = {alpha_b} outside [-pi/2, pi/2]"
        )));
    }
    let arg = rotating_scheme_arcsin_argument(phi, alpha_a)?;
    check_asin_domain(arg, "rotating scheme")?;
    let (phi_r, sign) = rotating_branch(phi);
    let (half_chi, two_zeta) = rotating_angles(phi_r, alpha_a);
    let zeta_a = sign * half(two_zeta);
    let s = RotatingCompSettings {
        chi_a: wrap_turn(T::lit(2.0) * half_chi),
        zeta_a,
        chi_b: wrap_turn(T::lit(2.0) * alpha_b),
    };
    let (t_a, t_b) = s.devices()?;
    check_configuration(Family::Phi, phi, alpha_a, alpha_b, &t_a, &t_b)?;
    Ok(s)
}

/// Rotating-layout compensator `(ζ_A, φ_A)` that keeps `α_A = π/4` at
/// retardation `χ_A ∈ [π/2, 3π/2]`.
///
/// `φ_A = −arccos(√2·cos(χ_A/2)) ∈ [−π, 0]` is the phase of `h_A` for the
/// returned plate, so the diagonal coincidence probability is
/// `½cos²((φ + φ_A)/2)`.
pub fn rotating_scheme_diagonal_scan<T: Real>(chi_a: T) -> Result<(T, T), Error> {
    check_finite("chi_a", chi_a)?;
    let slack = T::lit(1e-12);
    if chi_a < T::FRAC_PI_2() - slack || chi_a > T::lit(3.0) * T::FRAC_PI_2() + slack {
        return Err(Error::Domain(format!(
            "chi_a = {chi_a} outside the diagonal scan window [pi/2, 3pi/2]"
        )));
    }
    // cos 2ζ and sin φ_A both reduce to √(−cos χ_A)
    let root = (-chi_a.cos()).max(T::zero()).sqrt();
    let zeta = -half(T::one().atan2(root));
    let phi_a = (-root).atan2(T::SQRT_2() * half(chi_a).cos());
    Ok((zeta, phi_a))
}

/// `χ_1A = φ + π`, `χ_2A = 2α_A`, `χ_B = 2α_B`, each in [0, 2π).
pub fn fixed_pair_settings<T: Real>(phi: T, alpha_a: T, alpha_b: T) -> Result<FixedPairSettings<T>, Error> {
    check_finite("phi", phi)?;
    check_finite("alpha_a", alpha_a)?;
    check_finite("alpha_b", alpha_b)?;
    let two = T::lit(2.0);
    let s = FixedPairSettings {
        chi_1a: wrap_turn(phi + T::PI()),
        chi_2a: wrap_turn(two * alpha_a),
        chi_b: wrap_turn(two * alpha_b),
    };
    let (t_a, t_b) = s.devices()?;
    check_configuration(Family::Phi, phi, alpha_a, alpha_b, &t_a, &t_b)?;
    Ok(s)
}

/// `ζ_1A = α_A/2`, `ζ_B = α_B/2`, and `χ_2A = φ` for `|Φ⟩` or `φ + π` for `|Ψ⟩`.
pub fn experimental_settings<T: Real>(
    family: Family,
    phi: T,
    alpha_a: T,
    alpha_b: T,
) -> Result<ExperimentalSettings<T>, Error> {
    check_finite("phi", phi)?;
    let chi = match family {
        Family::Phi => phi,
        Family::Psi => phi + T::PI(),
    };
    let s = ExperimentalSettings::new(half(alpha_a), wrap_turn(chi), half(alpha_b))?;
    let (t_a, t_b) = s.devices()?;
    check_configuration(family, phi, alpha_a, alpha_b, &t_a, &t_b)?;
    Ok(s)
}

/// Compensator at 0 then half-wave plate on A; half-wave plate on B.
pub fn experimental_chain<T: Real>(s: &ExperimentalSettings<T>) -> Result<(JonesMatrix<T>, JonesMatrix<T>), Error> {
    let t_a = compose(
        &named_element(ElementKind::CompAt0, s.chi_2a)?,
        &named_element(ElementKind::HalfWave, s.zeta_1a)?,
    );
    Ok((t_a, named_element(ElementKind::HalfWave, s.zeta_b)?))
}

/// Effective phase of a configuration with the analysis angles carrying
/// their sign: a negative angle shows up in the decomposition as `|α|` with
/// an extra π on one phase, which is removed here.
///
/// `None` when either angle is degenerate.
pub fn signed_pair_phase<T: Real>(
    family: Family,
    phi: T,
    alpha_a: T,
    alpha_b: T,
    t_a: &JonesMatrix<T>,
    t_b: &JonesMatrix<T>,
) -> Result<Option<T>, Error> {
    let inp = EffectivePhaseInputs {
        family,
        phi,
        decomp_a: decompose(t_a)?,
        decomp_b: decompose(t_b)?,
    };
    match effective_phase(&inp) {
        Ok(p) => {
            let flips = [alpha_a, alpha_b].iter().filter(|a| **a < T::zero()).count();
            Ok(Some(wrap_phase(p + T::PI() * T::lit(flips as f64))))
        }
        Err(Error::DegenerateAnalyzer { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Confirms that a generated configuration realizes `|α_A|`, `|α_B|` and a
/// vanishing effective phase.
fn check_configuration<T: Real>(
    family: Family,
    phi: T,
    alpha_a: T,
    alpha_b: T,
    t_a: &JonesMatrix<T>,
    t_b: &JonesMatrix<T>,
) -> Result<(), Error> {
    let tol = verify_tol::<T>();
    let folded = |a: T| wrap_centered(a, T::PI()).abs();
    for (name, t, target) in [("A", t_a, alpha_a), ("B", t_b, alpha_b)] {
        let got = decompose(t)?.alpha;
        if (got - folded(target)).abs() > tol {
            return Err(Error::Verification(format!(
                "channel {name} analyzes at alpha = {got}, expected {target}"
            )));
        }
    }
    if let Some(p) = signed_pair_phase(family, phi, alpha_a, alpha_b, t_a, t_b)? {
        if p.abs() > tol {
            return Err(Error::Verification(format!("effective phase {p} is not zero")));
        }
    }
    Ok(())
}

/// A configuration of both channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig<T: Real> {
    pub t_a: JonesMatrix<T>,
    pub t_b: JonesMatrix<T>,
    pub settings: DeviceSettings<T>,
}

/// Something that can be set to analyze channel A at `α_A` and B at `α_B`.
pub trait AnalysisChain<T: Real> {
    fn configure(&self, alpha_a: T, alpha_b: T) -> Result<ChainConfig<T>, Error>;
}

/// One of the three layouts, set up for a given state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeChain<T: Real> {
    pub scheme: SchemeKind,
    pub family: Family,
    pub phi: T,
}

/// Settings of `scheme` for analysis angles `(α_A, α_B)` on the given state.
pub fn scheme_settings<T: Real>(
    scheme: SchemeKind,
    family: Family,
    phi: T,
    alpha_a: T,
    alpha_b: T,
) -> Result<DeviceSettings<T>, Error> {
    Ok(match scheme {
        SchemeKind::Rotating => DeviceSettings::Rotating(rotating_scheme_settings(phi, alpha_a, alpha_b)?),
        SchemeKind::FixedPair => DeviceSettings::FixedPair(fixed_pair_settings(phi, alpha_a, alpha_b)?),
        SchemeKind::Experimental => DeviceSettings::Experimental(experimental_settings(family, phi, alpha_a, alpha_b)?),
    })
}

impl<T: Real> AnalysisChain<T> for SchemeChain<T> {
    fn configure(&self, alpha_a: T, alpha_b: T) -> Result<ChainConfig<T>, Error> {
        let settings = scheme_settings(self.scheme, self.family, self.phi, alpha_a, alpha_b)?;
        let (t_a, t_b) = match settings {
            DeviceSettings::Rotating(s) => s.devices()?,
            DeviceSettings::FixedPair(s) => s.devices()?,
            DeviceSettings::Experimental(s) => s.devices()?,
            DeviceSettings::Analyzers { .. } => unreachable!("scheme settings are never bare analyzers"),
        };
        Ok(ChainConfig { t_a, t_b, settings })
    }
}

/// Fixed compensators on each channel followed by ideal rotating analyzers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensatedAnalyzers<T: Real> {
    pub comp_a: JonesMatrix<T>,
    pub comp_b: JonesMatrix<T>,
}

impl<T: Real> CompensatedAnalyzers<T> {
    /// Bare rotating analyzers with no compensation.
    pub fn uncompensated() -> Self {
        Self {
            comp_a: JonesMatrix::identity(),
            comp_b: JonesMatrix::identity(),
        }
    }
}

impl<T: Real> AnalysisChain<T> for CompensatedAnalyzers<T> {
    fn configure(&self, alpha_a: T, alpha_b: T) -> Result<ChainConfig<T>, Error> {
        self.comp_a.ensure_unitary()?;
        self.comp_b.ensure_unitary()?;
        Ok(ChainConfig {
            t_a: compose(&self.comp_a, &JonesMatrix::rotation(alpha_a)),
            t_b: compose(&self.comp_b, &JonesMatrix::rotation(alpha_b)),
            settings: DeviceSettings::Analyzers { alpha_a, alpha_b },
        })
    }
}

/// Outcome of [`verify_compensation`]; every number comes from the matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensationReport<T: Real> {
    /// Effective phase in the diagonal configuration `α_A = α_B = π/4`.
    pub phi_eff: T,
    /// Signed effective phase of each CHSH pair, `None` where an angle is degenerate.
    pub pair_phases: [Option<T>; 4],
    /// Bell parameter by projection at the four CHSH pairs.
    pub s_at_chsh: T,
    /// Settings used for each CHSH pair, in the order of [`AnalyzerSettings::pairs`].
    pub settings_echo: [DeviceSettings<T>; 4],
    pub diagonal_settings: DeviceSettings<T>,
}

/// Configures `chain` for the diagonal basis and for each of the four CHSH
/// angle pairs in `alphas`, and measures `φ_eff` and `S` by projection.
pub fn verify_compensation<T, C>(
    state_phi: T,
    family: Family,
    chain: &C,
    alphas: &AnalyzerSettings<T>,
) -> Result<CompensationReport<T>, Error>
where
    T: Real,
    C: AnalysisChain<T> + ?Sized,
{
    let state = make_state(family, state_phi)?;
    let diag = chain.configure(T::FRAC_PI_4(), T::FRAC_PI_4())?;
    let phi_eff = effective_phase(&EffectivePhaseInputs {
        family,
        phi: state_phi,
        decomp_a: decompose(&diag.t_a)?,
        decomp_b: decompose(&diag.t_b)?,
    })?;

    let mut pair_phases = [None; 4];
    let mut echo = [diag.settings; 4];
    let mut s = T::zero();
    for (k, (a, b)) in alphas.pairs().into_iter().enumerate() {
        let cfg = chain.configure(a, b)?;
        let e = correlation(&outcome_probs(&state, &cfg.t_a, &cfg.t_b)?);
        s = if k == 3 { s - e } else { s + e };
        pair_phases[k] = signed_pair_phase(family, state_phi, a, b, &cfg.t_a, &cfg.t_b)?;
        echo[k] = cfg.settings;
    }
    Ok(CompensationReport {
        phi_eff,
        pair_phases,
        s_at_chsh: s,
        settings_echo: echo,
        diagonal_settings: diag.settings,
    })
}

/// Devices of `scheme` in the diagonal basis with the scanned setting at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig<T: Real> {
    pub t_a: JonesMatrix<T>,
    pub t_b: JonesMatrix<T>,
    pub settings: DeviceSettings<T>,
    /// Abscissa of the fringe model: `φ_A` for the rotating layout, the
    /// scanned retardation otherwise.
    pub model_x: T,
}

/// The scanned element is `χ_A` (rotating, restricted to [π/2, 3π/2]),
/// `χ_1A` (fixed pair) or `χ_2A` (experimental); every other element sits at
/// its diagonal-basis value.
pub fn diagonal_scan_config<T: Real>(scheme: SchemeKind, x: T) -> Result<ScanConfig<T>, Error> {
    check_finite("scan value", x)?;
    let quarter = T::FRAC_PI_2();
    match scheme {
        SchemeKind::Rotating => {
            let (zeta_a, phi_a) = rotating_scheme_diagonal_scan(x)?;
            let s = RotatingCompSettings {
                chi_a: x,
                zeta_a,
                chi_b: quarter,
            };
            let (t_a, t_b) = s.devices()?;
            Ok(ScanConfig {
                t_a,
                t_b,
                settings: DeviceSettings::Rotating(s),
                model_x: phi_a,
            })
        }
        SchemeKind::FixedPair => {
            let s = FixedPairSettings {
                chi_1a: x,
                chi_2a: quarter,
                chi_b: quarter,
            };
            let (t_a, t_b) = s.devices()?;
            Ok(ScanConfig {
                t_a,
                t_b,
                settings: DeviceSettings::FixedPair(s),
                model_x: x,
            })
        }
        SchemeKind::Experimental => {
            let s = ExperimentalSettings::new(T::FRAC_PI_8(), x, T::FRAC_PI_8())?;
            let (t_a, t_b) = s.devices()?;
            Ok(ScanConfig {
                t_a,
                t_b,
                settings: DeviceSettings::Experimental(s),
                model_x: x,
            })
        }
    }
}

/// Diagonal-basis fringe of each layout written as `P₊₊ = ¼(1 + cos(x − x₀))`
/// with `x₀ = σ·φ + δ`; returns `(σ, δ)`.
pub fn fringe_offset<T: Real>(scheme: SchemeKind, family: Family) -> (T, T) {
    let pi = T::PI();
    match (scheme, family) {
        (SchemeKind::Rotating, Family::Phi) => (-T::one(), T::zero()),
        (SchemeKind::Rotating, Family::Psi) => (-T::one(), -pi),
        (SchemeKind::FixedPair, Family::Phi) => (T::one(), pi),
        (SchemeKind::FixedPair, Family::Psi) => (T::one(), T::zero()),
        (SchemeKind::Experimental, _) => (T::one(), T::zero()),
    }
}

/// Closed-form diagonal-basis `P₊₊` at model abscissa `x`.
pub fn fringe_model<T: Real>(scheme: SchemeKind, family: Family, phi: T, x: T) -> T {
    let (sigma, delta) = fringe_offset::<T>(scheme, family);
    let x0 = sigma * phi + delta;
    T::lit(0.25) * (T::one() + (x - x0).cos())
}

/// Field names and values as `f64`.
pub fn settings_to_f64<T: Real>(s: &DeviceSettings<T>) -> Vec<(&'static str, f64)> {
    s.fields().into_iter().map(|(k, v)| (k, to_f64(v))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};

    const TSIRELSON: f64 = 2.0 * SQRT_2;

    fn chsh() -> AnalyzerSettings<f64> {
        AnalyzerSettings::chsh_standard()
    }

    #[test]
    fn rotating_at_zero_phase() {
        let s = rotating_scheme_settings(0.0, FRAC_PI_4, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(s.chi_a, FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.zeta_a, -FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(s.chi_b, FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn rotating_at_third_pi() {
        let s = rotating_scheme_settings(PI / 3.0, FRAC_PI_4, FRAC_PI_4).unwrap();
        // 2·arccos(cos(π/4)/2) and ½·arcsin(sin(π/4)/sin(χ/2))
        assert_abs_diff_eq!(s.chi_a, 2.4188584057763776, epsilon = 1e-12);
        assert_abs_diff_eq!(s.zeta_a, -0.4285359739250654, epsilon = 1e-12);
        assert_abs_diff_eq!(s.chi_b, FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn rotating_chi_b_tracks_alpha_b() {
        for phi in [0.0, 1.0, 2.5, 4.0] {
            let s = rotating_scheme_settings(phi, 0.6, FRAC_PI_8).unwrap();
            assert_abs_diff_eq!(s.chi_b, FRAC_PI_4, epsilon = 1e-15);
        }
    }

    #[test]
    fn rotating_rejects_out_of_range_alpha() {
        assert!(matches!(
            rotating_scheme_settings(0.3, 2.0, 0.1),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            rotating_scheme_settings(0.3, 0.5, -2.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn arcsin_argument_bounded_on_grid() {
        for i in 1..100 {
            let alpha = FRAC_PI_2 * i as f64 / 100.0;
            for j in 0..100 {
                let phi = PI * j as f64 / 99.0;
                assert!(rotating_scheme_arcsin_argument(phi, alpha).unwrap() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn rotating_matches_eq15_form() {
        // sin α_A = sin(χ/2)|sin 2ζ| and tan φ_A = −tan(χ/2)·cos 2ζ
        for (phi, alpha) in [(0.4, 0.3), (1.9, 1.1), (3.0, FRAC_PI_4), (5.5, 0.7)] {
            let s = rotating_scheme_settings(phi, alpha, FRAC_PI_4).unwrap();
            let d = decompose(&waveplate(s.zeta_a, s.chi_a).unwrap()).unwrap();
            let (sh, ch) = (s.chi_a / 2.0).sin_cos();
            assert_abs_diff_eq!(d.alpha.sin(), sh * (2.0 * s.zeta_a).sin().abs(), epsilon = 1e-12);
            let lhs = d.phi.sin() * ch;
            let rhs = -d.phi.cos() * sh * (2.0 * s.zeta_a).cos();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_scan_examples() {
        let (z, p) = rotating_scheme_diagonal_scan(PI).unwrap();
        assert_abs_diff_eq!(z, -FRAC_PI_8, epsilon = 1e-15);
        assert_abs_diff_eq!(p, -FRAC_PI_2, epsilon = 1e-15);

        let (z, p) = rotating_scheme_diagonal_scan(FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(z, -FRAC_PI_4, epsilon = 1e-8);
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-8);

        // φ_A moves like √(χ − 3π/2) at the edge, so the rounded input shows up at 1e-8
        let (_, p) = rotating_scheme_diagonal_scan(3.0 * FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(wrap_phase(p - PI), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn diagonal_scan_window_enforced() {
        match rotating_scheme_diagonal_scan(0.2) {
            Err(Error::Domain(msg)) => assert!(msg.contains("[pi/2, 3pi/2]")),
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(rotating_scheme_diagonal_scan(5.0).is_err());
    }

    #[test]
    fn diagonal_scan_matches_matrix() {
        for k in 0..=20 {
            let chi = FRAC_PI_2 + PI * k as f64 / 20.0;
            let (z, p) = rotating_scheme_diagonal_scan(chi).unwrap();
            let j = waveplate(z, chi).unwrap();
            let h = j.entry(0, 0);
            assert_abs_diff_eq!(h.norm(), FRAC_PI_4.cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(wrap_phase(h.arg() - p), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn fixed_pair_examples() {
        let s = fixed_pair_settings(0.8, FRAC_PI_4, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(s.chi_1a, 0.8 + PI, epsilon = 1e-15);
        assert_abs_diff_eq!(s.chi_2a, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.chi_b, FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(fixed_pair_settings(PI, 0.3, 0.3).unwrap().chi_1a, 0.0);
    }

    #[test]
    fn fixed_pair_decomposition_exact() {
        let s = fixed_pair_settings(1.3, 0.5, 0.4).unwrap();
        let (t_a, _) = s.devices().unwrap();
        let d = decompose(&t_a).unwrap();
        // the normalization may flip the overall sign, which moves both phases by π
        let mod_pi = |x: f64| wrap_centered(x, PI);
        assert_abs_diff_eq!(d.alpha, s.chi_2a / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(mod_pi(d.phi + s.chi_1a / 2.0), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(mod_pi(d.phi_prime - (s.chi_1a / 2.0 - FRAC_PI_2)), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            wrap_phase(d.phi - d.phi_prime + s.chi_1a - FRAC_PI_2),
            0.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn experimental_chain_examples() {
        let s = ExperimentalSettings::new(0.0, 0.0, 0.0).unwrap();
        let (t_a, t_b) = experimental_chain(&s).unwrap();
        assert!(t_a.entry(0, 1).norm() < 1e-15 && t_b.entry(0, 1).norm() < 1e-15);
        let psi = make_state(Family::Psi, 0.4).unwrap();
        assert_abs_diff_eq!(outcome_probs(&psi, &t_a, &t_b).unwrap().p_pp, 0.0, epsilon = 1e-15);

        let s = ExperimentalSettings::new(FRAC_PI_8, 2.2, FRAC_PI_8).unwrap();
        let (t_a, _) = experimental_chain(&s).unwrap();
        assert_abs_diff_eq!(decompose(&t_a).unwrap().alpha, FRAC_PI_4, epsilon = 1e-12);
    }

    #[test]
    fn experimental_plates_canonical() {
        let s = ExperimentalSettings::new(FRAC_PI_4, 1.0, FRAC_PI_2 + 0.1).unwrap();
        assert_eq!(s.zeta_1a, FRAC_PI_4);
        assert_abs_diff_eq!(s.zeta_b, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn experimental_scan_is_sinusoidal() {
        let phi = 0.9;
        let psi = make_state(Family::Psi, phi).unwrap();
        for k in 0..16 {
            let x = 2.0 * PI * k as f64 / 16.0;
            let c = diagonal_scan_config(SchemeKind::Experimental, x).unwrap();
            let p = outcome_probs(&psi, &c.t_a, &c.t_b).unwrap().p_pp;
            assert_abs_diff_eq!(p, 0.25 * (1.0 + (phi - x).cos()), epsilon = 1e-12);
        }
    }

    #[test]
    fn fringe_models_match_matrices() {
        for scheme in SchemeKind::ALL {
            for family in [Family::Phi, Family::Psi] {
                for phi in [0.0, 0.8, 2.9, -1.7] {
                    let st = make_state(family, phi).unwrap();
                    for k in 0..=24 {
                        let x = match scheme {
                            SchemeKind::Rotating => FRAC_PI_2 + PI * k as f64 / 24.0,
                            _ => 2.0 * PI * k as f64 / 24.0,
                        };
                        let c = diagonal_scan_config(scheme, x).unwrap();
                        let p = outcome_probs(&st, &c.t_a, &c.t_b).unwrap().p_pp;
                        let m = fringe_model(scheme, family, phi, c.model_x);
                        assert!((p - m).abs() < 1e-12, "{scheme} {family} phi={phi} x={x}: {p} vs {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn fixed_pair_scan_follows_sin_squared() {
        let phi = 0.8;
        let st = make_state(Family::Phi, phi).unwrap();
        for k in 0..64 {
            let x = 2.0 * PI * k as f64 / 64.0;
            let c = diagonal_scan_config(SchemeKind::FixedPair, x).unwrap();
            let p = outcome_probs(&st, &c.t_a, &c.t_b).unwrap().p_pp;
            assert_abs_diff_eq!(p, 0.5 * ((phi - x) / 2.0).sin().powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn verify_fixed_pair_reaches_tsirelson() {
        for phi in [0.0, 0.8, 2.0, PI, 4.4] {
            for family in [Family::Phi, Family::Psi] {
                let chain = SchemeChain {
                    scheme: SchemeKind::FixedPair,
                    family,
                    phi,
                };
                let r = verify_compensation(phi, family, &chain, &chsh()).unwrap();
                assert_abs_diff_eq!(r.phi_eff, 0.0, epsilon = 1e-9);
                assert_abs_diff_eq!(r.s_at_chsh.abs(), TSIRELSON, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn verify_all_schemes() {
        for scheme in SchemeKind::ALL {
            for family in [Family::Phi, Family::Psi] {
                for phi in [0.0, 0.3, FRAC_PI_2, 2.7, PI, 3.9, 6.0] {
                    let chain = SchemeChain { scheme, family, phi };
                    let r = verify_compensation(phi, family, &chain, &chsh()).unwrap();
                    assert!(r.phi_eff.abs() < 1e-9, "{scheme} {family} {phi}: {}", r.phi_eff);
                    assert!((r.s_at_chsh.abs() - TSIRELSON).abs() < 1e-9);
                    for p in r.pair_phases.iter().flatten() {
                        assert!(p.abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn psi_sign_of_s() {
        let chain = SchemeChain {
            scheme: SchemeKind::Experimental,
            family: Family::Psi,
            phi: PI,
        };
        let r = verify_compensation(PI, Family::Psi, &chain, &chsh()).unwrap();
        assert_abs_diff_eq!(r.s_at_chsh, -TSIRELSON, epsilon = 1e-9);
        match r.settings_echo[0] {
            DeviceSettings::Experimental(s) => assert_abs_diff_eq!(s.chi_2a, 0.0, epsilon = 1e-15),
            other => panic!("unexpected settings {other:?}"),
        }
    }

    #[test]
    fn uncompensated_examples() {
        let bare = CompensatedAnalyzers::uncompensated();
        let r = verify_compensation(0.0, Family::Phi, &bare, &chsh()).unwrap();
        assert_abs_diff_eq!(r.s_at_chsh, TSIRELSON, epsilon = 1e-12);

        let (opt, _) = crate::bell::optimal_settings_closed(FRAC_PI_2);
        let r = verify_compensation(FRAC_PI_2, Family::Phi, &bare, &opt).unwrap();
        assert_abs_diff_eq!(r.s_at_chsh, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.phi_eff, FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn compensated_analyzers_with_diagonal_compensator() {
        // a compensator at 0 with χ = φ ahead of analyzer A cancels the state phase
        let phi = 1.1;
        let chain = CompensatedAnalyzers {
            comp_a: named_element(ElementKind::CompAt0, phi).unwrap(),
            comp_b: JonesMatrix::identity(),
        };
        let r = verify_compensation(phi, Family::Phi, &chain, &chsh()).unwrap();
        assert_abs_diff_eq!(r.s_at_chsh, TSIRELSON, epsilon = 1e-12);
        assert_abs_diff_eq!(r.phi_eff, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_chain_reported() {
        struct Flat;
        impl AnalysisChain<f64> for Flat {
            fn configure(&self, a: f64, b: f64) -> Result<ChainConfig<f64>, Error> {
                Ok(ChainConfig {
                    t_a: JonesMatrix::identity(),
                    t_b: JonesMatrix::identity(),
                    settings: DeviceSettings::Analyzers { alpha_a: a, alpha_b: b },
                })
            }
        }
        assert!(matches!(
            verify_compensation(0.0, Family::Phi, &Flat, &chsh()),
            Err(Error::DegenerateAnalyzer { .. })
        ));
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("fixed_pair".parse::<SchemeKind>().unwrap(), SchemeKind::FixedPair);
        assert_eq!("Rotating".parse::<SchemeKind>().unwrap(), SchemeKind::Rotating);
        assert!("spiral".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn f32_fixed_pair() {
        let chain = SchemeChain {
            scheme: SchemeKind::FixedPair,
            family: Family::Phi,
            phi: 0.8f32,
        };
        let r = verify_compensation(0.8f32, Family::Phi, &chain, &AnalyzerSettings::chsh_standard()).unwrap();
        assert!((r.s_at_chsh - 2.0 * std::f32::consts::SQRT_2).abs() < 1e-5);
    }
}
