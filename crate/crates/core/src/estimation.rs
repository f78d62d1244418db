//! Phase recovery from scanned coincidence fringes.
//!
//! Every diagonal-basis fringe is `y = m + A·cos x + B·sin x` in the model
//! abscissa, so a weighted linear least-squares fit gives the fringe phase in
//! closed form; the layout's fringe offset then converts it to φ.

use crate::compensation::{
    experimental_settings, fixed_pair_settings, fringe_offset, rotating_scheme_settings, SchemeKind,
};
use crate::scalar::{to_f64, wrap_phase, wrap_turn, Real};
use crate::sim::FringeData;
use crate::Error;

/// Default visibility below which an estimate is rejected.
pub const MIN_VISIBILITY: f64 = 0.2;

/// Result of [`harmonic_fit`]: `y ≈ m + A·cos x + B·sin x = m + R·cos(x − x₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit<T: Real> {
    pub offset: T,
    pub cos_amp: T,
    pub sin_amp: T,
    /// `R = √(A² + B²)`.
    pub amplitude: T,
    /// `x₀ = atan2(B, A)`, the abscissa of the fringe maximum.
    pub phase: T,
    /// `R/m`, or 0 when `m ≤ 0`.
    pub visibility: T,
    /// 1-σ uncertainty of `x₀` from the Poisson-weighted covariance.
    pub sigma_phase: T,
    /// Weighted residual sum of squares over `n − 3`.
    pub residual_chi2: T,
    pub n_points: usize,
}

/// Weighted least squares with weights `1/max(y, 1)`, through the 3×3 normal equations.
pub fn harmonic_fit<T: Real>(points: &[(T, T)]) -> Result<FringeFit<T>, Error> {
    if points.len() < 4 {
        return Err(Error::Precondition(format!(
            "harmonic fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidArgument("fit points must be finite".into()));
    }
    let mut normal = [[T::zero(); 3]; 3];
    let mut rhs = [T::zero(); 3];
    for &(x, y) in points {
        let w = T::one() / y.max(T::one());
        let (s, c) = x.sin_cos();
        let row = [T::one(), c, s];
        for i in 0..3 {
            rhs[i] = rhs[i] + w * row[i] * y;
            for j in 0..3 {
                normal[i][j] = normal[i][j] + w * row[i] * row[j];
            }
        }
    }
    let cov = invert3(&normal)?;
    let theta: [T; 3] = std::array::from_fn(|i| (0..3).fold(T::zero(), |acc, j| acc + cov[i][j] * rhs[j]));
    let [m, a, b] = theta;
    let r = a.hypot(b);

    let mut chi2 = T::zero();
    for &(x, y) in points {
        let w = T::one() / y.max(T::one());
        let (s, c) = x.sin_cos();
        let d = y - (m + a * c + b * s);
        chi2 = chi2 + w * d * d;
    }
    let dof = T::lit((points.len() - 3) as f64);

    let sigma_phase = if r > T::zero() {
        let r4 = r * r * r * r;
        let var = (b * b * cov[1][1] - T::lit(2.0) * a * b * cov[1][2] + a * a * cov[2][2]) / r4;
        var.max(T::zero()).sqrt()
    } else {
        T::infinity()
    };
    Ok(FringeFit {
        offset: m,
        cos_amp: a,
        sin_amp: b,
        amplitude: r,
        phase: b.atan2(a),
        visibility: if m > T::zero() { r / m } else { T::zero() },
        sigma_phase,
        residual_chi2: chi2 / dof,
        n_points: points.len(),
    })
}

/// Inverse of a symmetric positive semi-definite 3×3 matrix, rejecting
/// near-singular ones.
fn invert3<T: Real>(m: &[[T; 3]; 3]) -> Result<[[T; 3]; 3], Error> {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    let norm = |a: &[[T; 3]; 3]| {
        a.iter()
            .map(|row| row.iter().fold(T::zero(), |s, x| s + x.abs()))
            .fold(T::zero(), T::max)
    };
    let limit = T::one() / (T::epsilon() * T::lit(1e4));
    let cond = if det != T::zero() {
        norm(m) * norm(&adj) / det.abs()
    } else {
        T::infinity()
    };
    if !(cond < limit) {
        return Err(Error::IllConditioned(format!(
            "normal matrix condition number {:e}; scan values are congruent modulo pi or too few distinct",
            to_f64(cond)
        )));
    }
    Ok(adj.map(|row| row.map(|x| x / det)))
}

/// Compensator settings that put `φ_eff` at 0 and at π for the estimated phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setpoints {
    /// Scan value giving `φ_eff = 0`.
    pub phi_eff_zero: f64,
    /// Scan value giving `φ_eff = π`; the rotating layout cannot reach it
    /// within its scan window.
    pub phi_eff_pi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    /// Estimated state phase in (−π, π].
    pub phi_hat: f64,
    pub sigma: f64,
    pub scheme: SchemeKind,
    pub fit: FringeFit<f64>,
    pub setpoints: Setpoints,
}

/// State phase `σ·(x₀ − δ)` implied by a fringe maximum at model abscissa `x₀`.
pub fn phase_from_fringe_maximum<T: Real>(scheme: SchemeKind, family: crate::Family, x0: T) -> T {
    let (sigma, delta) = fringe_offset::<T>(scheme, family);
    wrap_phase(sigma * (x0 - delta))
}

fn setpoints(scheme: SchemeKind, family: crate::Family, phi_hat: f64) -> Result<Setpoints, Error> {
    let q = std::f64::consts::FRAC_PI_4;
    let zero = match scheme {
        SchemeKind::Rotating => rotating_scheme_settings(phi_hat, q, q)?.chi_a,
        SchemeKind::FixedPair => fixed_pair_settings(phi_hat, q, q)?.chi_1a,
        SchemeKind::Experimental => experimental_settings(family, phi_hat, q, q)?.chi_2a,
    };
    let pi = match scheme {
        SchemeKind::Rotating => None,
        _ => Some(wrap_turn(zero + std::f64::consts::PI)),
    };
    Ok(Setpoints {
        phi_eff_zero: zero,
        phi_eff_pi: pi,
    })
}

/// Fits the `n₊₊` fringe of a diagonal-basis scan and inverts the layout's
/// fringe model for φ.
///
/// A visibility below [`MIN_VISIBILITY`] yields [`Error::LowVisibility`],
/// which still carries the estimate.
pub fn estimate_phase(scheme: SchemeKind, data: &FringeData) -> Result<PhaseEstimate, Error> {
    if data.scheme != scheme {
        return Err(Error::InvalidArgument(format!(
            "data were scanned with the {} layout, not {}",
            data.scheme, scheme
        )));
    }
    let fit = harmonic_fit(&data.coincidence_series())?;
    let phi_hat = phase_from_fringe_maximum(scheme, data.family, fit.phase);
    if !(fit.visibility >= MIN_VISIBILITY) {
        return Err(Error::LowVisibility {
            visibility: fit.visibility,
            threshold: MIN_VISIBILITY,
            phi_hat,
            sigma: fit.sigma_phase,
        });
    }
    Ok(PhaseEstimate {
        phi_hat,
        sigma: fit.sigma_phase,
        scheme,
        fit,
        setpoints: setpoints(scheme, data.family, phi_hat)?,
    })
}

/// Positions of the fringe minimum and maximum of a periodic series.
///
/// Each extremum is first taken from the grid, then refined by a harmonic
/// fit restricted to the points within `half_window` (circular distance) of
/// it, so the two positions are estimated from disjoint data when
/// `half_window < π/2`.
pub fn locate_extrema<T: Real>(series: &[(T, T)], half_window: T) -> Result<(T, T), Error> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("empty series".into()));
    }
    let pick = |better: fn(T, T) -> bool| {
        series
            .iter()
            .copied()
            .reduce(|best, p| if better(p.1, best.1) { p } else { best })
            .expect("non-empty")
            .0
    };
    let crude_min = pick(|a, b| a < b);
    let crude_max = pick(|a, b| a > b);
    let refine = |centre: T, is_max: bool| -> Result<T, Error> {
        let local: Vec<(T, T)> = series
            .iter()
            .copied()
            .filter(|(x, _)| wrap_phase(*x - centre).abs() <= half_window)
            .collect();
        let fit = harmonic_fit(&local)?;
        let peak = if is_max { fit.phase } else { fit.phase + T::PI() };
        Ok(centre + wrap_phase(peak - centre))
    };
    Ok((refine(crude_min, false)?, refine(crude_max, true)?))
}

/// Circular distance between two angles, in [0, π].
pub fn angular_distance<T: Real>(a: T, b: T) -> T {
    wrap_phase(a - b).abs()
}

impl<T: Real> FringeFit<T> {
    pub fn to_f64(&self) -> FringeFit<f64> {
        FringeFit {
            offset: to_f64(self.offset),
            cos_amp: to_f64(self.cos_amp),
            sin_amp: to_f64(self.sin_amp),
            amplitude: to_f64(self.amplitude),
            phase: to_f64(self.phase),
            visibility: to_f64(self.visibility),
            sigma_phase: to_f64(self.sigma_phase),
            residual_chi2: to_f64(self.residual_chi2),
            n_points: self.n_points,
        }
    }
}
