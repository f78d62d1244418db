use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use chsh_phase::{
    bell_parameter, correlation, maximize_bell_numeric, optimal_settings_closed, rotating_analyzer_probs,
    AnalyzerSettings,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e(phi: f64, a: f64, b: f64) -> f64 {
    correlation(&rotating_analyzer_probs(phi, a, b))
}

/// Maximizes `f` on [−π/2, π/2) by a 1e-4 grid followed by golden-section
/// refinement around the best grid point.
fn grid_then_refine(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = 1e-4;
    let n = (PI / step) as usize;
    let mut best = (-FRAC_PI_2, f(-FRAC_PI_2));
    for k in 1..n {
        let x = -FRAC_PI_2 + k as f64 * step;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-12 {
        let (c, d) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(c) > f(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    let x = (lo + hi) / 2.0;
    (x, f(x))
}

#[test]
fn third_pi_by_grid_search() {
    // with a = 0 and a′ = π/4 the parameter splits into f(b) + g(b′)
    let phi = PI / 3.0;
    let (b, fb) = grid_then_refine(|b| e(phi, 0.0, b) + e(phi, FRAC_PI_4, b));
    let (bp, gbp) = grid_then_refine(|bp| e(phi, 0.0, bp) - e(phi, FRAC_PI_4, bp));
    let s = fb + gbp;
    assert!((b - 0.2318238).abs() < 1e-6, "b = {b}");
    assert!((bp + 0.2318238).abs() < 1e-6, "b' = {bp}");
    assert!((s - 2.2360680).abs() < 1e-6, "S = {s}");

    let (set, smax) = optimal_settings_closed(phi);
    assert!((set.b - b).abs() < 1e-6);
    assert!((smax - s).abs() < 1e-9);
}

#[test]
fn numeric_maximum_tracks_closed_form_on_sweep() {
    for k in 0..=31 {
        let phi = (k as f64 * 0.1).min(PI);
        let (_, s) = maximize_bell_numeric(phi, 1e-9).unwrap();
        let closed = 2.0 * (phi.cos().powi(2) + 1.0).sqrt();
        assert!((s - closed).abs() <= 1e-6, "phi = {phi}: {s} vs {closed}");
    }
}

#[test]
fn numeric_maximum_on_random_phases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let phi = rng.gen_range(0.0..PI);
        let (set, s) = maximize_bell_numeric(phi, 1e-9).unwrap();
        let closed = 2.0 * (phi.cos().powi(2) + 1.0).sqrt();
        assert!((s - closed).abs() <= 1e-6);
        // the reported angles reproduce the reported value
        let again = bell_parameter(|a, b| Ok(rotating_analyzer_probs(phi, a, b)), &set).unwrap();
        assert!((again - s).abs() <= 1e-9);
        // the closed form is never beaten
        assert!(s <= closed + 1e-9);
    }
}

#[test]
fn closed_form_endpoints() {
    for (phi, want) in [(0.0, 2.0 * SQRT_2), (FRAC_PI_2, 2.0), (PI, 2.0 * SQRT_2)] {
        let (set, smax) = optimal_settings_closed(phi);
        let s = bell_parameter(|a, b| Ok(rotating_analyzer_probs(phi, a, b)), &set).unwrap();
        assert!((s - want).abs() <= 1e-12);
        assert!((smax - want).abs() <= 1e-12);
    }
}

#[test]
fn standard_settings_at_quarter_phase() {
    // the textbook angles are not optimal once the state is circular
    let s = bell_parameter(
        |a, b| Ok(rotating_analyzer_probs(FRAC_PI_2, a, b)),
        &AnalyzerSettings::chsh_standard(),
    )
    .unwrap();
    assert!((s - SQRT_2).abs() < 1e-12);
}
