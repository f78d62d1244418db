//! Self-verification: closed forms against independent numeric and
//! matrix-level computations, on fixed seeded inputs.

use std::f64::consts::{PI, SQRT_2};

use chsh_phase::{
    bell_parameter, closed_grid, make_state, maximize_bell_numeric, optimal_settings_closed, outcome_probs,
    rotating_analyzer_probs, verify_compensation, wrap_phase, AnalyzerSettings, Family, JonesMatrix, OutcomeProbs,
    SchemeChain, SchemeKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::Report;

pub const SMAX_TOL: f64 = 1e-6;
pub const COMPENSATION_TOL: f64 = 1e-9;
pub const PROBS_TOL: f64 = 1e-12;
const SEED: u64 = 0xC45E_5EED;
const MAX_LISTED: usize = 10;

/// The closed forms under test; swapped out by the harness self-test.
#[derive(Clone, Copy)]
pub struct ClosedForms {
    pub smax: fn(f64) -> (AnalyzerSettings<f64>, f64),
    pub probs: fn(f64, f64, f64) -> OutcomeProbs<f64>,
}

impl Default for ClosedForms {
    fn default() -> Self {
        Self {
            smax: optimal_settings_closed::<f64>,
            probs: rotating_analyzer_probs::<f64>,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub max_error: f64,
    pub tol: f64,
    pub measure: &'static str,
}

impl SuiteResult {
    fn new(name: &'static str, measure: &'static str, tol: f64) -> Self {
        Self {
            name,
            cases: 0,
            failures: Vec::new(),
            max_error: 0.0,
            tol,
            measure,
        }
    }

    /// Records one case with error `err`; NaN counts as a failure.
    fn record(&mut self, err: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        let err = if err.is_nan() { f64::INFINITY } else { err };
        self.max_error = self.max_error.max(err);
        if err > self.tol {
            self.failures.push(format!("{}, error {err:.3e}", describe()));
        }
    }

    fn fail(&mut self, what: String) {
        self.cases += 1;
        self.max_error = f64::INFINITY;
        self.failures.push(what);
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Closed-form `S_max` against the numeric maximizer on 50 phases in [0, π],
/// and the closed-form angles against matrix projection.
pub fn smax_suite(forms: &ClosedForms) -> SuiteResult {
    let mut r = SuiteResult::new("smax", "|S_numeric - S_closed|", SMAX_TOL);
    for phi in closed_grid(0.0, PI, 50) {
        let (set, s_closed) = (forms.smax)(phi);
        match maximize_bell_numeric(phi, 1e-10) {
            Ok((_, s_num)) => r.record((s_num - s_closed).abs(), || format!("phi = {phi}")),
            Err(e) => r.fail(format!("phi = {phi}: {e}")),
        }
        let st = make_state(Family::Phi, phi).expect("finite phase");
        let s_proj = bell_parameter(
            |a, b| outcome_probs(&st, &JonesMatrix::rotation(a), &JonesMatrix::rotation(b)),
            &set,
        );
        match s_proj {
            Ok(s) if (s - s_closed).abs() <= 1e-9 => {}
            Ok(s) => r.fail(format!(
                "phi = {phi}: closed-form angles give S = {s}, formula {s_closed}"
            )),
            Err(e) => r.fail(format!("phi = {phi}: {e}")),
        }
    }
    r
}

/// Scheme settings verified by matrices on 100 random (φ, family, scheme) draws.
pub fn compensation_suite() -> SuiteResult {
    let mut r = SuiteResult::new("compensation", "max(|phi_eff|, ||S| - 2*sqrt(2)|)", COMPENSATION_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..100 {
        let phi = rng.gen_range(-PI..PI);
        let family = if rng.gen::<bool>() { Family::Phi } else { Family::Psi };
        let scheme = SchemeKind::ALL[rng.gen_range(0..3)];
        let chain = SchemeChain { scheme, family, phi };
        match verify_compensation(phi, family, &chain, &AnalyzerSettings::chsh_standard()) {
            Ok(rep) => {
                let err = wrap_phase(rep.phi_eff)
                    .abs()
                    .max((rep.s_at_chsh.abs() - 2.0 * SQRT_2).abs());
                r.record(err, || format!("{scheme} {family}({phi})"));
            }
            Err(e) => r.fail(format!("{scheme} {family}({phi}): {e}")),
        }
    }
    r
}

/// Closed-form rotating-analyzer probabilities against projection on 1000 random triples.
pub fn probs_suite(forms: &ClosedForms) -> SuiteResult {
    let mut r = SuiteResult::new("probabilities", "max |P_closed - P_projection|", PROBS_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for _ in 0..1000 {
        let (phi, a, b): (f64, f64, f64) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let st = make_state(Family::Phi, phi).expect("finite phase");
        match outcome_probs(&st, &JonesMatrix::rotation(a), &JonesMatrix::rotation(b)) {
            Ok(p) => r.record(p.max_abs_diff(&(forms.probs)(phi, a, b)), || {
                format!("phi = {phi}, a = {a}, b = {b}")
            }),
            Err(e) => r.fail(format!("phi = {phi}, a = {a}, b = {b}: {e}")),
        }
    }
    r
}

pub fn run_suites(forms: &ClosedForms) -> Vec<SuiteResult> {
    vec![smax_suite(forms), compensation_suite(), probs_suite(forms)]
}

pub fn report(results: &[SuiteResult]) -> Report {
    let mut text = String::new();
    for s in results {
        let status = if s.passed() { "PASS" } else { "FAIL" };
        text.push_str(&format!(
            "{status} {:<14} {:>4}/{:<4} {} = {:.3e} (tol {:e})\n",
            s.name,
            s.cases - s.failures.len(),
            s.cases,
            s.measure,
            s.max_error,
            s.tol
        ));
        for f in s.failures.iter().take(MAX_LISTED) {
            text.push_str(&format!("    failed: {f}\n"));
        }
        if s.failures.len() > MAX_LISTED {
            text.push_str(&format!("    ... and {} more\n", s.failures.len() - MAX_LISTED));
        }
    }
    let failed = results.iter().filter(|s| !s.passed()).count();
    if failed == 0 {
        text.push_str("verify: all suites passed\n");
    } else {
        text.push_str(&format!("verify: {failed} suite(s) failed\n"));
    }
    Report {
        command: "verify",
        text,
        table: None,
        inputs: Default::default(),
        seed: Some(SEED),
        passed: failed == 0,
    }
}
