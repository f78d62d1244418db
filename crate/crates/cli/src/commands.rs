//! The subcommands. Each returns a [`Report`]; writing it out is left to the caller.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt::Write as _;

use chsh_phase::{
    closed_grid, correlation, estimate_phase, expected_counts, make_state, maximize_bell_numeric,
    optimal_settings_closed, outcome_probs, rotating_analyzer_probs, scan_fringe, settings_to_f64, signed_pair_phase,
    simulate_counts, uniform_grid, verify_compensation, AnalysisChain, AnalyzerSettings, Error, Family, JonesMatrix,
    SchemeChain, SchemeKind,
};

use crate::config::{phase_grid, Params};
use crate::output::{Cell, Inputs, Table};
use crate::CliError;

/// Tolerance on `||S| − 2√2|` for a compensation to count as successful.
pub const COMPENSATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    /// Human-readable summary.
    pub text: String,
    pub table: Option<Table>,
    pub inputs: Inputs,
    pub seed: Option<u64>,
    /// False on a quantitative failure (exit code 1).
    pub passed: bool,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            text: String::new(),
            table: None,
            inputs: Inputs::default(),
            seed: None,
            passed: true,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

fn core(e: Error) -> CliError {
    CliError::from_core(e)
}

fn nan_if_none(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

pub fn smax(p: &Params) -> Result<Report, CliError> {
    p.restrict("smax", &["phi_min", "phi_max", "points", "tol"])?;
    let grid = phase_grid(p)?;
    let tol = p.tol()?;

    let mut r = Report::new("smax");
    r.inputs
        .set("phi_min", grid[0])
        .set("phi_max", grid[grid.len() - 1])
        .set("points", grid.len())
        .set("tol", tol);
    let mut table = Table::new(["phi", "a", "a_prime", "b", "b_prime", "s_closed", "s_numeric"]);
    let mut worst = 0.0f64;
    let mut lowest = (f64::INFINITY, 0.0);
    for &phi in &grid {
        let (set, s_closed) = optimal_settings_closed(phi);
        let (_, s_num) = maximize_bell_numeric(phi, tol).map_err(core)?;
        worst = worst.max((s_num - s_closed).abs());
        if s_closed < lowest.0 {
            lowest = (s_closed, phi);
        }
        let mut row: Vec<Cell> = vec![phi.into()];
        row.extend(set.as_array().map(Cell::from));
        row.extend([Cell::from(s_closed), Cell::from(s_num)]);
        table.push(row);
    }
    r.line(format!(
        "{} phases from {} to {}",
        grid.len(),
        grid[0],
        grid[grid.len() - 1]
    ));
    r.line(format!("smallest S_max = {:.9} at phi = {:.6}", lowest.0, lowest.1));
    r.line(format!("max |s_numeric - s_closed| = {:.3e}", worst));
    r.table = Some(table);
    Ok(r)
}

pub fn probs(p: &Params) -> Result<Report, CliError> {
    p.restrict("probs", &["family", "phi", "a", "b"])?;
    let family = p.family()?;
    let phi = p.required_angle("phi", p.phi)?;
    let a = p.angle("a", p.a, 0.0)?;
    let b = p.angle("b", p.b, 0.0)?;
    let state = make_state(family, phi).map_err(core)?;
    let probs = outcome_probs(&state, &JonesMatrix::rotation(a), &JonesMatrix::rotation(b)).map_err(core)?;
    let e = correlation(&probs);

    let mut r = Report::new("probs");
    r.inputs
        .set("family", family.name())
        .set("phi", phi)
        .set("a", a)
        .set("b", b);
    r.line(format!("state {family}({phi}), analyzers a = {a}, b = {b}"));
    r.line(format!(
        "P++ = {:.12}  P+- = {:.12}  P-+ = {:.12}  P-- = {:.12}",
        probs.p_pp, probs.p_pm, probs.p_mp, probs.p_mm
    ));
    r.line(format!("E = {e:.12}"));
    if family == Family::Phi {
        let dev = probs.max_abs_diff(&rotating_analyzer_probs(phi, a, b));
        r.line(format!("closed form agrees to {dev:.3e}"));
    }
    let mut table = Table::new(["a", "b", "p_pp", "p_pm", "p_mp", "p_mm", "correlation"]);
    let mut row: Vec<Cell> = vec![a.into(), b.into()];
    row.extend(probs.as_array().map(Cell::from));
    row.push(e.into());
    table.push(row);
    r.table = Some(table);
    Ok(r)
}

pub fn optimize(p: &Params) -> Result<Report, CliError> {
    p.restrict("optimize", &["phi", "tol"])?;
    let phi = p.required_angle("phi", p.phi)?;
    let tol = p.tol()?;
    let (num, s_num) = maximize_bell_numeric(phi, tol).map_err(core)?;
    let (closed, s_closed) = optimal_settings_closed(phi);

    let mut r = Report::new("optimize");
    r.inputs.set("phi", phi).set("tol", tol);
    let fmt = |s: &AnalyzerSettings<f64>| {
        format!(
            "a = {:.9}, a' = {:.9}, b = {:.9}, b' = {:.9}",
            s.a, s.a_prime, s.b, s.b_prime
        )
    };
    r.line(format!("numeric: {}  S = {:.12}", fmt(&num), s_num));
    r.line(format!("closed:  {}  S = {:.12}", fmt(&closed), s_closed));
    r.line(format!("|S_numeric - S_closed| = {:.3e}", (s_num - s_closed).abs()));
    let mut table = Table::new(["phi", "a", "a_prime", "b", "b_prime", "s_numeric", "s_closed"]);
    let mut row: Vec<Cell> = vec![phi.into()];
    row.extend(num.as_array().map(Cell::from));
    row.extend([Cell::from(s_num), Cell::from(s_closed)]);
    table.push(row);
    r.table = Some(table);
    Ok(r)
}

pub fn compensate(p: &Params) -> Result<Report, CliError> {
    p.restrict("compensate", &["family", "phi", "scheme", "alpha_a", "alpha_b"])?;
    let family = p.family()?;
    let phi = p.required_angle("phi", p.phi)?;
    let scheme = p.scheme()?;
    let alpha_a = p.angle("alpha_a", p.alpha_a, FRAC_PI_4)?;
    let alpha_b = p.angle("alpha_b", p.alpha_b, FRAC_PI_4)?;
    let chain = SchemeChain { scheme, family, phi };
    let chsh = AnalyzerSettings::chsh_standard();
    let report = verify_compensation(phi, family, &chain, &chsh).map_err(core)?;
    let state = make_state(family, phi).map_err(core)?;

    let mut r = Report::new("compensate");
    r.inputs
        .set("family", family.name())
        .set("phi", phi)
        .set("scheme", scheme.name())
        .set("alpha_a", alpha_a)
        .set("alpha_b", alpha_b);

    let configs: Vec<(f64, f64)> = std::iter::once((alpha_a, alpha_b)).chain(chsh.pairs()).collect();
    let mut table: Option<Table> = None;
    for (k, &(a, b)) in configs.iter().enumerate() {
        let cfg = chain.configure(a, b).map_err(core)?;
        let fields = settings_to_f64(&cfg.settings);
        let e = correlation(&outcome_probs(&state, &cfg.t_a, &cfg.t_b).map_err(core)?);
        let ph = signed_pair_phase(family, phi, a, b, &cfg.t_a, &cfg.t_b).map_err(core)?;
        if k == 0 {
            let list: Vec<String> = fields.iter().map(|(n, v)| format!("{n} = {v:.6}")).collect();
            r.line(format!("{scheme} scheme, {family}({phi})"));
            r.line(format!(
                "settings for alpha_a = {a:.6}, alpha_b = {b:.6}: {}",
                list.join(", ")
            ));
            match ph {
                Some(x) => r.line(format!("phi_eff at these settings = {x:.3e}")),
                None => r.line("phi_eff at these settings is undefined (degenerate analyzer)"),
            }
        }
        let t = table.get_or_insert_with(|| {
            let mut h = vec!["config".to_string(), "alpha_a".into(), "alpha_b".into()];
            h.extend(fields.iter().map(|(n, _)| n.to_string()));
            h.extend(["phi_eff".into(), "correlation".into()]);
            Table::new(h)
        });
        let mut row: Vec<Cell> = vec![k.into(), a.into(), b.into()];
        row.extend(fields.iter().map(|(_, v)| Cell::from(*v)));
        row.extend([Cell::from(nan_if_none(ph)), Cell::from(e)]);
        t.push(row);
    }

    let s = report.s_at_chsh;
    let dev = (s.abs() - 2.0 * SQRT_2).abs();
    r.line(format!(
        "phi_eff (diagonal basis, from matrices) = {:.3e}",
        report.phi_eff
    ));
    r.line(format!("S at CHSH settings (0, pi/4, pi/8, -pi/8) = {s:.9}"));
    r.passed = dev <= COMPENSATION_TOL;
    r.line(format!(
        "||S| - 2*sqrt(2)| = {dev:.3e} (tol {COMPENSATION_TOL:e}): {}",
        if r.passed { "ok" } else { "FAILED" }
    ));
    r.table = table;
    Ok(r)
}

fn default_scan(scheme: SchemeKind) -> (f64, f64) {
    match scheme {
        SchemeKind::Rotating => (FRAC_PI_2, 3.0 * FRAC_PI_2),
        _ => (0.0, 2.0 * PI),
    }
}

pub fn scan_fit(p: &Params) -> Result<Report, CliError> {
    p.restrict(
        "scan-fit",
        &[
            "family",
            "phi",
            "scheme",
            "grid_start",
            "grid_stop",
            "points",
            "pair_rate",
            "integration_time",
            "accidental_rate",
            "seed",
            "sampling",
        ],
    )?;
    let family = p.family()?;
    let phi = p.required_angle("phi", p.phi)?;
    let scheme = p.scheme()?;
    let (lo, hi) = default_scan(scheme);
    let start = p.angle("grid_start", p.grid_start, lo)?;
    let stop = p.angle("grid_stop", p.grid_stop, hi)?;
    let n = p.points.unwrap_or(20);
    if n < 3 {
        return Err(CliError::Usage(format!("a fit needs at least 3 points, got {n}")));
    }
    if stop <= start {
        return Err(CliError::Usage(format!(
            "grid_stop ({stop}) must exceed grid_start ({start})"
        )));
    }
    // the rotating window is bounded, so both ends are scanned
    let grid = match scheme {
        SchemeKind::Rotating => closed_grid(start, stop, n),
        _ => uniform_grid(start, stop, n),
    };
    let model = p.source_model()?;
    let data = scan_fringe(family, phi, scheme, &grid, &model).map_err(core)?;

    let mut r = Report::new("scan-fit");
    r.seed = Some(model.seed);
    r.inputs
        .set("family", family.name())
        .set("phi", phi)
        .set("scheme", scheme.name())
        .set("grid_start", start)
        .set("grid_stop", stop)
        .set("points", n)
        .set("pair_rate", model.pair_rate)
        .set("integration_time", model.integration_time)
        .set("accidental_rate", model.accidental_rate)
        .set("seed", model.seed)
        .set("sampling", model.sampling.to_string());

    let mut table = Table::new(["scan_value", "n_pp", "n_pm", "n_mp", "n_mm", "p_model"]);
    for pt in &data.points {
        let mut row: Vec<Cell> = vec![pt.scan_value.into()];
        row.extend(pt.counts.as_array().map(Cell::from));
        row.push(pt.p_model.p_pp.into());
        table.push(row);
    }
    r.table = Some(table);

    r.line(format!(
        "{scheme} scan of {family}({phi}), {n} points, {} sampling",
        model.sampling
    ));
    match estimate_phase(scheme, &data) {
        Ok(e) => {
            r.line(format!("phi_hat = {:.6} +/- {:.6} rad", e.phi_hat, e.sigma));
            r.line(format!(
                "visibility = {:.4}, reduced chi2 = {:.4}",
                e.fit.visibility, e.fit.residual_chi2
            ));
            r.line(format!(
                "error vs true phase = {:.6} rad",
                chsh_phase::wrap_phase(e.phi_hat - phi)
            ));
            let mut sp = format!("setpoint for phi_eff = 0: {:.6}", e.setpoints.phi_eff_zero);
            if let Some(x) = e.setpoints.phi_eff_pi {
                let _ = write!(sp, ", for phi_eff = pi: {x:.6}");
            }
            r.line(sp);
        }
        Err(Error::LowVisibility {
            visibility,
            threshold,
            phi_hat,
            sigma,
        }) => {
            r.line(format!("phi_hat = {phi_hat:.6} +/- {sigma:.6} rad (unreliable)"));
            r.line(format!("visibility = {visibility:.4} below {threshold}: fit rejected"));
            r.passed = false;
        }
        Err(e) => {
            let e = core(e);
            if e.exit_code() != 1 {
                return Err(e);
            }
            r.line(format!("fit failed: {e}"));
            r.passed = false;
        }
    }
    Ok(r)
}

pub fn simulate(p: &Params) -> Result<Report, CliError> {
    p.restrict(
        "simulate",
        &[
            "family",
            "phi",
            "a",
            "b",
            "pair_rate",
            "integration_time",
            "accidental_rate",
            "seed",
            "sampling",
            "repeats",
        ],
    )?;
    let family = p.family()?;
    let phi = p.required_angle("phi", p.phi)?;
    let a = p.angle("a", p.a, 0.0)?;
    let b = p.angle("b", p.b, 0.0)?;
    let repeats = p.repeats.unwrap_or(1);
    if repeats == 0 {
        return Err(CliError::Usage("repeats must be at least 1".into()));
    }
    let model = p.source_model()?;
    let state = make_state(family, phi).map_err(core)?;
    let probs = outcome_probs(&state, &JonesMatrix::rotation(a), &JonesMatrix::rotation(b)).map_err(core)?;
    let expected = expected_counts(&probs, &model).map_err(core)?;

    let mut r = Report::new("simulate");
    r.seed = Some(model.seed);
    r.inputs
        .set("family", family.name())
        .set("phi", phi)
        .set("a", a)
        .set("b", b)
        .set("repeats", repeats)
        .set("pair_rate", model.pair_rate)
        .set("integration_time", model.integration_time)
        .set("accidental_rate", model.accidental_rate)
        .set("seed", model.seed)
        .set("sampling", model.sampling.to_string());

    let mut table = Table::new(["trial", "n_pp", "n_pm", "n_mp", "n_mm"]);
    let mut totals = [0u64; 4];
    for i in 0..repeats {
        let c = simulate_counts(&probs, &model.for_point(i)).map_err(core)?;
        for (t, n) in totals.iter_mut().zip(c.as_array()) {
            *t += n;
        }
        let mut row: Vec<Cell> = vec![i.into()];
        row.extend(c.as_array().map(Cell::from));
        table.push(row);
    }
    r.table = Some(table);

    let means = totals.map(|t| t as f64 / repeats as f64);
    let fmt4 = |x: [f64; 4]| format!("{:.3} {:.3} {:.3} {:.3}", x[0], x[1], x[2], x[3]);
    r.line(format!(
        "{family}({phi}), analyzers a = {a}, b = {b}, {repeats} trial(s)"
    ));
    r.line(format!("expected counts ++ +- -+ --: {}", fmt4(expected)));
    r.line(format!("mean counts     ++ +- -+ --: {}", fmt4(means)));
    let sum: u64 = totals.iter().sum();
    if sum > 0 {
        let e = (totals[0] + totals[3]) as f64 - (totals[1] + totals[2]) as f64;
        r.line(format!(
            "E from counts = {:.6} (model {:.6})",
            e / sum as f64,
            correlation(&probs)
        ));
    }
    Ok(r)
}
