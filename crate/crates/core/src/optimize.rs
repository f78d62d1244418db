//! Multi-start coordinate-wise golden-section maximization on a torus.
//!
//! Every coordinate is periodic with the same period. Each coordinate step
//! samples a coarse grid over one full period, then runs a golden-section
//! search on the two grid cells around the best sample. Sweeps repeat until
//! one full sweep improves the objective by less than `tol / 10`.

use crate::scalar::Real;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaximizerConfig {
    pub starts: usize,
    pub max_evals_per_start: usize,
    /// Grid points per period used to bracket each 1-D maximum.
    pub coarse_points: usize,
    pub seed: u64,
}

impl Default for MaximizerConfig {
    fn default() -> Self {
        Self {
            starts: 16,
            max_evals_per_start: 10_000,
            coarse_points: 8,
            seed: 0x5EED_C45E,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Maximum<T> {
    pub x: Vec<T>,
    pub value: T,
    /// Index of the start that produced the maximum.
    pub start: usize,
    pub evaluations: usize,
}

/// SplitMix64, used only to place the starting points.
#[derive(Debug, Clone)]
pub(crate) struct SplitMix64(u64);

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub(crate) fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

struct Counted<'a, T, F: Fn(&[T]) -> T> {
    f: &'a F,
    evals: usize,
    _t: std::marker::PhantomData<T>,
}

impl<'a, T: Real, F: Fn(&[T]) -> T> Counted<'a, T, F> {
    fn eval(&mut self, x: &[T]) -> T {
        self.evals += 1;
        (self.f)(x)
    }
}

/// Maximizes `f` over `dim` angles of common `period`.
///
/// Starts run in index order and the best value wins, with ties going to the
/// lower index, so the result never depends on scheduling.
pub fn maximize_periodic<T, F>(f: F, dim: usize, period: T, tol: T, cfg: &MaximizerConfig) -> Result<Maximum<T>, Error>
where
    T: Real,
    F: Fn(&[T]) -> T,
{
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if !(period > T::zero()) || !period.is_finite() {
        return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
    }
    if dim == 0 || cfg.starts == 0 || cfg.coarse_points < 3 {
        return Err(Error::InvalidArgument("empty search configuration".into()));
    }

    let mut rng = SplitMix64::new(cfg.seed);
    let mut best: Option<Maximum<T>> = None;
    let mut total = 0;
    for start in 0..cfg.starts {
        let x0: Vec<T> = (0..dim).map(|_| period * T::lit(rng.next_f64())).collect();
        let (x, value, evals) = climb(&f, x0, period, tol, cfg)?;
        total += evals;
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(Maximum {
                x,
                value,
                start,
                evaluations: 0,
            });
        }
    }
    let mut best = best.expect("at least one start");
    best.evaluations = total;
    Ok(best)
}

fn climb<T, F>(f: &F, mut x: Vec<T>, period: T, tol: T, cfg: &MaximizerConfig) -> Result<(Vec<T>, T, usize), Error>
where
    T: Real,
    F: Fn(&[T]) -> T,
{
    let mut obj = Counted {
        f,
        evals: 0,
        _t: std::marker::PhantomData,
    };
    let mut value = obj.eval(&x);
    let stop = tol / T::lit(10.0);
    let step = period / T::lit(cfg.coarse_points as f64);
    let x_tol = T::epsilon().sqrt() * period;
    loop {
        let before = value;
        for i in 0..x.len() {
            value = line_search(&mut obj, &mut x, i, value, step, cfg.coarse_points, x_tol);
            if obj.evals > cfg.max_evals_per_start {
                return Err(Error::Convergence { evaluations: obj.evals });
            }
        }
        if value - before < stop {
            break;
        }
    }
    for xi in x.iter_mut() {
        *xi = xi.rem_euclid(&period);
    }
    Ok((x, value, obj.evals))
}

/// Moves coordinate `i` to the best point found; never decreases the value.
fn line_search<T, F>(
    obj: &mut Counted<'_, T, F>,
    x: &mut [T],
    i: usize,
    current: T,
    step: T,
    coarse: usize,
    x_tol: T,
) -> T
where
    T: Real,
    F: Fn(&[T]) -> T,
{
    let origin = x[i];
    let mut best_x = origin;
    let mut best_v = current;
    let probe = |obj: &mut Counted<'_, T, F>, x: &mut [T], t: T, bx: &mut T, bv: &mut T| {
        x[i] = t;
        let v = obj.eval(x);
        if v > *bv {
            *bv = v;
            *bx = t;
        }
        v
    };

    for k in 1..coarse {
        let t = origin + step * T::lit(k as f64);
        probe(obj, x, t, &mut best_x, &mut best_v);
    }

    // golden section on [g − step, g + step]
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let centre = best_x;
    let (mut a, mut b) = (centre - step, centre + step);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = probe(obj, x, c, &mut best_x, &mut best_v);
    let mut fd = probe(obj, x, d, &mut best_x, &mut best_v);
    while b - a > x_tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = probe(obj, x, c, &mut best_x, &mut best_v);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = probe(obj, x, d, &mut best_x, &mut best_v);
        }
    }
    x[i] = best_x;
    best_v
}
