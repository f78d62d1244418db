//! Poisson variates with a fixed, documented algorithm so seeded streams stay
//! stable: sequential-search inversion below mean 30, Hörmann's transformed
//! rejection with squeeze (PTRS) above.

use rand::Rng;

use crate::Error;

const INVERSION_LIMIT: f64 = 30.0;
/// Largest mean accepted; beyond this counts are no longer exact in `f64`.
pub const MAX_MEAN: f64 = 9_007_199_254_740_992.0;

/// Draws one Poisson variate with the given mean.
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> Result<u64, Error> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Poisson mean must be finite and >= 0, got {mean}"
        )));
    }
    if mean > MAX_MEAN {
        return Err(Error::Range(format!("Poisson mean {mean} exceeds 2^53")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    if mean < INVERSION_LIMIT {
        Ok(inversion(rng, mean))
    } else {
        Ok(ptrs(rng, mean))
    }
}

fn inversion<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    let u: f64 = rng.gen();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    // the tail beyond 200 has probability below 1e-100 for mean < 30
    while u > cdf && k < 200 {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
    }
    k
}

fn ptrs<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.gen::<f64>() - 0.5;
        let v: f64 = rng.gen();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -mean + k * loglam - ln_factorial(k as u64) {
            return k as u64;
        }
    }
}

/// `ln(k!)`, exact summation up to 255 and Stirling's series beyond.
pub fn ln_factorial(k: u64) -> f64 {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; 256]> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [0.0; 256];
        for i in 1..256 {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    });
    if k < 256 {
        return table[k as usize];
    }
    let n = k as f64 + 1.0;
    let inv = 1.0 / n;
    let inv2 = inv * inv;
    (n - 0.5) * n.ln() - n
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}
