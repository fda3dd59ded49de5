//! One-sided stable increments via Kanter's representation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fracops::FractionalOrder;

/// Standard one-sided stable variable with `E[exp(-l S)] = exp(-l^beta)`.
///
/// Kanter (1975): for `U ~ U(0, pi)` and `E ~ Exp(1)`,
/// `S = sin(beta U) / sin(U)^{1/beta} * (sin((1 - beta) U) / E)^{(1 - beta)/beta}`.
pub fn sample_standard<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    if beta == 1.0 {
        return 1.0;
    }
    let u = PI * rng.gen::<f64>();
    let e: f64 = Exp1.sample(rng);
    // gen::<f64>() lies in [0, 1); u = 0 has probability 2^-53 but would give 0/0.
    let u = if u == 0.0 { f64::MIN_POSITIVE } else { u };
    let a = (beta * u).sin() / u.sin().powf(1.0 / beta);
    let b = ((1.0 - beta) * u).sin() / e;
    a * b.powf((1.0 - beta) / beta)
}

/// Increment `D_{tau + d_tau} - D_tau`, distributed as `d_tau^{1/beta} S`.
pub fn sample_stable_increment<R: Rng + ?Sized>(beta: FractionalOrder, d_tau: f64, rng: &mut R) -> Result<f64> {
    if !(d_tau.is_finite() && d_tau > 0.0) {
        return Err(Error::param("d_tau", format!("must be positive, got {d_tau}")));
    }
    let b = beta.value();
    if b == 1.0 {
        return Ok(d_tau);
    }
    Ok(d_tau.powf(1.0 / b) * sample_standard(b, rng))
}

/// Median of the standard stable law, estimated from a fixed-seed sample so
/// it is identical across runs.
pub fn standard_median(beta: f64) -> f64 {
    if beta == 1.0 {
        return 1.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_3ed1);
    let mut s: Vec<f64> = (0..1 << 15).map(|_| sample_standard(beta, &mut rng)).collect();
    let mid = s.len() / 2;
    *s.select_nth_unstable_by(mid, f64::total_cmp).1
}
