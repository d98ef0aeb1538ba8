use super::em::{em_tail, em_terms, zeta};
use super::{EvalConfig, ZetaError};
use num_complex::Complex64;
use std::f64::consts::PI;

const SIGMA_START: f64 = 2.0;
const STEP_FLOOR: f64 = 1e-8;
/// |ζ(½+it)| below this makes the argument meaningless.
pub const NEAR_ZERO_TOL: f64 = 1e-9;

/// ζ(σ_k + it) on the uniform grid σ_k = 2 − 1.5k/m, k = 0..=m, sharing one pass
/// over the Dirichlet terms: n^{-σ_{k+1}} = n^{-σ_k}·n^{Δ}.
fn zeta_on_line(t: f64, m: usize) -> Vec<Complex64> {
    let n_terms = em_terms((SIGMA_START * SIGMA_START + t * t).sqrt());
    let delta = (SIGMA_START - 0.5) / m as f64;
    let mut sums = vec![Complex64::new(0.0, 0.0); m + 1];
    for n in 1..n_terms {
        let ln = (n as f64).ln();
        let (s, c) = (t * ln).sin_cos();
        let mag = (-SIGMA_START * ln).exp();
        let ratio = (delta * ln).exp();
        let mut v = Complex64::new(mag * c, -mag * s);
        for acc in sums.iter_mut() {
            *acc += v;
            v *= ratio;
        }
    }
    sums.iter()
        .enumerate()
        .map(|(k, s)| {
            let sigma = sigma_at(k, m);
            s + em_tail(Complex64::new(sigma, t), n_terms)
        })
        .collect()
}

fn sigma_at(k: usize, m: usize) -> f64 {
    if k == m {
        0.5
    } else {
        SIGMA_START - (SIGMA_START - 0.5) * k as f64 / m as f64
    }
}

/// Argument change from σ_a to σ_b, splitting the step until every piece turns by < π/2.
fn track(
    t: f64,
    sa: f64,
    za: Complex64,
    sb: f64,
    zb: Complex64,
) -> Result<f64, ZetaError> {
    let d = (zb / za).arg();
    if d.abs() < 0.5 * PI {
        return Ok(d);
    }
    if (sa - sb).abs() < STEP_FLOOR {
        return Err(ZetaError::ArgTracking(t));
    }
    let sm = 0.5 * (sa + sb);
    let zm = zeta(Complex64::new(sm, t));
    Ok(track(t, sa, za, sm, zm)? + track(t, sm, zm, sb, zb)?)
}

/// arg ζ(½+it) by continuous variation along σ from 2 down to ½.
pub fn arg_zeta(t: f64, cfg: &EvalConfig) -> Result<f64, ZetaError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(ZetaError::Domain(t));
    }
    let m = ((SIGMA_START - 0.5) / cfg.arg_step).ceil().max(1.0) as usize;
    let vals = zeta_on_line(t, m);
    let end = vals[m];
    if end.norm() < NEAR_ZERO_TOL {
        return Err(ZetaError::NearZero { t, z: end.norm() });
    }
    // Re ζ(2+it) > 0, so the principal value is the right start
    let mut arg = vals[0].arg();
    for k in 1..=m {
        arg += track(t, sigma_at(k - 1, m), vals[k - 1], sigma_at(k, m), vals[k])?;
    }
    Ok(arg)
}

/// S(t) = arg ζ(½+it) / π.
pub fn s_of_t(t: f64, cfg: &EvalConfig) -> Result<f64, ZetaError> {
    Ok(arg_zeta(t, cfg)? / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::theta;

    #[test]
    fn line_grid_matches_direct_zeta() {
        let t = 77.7;
        let m = 15;
        let vals = zeta_on_line(t, m);
        for k in [0, 4, 11, 15] {
            let direct = zeta(Complex64::new(sigma_at(k, m), t));
            assert!((vals[k] - direct).norm() < 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn below_first_zero_counts_nothing() {
        // N(t) = 0 for t < 14.13: θ/π + 1 + S = 0
        let cfg = EvalConfig::default();
        for &t in &[3.0, 9.5, 13.9] {
            let n = theta(t) / PI + 1.0 + s_of_t(t, &cfg).unwrap();
            assert!(n.abs() < 1e-9, "t={t}: {n}");
        }
    }
}
