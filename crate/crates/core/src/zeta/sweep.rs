use super::rs::{log_entry, rs_remainder};
use super::theta::theta;
use std::f64::consts::PI;

/// Fills `out[j] = Z(t0 + j·step)` with the Riemann-Siegel formula, advancing the
/// main-sum phasors n^{-1/2} e^{-it ln n} by a fixed rotation instead of
/// re-evaluating every cosine. Requires t0 ≥ 2π.
pub fn z_progression(t0: f64, step: f64, order: u32, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let t_end = t0 + step * (out.len() - 1) as f64;
    let nmax = (t_end.max(t0) / (2.0 * PI)).sqrt().floor() as usize;
    let mut re = Vec::with_capacity(nmax);
    let mut im = Vec::with_capacity(nmax);
    let mut rot_re = Vec::with_capacity(nmax);
    let mut rot_im = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let (ln, rs) = log_entry(n);
        let (s, c) = (t0 * ln).sin_cos();
        re.push(rs * c);
        im.push(-rs * s);
        let (s, c) = (step * ln).sin_cos();
        rot_re.push(c);
        rot_im.push(-s);
    }
    let len = out.len();
    for (j, slot) in out.iter_mut().enumerate() {
        let t = t0 + step * j as f64;
        let a = (t / (2.0 * PI)).sqrt();
        let n = (a.floor() as usize).min(nmax);
        let (mut sr, mut si) = (0.0, 0.0);
        for k in 0..n {
            sr += re[k];
            si += im[k];
        }
        let (s, c) = theta(t).sin_cos();
        *slot = 2.0 * (c * sr - s * si) + rs_remainder(a, order);
        if j + 1 == len {
            break;
        }
        for k in 0..nmax {
            let (x, y) = (re[k], im[k]);
            re[k] = x * rot_re[k] - y * rot_im[k];
            im[k] = x * rot_im[k] + y * rot_re[k];
        }
    }
}
