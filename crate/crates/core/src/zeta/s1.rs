use super::arg::s_of_t;
use super::sweep::z_progression;
use super::theta::theta;
use super::{mean_gap, z_unchecked, EvalConfig, ZetaError};
use crate::quad::gauss_legendre;
use crate::roots::brent;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::RwLock;

const SPACING: f64 = 100.0;
const SAMPLES_PER_GAP: f64 = 8.0;

/// ∫_{1/2}^{∞} ln|ζ(σ)| dσ.
pub(crate) const LITTLEWOOD_CONST: f64 = 2.567_789_453_151_597;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct S1Checkpoint {
    pub t: f64,
    pub s1: f64,
    /// N(t): zeros with ordinate in (0, t].
    pub zeros_below: u64,
}

/// Checkpoints of S₁ every 100 units, built by counting zeros of Z.
///
/// Readers share the lock; extension takes it exclusively.
pub struct S1Store {
    cfg: EvalConfig,
    inner: RwLock<Vec<S1Checkpoint>>,
}

impl S1Store {
    pub fn new(cfg: EvalConfig) -> Self {
        S1Store {
            cfg,
            inner: RwLock::new(vec![S1Checkpoint { t: 0.0, s1: 0.0, zeros_below: 0 }]),
        }
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn checkpoints(&self) -> Vec<S1Checkpoint> {
        self.inner.read().unwrap().clone()
    }

    /// Last checkpoint at or below t, extending the store first if needed.
    fn base_for(&self, t: f64) -> Result<S1Checkpoint, ZetaError> {
        let idx = (t / SPACING).floor() as usize;
        {
            let cps = self.inner.read().unwrap();
            if idx < cps.len() {
                return Ok(cps[idx]);
            }
        }
        let mut cps = self.inner.write().unwrap();
        while cps.len() <= idx {
            let last = *cps.last().unwrap();
            let b = last.t + SPACING;
            let next = self.verified_piece(last, b)?;
            cps.push(next);
        }
        Ok(cps[idx])
    }

    fn verified_piece(&self, from: S1Checkpoint, b: f64) -> Result<S1Checkpoint, ZetaError> {
        let check = b <= 1e5 || ((b / SPACING).round() as u64) % 10 == 0;
        let mut density = SAMPLES_PER_GAP;
        loop {
            let (int, count) = piece(from.t, b, from.zeros_below, density, &self.cfg);
            let next = S1Checkpoint { t: b, s1: from.s1 + int, zeros_below: count };
            if !check {
                return Ok(next);
            }
            let expected = match s_of_t(b, &self.cfg) {
                Ok(s) => (theta(b) / PI + 1.0 + s).round() as u64,
                Err(ZetaError::NearZero { .. }) => return Ok(next),
                Err(e) => return Err(e),
            };
            if expected == count {
                return Ok(next);
            }
            if density >= 16.0 * SAMPLES_PER_GAP {
                // a pair of zeros closer than the finest sampling; the count from
                // the argument is authoritative and the integral error is tiny
                return Ok(S1Checkpoint { zeros_below: expected, ..next });
            }
            density *= 4.0;
        }
    }
}

/// S₁(T) = ∫₀ᵀ S(t) dt, from the checkpoint below T plus a fresh piece.
pub fn s1_of_t(t: f64, store: &S1Store, cfg: &EvalConfig) -> Result<f64, ZetaError> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(ZetaError::Domain(t));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let base = store.base_for(t)?;
    if t == base.t {
        return Ok(base.s1);
    }
    let (int, _) = piece(base.t, t, base.zeros_below, SAMPLES_PER_GAP, cfg);
    Ok(base.s1 + int)
}

/// ∫_a^b S(t) dt given N(a); also returns N(b).
fn piece(a: f64, b: f64, n_a: u64, density: f64, cfg: &EvalConfig) -> (f64, u64) {
    let zeros = zeros_in(a, b, density, cfg);
    let mut int = (n_a as f64 - 1.0) * (b - a);
    for z in &zeros {
        int += b - z;
    }
    int -= theta_integral(a, b) / PI;
    (int, n_a + zeros.len() as u64)
}

pub(crate) fn theta_integral(a: f64, b: f64) -> f64 {
    // θ has branch points at ±i/2, so panels stay short near the origin
    let mut sum = 0.0;
    let mut lo = a;
    while lo < b {
        let hi = (lo + lo.clamp(0.25, 25.0)).min(b);
        sum += gauss_legendre(theta, lo, hi);
        lo = hi;
    }
    sum
}

/// Zeros of Z in (a, b], located from sign changes on a grid of `density`
/// points per mean gap and polished by Brent.
pub(crate) fn zeros_in(a: f64, b: f64, density: f64, cfg: &EvalConfig) -> Vec<f64> {
    let lo = a.max(1.0);
    if b <= lo {
        return Vec::new();
    }
    let h = mean_gap(b) / density;
    let n = ((b - lo) / h).ceil() as usize;
    let h = (b - lo) / n as f64;
    let mut vals = vec![0.0; n + 1];
    if lo >= cfg.em_cutoff {
        for (block, chunk) in vals.chunks_mut(2048).enumerate() {
            z_progression(lo + (block * 2048) as f64 * h, h, cfg.rs_correction_order, chunk);
        }
    } else {
        for (i, v) in vals.iter_mut().enumerate() {
            *v = z_unchecked(lo + i as f64 * h, cfg);
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        let (x0, x1) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
        let (f0, f1) = (vals[i], vals[i + 1]);
        if f1 == 0.0 {
            if x1 > a {
                out.push(x1);
            }
        } else if f0 * f1 < 0.0 {
            let r = brent::<()>(|x| Ok(z_unchecked(x, cfg)), x0, x1, f0, f1, 1e-12, 100)
                .expect("infallible");
            if r.x > a && r.x <= b {
                out.push(r.x);
            }
        }
    }
    out
}

/// S₁(T) by Littlewood's formula, S₁(T) = (1/π) ∫_{1/2}^{∞} ln|ζ(σ+iT)| dσ − const.
/// Local in T, so it serves as an anchor far from the origin. T should not sit
/// on a zero ordinate.
pub fn s1_littlewood(t: f64) -> f64 {
    const EDGES: [f64; 15] = [
        0.5, 0.55, 0.65, 0.8, 1.0, 1.3, 1.7, 2.2, 3.0, 4.5, 7.0, 11.0, 18.0, 28.0, 40.0,
    ];
    let f = |s: f64| super::em::zeta(Complex64::new(s, t)).norm().ln();
    let mut int = 0.0;
    for w in EDGES.windows(2) {
        // the first panel carries the near-log behaviour of nearby zeros
        let parts = if w[0] < 0.6 { 8 } else { 2 };
        let h = (w[1] - w[0]) / parts as f64;
        for i in 0..parts {
            int += gauss_legendre(f, w[0] + i as f64 * h, w[0] + (i + 1) as f64 * h);
        }
    }
    (int - LITTLEWOOD_CONST) / PI
}
