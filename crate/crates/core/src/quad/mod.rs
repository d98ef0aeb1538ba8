//! Adaptive quadrature, the cumulative integral I(T) = ∫₀ᵀ Z² and the kernel K(x).

mod cache;
pub mod cheb;
mod kernel;
mod rules;

pub use cache::{
    subpanel_layout, z2_cumulative, CacheHeader, Checkpoint, CumulativeCache, PanelSamples,
    CACHE_FORMAT_VERSION, CHECKPOINT_SPACING, MOMENT_COUNT,
};
pub use kernel::{kernel_weighted_z2, Kernel, KernelForm, KernelHorizon};
pub use rules::{cc_rule, gauss_legendre, gl_rule, legendre_values, CC_N};

use crate::zeta::ZetaError;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelRule {
    /// 15-point Kronrod extension of 7-point Gauss
    Gk15,
    /// 21-point Kronrod extension of 10-point Gauss
    Gk21,
    /// 33-point Clenshaw-Curtis with the nested 17-point rule as error estimate
    Cc33,
}

impl std::str::FromStr for PanelRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gk15" => Ok(PanelRule::Gk15),
            "gk21" => Ok(PanelRule::Gk21),
            "cc33" => Ok(PanelRule::Cc33),
            _ => Err(format!("unknown panel rule {s:?} (expected gk15, gk21 or cc33)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub panel_rule: PanelRule,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 40,
            panel_rule: PanelRule::Gk21,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(QuadError::Config("tolerances must be positive".into()));
        }
        if !(10..=60).contains(&self.max_depth) {
            return Err(QuadError::Config(format!(
                "max_depth must be in 10..=60, got {}",
                self.max_depth
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("tolerance not reached: best value {:e} with error bound {:e}", .0.value, .0.err)]
    ToleranceNotReached(Estimate),
    #[error("invalid interval [{0}, {1}]")]
    Interval(f64, f64),
    #[error("integrand returned a non-finite value at t = {0}")]
    NonFinite(f64),
    #[error("invalid quadrature config: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error("cache: {0}")]
    Cache(String),
}

/// Cap on live subintervals, so a hopeless integrand cannot exhaust memory.
const MAX_INTERVALS: usize = 1 << 21;

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    depth: u32,
    val: [f64; N],
    err: [f64; N],
    key: f64,
    seq: u64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key
            .total_cmp(&o.key)
            .then_with(|| o.seq.cmp(&self.seq))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gauss_kronrod<const N: usize, E>(
    f: &mut impl FnMut(f64) -> Result<[f64; N], E>,
    a: f64,
    b: f64,
    xk: &[f64],
    wk: &[f64],
    wg: &[f64],
) -> Result<([f64; N], [f64; N]), E> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let m = xk.len();
    let centre_is_gauss = m % 2 == 0; // GK15: centre belongs to the Gauss rule
    let fc = f(c)?;
    let mut vals = Vec::with_capacity(2 * m);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    for i in 0..N {
        kron[i] = wk[m - 1] * fc[i];
        if centre_is_gauss {
            gauss[i] = wg[wg.len() - 1] * fc[i];
        }
    }
    for j in 0..m - 1 {
        let dx = h * xk[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        for i in 0..N {
            kron[i] += wk[j] * (f1[i] + f2[i]);
            if j % 2 == 1 {
                gauss[i] += wg[j / 2] * (f1[i] + f2[i]);
            }
        }
        vals.push((f1, f2));
    }
    let mut val = [0.0; N];
    let mut err = [0.0; N];
    for i in 0..N {
        let mean = 0.5 * kron[i];
        let mut res_abs = wk[m - 1] * fc[i].abs();
        let mut res_asc = wk[m - 1] * (fc[i] - mean).abs();
        for (j, (f1, f2)) in vals.iter().enumerate() {
            res_abs += wk[j] * (f1[i].abs() + f2[i].abs());
            res_asc += wk[j] * ((f1[i] - mean).abs() + (f2[i] - mean).abs());
        }
        val[i] = kron[i] * h;
        err[i] = rescale_error((kron[i] - gauss[i]) * h, res_abs * h.abs(), res_asc * h.abs());
    }
    Ok((val, err))
}

fn clenshaw_curtis<const N: usize, E>(
    f: &mut impl FnMut(f64) -> Result<[f64; N], E>,
    a: f64,
    b: f64,
) -> Result<([f64; N], [f64; N]), E> {
    let r = cc_rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut full = [0.0; N];
    let mut half = [0.0; N];
    let mut mag = [0.0; N];
    for (j, (&x, &w)) in r.x.iter().zip(&r.w).enumerate() {
        let v = f(c + h * x)?;
        for i in 0..N {
            full[i] += w * v[i];
            mag[i] += w * v[i].abs();
            if j % 2 == 0 {
                half[i] += r.w_half[j / 2] * v[i];
            }
        }
    }
    let mut val = [0.0; N];
    let mut err = [0.0; N];
    for i in 0..N {
        val[i] = full[i] * h;
        err[i] = ((full[i] - half[i]) * h).abs().max(50.0 * f64::EPSILON * mag[i] * h.abs());
    }
    Ok((val, err))
}

fn apply_rule<const N: usize, E>(
    f: &mut impl FnMut(f64) -> Result<[f64; N], E>,
    a: f64,
    b: f64,
    rule: PanelRule,
) -> Result<([f64; N], [f64; N]), E> {
    match rule {
        PanelRule::Gk15 => gauss_kronrod(f, a, b, &rules::GK15_X, &rules::GK15_WK, &rules::GK15_WG),
        PanelRule::Gk21 => gauss_kronrod(f, a, b, &rules::GK21_X, &rules::GK21_WK, &rules::GK21_WG),
        PanelRule::Cc33 => clenshaw_curtis(f, a, b),
    }
}

/// Globally adaptive integration of a vector-valued integrand over a partition.
///
/// The interval with the largest scaled error is bisected until every component
/// meets max(abs_tol, rel_tol·|value|), or no interval can be split further.
/// The final sum runs left to right, so results do not depend on the refinement
/// history. Errors raised by `f` are returned as is.
pub fn integrate_partitioned<const N: usize, E>(
    f: impl FnMut(f64) -> Result<[f64; N], E>,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<Result<[Estimate; N], QuadError>, E> {
    if let Err(e) = cfg.validate() {
        return Ok(Err(e));
    }
    if points.len() < 2 {
        return Ok(Err(QuadError::Interval(f64::NAN, f64::NAN)));
    }
    for w in points.windows(2) {
        if !(w[0] <= w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Ok(Err(QuadError::Interval(w[0], w[1])));
        }
    }
    let (est, _) = adapt(f, points, cfg)?;
    for e in &est {
        if !e.value.is_finite() {
            return Ok(Err(QuadError::NonFinite(f64::NAN)));
        }
    }
    for e in &est {
        if e.err > cfg.abs_tol.max(cfg.rel_tol * e.value.abs()) {
            return Ok(Err(QuadError::ToleranceNotReached(*e)));
        }
    }
    Ok(Ok(est))
}

/// The refinement loop behind [`integrate_partitioned`]; returns the estimates
/// whether or not the tolerance was met, with a convergence flag. `points`
/// must be a valid partition.
pub(crate) fn adapt<const N: usize, E>(
    mut f: impl FnMut(f64) -> Result<[f64; N], E>,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<([Estimate; N], bool), E> {
    let mut heap: BinaryHeap<Piece<N>> = BinaryHeap::new();
    let mut done: Vec<Piece<N>> = Vec::new();
    let mut seq = 0u64;
    let mut total = [0.0; N];
    let mut total_err = [0.0; N];
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (val, err) = apply_rule(&mut f, w[0], w[1], cfg.panel_rule)?;
        for i in 0..N {
            total[i] += val[i];
            total_err[i] += err[i];
        }
        heap.push(Piece { a: w[0], b: w[1], depth: 0, val, err, key: 0.0, seq });
        seq += 1;
    }
    let tol = |t: &[f64; N]| -> [f64; N] {
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = cfg.abs_tol.max(cfg.rel_tol * t[i].abs());
        }
        out
    };
    // keys need the totals, so re-key once they are known
    let scale = tol(&total);
    let mut items: Vec<Piece<N>> = heap.into_vec();
    for p in items.iter_mut() {
        p.key = (0..N).map(|i| p.err[i] / scale[i]).fold(0.0, f64::max);
    }
    heap = items.into();
    loop {
        let t = tol(&total);
        if (0..N).all(|i| total_err[i] <= t[i]) {
            break;
        }
        let Some(p) = heap.pop() else { break };
        if p.depth >= cfg.max_depth || heap.len() + done.len() >= MAX_INTERVALS {
            done.push(p);
            continue;
        }
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            done.push(p);
            continue;
        }
        let (v1, e1) = apply_rule(&mut f, p.a, m, cfg.panel_rule)?;
        let (v2, e2) = apply_rule(&mut f, m, p.b, cfg.panel_rule)?;
        for i in 0..N {
            total[i] += v1[i] + v2[i] - p.val[i];
            total_err[i] += e1[i] + e2[i] - p.err[i];
        }
        for (a, b, val, err) in [(p.a, m, v1, e1), (m, p.b, v2, e2)] {
            let key = (0..N).map(|i| err[i] / t[i]).fold(0.0, f64::max);
            heap.push(Piece { a, b, depth: p.depth + 1, val, err, key, seq });
            seq += 1;
        }
    }
    let mut all: Vec<Piece<N>> = heap.into_vec();
    all.extend(done);
    all.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut est = [Estimate { value: 0.0, err: 0.0 }; N];
    for p in &all {
        for i in 0..N {
            est[i].value += p.val[i];
            est[i].err += p.err[i];
        }
    }
    let t = tol(&est.map(|e| e.value));
    let converged = (0..N).all(|i| est[i].err <= t[i]);
    Ok((est, converged))
}

/// ∫_a^b f with the configured rule; the spec-level entry point.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> Result<Estimate, QuadError> {
    integrate_with_breaks(f, a, b, &[], cfg)
}

/// ∫_a^b f with extra breakpoints (ignored when outside (a, b)).
pub fn integrate_with_breaks(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<Estimate, QuadError> {
    if !(a <= b) {
        return Err(QuadError::Interval(a, b));
    }
    let pts = partition(a, b, breaks);
    let r = integrate_partitioned::<1, std::convert::Infallible>(|t| Ok([f(t)]), &pts, cfg);
    match r {
        Ok(v) => v.map(|e| e[0]),
        Err(never) => match never {},
    }
}

/// Sorted partition of [a, b] including the interior breakpoints.
pub fn partition(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(b);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_and_polynomials() {
        let cfg = QuadConfig::default();
        for rule in [PanelRule::Gk15, PanelRule::Gk21, PanelRule::Cc33] {
            let cfg = QuadConfig { panel_rule: rule, ..cfg };
            let e = integrate(|_| 1.0, 0.0, 7.0, &cfg).unwrap();
            assert!((e.value - 7.0).abs() < 1e-12);
            let e = integrate(|t| t * t, 0.0, 1.0, &cfg).unwrap();
            assert!((e.value - 1.0 / 3.0).abs() < 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn oscillatory_and_singular() {
        let cfg = QuadConfig::default();
        let e = integrate(|t| (50.0 * t).sin().powi(2), 0.0, 3.0, &cfg).unwrap();
        let exact = 1.5 - (300.0f64).sin() / 200.0;
        assert!((e.value - exact).abs() < 1e-9);
        let e = integrate(|t| t.sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((e.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn reports_failure_with_estimate() {
        let cfg = QuadConfig { max_depth: 10, rel_tol: 1e-14, abs_tol: 1e-300, ..Default::default() };
        match integrate(|t| 1.0 / t.sqrt(), 0.0, 1.0, &cfg) {
            Err(QuadError::ToleranceNotReached(e)) => assert!(e.value > 1.9 && e.err > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let cfg = QuadConfig::default();
        let f = |t: f64| if t < 0.3 { 1.0 } else { 2.0 };
        let e = integrate_with_breaks(f, 0.0, 1.0, &[0.3], &cfg).unwrap();
        assert!((e.value - 1.7).abs() < 1e-14);
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(matches!(
            integrate(|t| t, 2.0, 1.0, &QuadConfig::default()),
            Err(QuadError::Interval(..))
        ));
    }
}
