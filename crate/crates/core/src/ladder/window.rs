use super::{Ladder, LadderConfig, LadderError, VALIDITY_FLOOR};
use crate::quad::cheb::{self, ChebFit, NCOEF};
use crate::quad::{gauss_legendre, subpanel_layout, CumulativeCache, PanelSamples, QuadError, CHECKPOINT_SPACING};
use crate::roots::brent;
use crate::zeta::{s1_littlewood, s_of_t, theta, EvalConfig, ZetaError};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

const MAX_FIT_DEGREE: usize = 512;
const FIT_TAIL: f64 = 5e-15;

struct Sub {
    /// Chebyshev coefficients of Z² on the sub-panel
    coef: [f64; NCOEF],
    /// I at the sub-panel start
    base: f64,
}

struct Zeros {
    /// zero ordinates minus the window start, increasing
    offsets: Vec<f64>,
    /// S₁ at the window start, then at each zero
    s1_at: Vec<f64>,
    n_lo: u64,
    grid_factor: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowStats {
    pub lo: f64,
    pub hi: f64,
    pub sub_panels: usize,
    pub fit_degree: usize,
    pub fit_tail: f64,
}

/// The ladder and the signal on a bounded window [lo, hi], tabulated once.
///
/// Z² is held as its Chebyshev interpolant on the cache's sub-panels, so I(t)
/// here is exactly the cache's I(t). G(y) = K(2y) is a Chebyshev fit, and
/// φ₁(t) solves G(φ₁) = I(t) by Newton; Z̃² = (Z²)/G′(φ₁) is then the exact
/// derivative of the φ₁ this window returns.
pub struct LadderWindow {
    cfg: LadderConfig,
    eval: EvalConfig,
    lo: f64,
    hi: f64,
    first_panel: usize,
    /// per checkpoint panel: (index of the first sub-panel, sub-panel width, count)
    panels: Vec<(usize, f64, usize)>,
    subs: Vec<Sub>,
    g: ChebFit,
    dg: ChebFit,
    i_lo: f64,
    i_hi: f64,
    zeros: OnceLock<Result<Zeros, String>>,
}

impl LadderWindow {
    /// Window covering [lo, hi], widened outward to checkpoint boundaries.
    pub fn build(lo: f64, hi: f64, cfg: &LadderConfig, cache: &CumulativeCache) -> Result<Self, LadderError> {
        cfg.validate()?;
        if !(lo >= VALIDITY_FLOOR) {
            return Err(LadderError::BelowFloor(lo));
        }
        if !(hi > lo) || !hi.is_finite() {
            return Err(LadderError::Config(format!("bad window [{lo}, {hi}]")));
        }
        let first_panel = (lo / CHECKPOINT_SPACING).floor() as usize;
        let last_panel = (hi / CHECKPOINT_SPACING).ceil() as usize;
        let lo = first_panel as f64 * CHECKPOINT_SPACING;
        let hi = last_panel as f64 * CHECKPOINT_SPACING;
        cache.ensure(hi)?;
        let eval = *cache.eval();
        let bases: Vec<f64> = {
            let v = cache.view();
            v.checkpoints()[first_panel..last_panel].iter().map(|c| c.integral).collect()
        };
        let per_panel: Vec<Vec<Sub>> = (first_panel..last_panel)
            .into_par_iter()
            .zip(bases.par_iter())
            .map(|(p, &base)| {
                let start = p as f64 * CHECKPOINT_SPACING;
                let (n_sub, _) = subpanel_layout(start);
                let s = PanelSamples::compute(start, n_sub, &eval);
                let mut acc = base;
                let mut out = Vec::with_capacity(n_sub);
                for k in 0..n_sub {
                    out.push(Sub { coef: cheb::coefficients(&s.z2(k)), base: acc });
                    acc += s.sub_integral(k);
                }
                out
            })
            .collect();
        let mut panels = Vec::with_capacity(per_panel.len());
        let mut subs = Vec::new();
        for (i, mut v) in per_panel.into_iter().enumerate() {
            let start = (first_panel + i) as f64 * CHECKPOINT_SPACING;
            let (n_sub, width) = subpanel_layout(start);
            panels.push((subs.len(), width, n_sub));
            subs.append(&mut v);
        }

        let i_lo = bases[0];
        let i_hi = cache.view().checkpoints()[last_panel].integral;
        // φ₁(t) ∈ (t(1 − 1/ln t), t) on the window; the fit range is checked below
        let kernel = cfg.kernel();
        if cfg.solution_variable != super::SolutionVariable::X {
            return Err(LadderError::Config("windows support the x solution variable only".into()));
        }
        let mut y_lo = lo * (1.0 - 1.0 / lo.ln());
        let mut y_hi = hi;
        let g_at = |y: f64| -> Result<f64, QuadError> { kernel.value(2.0 * y, cache) };
        for _ in 0..8 {
            if g_at(y_lo)? <= i_lo {
                break;
            }
            y_lo = 0.5 * (y_lo + VALIDITY_FLOOR.max(0.5 * y_lo));
        }
        for _ in 0..8 {
            if g_at(y_hi)? >= i_hi {
                break;
            }
            y_hi *= 1.05;
        }
        if g_at(y_lo)? > i_lo || g_at(y_hi)? < i_hi {
            return Err(LadderError::BracketExhausted {
                t: lo,
                lo: y_lo,
                hi: y_hi,
                f_lo: g_at(y_lo)? - i_lo,
                f_hi: g_at(y_hi)? - i_hi,
            });
        }
        let mut deg = 32;
        let g = loop {
            let samples: Vec<f64> = {
                let (c, h) = (0.5 * (y_lo + y_hi), 0.5 * (y_hi - y_lo));
                let ys: Vec<f64> = (0..=deg).map(|j| c + h * (PI * j as f64 / deg as f64).cos()).collect();
                let vals: Result<Vec<f64>, QuadError> = ys.par_iter().map(|&y| g_at(y)).collect();
                vals?
            };
            let mut it = samples.into_iter();
            let fit = ChebFit::fit::<()>(|_| Ok(it.next().unwrap()), y_lo, y_hi, deg).unwrap();
            if fit.tail_ratio() < FIT_TAIL || deg >= MAX_FIT_DEGREE {
                break fit;
            }
            deg *= 2;
        };
        let dg = g.derivative();
        Ok(LadderWindow {
            cfg: *cfg,
            eval,
            lo,
            hi,
            first_panel,
            panels,
            subs,
            g,
            dg,
            i_lo,
            i_hi,
            zeros: OnceLock::new(),
        })
    }

    /// Window for the iterates φ₁ᵏ(t), k ≤ depth, t ∈ [t_lo, t_hi]. The lower end
    /// is estimated from φ₁(t) > t(1 − a/ln t) and widened if the chain leaves it.
    pub fn for_iterates(
        t_lo: f64,
        t_hi: f64,
        depth: u32,
        cfg: &LadderConfig,
        cache: &CumulativeCache,
    ) -> Result<Self, LadderError> {
        let mut a = 0.75;
        loop {
            let mut lo = t_lo;
            for k in 1..=depth {
                lo *= 1.0 - a / lo.ln();
                if lo < VALIDITY_FLOOR {
                    return Err(LadderError::IterateUnderflow { t: t_lo, k, value: lo });
                }
            }
            let w = Self::build((lo - 1.0).max(VALIDITY_FLOOR), t_hi, cfg, cache)?;
            match super::phi1_iter(t_lo, depth, &w) {
                Ok(y) if y >= w.lo => return Ok(w),
                Ok(_) | Err(LadderError::OutOfRange { .. }) if a < 2.0 => a *= 2.0,
                Ok(y) => return Err(LadderError::OutOfRange { t: y, lo: w.lo, hi: w.hi }),
                Err(e) => return Err(e),
            }
        }
    }

    pub fn stats(&self) -> WindowStats {
        WindowStats {
            lo: self.lo,
            hi: self.hi,
            sub_panels: self.subs.len(),
            fit_degree: self.g.coef.len() - 1,
            fit_tail: self.g.tail_ratio(),
        }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn config(&self) -> &LadderConfig {
        &self.cfg
    }

    fn check(&self, t: f64) -> Result<(), LadderError> {
        if t >= self.lo && t <= self.hi {
            Ok(())
        } else {
            Err(LadderError::OutOfRange { t, lo: self.lo, hi: self.hi })
        }
    }

    /// (sub-panel index, its start, width)
    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let p = ((t / CHECKPOINT_SPACING).floor() as usize)
            .saturating_sub(self.first_panel)
            .min(self.panels.len() - 1);
        let (first, width, n) = self.panels[p];
        let start = (self.first_panel + p) as f64 * CHECKPOINT_SPACING;
        let k = (((t - start) / width).floor().max(0.0) as usize).min(n - 1);
        (first + k, start + k as f64 * width, width)
    }

    /// |ζ(½+it)|² as the cache's interpolant of Z².
    pub fn z2(&self, t: f64) -> Result<f64, LadderError> {
        self.check(t)?;
        let (i, a, w) = self.locate(t);
        let x = (2.0 * (t - a) / w - 1.0).clamp(-1.0, 1.0);
        Ok(cheb::eval(&self.subs[i].coef, x))
    }

    /// I(t) = ∫₀ᵗ Z², identical to the cache's value.
    pub fn cumulative(&self, t: f64) -> Result<f64, LadderError> {
        self.check(t)?;
        Ok(self.cumulative_unchecked(t))
    }

    fn cumulative_unchecked(&self, t: f64) -> f64 {
        let (i, a, w) = self.locate(t);
        let sub = &self.subs[i];
        if t <= a {
            return sub.base;
        }
        let x = (2.0 * (t - a) / w - 1.0).clamp(-1.0, 1.0);
        let c = cheb::antiderivative(&sub.coef);
        sub.base + 0.5 * w * cheb::eval(&c, x)
    }

    /// G(y) = K(2y) and G′(y) from the fit.
    pub fn g(&self, y: f64) -> (f64, f64) {
        (self.g.eval(y), self.dg.eval(y))
    }

    fn solve_g(&self, target: f64) -> Result<f64, LadderError> {
        let (a, b) = (self.g.a, self.g.b);
        let frac = ((target - self.i_lo) / (self.i_hi - self.i_lo)).clamp(0.0, 1.0);
        let mut y = a + (b - a) * frac;
        for _ in 0..60 {
            let step = (self.g.eval(y) - target) / self.dg.eval(y);
            y -= step;
            if step.abs() <= 4.0 * f64::EPSILON * y.abs() {
                break;
            }
        }
        if !(y >= a && y <= b) {
            return Err(LadderError::OutOfRange { t: y, lo: a, hi: b });
        }
        Ok(y)
    }

    fn zeros(&self) -> Result<&Zeros, LadderError> {
        self.zeros
            .get_or_init(|| self.find_zeros().map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| LadderError::Table(format!("zero count on the window: {e}")))
    }

    fn find_zeros(&self) -> Result<Zeros, LadderError> {
        let n_of = |t: f64| -> Result<u64, ZetaError> {
            Ok((theta(t) / PI + 1.0 + s_of_t(t, &self.eval)?).round() as u64)
        };
        let n_lo = n_of(self.lo)?;
        let n_hi = n_of(self.hi)?;
        let expected = (n_hi - n_lo) as usize;
        for grid_factor in [4usize, 16, 64] {
            let found: Vec<Vec<f64>> = (0..self.panels.len())
                .into_par_iter()
                .map(|p| {
                    let start = (self.first_panel + p) as f64 * CHECKPOINT_SPACING;
                    let (n_sub, width) = subpanel_layout(start);
                    let s = PanelSamples::compute(start, n_sub, &self.eval);
                    let mut out = Vec::new();
                    for k in 0..n_sub {
                        let c = cheb::coefficients(&s.z[k]);
                        let m = grid_factor * NCOEF;
                        let f = |x: f64| cheb::eval(&c, x);
                        // sample the interpolant on a uniform grid; the nodes at ±1 are exact
                        let mut x0 = -1.0;
                        let mut f0 = s.z[k][NCOEF - 1];
                        for j in 1..=m {
                            let x1 = if j == m { 1.0 } else { -1.0 + 2.0 * j as f64 / m as f64 };
                            let f1 = if j == m { s.z[k][0] } else { f(x1) };
                            if (f0 < 0.0) != (f1 < 0.0) {
                                let root = brent::<()>(|x| Ok(f(x)), x0, x1, f0, f1, 1e-15, 100).unwrap();
                                out.push(s.sub_start(k) + 0.5 * (1.0 + root.x) * width);
                            }
                            x0 = x1;
                            f0 = f1;
                        }
                    }
                    out
                })
                .collect();
            let zeros: Vec<f64> = found.into_iter().flatten().collect();
            if zeros.len() == expected {
                let offsets: Vec<f64> = zeros.iter().map(|z| z - self.lo).collect();
                // S is O(1) between zeros, so summing its integrals keeps S₁ accurate
                let mut s1_at = Vec::with_capacity(zeros.len() + 1);
                let mut acc = s1_littlewood(self.lo);
                s1_at.push(acc);
                let mut a = self.lo;
                for (j, &z) in zeros.iter().enumerate() {
                    acc += s_integral(n_lo + j as u64, a, z);
                    s1_at.push(acc);
                    a = z;
                }
                return Ok(Zeros { offsets, s1_at, n_lo, grid_factor });
            }
        }
        Err(LadderError::Table(format!(
            "sign changes never matched the {expected} zeros counted by the argument on [{}, {}]",
            self.lo, self.hi
        )))
    }

    /// Number of zeros of Z in (lo, t].
    fn zeros_up_to(z: &Zeros, t: f64, lo: f64) -> usize {
        z.offsets.partition_point(|d| lo + d <= t)
    }

    /// S(t) from zero counting: N(t) − θ(t)/π − 1.
    pub fn s(&self, t: f64) -> Result<f64, LadderError> {
        self.check(t)?;
        let z = self.zeros()?;
        let n = z.n_lo + Self::zeros_up_to(z, t, self.lo) as u64;
        Ok(n as f64 - theta(t) / PI - 1.0)
    }

    /// S₁(t) = S₁(lo) + ∫_lo^t S, with S₁(lo) from Littlewood's formula.
    pub fn s1(&self, t: f64) -> Result<f64, LadderError> {
        self.check(t)?;
        let z = self.zeros()?;
        let cnt = Self::zeros_up_to(z, t, self.lo);
        let a = if cnt == 0 { self.lo } else { self.lo + z.offsets[cnt - 1] };
        Ok(z.s1_at[cnt] + s_integral(z.n_lo + cnt as u64, a, t))
    }

    /// Zeros of Z in (a, b].
    pub fn zeros_in(&self, a: f64, b: f64) -> Result<Vec<f64>, LadderError> {
        let z = self.zeros()?;
        let i = Self::zeros_up_to(z, a, self.lo);
        let j = Self::zeros_up_to(z, b, self.lo);
        Ok(z.offsets[i..j.max(i)].iter().map(|d| self.lo + d).collect())
    }

    /// Sub-panel edges strictly inside (a, b); Z² is one polynomial between them.
    pub fn sub_panel_edges(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if !(b > a) {
            return out;
        }
        let (_, mut x, w) = self.locate(a.max(self.lo));
        let mut width = w;
        loop {
            let (_, s, w) = self.locate(x + 1.25 * width);
            if s <= x {
                break;
            }
            x = s;
            width = w;
            if x >= b {
                break;
            }
            if x > a {
                out.push(x);
            }
        }
        out
    }

    /// Zero count on the window and the sampling factor that found them all.
    pub fn zero_summary(&self) -> Result<(usize, usize), LadderError> {
        let z = self.zeros()?;
        Ok((z.offsets.len(), z.grid_factor))
    }
}

/// ∫_a^b S where N ≡ count on (a, b).
fn s_integral(count: u64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let c = count as f64 - 1.0;
    gauss_legendre(|u| c - theta(u) / PI, a, b)
}

impl Ladder for LadderWindow {
    fn phi1(&self, t: f64) -> Result<f64, LadderError> {
        self.check(t)?;
        self.solve_g(self.cumulative_unchecked(t))
    }

    fn tilde_z2(&self, t: f64) -> Result<f64, LadderError> {
        let y = self.phi1(t)?;
        Ok(self.z2(t)? / self.dg.eval(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{z2_cumulative, QuadConfig};
    use crate::ladder::solve_phi;
    use crate::zeta::{s1_of_t, S1Store};

    #[test]
    fn agrees_with_direct_solves() {
        let cache = CumulativeCache::new(EvalConfig::default(), "test");
        let cfg = LadderConfig::default();
        let w = LadderWindow::build(2000.0, 2600.0, &cfg, &cache).unwrap();
        for &t in &[2000.0, 2123.4, 2599.9] {
            assert_eq!(w.cumulative(t).unwrap(), z2_cumulative(t, &cache, &QuadConfig::default()).unwrap());
            let p = solve_phi(t, &cfg, &cache).unwrap();
            assert!((w.phi1(t).unwrap() - p.phi1).abs() < 1e-11 * p.phi1, "{t}");
            assert!((w.tilde_z2(t).unwrap() - p.dphi1).abs() < 1e-9 * p.dphi1.max(1e-3), "{t}");
        }
    }

    #[test]
    fn signal_by_zero_counting() {
        let eval = EvalConfig::default();
        let cache = CumulativeCache::new(eval, "test");
        let w = LadderWindow::build(1000.0, 1300.0, &LadderConfig::default(), &cache).unwrap();
        let store = S1Store::new(eval);
        for &t in &[1000.5, 1111.1, 1234.5, 1299.0] {
            assert!((w.s(t).unwrap() - s_of_t(t, &eval).unwrap()).abs() < 1e-9, "{t}");
            assert!((w.s1(t).unwrap() - s1_of_t(t, &store, &eval).unwrap()).abs() < 1e-7, "{t}");
        }
    }
}
