use super::cache::{panel_gl, subpanel_layout, CumulativeCache, PanelSamples, CHECKPOINT_SPACING};
use super::cheb;
use super::rules::{cc_rule, gl_rule};
use super::{z2_cumulative, QuadConfig, QuadError};
use crate::zeta::z_unchecked;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// ln(10¹²)/2: past t = TRUNC·x the weight e^{−2t/x} is below 10⁻¹².
const TRUNC: f64 = 13.815_510_557_964_274;
/// erfc(ZCUT)/2 < 1e-18, so the taper is exactly 0 or 1 beyond ±ZCUT widths.
const ZCUT: f64 = 6.2;

/// Which weight multiplies Z² inside the kernel integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelForm {
    /// K(x) = ∫₀^{μ(x)} Z²(t) e^{−2t/x} dt
    Scaled,
    /// K(x) = ∫₀^{μ(x)} Z²(t) e^{−2/x} dt = e^{−2/x} I(μ(x))
    Literal,
}

/// How far the scaled kernel reads actual Z² data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelHorizon {
    /// Z² up to min(μ(x), TRUNC·x), hard cut.
    Exact,
    /// Z² weighted by χ(t) = ½ erfc((t − c)/s) with c = center·x + 6·min_width and
    /// s = width·x + min_width; beyond the taper Z² is replaced by its mean
    /// density ln(t/2π) + 2γ, whose weighted integral is done in closed form
    /// up to a smooth remainder.
    Tapered { center: f64, width: f64, min_width: f64 },
}

impl Default for KernelHorizon {
    fn default() -> Self {
        KernelHorizon::Tapered { center: 0.3, width: 0.03, min_width: 300.0 }
    }
}

/// The kernel K(x) of the ladder equation K(φ(T)) = I(T), with K′(x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub mu_multiplier: f64,
    pub form: KernelForm,
    pub horizon: KernelHorizon,
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel { mu_multiplier: 7.0, form: KernelForm::Scaled, horizon: KernelHorizon::default() }
    }
}

fn mean_density(t: f64) -> f64 {
    (t / (2.0 * PI)).ln() + 2.0 * EULER_GAMMA
}

impl Kernel {
    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.mu_multiplier > 0.0) {
            return Err(QuadError::Config("mu_multiplier must be positive".into()));
        }
        if let KernelHorizon::Tapered { center, width, min_width } = self.horizon {
            if !(width > 0.0 && min_width > 0.0 && center >= ZCUT * width) {
                return Err(QuadError::Config(format!(
                    "taper needs width, min_width > 0 and center >= {ZCUT}·width"
                )));
            }
        }
        Ok(())
    }

    pub fn mu(&self, x: f64) -> f64 {
        self.mu_multiplier * x * x.ln()
    }

    pub fn mu_prime(&self, x: f64) -> f64 {
        self.mu_multiplier * (x.ln() + 1.0)
    }

    /// Upper limit of the exact kernel and its x-derivative.
    fn upper(&self, x: f64) -> (f64, f64) {
        let mu = self.mu(x);
        if mu < TRUNC * x {
            (mu, self.mu_prime(x))
        } else {
            (TRUNC * x, TRUNC)
        }
    }

    /// Largest ordinate whose Z² enters K(x).
    pub fn reach(&self, x: f64) -> f64 {
        match (self.form, self.horizon) {
            (KernelForm::Literal, _) => self.mu(x),
            (KernelForm::Scaled, KernelHorizon::Exact) => self.upper(x).0,
            (KernelForm::Scaled, KernelHorizon::Tapered { center, width, min_width }) => {
                let c = center * x + 6.0 * min_width;
                let s = width * x + min_width;
                c + ZCUT * s
            }
        }
    }

    pub fn value(&self, x: f64, cache: &CumulativeCache) -> Result<f64, QuadError> {
        Ok(self.value_and_derivative(x, cache)?.0)
    }

    /// (K(x), K′(x)).
    pub fn value_and_derivative(&self, x: f64, cache: &CumulativeCache) -> Result<(f64, f64), QuadError> {
        if !(x > std::f64::consts::E) || !x.is_finite() {
            return Err(QuadError::Domain(format!("kernel needs x > e, got {x}")));
        }
        match (self.form, self.horizon) {
            (KernelForm::Literal, _) => self.literal(x, cache),
            (KernelForm::Scaled, KernelHorizon::Exact) => self.exact(x, cache),
            (KernelForm::Scaled, KernelHorizon::Tapered { center, width, min_width }) => {
                self.tapered(x, cache, center, width, min_width)
            }
        }
    }

    fn literal(&self, x: f64, cache: &CumulativeCache) -> Result<(f64, f64), QuadError> {
        let mu = self.mu(x);
        let i = z2_cumulative(mu, cache, &QuadConfig::default())?;
        let e = (-2.0 / x).exp();
        let z = z_unchecked(mu, cache.eval());
        Ok((e * i, e * (2.0 / (x * x)) * i + e * z * z * self.mu_prime(x)))
    }

    fn exact(&self, x: f64, cache: &CumulativeCache) -> Result<(f64, f64), QuadError> {
        let (b, db) = self.upper(x);
        cache.ensure(b)?;
        let full = (b / CHECKPOINT_SPACING).floor() as usize;
        let (mut val, mut der) = panel_sum(cache, x, full, |_| (1.0, 0.0));
        let start = full as f64 * CHECKPOINT_SPACING;
        if b > start {
            // partial panel: fresh samples, the last sub-panel through the antiderivative
            let (n_sub, width) = subpanel_layout(start);
            let m = (((b - start) / width).floor() as usize).min(n_sub - 1);
            let s = PanelSamples::compute(start, m + 1, cache.eval());
            let r = cc_rule();
            let two_over_x2 = 2.0 / (x * x);
            for k in 0..m {
                for (j, (&xj, &wj)) in r.x.iter().zip(&r.w).enumerate() {
                    let t = s.sub_start(k) + 0.5 * (1.0 + xj) * width;
                    let g = 0.5 * width * wj * s.z[k][j].powi(2) * (-2.0 * t / x).exp();
                    val += g;
                    der += g * t * two_over_x2;
                }
            }
            let mut gv = [0.0; cheb::NCOEF];
            let mut gd = [0.0; cheb::NCOEF];
            for (j, &xj) in r.x.iter().enumerate() {
                let t = s.sub_start(m) + 0.5 * (1.0 + xj) * width;
                gv[j] = s.z[m][j].powi(2) * (-2.0 * t / x).exp();
                gd[j] = gv[j] * t * two_over_x2;
            }
            let xb = (2.0 * (b - s.sub_start(m)) / width - 1.0).clamp(-1.0, 1.0);
            let cv = cheb::coefficients(&gv);
            val += 0.5 * width * cheb::eval(&cheb::antiderivative(&cv), xb);
            der += 0.5 * width * cheb::eval(&cheb::antiderivative(&cheb::coefficients(&gd)), xb);
            // moving upper limit
            der += cheb::eval(&cv, xb) * db;
        }
        Ok((val, der))
    }

    fn tapered(
        &self,
        x: f64,
        cache: &CumulativeCache,
        center: f64,
        width: f64,
        min_width: f64,
    ) -> Result<(f64, f64), QuadError> {
        let c = center * x + 6.0 * min_width;
        let s = width * x + min_width;
        let end = c + ZCUT * s;
        let flat = c - ZCUT * s;
        cache.ensure(end)?;
        let panels = (end / CHECKPOINT_SPACING).ceil() as usize;
        // χ and ∂χ/∂x
        let chi = |t: f64| -> (f64, f64) {
            if t <= flat {
                return (1.0, 0.0);
            }
            let z = (t - c) / s;
            let v = 0.5 * libm::erfc(z);
            let d = (-z * z).exp() / PI.sqrt() * (center + z * width) / s;
            (v, d)
        };
        let (val, der) = panel_sum(cache, x, panels, chi);

        // ∫ m (1 − χ) e^{−2t/x} dt over the part where χ < 1, on fixed panels:
        // taper-width pieces across the transition, then x/4 pieces for the decay
        let lo = flat.max(1.0);
        let mut edges = Vec::new();
        let pieces = ((end - lo) / s).ceil().max(1.0) as usize;
        for i in 0..=pieces {
            edges.push(lo + (end - lo) * i as f64 / pieces as f64);
        }
        for i in 1..=80 {
            edges.push(end + 0.25 * x * i as f64);
        }
        let (gx, gw) = gl_rule(20);
        let two_over_x2 = 2.0 / (x * x);
        let (mut sv, mut sd) = (0.0, 0.0);
        for e in edges.windows(2) {
            let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            for (&u, &w) in gx.iter().zip(gw.iter()) {
                let t = mid + half * u;
                let (ch, dch) = chi(t);
                let mw = half * w * mean_density(t) * (-2.0 * t / x).exp();
                sv += mw * (1.0 - ch);
                sd += mw * ((1.0 - ch) * t * two_over_x2 - dch);
            }
        }
        Ok((val + sv, der + sd))
    }
}

/// Σ over the first `panels` checkpoint panels of ∫ Z² χ e^{−2t/x}, with the
/// x-derivative; `chi(t)` returns (χ, ∂χ/∂x).
fn panel_sum(
    cache: &CumulativeCache,
    x: f64,
    panels: usize,
    chi: impl Fn(f64) -> (f64, f64),
) -> (f64, f64) {
    let (xi, _) = panel_gl();
    let half = 0.5 * CHECKPOINT_SPACING;
    let offs: Vec<f64> = xi.iter().map(|v| half * (1.0 + v)).collect();
    let decay: Vec<f64> = offs.iter().map(|o| (-2.0 * o / x).exp()).collect();
    let two_over_x2 = 2.0 / (x * x);
    let view = cache.view();
    let nodal = view.nodal();
    let mut val = 0.0;
    let mut der = 0.0;
    for (i, nu) in nodal.iter().enumerate().take(panels) {
        let start = i as f64 * CHECKPOINT_SPACING;
        let e0 = (-2.0 * start / x).exp();
        let (mut pv, mut pd) = (0.0, 0.0);
        for q in 0..nu.len() {
            let t = start + offs[q];
            let w = e0 * decay[q];
            let (ch, dch) = chi(t);
            pv += nu[q] * ch * w;
            pd += nu[q] * w * (dch + ch * t * two_over_x2);
        }
        val += pv;
        der += pd;
    }
    (val, der)
}

/// K(x) with the default kernel (scaled weight, tapered horizon, μ = 7x ln x).
pub fn kernel_weighted_z2(x: f64, cache: &CumulativeCache, _cfg: &QuadConfig) -> Result<f64, QuadError> {
    Kernel::default().value(x, cache)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::EvalConfig;

    #[test]
    fn derivative_matches_difference_quotient() {
        let cache = CumulativeCache::new(EvalConfig::default(), "test");
        for k in [
            Kernel::default(),
            Kernel { horizon: KernelHorizon::Exact, ..Kernel::default() },
        ] {
            let x = 1500.0;
            let h = 1e-2;
            let (_, d) = k.value_and_derivative(x, &cache).unwrap();
            let fd = (k.value(x + h, &cache).unwrap() - k.value(x - h, &cache).unwrap()) / (2.0 * h);
            assert!((d - fd).abs() < 1e-7 * d.abs(), "{:?}: {d} vs {fd}", k.horizon);
        }
    }

    #[test]
    fn literal_form() {
        let cache = CumulativeCache::new(EvalConfig::default(), "test");
        let k = Kernel { form: KernelForm::Literal, ..Kernel::default() };
        let x = 40.0;
        let i = z2_cumulative(k.mu(x), &cache, &QuadConfig::default()).unwrap();
        assert!((k.value(x, &cache).unwrap() - (-2.0 / x).exp() * i).abs() < 1e-12 * i);
    }

    #[test]
    fn domain() {
        let cache = CumulativeCache::new(EvalConfig::default(), "test");
        assert!(Kernel::default().value(2.0, &cache).is_err());
    }
}
