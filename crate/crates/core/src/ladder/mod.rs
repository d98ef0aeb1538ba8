//! The ladder φ(T): the solution x of K(x) = I(T), its half φ₁ = φ/2, the
//! iterates φ₁ᵏ and the derivative φ₁′ (written Z̃²).

mod table;
mod window;

pub use table::{build_table, HermiteRule, LadderTable, TableLadder, TABLE_FORMAT_VERSION};
pub use window::{LadderWindow, WindowStats};

use crate::quad::{z2_cumulative, CumulativeCache, Kernel, KernelForm, KernelHorizon, QuadConfig, QuadError};
use crate::roots::brent;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Below this the construction is dominated by transients and refused.
pub const VALIDITY_FLOOR: f64 = 100.0;
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

const BRACKET_RETRIES: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LadderError {
    #[error("T = {0} is below the validity floor {VALIDITY_FLOOR}")]
    BelowFloor(f64),
    #[error("bracket exhausted at T = {t}: K − I keeps one sign on [{lo}, {hi}] (K(lo) − I = {f_lo:e}, K(hi) − I = {f_hi:e})")]
    BracketExhausted { t: f64, lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("T = {t} is outside the table range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("iterate {k} of T = {t} fell to {value}, below the validity floor")]
    IterateUnderflow { t: f64, k: u32, value: f64 },
    #[error("invalid ladder config: {0}")]
    Config(String),
    #[error("table: {0}")]
    Table(String),
    #[error("table build failed at {} point(s), first at T = {}: {}", .0.len(), .0[0].0, .0[0].1)]
    Build(Vec<(f64, String)>),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Zeta(#[from] crate::zeta::ZetaError),
}

/// Whether the root of the defining equation is φ itself or μ(φ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionVariable {
    /// φ(T) = x(T)
    X,
    /// φ(T) = μ(x(T))
    MuOfX,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    /// μ(y) = mu_multiplier · y ln y
    pub mu_multiplier: f64,
    /// the constant c of the gap law (1 − c) T / ln T
    pub euler_c: f64,
    /// bound on |K(φ) − I(T)| / I(T), times 10; the solve itself runs to rounding
    pub root_tol: f64,
    pub bracket_lo_factor: f64,
    pub bracket_hi_factor: f64,
    pub kernel_form: KernelForm,
    pub horizon: KernelHorizon,
    pub solution_variable: SolutionVariable,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            mu_multiplier: 7.0,
            euler_c: EULER_MASCHERONI,
            root_tol: 1e-10,
            bracket_lo_factor: 1.0,
            bracket_hi_factor: 3.0,
            kernel_form: KernelForm::Scaled,
            horizon: KernelHorizon::default(),
            solution_variable: SolutionVariable::X,
        }
    }
}

impl LadderConfig {
    pub fn validate(&self) -> Result<(), LadderError> {
        let bad = |m: String| Err(LadderError::Config(m));
        if !(self.mu_multiplier >= 7.0) || !self.mu_multiplier.is_finite() {
            return bad(format!("mu_multiplier must be >= 7, got {}", self.mu_multiplier));
        }
        if !(self.euler_c > 0.0 && self.euler_c < 0.58) {
            return bad(format!("euler_c must be in (0, 0.58), got {}", self.euler_c));
        }
        if !(self.root_tol > 0.0 && self.root_tol <= 1e-6) {
            return bad(format!("root_tol must be in (0, 1e-6], got {}", self.root_tol));
        }
        if !(self.bracket_lo_factor > 0.0 && self.bracket_lo_factor < self.bracket_hi_factor)
            || !self.bracket_hi_factor.is_finite()
        {
            return bad(format!(
                "need 0 < bracket_lo_factor < bracket_hi_factor, got {} and {}",
                self.bracket_lo_factor, self.bracket_hi_factor
            ));
        }
        self.kernel().validate()?;
        Ok(())
    }

    pub fn kernel(&self) -> Kernel {
        Kernel { mu_multiplier: self.mu_multiplier, form: self.kernel_form, horizon: self.horizon }
    }

    /// Canonical one-line rendering, used in file headers and fingerprints.
    pub fn canonical(&self) -> String {
        let form = match self.kernel_form {
            KernelForm::Scaled => "scaled",
            KernelForm::Literal => "literal",
        };
        let horizon = match self.horizon {
            KernelHorizon::Exact => "exact".to_string(),
            KernelHorizon::Tapered { center, width, min_width } => {
                format!("tapered:{center:e}:{width:e}:{min_width:e}")
            }
        };
        let var = match self.solution_variable {
            SolutionVariable::X => "x",
            SolutionVariable::MuOfX => "mu_of_x",
        };
        format!(
            "mu_multiplier={:e} euler_c={:e} root_tol={:e} bracket_lo_factor={:e} bracket_hi_factor={:e} kernel_form={form} horizon={horizon} solution_variable={var}",
            self.mu_multiplier, self.euler_c, self.root_tol, self.bracket_lo_factor, self.bracket_hi_factor
        )
    }

    pub fn parse_canonical(s: &str) -> Result<Self, LadderError> {
        let bad = |m: &str| LadderError::Table(format!("config line: {m}"));
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad(v));
        let mut c = LadderConfig::default();
        for kv in s.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(kv))?;
            match k {
                "mu_multiplier" => c.mu_multiplier = num(v)?,
                "euler_c" => c.euler_c = num(v)?,
                "root_tol" => c.root_tol = num(v)?,
                "bracket_lo_factor" => c.bracket_lo_factor = num(v)?,
                "bracket_hi_factor" => c.bracket_hi_factor = num(v)?,
                "kernel_form" => {
                    c.kernel_form = match v {
                        "scaled" => KernelForm::Scaled,
                        "literal" => KernelForm::Literal,
                        _ => return Err(bad(v)),
                    }
                }
                "horizon" => {
                    c.horizon = if v == "exact" {
                        KernelHorizon::Exact
                    } else {
                        let p: Vec<&str> = v.split(':').collect();
                        if p.len() != 4 || p[0] != "tapered" {
                            return Err(bad(v));
                        }
                        KernelHorizon::Tapered { center: num(p[1])?, width: num(p[2])?, min_width: num(p[3])? }
                    }
                }
                "solution_variable" => {
                    c.solution_variable = match v {
                        "x" => SolutionVariable::X,
                        "mu_of_x" => SolutionVariable::MuOfX,
                        _ => return Err(bad(v)),
                    }
                }
                _ => return Err(bad(k)),
            }
        }
        Ok(c)
    }

    pub fn fingerprint(&self) -> String {
        crate::zeta::short_hash(&self.canonical())
    }

    /// x with μ(x) = φ, by Newton on m x ln x = φ.
    fn mu_inverse(&self, phi: f64) -> f64 {
        let m = self.mu_multiplier;
        let mut x = (phi / m / (phi / m).ln().max(1.0)).max(1.5);
        for _ in 0..60 {
            let f = m * x * x.ln() - phi;
            let step = f / (m * (x.ln() + 1.0));
            x = (x - step).max(0.5 * x);
            if step.abs() <= 4.0 * f64::EPSILON * x {
                break;
            }
        }
        x
    }

    /// K as a function of φ, with dK/dφ.
    fn k_of_phi(&self, phi: f64, cache: &CumulativeCache) -> Result<(f64, f64), QuadError> {
        let k = self.kernel();
        match self.solution_variable {
            SolutionVariable::X => k.value_and_derivative(phi, cache),
            SolutionVariable::MuOfX => {
                let x = self.mu_inverse(phi);
                let (v, d) = k.value_and_derivative(x, cache)?;
                Ok((v, d / k.mu_prime(x)))
            }
        }
    }
}

/// One solved point of the ladder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    #[serde(rename = "T")]
    pub t: f64,
    pub phi: f64,
    pub phi1: f64,
    /// Z̃²(T) = φ₁′(T)
    pub dphi1: f64,
    /// |K(φ) − I(T)| / I(T)
    pub eq_residual: f64,
}

/// Solves K(φ) = I(T) on the configured bracket, widening it up to three times.
pub fn solve_phi(t: f64, cfg: &LadderConfig, cache: &CumulativeCache) -> Result<LadderPoint, LadderError> {
    cfg.validate()?;
    if !(t >= VALIDITY_FLOOR) || !t.is_finite() {
        return Err(LadderError::BelowFloor(t));
    }
    let target = z2_cumulative(t, cache, &QuadConfig::default())?;
    let g = |phi: f64| -> Result<f64, LadderError> {
        if cfg.solution_variable == SolutionVariable::X && phi <= std::f64::consts::E {
            // K is undefined there; it is far below any I(T ≥ 100)
            return Ok(-target);
        }
        Ok(cfg.k_of_phi(phi, cache)?.0 - target)
    };
    let mut lo = cfg.bracket_lo_factor * t;
    let mut hi = cfg.bracket_hi_factor * t;
    let mut f_lo = g(lo)?;
    let mut f_hi;
    if f_lo > 0.0 {
        // K is increasing: the root is below lo
        let mut tries = 0;
        loop {
            if tries == BRACKET_RETRIES {
                let top = cfg.bracket_hi_factor * t;
                return Err(LadderError::BracketExhausted { t, lo, hi: top, f_lo, f_hi: f64::NAN });
            }
            hi = lo;
            f_hi = f_lo;
            lo *= 0.5;
            f_lo = g(lo)?;
            tries += 1;
            if f_lo <= 0.0 {
                break;
            }
        }
    } else {
        f_hi = g(hi)?;
        let mut tries = 0;
        while f_hi < 0.0 {
            if tries == BRACKET_RETRIES {
                return Err(LadderError::BracketExhausted { t, lo, hi, f_lo, f_hi });
            }
            lo = hi;
            f_lo = f_hi;
            hi *= 2.0;
            f_hi = g(hi)?;
            tries += 1;
        }
    }
    // run to rounding: the finite-difference check differentiates these roots
    let root = brent(g, lo, hi, f_lo, f_hi, 0.0, 200)?;
    let phi = root.x;
    let (k, dk) = cfg.k_of_phi(phi, cache)?;
    let dens = z2_density(t, cache)?;
    Ok(LadderPoint {
        t,
        phi,
        phi1: 0.5 * phi,
        dphi1: 0.5 * dens / dk,
        eq_residual: (k - target).abs() / target,
    })
}

/// dI/dT as the cache computes I: the interpolant of Z² on the sub-panel holding T.
pub fn z2_density(t: f64, cache: &CumulativeCache) -> Result<f64, QuadError> {
    use crate::quad::{cheb, subpanel_layout, PanelSamples, CHECKPOINT_SPACING};
    if !(t > 0.0) {
        return Err(QuadError::Domain(format!("density needs t > 0, got {t}")));
    }
    let start = (t / CHECKPOINT_SPACING).floor() * CHECKPOINT_SPACING;
    let (n_sub, width) = subpanel_layout(start);
    let m = (((t - start) / width).floor() as usize).min(n_sub - 1);
    let s = PanelSamples::compute(start, m + 1, cache.eval());
    let x = (2.0 * (t - s.sub_start(m)) / width - 1.0).clamp(-1.0, 1.0);
    Ok(cheb::eval(&cheb::coefficients(&s.z2(m)), x))
}

/// Z̃²(T) = φ₁′(T) by implicit differentiation of the defining equation:
/// φ′(T) = I′(T) / K′(φ(T)).
pub fn tilde_z2(t: f64, cfg: &LadderConfig, cache: &CumulativeCache) -> Result<f64, LadderError> {
    Ok(solve_phi(t, cfg, cache)?.dphi1)
}

/// Anything that can answer φ₁(t) and φ₁′(t).
pub trait Ladder {
    fn phi1(&self, t: f64) -> Result<f64, LadderError>;
    fn tilde_z2(&self, t: f64) -> Result<f64, LadderError>;
}

/// A ladder that solves the defining equation at every query.
pub struct DirectLadder<'a> {
    pub cfg: LadderConfig,
    pub cache: &'a CumulativeCache,
}

impl Ladder for DirectLadder<'_> {
    fn phi1(&self, t: f64) -> Result<f64, LadderError> {
        Ok(solve_phi(t, &self.cfg, self.cache)?.phi1)
    }
    fn tilde_z2(&self, t: f64) -> Result<f64, LadderError> {
        tilde_z2(t, &self.cfg, self.cache)
    }
}

/// φ₁ᵏ(T); φ₁⁰(T) = T.
pub fn phi1_iter(t: f64, k: u32, ladder: &impl Ladder) -> Result<f64, LadderError> {
    let mut y = t;
    for i in 1..=k {
        y = ladder.phi1(y)?;
        if y < VALIDITY_FLOOR {
            return Err(LadderError::IterateUnderflow { t, k: i, value: y });
        }
    }
    Ok(y)
}

/// [φ₁⁰(T), φ₁¹(T), …, φ₁ᵏ(T)].
pub fn phi1_chain(t: f64, k: u32, ladder: &impl Ladder) -> Result<Vec<f64>, LadderError> {
    let mut out = Vec::with_capacity(k as usize + 1);
    out.push(t);
    for i in 1..=k {
        let y = ladder.phi1(*out.last().unwrap())?;
        if y < VALIDITY_FLOOR {
            return Err(LadderError::IterateUnderflow { t, k: i, value: y });
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::EvalConfig;

    fn cache() -> CumulativeCache {
        CumulativeCache::new(EvalConfig::default(), "test")
    }

    #[test]
    fn solves_with_small_residual() {
        let c = cache();
        let cfg = LadderConfig::default();
        let p = solve_phi(2000.0, &cfg, &c).unwrap();
        assert!(p.eq_residual <= cfg.root_tol);
        assert!(p.phi1 < 2000.0 && p.phi1 > 1500.0, "{p:?}");
        assert!(p.dphi1 >= 0.0);
    }

    #[test]
    fn derivative_matches_differences() {
        let c = cache();
        let cfg = LadderConfig::default();
        let t = 1234.5;
        let h = 1e-3;
        let p = solve_phi(t, &cfg, &c).unwrap();
        let f = |s: f64| solve_phi(s, &cfg, &c).unwrap().phi1;
        let fd = (8.0 * (f(t + h) - f(t - h)) - (f(t + 2.0 * h) - f(t - 2.0 * h))) / (12.0 * h);
        assert!((fd - p.dphi1).abs() < 1e-6 * p.dphi1.max(1e-2), "{fd} vs {}", p.dphi1);
    }

    #[test]
    fn refuses_below_floor_and_bad_config() {
        let c = cache();
        assert!(matches!(solve_phi(50.0, &LadderConfig::default(), &c), Err(LadderError::BelowFloor(_))));
        let bad = LadderConfig { euler_c: 0.6, ..Default::default() };
        assert!(matches!(solve_phi(500.0, &bad, &c), Err(LadderError::Config(_))));
    }

    #[test]
    fn canonical_round_trip() {
        let cfg = LadderConfig { root_tol: 3e-11, horizon: KernelHorizon::Exact, ..Default::default() };
        assert_eq!(LadderConfig::parse_canonical(&cfg.canonical()).unwrap(), cfg);
        let d = LadderConfig::default();
        assert_eq!(LadderConfig::parse_canonical(&d.canonical()).unwrap(), d);
    }

    #[test]
    fn mu_inverse_inverts() {
        let cfg = LadderConfig::default();
        for &phi in &[50.0, 1e3, 1e6] {
            let x = cfg.mu_inverse(phi);
            assert!((cfg.kernel().mu(x) - phi).abs() < 1e-12 * phi);
        }
    }
}
