//! The critical-line signal: θ(t), Hardy's Z(t), |ζ(½+it)|², S(t) and S₁(T).

mod arg;
mod em;
mod rs;
mod s1;
mod sweep;
mod theta;

pub use arg::{arg_zeta, s_of_t};
pub use em::{zeta, zeta_half_em};
pub use rs::{hardy_z_rs, rs_remainder};
pub use s1::{s1_littlewood, s1_of_t, S1Checkpoint, S1Store};
pub use sweep::z_progression;
pub use theta::{ln_gamma, theta};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("ordinate must be positive, got t = {0}")]
    Domain(f64),
    #[error("t = {t} is too close to a zero of Z (|Z| = {z:e}); the argument is ill-conditioned")]
    NearZero { t: f64, z: f64 },
    #[error("argument tracking at t = {0} hit the step floor")]
    ArgTracking(f64),
    #[error("invalid evaluation config: {0}")]
    Config(String),
}

/// Evaluation knobs shared by every signal routine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Number of Riemann-Siegel remainder terms beyond the leading one (0..=4).
    pub rs_correction_order: u32,
    /// Below this ordinate Z is computed from Euler-Maclaurin instead.
    pub em_cutoff: f64,
    /// Step in σ used when tracking arg ζ(σ+it) from σ = 2 down to ½.
    pub arg_step: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            rs_correction_order: 4,
            em_cutoff: 200.0,
            arg_step: 0.02,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), ZetaError> {
        if self.rs_correction_order > 4 {
            return Err(ZetaError::Config(format!(
                "rs_correction_order must be in 0..=4, got {}",
                self.rs_correction_order
            )));
        }
        if !(self.em_cutoff >= 10.0) {
            return Err(ZetaError::Config(format!(
                "em_cutoff must be >= 10, got {}",
                self.em_cutoff
            )));
        }
        if !(self.arg_step > 0.0 && self.arg_step <= 0.5) {
            return Err(ZetaError::Config(format!(
                "arg_step must be in (0, 0.5], got {}",
                self.arg_step
            )));
        }
        Ok(())
    }

    /// Stable fingerprint, used to refuse caches built under other settings.
    pub fn fingerprint(&self) -> String {
        let canon = format!(
            "rs_correction_order={};em_cutoff={:e};arg_step={:e}",
            self.rs_correction_order, self.em_cutoff, self.arg_step
        );
        short_hash(&canon)
    }
}

pub(crate) fn short_hash(s: &str) -> String {
    let digest = Sha256::digest(s.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSample {
    pub t: f64,
    pub z: f64,
    pub theta: f64,
    pub abs2: f64,
    pub s: f64,
}

pub fn riemann_siegel_theta(t: f64, _cfg: &EvalConfig) -> Result<f64, ZetaError> {
    if !(t > 0.0) {
        return Err(ZetaError::Domain(t));
    }
    Ok(theta(t))
}

/// Z(t) without argument checks.
#[inline]
pub fn z_unchecked(t: f64, cfg: &EvalConfig) -> f64 {
    if t < cfg.em_cutoff {
        hardy_z_em(t)
    } else {
        hardy_z_rs(t, cfg.rs_correction_order)
    }
}

pub fn hardy_z(t: f64, cfg: &EvalConfig) -> Result<f64, ZetaError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(ZetaError::Domain(t));
    }
    Ok(z_unchecked(t, cfg))
}

/// Z(t) from Euler-Maclaurin, rotated by θ(t). Accurate but slow for large t.
pub fn hardy_z_em(t: f64) -> f64 {
    let zeta = zeta_half_em(t);
    let (s, c) = theta(t).sin_cos();
    c * zeta.re - s * zeta.im
}

pub fn zeta_abs2_half(t: f64, cfg: &EvalConfig) -> Result<f64, ZetaError> {
    if t == 0.0 {
        let z = zeta_half_em(0.0).re;
        return Ok(z * z);
    }
    let z = hardy_z(t, cfg)?;
    Ok(z * z)
}

pub fn sample(t: f64, cfg: &EvalConfig) -> Result<SignalSample, ZetaError> {
    let z = hardy_z(t, cfg)?;
    let s = s_of_t(t, cfg)?;
    Ok(SignalSample {
        t,
        z,
        theta: theta(t),
        abs2: z * z,
        s,
    })
}

/// Mean zero spacing 2π / ln(t/2π), floored for small t.
pub fn mean_gap(t: f64) -> f64 {
    2.0 * std::f64::consts::PI / (t / (2.0 * std::f64::consts::PI)).ln().max(1.0)
}
