//! Both sides of the ladder formulas: the substitution identity, the main
//! asymptotic formula, the segment system and the corollary moments.
//!
//! Every check runs on a [`LadderWindow`] that covers [φ₁ⁿ⁺¹(T), T+U], so the
//! ladder and the signal come from one tabulation and reports are reproducible.

mod function;
mod geometry;
mod grid;
mod integrals;

pub use function::{FunctionKind, SignClass, TestFunction};
pub use geometry::{log_stability_check, segment_geometry, GeometryCheck, SegmentSystem};
pub use grid::{
    run_grid, run_one, standard_grid, window_for, write_outcomes_tsv, Claim, GridOutcome, GridSpec, WindowChoice,
};
pub use integrals::{
    check_exact_identity, check_theorem, corollary_report, integral_of_f, integro_iteration_residual,
    integro_report, product_integral, IntegroResidual, ProductIntegral,
};

use crate::ladder::{LadderError, LadderWindow};
use crate::quad::QuadError;
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

/// Relative slack of the substitution identity on top of the quadrature bound.
pub const EXACT_TOLERANCE: f64 = 1e-5;
/// Deepest iteration accepted.
pub const MAX_DEPTH: u32 = 8;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("regime violation: {0}")]
    Regime(String),
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("report I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("report format: {0}")]
    Format(String),
}

impl VerifyError {
    /// Usage and parameter problems, as opposed to numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(self, VerifyError::Params(_) | VerifyError::Regime(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// U ∈ (0, T/ln²T]
    Microscopic,
    /// U ∈ [T^{1/3+ε}, T/ln²T]
    Macroscopic,
    /// U = T^{7/8+ε}, the window of the fourth-moment corollary
    FourthMoment,
}

impl Regime {
    /// The narrowest regime label that fits (T, U).
    pub fn classify(t: f64, u: f64, epsilon: f64) -> Regime {
        if u >= t.powf(1.0 / 3.0 + epsilon) {
            Regime::Macroscopic
        } else {
            Regime::Microscopic
        }
    }
}

pub fn log_squared_window(t: f64) -> f64 {
    t / (t.ln() * t.ln())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationParams {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub n: u32,
    pub l: u32,
    #[serde(rename = "F")]
    pub f: TestFunction,
    pub regime: Regime,
    pub epsilon: f64,
}

impl VerificationParams {
    pub fn new(t: f64, u: f64, n: u32, f: TestFunction) -> Self {
        let epsilon = 0.05;
        VerificationParams { t, u, n, l: 1, f, regime: Regime::classify(t, u, epsilon), epsilon }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: String| Err(VerifyError::Params(m));
        if !(self.t >= crate::ladder::VALIDITY_FLOOR) || !self.t.is_finite() {
            return bad(format!("T must be >= {}, got {}", crate::ladder::VALIDITY_FLOOR, self.t));
        }
        if !(self.u > 0.0) || !self.u.is_finite() {
            return bad(format!("U must be positive, got {}", self.u));
        }
        if self.n > MAX_DEPTH {
            return bad(format!("n must be at most {MAX_DEPTH}, got {}", self.n));
        }
        if self.l == 0 {
            return bad("l must be positive".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.125) {
            return bad(format!("epsilon must be in (0, 1/8), got {}", self.epsilon));
        }
        self.f.validate()?;
        let cap = log_squared_window(self.t) * (1.0 + 1e-12);
        let floor = self.t.powf(1.0 / 3.0 + self.epsilon) * (1.0 - 1e-12);
        match self.regime {
            Regime::Microscopic if self.u > cap => Err(VerifyError::Regime(format!(
                "U = {} exceeds T/ln²T = {}",
                self.u,
                log_squared_window(self.t)
            ))),
            Regime::Macroscopic if self.u > cap || self.u < floor => Err(VerifyError::Regime(format!(
                "macroscopic windows need U in [T^(1/3+ε), T/ln²T] = [{}, {}], got {}",
                self.t.powf(1.0 / 3.0 + self.epsilon),
                log_squared_window(self.t),
                self.u
            ))),
            Regime::FourthMoment => {
                let u1 = self.t.powf(7.0 / 8.0 + self.epsilon);
                if (self.u - u1).abs() > 1e-9 * u1 {
                    return Err(VerifyError::Regime(format!("the fourth-moment window is U = T^(7/8+ε) = {u1}, got {}", self.u)));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimId {
    ExactIdentity,
    MainTheorem,
    IntegroIteration,
    ProductOfSquares,
    FourthMoment,
    ArgumentMoment,
    S1Moment,
}

impl ClaimId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimId::ExactIdentity => "exact_identity",
            ClaimId::MainTheorem => "main_theorem",
            ClaimId::IntegroIteration => "integro_iteration",
            ClaimId::ProductOfSquares => "product_of_squares",
            ClaimId::FourthMoment => "fourth_moment",
            ClaimId::ArgumentMoment => "argument_moment",
            ClaimId::S1Moment => "s1_moment",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim_id: ClaimId,
    pub params: VerificationParams,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs; absent when rhs = 0
    pub ratio: Option<f64>,
    /// combined quadrature error of both sides
    pub err_bound: f64,
    /// accepted ratio range, when the claim has one
    pub band: Option<(f64, f64)>,
    pub pass: bool,
    /// false for report-only claims and degenerate cases
    pub asserted: bool,
    pub degenerate: bool,
    pub wall_time_s: f64,
    pub note: String,
}

impl VerificationReport {
    /// The report with the timing cleared; equal inputs give equal values.
    pub fn without_timing(&self) -> Self {
        VerificationReport { wall_time_s: 0.0, ..self.clone() }
    }

    /// Passing, or not asserted at all.
    pub fn ok(&self) -> bool {
        self.pass || !self.asserted
    }
}

/// Half-width of the accepted band around 1 for single-log asymptotics:
/// ±50% at 10⁴, ±40% at 10⁵, ±25% from 10⁶ on, linear in log₁₀ T between,
/// widened by half for every extra ζ² factor.
pub fn asymptotic_band(t: f64, n: u32) -> f64 {
    let d = t.log10();
    let base = if d <= 4.0 {
        0.5
    } else if d <= 5.0 {
        0.5 - 0.1 * (d - 4.0)
    } else if d <= 6.0 {
        0.4 - 0.15 * (d - 5.0)
    } else {
        0.25
    };
    base * (1.0 + 0.5 * n as f64)
}

/// Reports as pretty JSON, one array.
pub fn write_json(reports: &[VerificationReport], mut w: impl Write) -> Result<(), VerifyError> {
    serde_json::to_writer_pretty(&mut w, reports).map_err(|e| VerifyError::Format(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json(s: &str) -> Result<Vec<VerificationReport>, VerifyError> {
    serde_json::from_str(s).map_err(|e| VerifyError::Format(e.to_string()))
}

pub const TSV_HEADER: &str =
    "claim\tT\tU\tn\tl\tF\tregime\tlhs\trhs\tratio\terr_bound\tband_lo\tband_hi\tpass\tasserted\tdegenerate\twall_time_s";

/// One tab-separated line per report under [`TSV_HEADER`].
pub fn write_tsv(reports: &[VerificationReport], mut w: impl Write) -> Result<(), VerifyError> {
    writeln!(w, "{TSV_HEADER}")?;
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.12e}")).unwrap_or_else(|| "nan".into());
    for r in reports {
        let p = &r.params;
        writeln!(
            w,
            "{}\t{:e}\t{:.12e}\t{}\t{}\t{}\t{}\t{:.12e}\t{:.12e}\t{}\t{:.3e}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
            r.claim_id.as_str(),
            p.t,
            p.u,
            p.n,
            p.l,
            p.f.label(),
            serde_json::to_value(p.regime).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            r.lhs,
            r.rhs,
            opt(r.ratio),
            r.err_bound,
            opt(r.band.map(|b| b.0)),
            opt(r.band.map(|b| b.1)),
            r.pass,
            r.asserted,
            r.degenerate,
            r.wall_time_s
        )?;
    }
    Ok(())
}

/// Checks that the window reaches down to φ₁ⁿ⁺¹(T) and up to T+U.
pub(crate) fn check_coverage(p: &VerificationParams, win: &LadderWindow) -> Result<(), VerifyError> {
    let (lo, hi) = win.range();
    if p.t < lo || p.t + p.u > hi {
        return Err(LadderError::OutOfRange { t: if p.t < lo { p.t } else { p.t + p.u }, lo, hi }.into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes_are_enforced() {
        let t = 1e5;
        let cap = log_squared_window(t);
        let mut p = VerificationParams::new(t, cap, 1, TestFunction::constant_one());
        assert_eq!(p.regime, Regime::Macroscopic);
        p.validate().unwrap();
        p.u = cap * 1.01;
        assert!(matches!(p.validate(), Err(VerifyError::Regime(_))));
        p.u = 10.0;
        assert!(matches!(p.validate(), Err(VerifyError::Regime(_))));
        p.regime = Regime::Microscopic;
        p.validate().unwrap();
        p.u = 0.0;
        assert!(matches!(p.validate(), Err(VerifyError::Params(_))));
        let q = VerificationParams {
            u: t.powf(0.925),
            regime: Regime::FourthMoment,
            ..VerificationParams::new(t, 1.0, 0, TestFunction::abs_zeta4())
        };
        q.validate().unwrap();
    }

    #[test]
    fn band_tightens_with_t() {
        assert_eq!(asymptotic_band(1e4, 0), 0.5);
        assert!((asymptotic_band(1e5, 0) - 0.4).abs() < 1e-12);
        assert!((asymptotic_band(1e6, 0) - 0.25).abs() < 1e-12);
        assert!(asymptotic_band(1e6, 1) > asymptotic_band(1e6, 0));
    }
}
