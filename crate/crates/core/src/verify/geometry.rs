use super::{check_coverage, Regime, VerificationParams, VerifyError};
use crate::ladder::{phi1_chain, LadderWindow};
use serde::{Deserialize, Serialize};

/// Macroscopic ratio bands are asserted from this T on and only reported below.
pub const MACRO_ASSERT_FROM: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryCheck {
    /// length_bound, gap_bound, disjoint, length_ratio or gap_ratio
    pub name: String,
    pub k: u32,
    pub value: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub pass: bool,
    pub asserted: bool,
}

/// The segments [φ₁ᵏ(T), φ₁ᵏ(T+U)], k = 0..n+1, their lengths, and the gaps
/// φ₁ᵏ(T) − φ₁ᵏ⁺¹(T+U) between neighbours, k = 0..n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSystem {
    pub params: VerificationParams,
    pub segments: Vec<(f64, f64)>,
    pub lengths: Vec<f64>,
    pub gaps: Vec<f64>,
    pub checks: Vec<GeometryCheck>,
}

impl SegmentSystem {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.asserted)
    }

    pub fn check(&self, name: &str, k: u32) -> Option<&GeometryCheck> {
        self.checks.iter().find(|c| c.name == name && c.k == k)
    }
}

fn bounded(name: &str, k: u32, value: f64, lo: Option<f64>, hi: Option<f64>, asserted: bool) -> GeometryCheck {
    let pass = lo.map_or(true, |b| value > b) && hi.map_or(true, |b| value < b);
    GeometryCheck { name: name.into(), k, value, lo, hi, pass, asserted }
}

pub fn segment_geometry(p: &VerificationParams, win: &LadderWindow) -> Result<SegmentSystem, VerifyError> {
    p.validate()?;
    check_coverage(p, win)?;
    let n = p.n;
    let left = phi1_chain(p.t, n + 1, win)?;
    let right = phi1_chain(p.t + p.u, n + 1, win)?;
    let segments: Vec<(f64, f64)> = left.iter().zip(&right).map(|(&a, &b)| (a, b)).collect();
    let lengths: Vec<f64> = segments.iter().map(|s| s.1 - s.0).collect();
    let gaps: Vec<f64> = (0..=n as usize).map(|k| segments[k].0 - segments[k + 1].1).collect();

    let scale = p.t / p.t.ln();
    let macro_asserted = p.regime == Regime::Macroscopic && p.t >= MACRO_ASSERT_FROM;
    let gap_unit = (1.0 - win.config().euler_c) * scale;
    let mut checks = Vec::new();
    for k in 1..=n + 1 {
        let bound = scale / (2 * n + 3) as f64;
        checks.push(bounded("length_bound", k, lengths[k as usize], None, Some(bound), true));
    }
    for k in 0..=n {
        checks.push(bounded("gap_bound", k, gaps[k as usize], Some(0.2 * scale), None, true));
    }
    for k in 0..=n {
        // components of the segment system do not touch
        let c = bounded("disjoint", k, gaps[k as usize], Some(0.0), None, p.regime == Regime::Macroscopic);
        checks.push(c);
    }
    for k in 1..=n + 1 {
        let r = lengths[k as usize] / p.u;
        checks.push(bounded("length_ratio", k, r, Some(0.9), Some(1.1), macro_asserted));
    }
    for k in 0..=n {
        let r = gaps[k as usize] / gap_unit;
        checks.push(bounded("gap_ratio", k, r, Some(0.7), Some(1.3), macro_asserted));
    }
    Ok(SegmentSystem { params: p.clone(), segments, lengths, gaps, checks })
}

/// max |ln T′ − ln T| over T′ sampled in (φ₁ⁿ⁺¹(T), T+U).
pub fn log_stability_check(t: f64, u: f64, n: u32, win: &LadderWindow) -> Result<f64, VerifyError> {
    if !(u > 0.0) {
        return Err(VerifyError::Params(format!("U must be positive, got {u}")));
    }
    let lo = *phi1_chain(t, n + 1, win)?.last().unwrap();
    let hi = t + u;
    let lt = t.ln();
    let m = 64;
    let mut worst: f64 = 0.0;
    for j in 0..=m {
        let s = lo + (hi - lo) * j as f64 / m as f64;
        worst = worst.max((s.ln() - lt).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::LadderConfig;
    use crate::verify::{log_squared_window, TestFunction};
    use crate::{CumulativeCache, EvalConfig};

    #[test]
    fn microscopic_bounds_at_small_t() {
        let cache = CumulativeCache::new(EvalConfig::default(), "test");
        let t = 1e4;
        let u = log_squared_window(t);
        let w = LadderWindow::for_iterates(t, t + u, 3, &LadderConfig::default(), &cache).unwrap();
        let p = VerificationParams::new(t, u, 2, TestFunction::constant_one());
        let g = segment_geometry(&p, &w).unwrap();
        assert_eq!(g.segments.len(), 4);
        assert_eq!(g.gaps.len(), 3);
        assert!(g.ok(), "{:#?}", g.checks);
        assert!(g.checks.iter().filter(|c| c.name == "length_ratio").all(|c| !c.asserted));
        let a = log_stability_check(t, u, 0, &w).unwrap();
        let b = log_stability_check(t, u, 2, &w).unwrap();
        assert!(a < b && b < 0.5, "{a} {b}");
    }
}
