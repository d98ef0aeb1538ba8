use super::{
    check_exact_identity, check_theorem, corollary_report, integro_report, log_squared_window, segment_geometry,
    FunctionKind, Regime, SegmentSystem, TestFunction, VerificationParams, VerificationReport, VerifyError,
};
use crate::ladder::{LadderConfig, LadderError, LadderWindow};
use crate::quad::CumulativeCache;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// How U is chosen from T.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WindowChoice {
    /// T / ln²T, written `T/ln^2T`
    LogSquared,
    /// T^e, written `T^e`
    Power(f64),
    /// a fixed length
    Fixed(f64),
}

impl WindowChoice {
    pub fn length(&self, t: f64) -> f64 {
        match *self {
            WindowChoice::LogSquared => log_squared_window(t),
            WindowChoice::Power(e) => t.powf(e),
            WindowChoice::Fixed(u) => u,
        }
    }
}

impl fmt::Display for WindowChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowChoice::LogSquared => write!(f, "T/ln^2T"),
            WindowChoice::Power(e) => write!(f, "T^{e}"),
            WindowChoice::Fixed(u) => write!(f, "{u}"),
        }
    }
}

impl From<WindowChoice> for String {
    fn from(w: WindowChoice) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for WindowChoice {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl std::str::FromStr for WindowChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("window {s:?}: expected T/ln^2T, T^<exponent> or a number");
        if s == "T/ln^2T" || s == "log_squared" {
            return Ok(WindowChoice::LogSquared);
        }
        if let Some(e) = s.strip_prefix("T^") {
            let e: f64 = e.parse().map_err(|_| bad())?;
            if !(e > 0.0 && e < 1.0) {
                return Err(bad());
            }
            return Ok(WindowChoice::Power(e));
        }
        let u: f64 = s.parse().map_err(|_| bad())?;
        if !(u > 0.0) || !u.is_finite() {
            return Err(bad());
        }
        Ok(WindowChoice::Fixed(u))
    }
}

/// A parameter grid: every combination of T, n, U and F.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    pub n: Vec<u32>,
    #[serde(rename = "U")]
    pub u: Vec<WindowChoice>,
    /// test functions as accepted by [`TestFunction::parse`]
    #[serde(rename = "F")]
    pub functions: Vec<String>,
    #[serde(default = "one")]
    pub l: u32,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn one() -> u32 {
    1
}

fn default_epsilon() -> f64 {
    0.05
}

pub fn standard_grid() -> GridSpec {
    GridSpec {
        t: vec![1e4, 1e5, 1e6],
        n: vec![0, 1, 2],
        u: vec![WindowChoice::LogSquared, WindowChoice::Power(0.45), WindowChoice::Power(0.55)],
        functions: ["constant_one", "monomial:1", "shifted_square:T", "abs_zeta4", "arg_zeta_pow:2", "s1_pow:2"]
            .map(String::from)
            .to_vec(),
        l: 1,
        epsilon: 0.05,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Exact,
    Theorem,
    Geometry,
    Corollary,
    Residual,
}

impl std::str::FromStr for Claim {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Claim::Exact),
            "theorem" => Ok(Claim::Theorem),
            "geometry" => Ok(Claim::Geometry),
            "corollary" => Ok(Claim::Corollary),
            "residual" => Ok(Claim::Residual),
            _ => Err(format!("unknown claim {s:?} (expected exact, theorem, geometry, corollary or residual)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum GridOutcome {
    Report(VerificationReport),
    Geometry(SegmentSystem),
    /// parameters outside the claim's regime; not an error in a sweep
    Skipped { label: String, reason: String },
    /// a numerical failure while evaluating a point
    Failed { label: String, reason: String },
}

impl GridOutcome {
    pub fn ok(&self) -> bool {
        match self {
            GridOutcome::Report(r) => r.ok(),
            GridOutcome::Geometry(g) => g.ok(),
            GridOutcome::Skipped { .. } => true,
            GridOutcome::Failed { .. } => false,
        }
    }
}

fn label(p: &VerificationParams) -> String {
    format!("T={} U={} n={} F={}", p.t, p.u, p.n, p.f.label())
}

impl GridSpec {
    /// The parameter points of the grid for one claim, in grid order; points
    /// that fail validation come back as errors with their label.
    pub fn expand(&self, claim: Claim) -> Vec<Result<VerificationParams, (String, VerifyError)>> {
        let mut out = Vec::new();
        let mut seen: Vec<VerificationParams> = Vec::new();
        for &t in &self.t {
            for &n in &self.n {
                for u in &self.u {
                    for fs in &self.functions {
                        let ulen = u.length(t);
                        let f = match TestFunction::parse(fs, t) {
                            Ok(f) => f,
                            Err(e) => {
                                out.push(Err((format!("T={t} U={u} n={n} F={fs}"), e)));
                                continue;
                            }
                        };
                        if claim == Claim::Geometry && f.kind != FunctionKind::ConstantOne {
                            continue;
                        }
                        let mut p = VerificationParams {
                            t,
                            u: ulen,
                            n,
                            l: self.l,
                            f,
                            regime: Regime::classify(t, ulen, self.epsilon),
                            epsilon: self.epsilon,
                        };
                        if claim == Claim::Corollary {
                            if let Some(l) = p.f.moment_index() {
                                p.l = l;
                            }
                            if p.f.kind == FunctionKind::AbsZeta4 {
                                p.u = t.powf(7.0 / 8.0 + self.epsilon);
                                p.regime = Regime::FourthMoment;
                            }
                        }
                        if seen.contains(&p) {
                            continue;
                        }
                        seen.push(p.clone());
                        match p.validate() {
                            Ok(()) => out.push(Ok(p)),
                            Err(e) => out.push(Err((label(&p), e))),
                        }
                    }
                }
            }
        }
        out
    }
}

/// One window per distinct T, deep and wide enough for every point at that T.
pub fn window_for(
    params: &[VerificationParams],
    cfg: &LadderConfig,
    cache: &CumulativeCache,
) -> Result<Vec<(f64, LadderWindow)>, LadderError> {
    let mut ts: Vec<f64> = params.iter().map(|p| p.t).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut out = Vec::new();
    for t in ts {
        let here = params.iter().filter(|p| p.t == t);
        let hi = here.clone().map(|p| p.t + p.u).fold(t, f64::max);
        let depth = here.map(|p| p.n + 1).max().unwrap_or(1);
        out.push((t, LadderWindow::for_iterates(t, hi, depth, cfg, cache)?));
    }
    Ok(out)
}

pub fn run_one(claim: Claim, p: &VerificationParams, win: &LadderWindow) -> Result<GridOutcome, VerifyError> {
    Ok(match claim {
        Claim::Exact => GridOutcome::Report(check_exact_identity(p, win)?),
        Claim::Theorem => GridOutcome::Report(check_theorem(p, win)?),
        Claim::Residual => GridOutcome::Report(integro_report(p, win)?),
        Claim::Corollary => GridOutcome::Report(corollary_report(p, win)?),
        Claim::Geometry => GridOutcome::Geometry(segment_geometry(p, win)?),
    })
}

/// Evaluates a claim over a grid. Regime violations are skipped; numerical
/// failures are recorded and count as failed checks. Output order follows
/// the grid, whatever the thread count.
pub fn run_grid(
    claim: Claim,
    grid: &GridSpec,
    cfg: &LadderConfig,
    cache: &CumulativeCache,
    mut progress: impl FnMut(&str),
) -> Result<Vec<GridOutcome>, VerifyError> {
    let points = grid.expand(claim);
    let valid: Vec<VerificationParams> = points.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let mut windows = Vec::new();
    for (t, w) in window_for(&valid, cfg, cache)? {
        progress(&format!("window for T = {t}: [{}, {}]", w.range().0, w.range().1));
        windows.push((t, w));
    }
    let results: Vec<GridOutcome> = points
        .par_iter()
        .map(|r| match r {
            Err((label, e)) if e.is_validation() => GridOutcome::Skipped { label: label.clone(), reason: e.to_string() },
            Err((label, e)) => GridOutcome::Failed { label: label.clone(), reason: e.to_string() },
            Ok(p) => {
                let w = &windows.iter().find(|(t, _)| *t == p.t).expect("window per T").1;
                match run_one(claim, p, w) {
                    Ok(o) => o,
                    Err(e) if e.is_validation() => GridOutcome::Skipped { label: label(p), reason: e.to_string() },
                    Err(e) => GridOutcome::Failed { label: label(p), reason: e.to_string() },
                }
            }
        })
        .collect();
    Ok(results)
}

/// Flat rows for every outcome under the report header. Geometry checks
/// become one row each, named `geometry:<check>:<k>` with the value in lhs.
pub fn write_outcomes_tsv(outcomes: &[GridOutcome], mut w: impl std::io::Write) -> Result<(), VerifyError> {
    let mut reports = Vec::new();
    for o in outcomes {
        match o {
            GridOutcome::Report(r) => reports.push(r.clone()),
            GridOutcome::Geometry(g) => {
                for c in &g.checks {
                    reports.push(VerificationReport {
                        claim_id: super::ClaimId::ExactIdentity,
                        params: g.params.clone(),
                        lhs: c.value,
                        rhs: f64::NAN,
                        ratio: None,
                        err_bound: 0.0,
                        band: Some((c.lo.unwrap_or(f64::NEG_INFINITY), c.hi.unwrap_or(f64::INFINITY))),
                        pass: c.pass,
                        asserted: c.asserted,
                        degenerate: false,
                        wall_time_s: 0.0,
                        note: format!("geometry:{}:{}", c.name, c.k),
                    });
                }
            }
            GridOutcome::Skipped { .. } | GridOutcome::Failed { .. } => {}
        }
    }
    let mut buf = Vec::new();
    super::write_tsv(&reports, &mut buf)?;
    let text = String::from_utf8(buf).expect("tsv is utf-8");
    // rename the claim column of geometry rows
    let mut lines = text.lines();
    writeln!(w, "{}", lines.next().unwrap_or_default())?;
    for (line, r) in lines.zip(&reports) {
        if r.note.starts_with("geometry:") {
            let rest = line.split_once('\t').map(|x| x.1).unwrap_or("");
            writeln!(w, "{}\t{rest}", r.note)?;
        } else {
            writeln!(w, "{line}")?;
        }
    }
    for o in outcomes {
        if let GridOutcome::Skipped { label, reason } | GridOutcome::Failed { label, reason } = o {
            let kind = if matches!(o, GridOutcome::Skipped { .. }) { "skipped" } else { "failed" };
            writeln!(w, "# {kind} {label}: {reason}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_choices_parse() {
        for s in ["T/ln^2T", "T^0.45", "250"] {
            assert_eq!(s.parse::<WindowChoice>().unwrap().to_string(), s);
        }
        assert!("T^2".parse::<WindowChoice>().is_err());
        assert!("-3".parse::<WindowChoice>().is_err());
    }

    #[test]
    fn standard_grid_expands_with_regime_skips() {
        let g = standard_grid();
        let pts = g.expand(Claim::Exact);
        assert_eq!(pts.len(), 3 * 3 * 3 * 6);
        // T^0.55 exceeds T/ln²T at 10⁴ only
        let bad: Vec<_> = pts.iter().filter_map(|r| r.as_ref().err()).collect();
        assert_eq!(bad.len(), 3 * 6);
        assert!(bad.iter().all(|(l, e)| l.contains("T=10000") && e.is_validation()));
        assert_eq!(g.expand(Claim::Geometry).len(), 27);
    }

    #[test]
    fn grid_round_trips_through_json() {
        let g = standard_grid();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<GridSpec>(&s).unwrap(), g);
    }
}
