use super::{solve_phi, Ladder, LadderConfig, LadderError, LadderPoint, VALIDITY_FLOOR};
use crate::quad::CumulativeCache;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub const TABLE_FORMAT_VERSION: u32 = 1;

/// Interpolation rule between table points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HermiteRule {
    /// Cubic Hermite on the stored derivatives, with Fritsch-Carlson limiting
    /// per interval so each piece stays monotone.
    FritschCarlson,
}

impl HermiteRule {
    fn name(self) -> &'static str {
        match self {
            HermiteRule::FritschCarlson => "fritsch_carlson_hermite",
        }
    }
}

/// (T, φ, φ₁, φ₁′) on a strictly increasing grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderTable {
    pub config: LadderConfig,
    pub eval_fingerprint: String,
    /// (lo, hi, step) as requested
    pub grid: (f64, f64, f64),
    pub points: Vec<LadderPoint>,
    pub interp: HermiteRule,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

impl LadderTable {
    pub fn range(&self) -> (f64, f64) {
        (self.points[0].t, self.points.last().unwrap().t)
    }

    /// Interval index and the limited end slopes for t inside the range.
    fn locate(&self, t: f64) -> Result<Option<(usize, f64, f64, f64)>, LadderError> {
        let (lo, hi) = self.range();
        if !(t >= lo && t <= hi) {
            return Err(LadderError::OutOfRange { t, lo, hi });
        }
        let i = self.points.partition_point(|p| p.t <= t);
        let i = i.saturating_sub(1).min(self.points.len().saturating_sub(2));
        if self.points.len() == 1 || self.points[i].t == t {
            return Ok(None);
        }
        let (a, b) = (&self.points[i], &self.points[i + 1]);
        let h = b.t - a.t;
        let delta = (b.phi1 - a.phi1) / h;
        let (mut m0, mut m1) = (a.dphi1, b.dphi1);
        if delta <= 0.0 {
            m0 = 0.0;
            m1 = 0.0;
        } else {
            let (al, be) = (m0 / delta, m1 / delta);
            let r = al * al + be * be;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                m0 *= tau;
                m1 *= tau;
            }
        }
        Ok(Some((i, h, m0, m1)))
    }

    /// Interpolated φ₁(t); exact at grid points.
    pub fn phi1(&self, t: f64) -> Result<f64, LadderError> {
        match self.locate(t)? {
            None => {
                let i = self.points.partition_point(|p| p.t < t);
                Ok(self.points[i.min(self.points.len() - 1)].phi1)
            }
            Some((i, h, m0, m1)) => {
                let (a, b) = (&self.points[i], &self.points[i + 1]);
                let s = (t - a.t) / h;
                let s2 = s * s;
                let s3 = s2 * s;
                let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
                let h10 = s3 - 2.0 * s2 + s;
                let h01 = -2.0 * s3 + 3.0 * s2;
                let h11 = s3 - s2;
                Ok(h00 * a.phi1 + h10 * h * m0 + h01 * b.phi1 + h11 * h * m1)
            }
        }
    }

    /// Derivative of the interpolant.
    pub fn dphi1(&self, t: f64) -> Result<f64, LadderError> {
        match self.locate(t)? {
            None => {
                let i = self.points.partition_point(|p| p.t < t);
                Ok(self.points[i.min(self.points.len() - 1)].dphi1)
            }
            Some((i, h, m0, m1)) => {
                let (a, b) = (&self.points[i], &self.points[i + 1]);
                let s = (t - a.t) / h;
                let s2 = s * s;
                let d00 = (6.0 * s2 - 6.0 * s) / h;
                let d10 = 3.0 * s2 - 4.0 * s + 1.0;
                let d01 = (-6.0 * s2 + 6.0 * s) / h;
                let d11 = 3.0 * s2 - 2.0 * s;
                Ok(d00 * a.phi1 + d10 * m0 + d01 * b.phi1 + d11 * m1)
            }
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(p.eq_residual))
    }

    /// Checks the stored points: grid and φ₁ strictly increasing, φ₁′ ≥ 0,
    /// residuals within 10·root_tol.
    pub fn check_invariants(&self) -> Result<(), LadderError> {
        if self.points.is_empty() {
            return Err(LadderError::Table("no points".into()));
        }
        for w in self.points.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(LadderError::Table(format!("grid not increasing at T = {}", w[1].t)));
            }
            if !(w[1].phi1 > w[0].phi1) {
                return Err(LadderError::Table(format!("phi1 not increasing at T = {}", w[1].t)));
            }
        }
        for p in &self.points {
            if !(p.dphi1 >= 0.0) {
                return Err(LadderError::Table(format!("negative derivative at T = {}", p.t)));
            }
            if !(p.eq_residual <= 10.0 * self.config.root_tol) {
                return Err(LadderError::Table(format!(
                    "residual {:e} at T = {} exceeds 10·root_tol",
                    p.eq_residual, p.t
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# jacob ladder table\nversion {}\neval_fingerprint {}\nconfig {}\ngrid lo={} hi={} step={}\ninterp {}\nrecords T phi phi1 dphi1 eq_residual\n",
            TABLE_FORMAT_VERSION,
            self.eval_fingerprint,
            self.config.canonical(),
            fmt(self.grid.0),
            fmt(self.grid.1),
            fmt(self.grid.2),
            self.interp.name()
        );
        for p in &self.points {
            s.push_str(&format!(
                "{} {} {} {} {}\n",
                fmt(p.t),
                fmt(p.phi),
                fmt(p.phi1),
                fmt(p.dphi1),
                fmt(p.eq_residual)
            ));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, LadderError> {
        let bad = |m: String| LadderError::Table(m);
        let mut version = None;
        let mut fp = None;
        let mut config = None;
        let mut grid = None;
        let mut interp = None;
        let mut points = Vec::new();
        let mut body = false;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if body {
                let v: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
                let v = v.map_err(|_| bad(format!("line {}: bad record", ln + 1)))?;
                if v.len() != 5 {
                    return Err(bad(format!("line {}: expected 5 fields", ln + 1)));
                }
                points.push(LadderPoint { t: v[0], phi: v[1], phi1: v[2], dphi1: v[3], eq_residual: v[4] });
                continue;
            }
            let (k, rest) = line.split_once(' ').unwrap_or((line, ""));
            match k {
                "version" => version = rest.trim().parse::<u32>().ok(),
                "eval_fingerprint" => fp = Some(rest.trim().to_string()),
                "config" => config = Some(LadderConfig::parse_canonical(rest)?),
                "grid" => {
                    let mut g = [f64::NAN; 3];
                    for kv in rest.split_whitespace() {
                        let (name, v) = kv.split_once('=').ok_or_else(|| bad(format!("grid field {kv}")))?;
                        let v: f64 = v.parse().map_err(|_| bad(format!("grid value {v}")))?;
                        match name {
                            "lo" => g[0] = v,
                            "hi" => g[1] = v,
                            "step" => g[2] = v,
                            _ => return Err(bad(format!("grid field {name}"))),
                        }
                    }
                    grid = Some((g[0], g[1], g[2]));
                }
                "interp" => {
                    interp = match rest.trim() {
                        "fritsch_carlson_hermite" => Some(HermiteRule::FritschCarlson),
                        other => return Err(bad(format!("unknown interpolation rule {other}"))),
                    }
                }
                "records" => body = true,
                _ => return Err(bad(format!("unknown header field {k}"))),
            }
        }
        if version != Some(TABLE_FORMAT_VERSION) {
            return Err(bad(format!("unsupported or missing version {version:?}")));
        }
        let table = LadderTable {
            config: config.ok_or_else(|| bad("missing config".into()))?,
            eval_fingerprint: fp.ok_or_else(|| bad("missing eval_fingerprint".into()))?,
            grid: grid.ok_or_else(|| bad("missing grid".into()))?,
            points,
            interp: interp.ok_or_else(|| bad("missing interp".into()))?,
        };
        if table.points.is_empty() {
            return Err(bad("no records".into()));
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<(), LadderError> {
        let io = |e: std::io::Error| LadderError::Table(format!("{}: {e}", path.display()));
        let mut f = std::fs::File::create(path).map_err(io)?;
        f.write_all(self.to_text().as_bytes()).map_err(io)?;
        f.flush().map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, LadderError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LadderError::Table(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }
}

impl Ladder for LadderTable {
    fn phi1(&self, t: f64) -> Result<f64, LadderError> {
        LadderTable::phi1(self, t)
    }
    fn tilde_z2(&self, t: f64) -> Result<f64, LadderError> {
        self.dphi1(t)
    }
}

/// A table that falls back to solving directly outside its range.
pub struct TableLadder<'a> {
    pub table: &'a LadderTable,
    pub cache: &'a CumulativeCache,
}

impl Ladder for TableLadder<'_> {
    fn phi1(&self, t: f64) -> Result<f64, LadderError> {
        match self.table.phi1(t) {
            Err(LadderError::OutOfRange { .. }) => Ok(solve_phi(t, &self.table.config, self.cache)?.phi1),
            r => r,
        }
    }
    fn tilde_z2(&self, t: f64) -> Result<f64, LadderError> {
        match self.table.dphi1(t) {
            Err(LadderError::OutOfRange { .. }) => Ok(solve_phi(t, &self.table.config, self.cache)?.dphi1),
            r => r,
        }
    }
}

/// Solves the ladder on lo, lo + step, …, hi (the last point snapped to hi when
/// the grid lands within a millionth of a step of it).
pub fn build_table(
    t_lo: f64,
    t_hi: f64,
    step: f64,
    cfg: &LadderConfig,
    cache: &CumulativeCache,
) -> Result<LadderTable, LadderError> {
    cfg.validate()?;
    if !(t_lo >= VALIDITY_FLOOR) {
        return Err(LadderError::BelowFloor(t_lo));
    }
    if !(step > 0.0) || !(t_hi >= t_lo) || !t_hi.is_finite() {
        return Err(LadderError::Config(format!("bad grid lo={t_lo} hi={t_hi} step={step}")));
    }
    let span = (t_hi - t_lo) / step;
    let mut n = span.floor() as usize;
    if span - n as f64 > 1.0 - 1e-6 {
        n += 1;
    }
    let grid: Vec<f64> = (0..=n)
        .map(|i| if i == n && (t_lo + i as f64 * step - t_hi).abs() < 1e-6 * step { t_hi } else { t_lo + i as f64 * step })
        .collect();
    // extend the cache once up front so the workers only read it
    cache.ensure(cfg.kernel().reach(cfg.bracket_hi_factor * t_hi).max(t_hi))?;
    let results: Vec<Result<LadderPoint, LadderError>> =
        grid.par_iter().map(|&t| solve_phi(t, cfg, cache)).collect();
    let mut points = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (t, r) in grid.iter().zip(results) {
        match r {
            Ok(p) => points.push(p),
            Err(e) => failures.push((*t, e.to_string())),
        }
    }
    if !failures.is_empty() {
        return Err(LadderError::Build(failures));
    }
    let table = LadderTable {
        config: *cfg,
        eval_fingerprint: cache.header().eval_fingerprint.clone(),
        grid: (t_lo, t_hi, step),
        points,
        interp: HermiteRule::FritschCarlson,
    };
    table.check_invariants()?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::EvalConfig;

    fn small() -> (CumulativeCache, LadderTable) {
        let cache = CumulativeCache::new(EvalConfig::default(), "test");
        let t = build_table(1000.0, 1100.0, 10.0, &LadderConfig::default(), &cache).unwrap();
        (cache, t)
    }

    #[test]
    fn grid_and_interpolation() {
        let (_, t) = small();
        assert_eq!(t.points.len(), 11);
        for p in &t.points {
            assert_eq!(t.phi1(p.t).unwrap(), p.phi1);
        }
        let mut prev = t.phi1(1000.0).unwrap();
        for i in 1..=400 {
            let v = t.phi1(1000.0 + 0.25 * i as f64).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        // stays between its neighbours
        let v = t.phi1(1015.0).unwrap();
        assert!(v >= t.points[1].phi1 && v <= t.points[2].phi1);
        assert!(matches!(t.phi1(999.0), Err(LadderError::OutOfRange { .. })));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let (_, t) = small();
        let back = LadderTable::from_text(&t.to_text()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), t.to_text());
    }

    #[test]
    fn fallback_outside_range() {
        let (cache, t) = small();
        let l = TableLadder { table: &t, cache: &cache };
        let direct = solve_phi(950.0, &t.config, &cache).unwrap().phi1;
        assert_eq!(l.phi1(950.0).unwrap(), direct);
    }
}
