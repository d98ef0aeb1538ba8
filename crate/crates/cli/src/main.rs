//! `jacob`: signal tables, Z² caches, ladder tables and verification reports.
//!
//! Exit status is 0 on success, 1 when an asserted check or a computation
//! fails, 2 on bad usage, bad parameters or mixed-provenance inputs.

mod config;
mod manifest;
mod plot;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use jacob_core::ladder::{build_table, Ladder, LadderConfig, LadderError, LadderTable, LadderWindow, VALIDITY_FLOOR};
use jacob_core::quad::z2_cumulative;
use jacob_core::verify::{
    run_grid, run_one, standard_grid, window_for, write_outcomes_tsv, Claim, FunctionKind, GridOutcome, GridSpec,
    Regime, TestFunction, VerificationParams, VerifyError, WindowChoice,
};
use jacob_core::{zeta, CumulativeCache, QuadError};
use manifest::Manifest;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const DEFAULT_CACHE_DIR: &str = "jacob-cache";

#[derive(Parser, Debug)]
#[command(name = "jacob", version, about = "Jacob's ladders for the Riemann zeta function")]
struct Cli {
    /// TOML run configuration; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// cache directory (env JACOB_CACHE_DIR)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// worker threads (env JACOB_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate t, Z, theta, |zeta|^2 and S on [t-lo, t-hi) with a fixed step
    ZetaEval(ZetaEvalArgs),
    /// Extend the cumulative Z^2 cache up to t-max
    CacheBuild(CacheBuildArgs),
    /// Solve the ladder on a T-grid and save the table
    LadderBuild(LadderBuildArgs),
    /// Check a claim at one parameter point or over a grid
    Verify(VerifyArgs),
    /// Concatenate report files
    ReportMerge(MergeArgs),
}

#[derive(Args, Debug)]
struct ZetaEvalArgs {
    #[arg(long, allow_negative_numbers = true)]
    t_lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_hi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    step: Option<f64>,
    /// output file; standard output when absent
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CacheBuildArgs {
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Args, Debug)]
struct LadderBuildArgs {
    #[arg(long, allow_negative_numbers = true)]
    t_lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_hi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    step: Option<f64>,
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// exact, theorem, geometry, corollary or residual
    #[arg(long)]
    claim: Option<String>,
    #[arg(long = "T")]
    t: Option<f64>,
    /// a length, T^e or T/ln^2T
    #[arg(long = "U")]
    u: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    /// test function, e.g. constant_one, monomial:1, shifted_square:T, abs_zeta4, arg_zeta_pow:2
    #[arg(long = "F")]
    f: Option<String>,
    /// microscopic, macroscopic or fourth_moment
    #[arg(long)]
    regime: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// grid file (TOML), or `standard`
    #[arg(long)]
    grid: Option<String>,
    /// ladder table to cross-check against
    #[arg(long)]
    table: Option<PathBuf>,
    /// JSON report; defaults to <claim>_report.json
    #[arg(long)]
    report: Option<PathBuf>,
    /// flat table; defaults to the report path with a .tsv extension
    #[arg(long)]
    tsv: Option<PathBuf>,
    /// directory for SVG trend plots
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MergeArgs {
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    tsv: Option<PathBuf>,
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

/// Why a command stopped.
#[derive(Debug)]
enum Stop {
    /// usage, parameters, provenance: exit 2
    Usage(String),
    /// a computation or an output failed: exit 1
    Failed(String),
}

type Res<T> = Result<T, Stop>;

fn usage(m: impl std::fmt::Display) -> Stop {
    Stop::Usage(m.to_string())
}

fn failed(m: impl std::fmt::Display) -> Stop {
    Stop::Failed(m.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Stop::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Stop::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    cache_dir: PathBuf,
}

fn env_value(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|s| !s.trim().is_empty())
}

fn run(cli: Cli) -> Res<bool> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(usage)?,
        None => RunConfig::default(),
    };
    cfg.validate().map_err(usage)?;
    let env_threads = match env_value("JACOB_THREADS") {
        Some(s) => Some(s.trim().parse::<usize>().map_err(|_| usage(format!("JACOB_THREADS={s:?} is not a count")))?),
        None => None,
    };
    if let Some(n) = cli.threads.or(env_threads).or(cfg.threads) {
        if n == 0 {
            return Err(usage("threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(failed)?;
    }
    let cache_dir = cli
        .cache_dir
        .or_else(|| env_value("JACOB_CACHE_DIR").map(PathBuf::from))
        .or_else(|| cfg.cache_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
    let ctx = Ctx { cfg, cache_dir };
    match cli.command {
        Command::ZetaEval(a) => zeta_eval(&ctx, a),
        Command::CacheBuild(a) => cache_build(&ctx, a),
        Command::LadderBuild(a) => ladder_build(&ctx, a),
        Command::Verify(a) => verify(&ctx, a),
        Command::ReportMerge(a) => report_merge(a),
    }
}

impl Ctx {
    fn ladder(&self) -> &LadderConfig {
        &self.cfg.ladder
    }

    fn open_cache(&self) -> Res<(CumulativeCache, Manifest)> {
        let dir = &self.cache_dir;
        std::fs::create_dir_all(dir).map_err(|e| failed(format!("{}: {e}", dir.display())))?;
        let manifest = Manifest::open(dir, &self.cfg.eval).map_err(usage)?;
        let mu = format!("mu(y) = {} y ln y", self.ladder().mu_multiplier);
        let cache = CumulativeCache::open(dir, self.cfg.eval, &mu).map_err(|e| match e {
            QuadError::Cache(m) => usage(format!("mixed provenance: {m}")),
            e => failed(e),
        })?;
        Ok((cache, manifest))
    }
}

fn need(v: Option<f64>, flag: &str) -> Res<f64> {
    v.ok_or_else(|| usage(format!("--{flag} is required (flag or config file)")))
}

/// lo, lo + step, … strictly below hi, up to rounding.
fn sample_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step - 1e-9).ceil().max(0.0) as usize;
    (0..count).map(|i| lo + i as f64 * step).collect()
}

fn open_output(path: Option<&Path>) -> Res<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(d) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(d).map_err(|e| failed(format!("{}: {e}", d.display())))?;
            }
            let f = std::fs::File::create(p).map_err(|e| failed(format!("{}: {e}", p.display())))?;
            Box::new(std::io::BufWriter::new(f))
        }
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    })
}

fn zeta_eval(ctx: &Ctx, a: ZetaEvalArgs) -> Res<bool> {
    let s = &ctx.cfg.zeta_eval;
    let lo = need(a.t_lo.or(s.t_lo), "t-lo")?;
    let hi = need(a.t_hi.or(s.t_hi), "t-hi")?;
    let step = need(a.step.or(s.step), "step")?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(usage(format!("--step must be positive, got {step}")));
    }
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(usage(format!("need 0 < t-lo <= t-hi, got [{lo}, {hi}]")));
    }
    let eval = ctx.cfg.eval;
    let output = a.output.or_else(|| s.output.clone());
    let mut w = open_output(output.as_deref())?;
    let io = |e: std::io::Error| failed(format!("writing rows: {e}"));
    writeln!(w, "t\tZ\ttheta\tabs2\tS").map_err(io)?;
    for t in sample_grid(lo, hi, step) {
        let z = zeta::hardy_z(t, &eval).map_err(usage)?;
        // S is undefined at a zero and ill-conditioned next to one
        let s = match zeta::s_of_t(t, &eval) {
            Ok(v) => v,
            Err(zeta::ZetaError::NearZero { .. }) => f64::NAN,
            Err(e) => return Err(failed(e)),
        };
        writeln!(w, "{t}\t{z:.15e}\t{:.15e}\t{:.15e}\t{s:.12}", zeta::theta(t), z * z).map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(true)
}

fn cache_build(ctx: &Ctx, a: CacheBuildArgs) -> Res<bool> {
    let t_max = need(a.t_max.or(ctx.cfg.cache_build.t_max), "t-max")?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(usage(format!("--t-max must be positive, got {t_max}")));
    }
    let (cache, mut manifest) = ctx.open_cache()?;
    let before = cache.t_max();
    let started = std::time::Instant::now();
    let total = z2_cumulative(t_max, &cache, &ctx.cfg.quad).map_err(failed)?;
    manifest.note_ladder(ctx.ladder());
    manifest.save(&ctx.cache_dir).map_err(failed)?;
    println!(
        "cache {}: checkpoints to T = {} (was {before}), I({t_max}) = {total:.12e}, {:.1} s",
        ctx.cache_dir.display(),
        cache.t_max(),
        started.elapsed().as_secs_f64()
    );
    Ok(true)
}

fn ladder_build(ctx: &Ctx, a: LadderBuildArgs) -> Res<bool> {
    let s = &ctx.cfg.ladder_build;
    let lo = need(a.t_lo.or(s.t_lo), "t-lo")?;
    let hi = need(a.t_hi.or(s.t_hi), "t-hi")?;
    let step = need(a.step.or(s.step), "step")?;
    let path = a.table.or_else(|| s.table.clone()).ok_or_else(|| usage("--table is required"))?;
    if !(lo >= VALIDITY_FLOOR) {
        return Err(usage(format!("T_lo = {lo} is below the validity floor {VALIDITY_FLOOR}")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(usage(format!("--step must be positive, got {step}")));
    }
    if !(hi >= lo) || !hi.is_finite() {
        return Err(usage(format!("need t-lo <= t-hi, got [{lo}, {hi}]")));
    }
    let (cache, mut manifest) = ctx.open_cache()?;
    let table = build_table(lo, hi, step, ctx.ladder(), &cache).map_err(|e| match e {
        LadderError::Config(_) | LadderError::BelowFloor(_) => usage(e),
        e => failed(format!("ladder solve failed: {e}")),
    })?;
    if let Some(d) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(d).map_err(|e| failed(format!("{}: {e}", d.display())))?;
    }
    table.save(&path).map_err(failed)?;
    let key = std::fs::canonicalize(&path).unwrap_or(path.clone());
    manifest.note_table(&key, &table);
    manifest.save(&ctx.cache_dir).map_err(failed)?;
    let limit = 10.0 * ctx.ladder().root_tol;
    let res = table.max_residual();
    println!(
        "table {}: {} points on [{}, {}], max residual {res:.3e} (limit {limit:.1e})",
        path.display(),
        table.points.len(),
        table.range().0,
        table.range().1
    );
    Ok(res <= limit)
}

fn parse_regime(s: &str) -> Res<Regime> {
    match s {
        "microscopic" => Ok(Regime::Microscopic),
        "macroscopic" => Ok(Regime::Macroscopic),
        "fourth_moment" => Ok(Regime::FourthMoment),
        _ => Err(usage(format!("unknown regime {s:?} (expected microscopic, macroscopic or fourth_moment)"))),
    }
}

/// The single parameter point described by flags and the [verify] section.
fn single_params(claim: Claim, v: &config::VerifySection) -> Res<VerificationParams> {
    let t = need(v.t, "T")?;
    let epsilon = v.epsilon.unwrap_or(0.05);
    let fs = match (&v.f, claim, v.l) {
        (Some(f), _, _) => f.clone(),
        (None, Claim::Corollary, Some(l)) => format!("arg_zeta_pow:{}", 2 * l),
        (None, Claim::Corollary, None) => "arg_zeta_pow:2".into(),
        (None, _, _) => "constant_one".into(),
    };
    let f = TestFunction::parse(&fs, t).map_err(usage)?;
    let fourth = claim == Claim::Corollary && f.kind == FunctionKind::AbsZeta4;
    let u = match &v.u {
        Some(s) => s.parse::<WindowChoice>().map_err(usage)?.length(t),
        None if fourth => t.powf(7.0 / 8.0 + epsilon),
        None => WindowChoice::LogSquared.length(t),
    };
    let regime = match &v.regime {
        Some(r) => parse_regime(r)?,
        None if fourth => Regime::FourthMoment,
        None => Regime::classify(t, u, epsilon),
    };
    let l = v.l.or(f.moment_index()).unwrap_or(1);
    let p = VerificationParams { t, u, n: v.n.unwrap_or(0), l, f, regime, epsilon };
    p.validate().map_err(usage)?;
    Ok(p)
}

fn load_grid(g: &str) -> Res<GridSpec> {
    if g == "standard" {
        return Ok(standard_grid());
    }
    let text = std::fs::read_to_string(g).map_err(|e| usage(format!("{g}: {e}")))?;
    toml::from_str(&text).map_err(|e| usage(format!("{g}: {e}")))
}

/// Largest relative gap between the table's nodes and the window's φ₁ where
/// both are defined, with the number of nodes compared.
fn table_agreement(table: &LadderTable, windows: &[(f64, LadderWindow)]) -> Result<(f64, usize), LadderError> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, w) in windows {
        let (lo, hi) = w.range();
        let inside: Vec<_> = table.points.iter().filter(|p| p.t >= lo && p.t <= hi).collect();
        let stride = (inside.len() / 64).max(1);
        for p in inside.iter().step_by(stride) {
            let d = (w.phi1(p.t)? - p.phi1).abs() / p.phi1;
            worst = worst.max(d);
            count += 1;
        }
    }
    Ok((worst, count))
}

fn outcome_line(o: &GridOutcome) -> String {
    let verdict = |pass: bool, asserted: bool| match (pass, asserted) {
        (true, true) => "pass",
        (false, true) => "FAIL",
        (_, false) => "report",
    };
    match o {
        GridOutcome::Report(r) => {
            let p = &r.params;
            let ratio = r.ratio.map(|x| format!("{x:.9}")).unwrap_or_else(|| "none".into());
            let tag = if r.degenerate { " degenerate" } else { "" };
            format!(
                "{} T={} U={:.6} n={} l={} F={} ratio={ratio} {}{tag}",
                r.claim_id.as_str(),
                p.t,
                p.u,
                p.n,
                p.l,
                p.f.label(),
                verdict(r.pass, r.asserted)
            )
        }
        GridOutcome::Geometry(g) => {
            let p = &g.params;
            let failed: Vec<String> = g
                .checks
                .iter()
                .filter(|c| c.asserted && !c.pass)
                .map(|c| format!("{}:{}", c.name, c.k))
                .collect();
            let asserted = g.checks.iter().filter(|c| c.asserted).count();
            let state = if failed.is_empty() { "pass".to_string() } else { format!("FAIL {}", failed.join(",")) };
            format!("geometry T={} U={:.6} n={} {asserted} asserted checks {state}", p.t, p.u, p.n)
        }
        GridOutcome::Skipped { label, reason } => format!("skipped {label}: {reason}"),
        GridOutcome::Failed { label, reason } => format!("FAILED {label}: {reason}"),
    }
}

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: usize,
    report_only: usize,
    skipped: usize,
}

impl Tally {
    fn of(outcomes: &[GridOutcome]) -> Self {
        let mut t = Tally::default();
        for o in outcomes {
            match o {
                GridOutcome::Report(r) if !r.asserted => t.report_only += 1,
                GridOutcome::Skipped { .. } => t.skipped += 1,
                o if o.ok() => t.passed += 1,
                _ => t.failed += 1,
            }
        }
        t
    }
}

fn write_reports(outcomes: &[GridOutcome], report: &Path, tsv: &Path) -> Res<()> {
    let mut w = open_output(Some(report))?;
    serde_json::to_writer_pretty(&mut w, outcomes).map_err(failed)?;
    writeln!(w).and_then(|_| w.flush()).map_err(failed)?;
    let mut w = open_output(Some(tsv))?;
    write_outcomes_tsv(outcomes, &mut w).map_err(failed)?;
    w.flush().map_err(failed)?;
    Ok(())
}

fn verify(ctx: &Ctx, a: VerifyArgs) -> Res<bool> {
    let c = &ctx.cfg.verify;
    let v = config::VerifySection {
        claim: a.claim.or_else(|| c.claim.clone()),
        t: a.t.or(c.t),
        u: a.u.or_else(|| c.u.clone()),
        n: a.n.or(c.n),
        l: a.l.or(c.l),
        f: a.f.or_else(|| c.f.clone()),
        regime: a.regime.or_else(|| c.regime.clone()),
        epsilon: a.epsilon.or(c.epsilon),
        grid: a.grid.or_else(|| c.grid.clone()),
        table: a.table.or_else(|| c.table.clone()),
        report: a.report.or_else(|| c.report.clone()),
        tsv: a.tsv.or_else(|| c.tsv.clone()),
        plot: a.plot.or_else(|| c.plot.clone()),
    };
    let claim_name = v.claim.clone().ok_or_else(|| usage("--claim is required"))?;
    let claim: Claim = claim_name.parse().map_err(usage)?;
    let grid = match &v.grid {
        Some(g) => Some(load_grid(g)?),
        None => None,
    };
    let single = match &grid {
        Some(_) => None,
        None => Some(single_params(claim, &v)?),
    };
    let report = v.report.clone().unwrap_or_else(|| PathBuf::from(format!("{claim_name}_report.json")));
    let tsv = v.tsv.clone().unwrap_or_else(|| report.with_extension("tsv"));

    let table = match &v.table {
        Some(p) => {
            let t = LadderTable::load(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Some((p.clone(), t))
        }
        None => None,
    };
    let (cache, mut manifest) = ctx.open_cache()?;
    if let Some((p, t)) = &table {
        if t.eval_fingerprint != cache.header().eval_fingerprint {
            return Err(usage(format!(
                "mixed provenance: {} was built with eval fingerprint {}, the cache has {}",
                p.display(),
                t.eval_fingerprint,
                cache.header().eval_fingerprint
            )));
        }
        if t.config != *ctx.ladder() {
            return Err(usage(format!(
                "mixed provenance: {} was built with ladder fingerprint {}, this run uses {}",
                p.display(),
                t.config.fingerprint(),
                ctx.ladder().fingerprint()
            )));
        }
        let key = std::fs::canonicalize(p).unwrap_or(p.clone());
        manifest.check_table(&key, t).map_err(usage)?;
    }
    manifest.note_ladder(ctx.ladder());
    manifest.save(&ctx.cache_dir).map_err(failed)?;

    let progress = |m: &str| eprintln!("{m}");
    let (outcomes, windows) = match (&grid, &single) {
        (Some(g), _) => {
            let out = run_grid(claim, g, ctx.ladder(), &cache, progress).map_err(|e| {
                if e.is_validation() {
                    usage(e)
                } else {
                    failed(e)
                }
            })?;
            let valid: Vec<VerificationParams> = g.expand(claim).into_iter().filter_map(Result::ok).collect();
            let windows = if table.is_some() { window_for(&valid, ctx.ladder(), &cache).map_err(failed)? } else { Vec::new() };
            (out, windows)
        }
        (None, Some(p)) => {
            let windows = window_for(std::slice::from_ref(p), ctx.ladder(), &cache).map_err(failed)?;
            let outcome = match run_one(claim, p, &windows[0].1) {
                Ok(o) => o,
                Err(e) if e.is_validation() => return Err(usage(e)),
                Err(e @ VerifyError::Ladder(_)) | Err(e @ VerifyError::Quad(_)) => GridOutcome::Failed {
                    label: format!("T={} U={} n={} F={}", p.t, p.u, p.n, p.f.label()),
                    reason: e.to_string(),
                },
                Err(e) => return Err(failed(e)),
            };
            (vec![outcome], windows)
        }
        (None, None) => unreachable!("either a grid or a single point"),
    };

    let mut table_ok = true;
    if let Some((p, t)) = &table {
        let (worst, count) = table_agreement(t, &windows).map_err(failed)?;
        table_ok = worst <= 1e-9;
        println!("table {}: {count} nodes compared, max relative phi1 difference {worst:.3e}", p.display());
    }

    let total = outcomes.len();
    for (i, o) in outcomes.iter().enumerate() {
        println!("[{:>w$}/{total}] {}", i + 1, outcome_line(o), w = total.to_string().len());
    }
    write_reports(&outcomes, &report, &tsv)?;
    let mut plots = Vec::new();
    if let Some(dir) = &v.plot {
        let choices = grid.as_ref().map(|g| g.u.clone()).unwrap_or_default();
        plots = plot::write_plots(dir, &outcomes, &choices).map_err(|e| failed(format!("{}: {e}", dir.display())))?;
    }

    let tally = Tally::of(&outcomes);
    let ok = tally.failed == 0 && table_ok;
    println!("summary: claim {claim_name}");
    println!(
        "  {} passed, {} failed, {} report-only, {} skipped",
        tally.passed, tally.failed, tally.report_only, tally.skipped
    );
    println!("  report {}", report.display());
    println!("  table {}", tsv.display());
    for p in &plots {
        println!("  plot {}", p.display());
    }
    println!("  status {}", if ok { "ok" } else { "FAILED" });
    Ok(ok)
}

fn report_merge(a: MergeArgs) -> Res<bool> {
    let mut merged: Vec<GridOutcome> = Vec::new();
    for p in &a.inputs {
        let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        let part: Vec<GridOutcome> =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: not a report file: {e}", p.display())))?;
        for o in part {
            if !merged.contains(&o) {
                merged.push(o);
            }
        }
    }
    let tsv = a.tsv.unwrap_or_else(|| a.output.with_extension("tsv"));
    write_reports(&merged, &a.output, &tsv)?;
    let tally = Tally::of(&merged);
    println!(
        "merged {} records from {} files: {} passed, {} failed, {} report-only, {} skipped",
        merged.len(),
        a.inputs.len(),
        tally.passed,
        tally.failed,
        tally.report_only,
        tally.skipped
    );
    Ok(tally.failed == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_half_open() {
        assert!(sample_grid(14.0, 14.0, 0.1).is_empty());
        assert_eq!(sample_grid(14.0, 15.0, 0.25), vec![14.0, 14.25, 14.5, 14.75]);
        assert_eq!(sample_grid(14.0, 15.0, 0.001).len(), 1000);
    }

    #[test]
    fn corollary_defaults_follow_l() {
        let v = config::VerifySection { t: Some(1e6), l: Some(3), u: Some("T^0.6".into()), ..Default::default() };
        let p = single_params(Claim::Corollary, &v).unwrap();
        assert_eq!(p.f, TestFunction::arg_zeta_pow(6));
        assert_eq!(p.l, 3);
        let v = config::VerifySection { t: Some(1e6), f: Some("abs_zeta4".into()), ..Default::default() };
        let p = single_params(Claim::Corollary, &v).unwrap();
        assert_eq!(p.regime, Regime::FourthMoment);
        assert!((p.u / 1e6f64.powf(0.925) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
