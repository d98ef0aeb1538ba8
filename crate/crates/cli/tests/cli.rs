use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn jacob(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacob"))
        .current_dir(dir)
        .env_remove("JACOB_CACHE_DIR")
        .env_remove("JACOB_THREADS")
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .args(args)
        .output()
        .expect("run jacob")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("config")
}

#[test]
fn zeta_eval_brackets_the_first_zero() {
    let d = tempfile::tempdir().unwrap();
    let o = jacob(d.path(), &["zeta-eval", "--t-lo", "14", "--t-hi", "15", "--step", "0.001", "--output", "z.tsv"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let body = std::fs::read_to_string(d.path().join("z.tsv")).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("t\tZ\ttheta\tabs2\tS"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split('\t').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 1000);
    let changes: Vec<f64> = rows.windows(2).filter(|w| w[0][1] * w[1][1] < 0.0).map(|w| w[0][0]).collect();
    assert_eq!(changes.len(), 1);
    assert!((changes[0] - 14.134).abs() < 1e-9, "{changes:?}");
}

#[test]
fn zeta_eval_edge_cases() {
    let d = tempfile::tempdir().unwrap();
    let o = jacob(d.path(), &["zeta-eval", "--t-lo", "20", "--t-hi", "20", "--step", "0.1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(text(&o.stdout), "t\tZ\ttheta\tabs2\tS\n");
    for step in ["0", "-0.5"] {
        let o = jacob(d.path(), &["zeta-eval", "--t-lo", "14", "--t-hi", "15", "--step", step]);
        assert_eq!(code(&o), 2);
        assert!(text(&o.stderr).contains("step"), "{}", text(&o.stderr));
    }
    let o = jacob(d.path(), &["zeta-eval", "--t-lo", "-3", "--t-hi", "15", "--step", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn ladder_build_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let args = ["--cache-dir", "c", "ladder-build", "--t-lo", "1000", "--t-hi", "1100", "--step", "10", "--table", "t.txt"];
    let o = jacob(d.path(), &args);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let out = text(&o.stdout);
    assert!(out.contains("11 points"), "{out}");
    let res: f64 = out.split("max residual ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(res <= 1e-9);
    let first = std::fs::read(d.path().join("t.txt")).unwrap();
    let manifest = std::fs::read(d.path().join("c/manifest.json")).unwrap();
    assert_eq!(code(&jacob(d.path(), &args)), 0);
    assert_eq!(std::fs::read(d.path().join("t.txt")).unwrap(), first);
    assert_eq!(std::fs::read(d.path().join("c/manifest.json")).unwrap(), manifest);

    let o = jacob(d.path(), &["--cache-dir", "c", "ladder-build", "--t-lo", "99", "--t-hi", "200", "--step", "10", "--table", "u.txt"]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("validity floor"));
}

fn reports(path: &Path) -> Vec<Value> {
    serde_json::from_str::<Value>(&std::fs::read_to_string(path).unwrap()).unwrap().as_array().unwrap().clone()
}

#[test]
fn exact_grid_passes_with_reports_and_plots() {
    let d = tempfile::tempdir().unwrap();
    let grid = config_dir().join("exact_grid.toml");
    let args = [
        "--cache-dir", "c", "verify", "--claim", "exact", "--grid", grid.to_str().unwrap(), "--report", "r/exact.json",
        "--plot", "r/plots",
    ];
    let o = jacob(d.path(), &args);
    assert_eq!(code(&o), 0, "{}\n{}", text(&o.stdout), text(&o.stderr));
    let rs = reports(&d.path().join("r/exact.json"));
    assert_eq!(rs.len(), 18);
    for r in &rs {
        assert_eq!(r["outcome"], "report");
        assert_eq!(r["claim_id"], "exact_identity");
        let ratio = r["ratio"].as_f64().unwrap();
        let err = r["err_bound"].as_f64().unwrap() / r["rhs"].as_f64().unwrap();
        assert!((ratio - 1.0).abs() <= 1e-5 + err, "{r}");
    }
    let tsv = std::fs::read_to_string(d.path().join("r/exact.tsv")).unwrap();
    assert!(tsv.starts_with("claim\tT\tU\tn\tl\tF\tregime\tlhs\trhs\tratio"));
    assert_eq!(tsv.lines().count(), 19);
    let svg = std::fs::read_to_string(d.path().join("r/plots/exact_identity.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    let stdout = text(&o.stdout);
    assert_eq!(stdout.matches("summary:").count(), 1);
    let lines: Vec<&str> = stdout.lines().filter(|l| l.starts_with('[')).collect();
    assert!(lines[0].starts_with("[ 1/18]") && lines[17].starts_with("[18/18]"));

    // a second run reproduces every record except the timings
    assert_eq!(code(&jacob(d.path(), &[&args[..8], &["r/again.json"]].concat())), 0);
    let strip = |mut v: Vec<Value>| {
        for r in &mut v {
            r["wall_time_s"] = Value::Null;
        }
        v
    };
    assert_eq!(strip(rs), strip(reports(&d.path().join("r/again.json"))));
}

#[test]
fn corollary_outside_its_window_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let o = jacob(d.path(), &["--cache-dir", "c", "verify", "--claim", "corollary", "--T", "1e5", "--l", "3", "--U", "T^0.4"]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("regime violation"), "{}", text(&o.stderr));
    let o = jacob(d.path(), &["--cache-dir", "c", "verify", "--claim", "proof"]);
    assert_eq!(code(&o), 2);
    let o = jacob(d.path(), &["--cache-dir", "c", "verify", "--claim", "exact", "--T", "1e4", "--U", "T^0.9"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn geometry_lists_every_bound() {
    let d = tempfile::tempdir().unwrap();
    let o = jacob(d.path(), &["--cache-dir", "c", "verify", "--claim", "geometry", "--T", "1e4", "--n", "2", "--report", "g.json"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let rs = reports(&d.path().join("g.json"));
    assert_eq!(rs[0]["outcome"], "geometry");
    let checks = rs[0]["checks"].as_array().unwrap();
    for (name, ks) in [("length_bound", 1..=3), ("gap_bound", 0..=2)] {
        for k in ks {
            let c = checks.iter().find(|c| c["name"] == name && c["k"] == k).unwrap();
            assert_eq!(c["pass"], true);
            assert_eq!(c["asserted"], true);
        }
    }
    let tsv = std::fs::read_to_string(d.path().join("g.tsv")).unwrap();
    assert!(tsv.contains("geometry:gap_bound:0\t"));
}

#[test]
fn mixed_provenance_is_refused() {
    let d = tempfile::tempdir().unwrap();
    let build = ["--cache-dir", "c", "ladder-build", "--t-lo", "1000", "--t-hi", "1050", "--step", "10", "--table", "t.txt"];
    assert_eq!(code(&jacob(d.path(), &build)), 0);
    std::fs::write(d.path().join("other.toml"), "[eval]\narg_step = 0.01\n").unwrap();
    let o = jacob(d.path(), &[&["--config", "other.toml"], &build[..]].concat());
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("mixed provenance"), "{}", text(&o.stderr));

    std::fs::write(d.path().join("ladder.toml"), "[ladder]\neuler_c = 0.5\n").unwrap();
    let o = jacob(
        d.path(),
        &["--config", "ladder.toml", "--cache-dir", "c", "verify", "--claim", "exact", "--T", "1000", "--table", "t.txt"],
    );
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("ladder fingerprint"), "{}", text(&o.stderr));

    let o = jacob(d.path(), &["--cache-dir", "c", "verify", "--claim", "exact", "--T", "1040", "--table", "t.txt"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert!(text(&o.stdout).contains("nodes compared"));
}

#[test]
fn config_file_and_environment_stand_in_for_flags() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(
        d.path().join("run.toml"),
        "threads = 1\n[verify]\nclaim = \"theorem\"\nT = 3000.0\nn = 1\nreport = \"out/theorem.json\"\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_jacob"))
        .current_dir(d.path())
        .env("JACOB_CACHE_DIR", d.path().join("envcache"))
        .args(["--config", "run.toml", "verify"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert!(d.path().join("envcache/manifest.json").exists());
    let rs = reports(&d.path().join("out/theorem.json"));
    assert_eq!(rs[0]["claim_id"], "main_theorem");
    assert_eq!(rs[0]["params"]["n"], 1);
}

#[test]
fn merge_keeps_failures_visible() {
    let d = tempfile::tempdir().unwrap();
    let a = ["--cache-dir", "c", "verify", "--claim", "theorem", "--T", "3000", "--report", "a.json"];
    assert_eq!(code(&jacob(d.path(), &a)), 0);
    let failed = r#"[{"outcome":"failed","label":"T=1 U=1 n=0 F=constant_one","reason":"made up"}]"#;
    std::fs::write(d.path().join("b.json"), failed).unwrap();
    let o = jacob(d.path(), &["report-merge", "--output", "m.json", "a.json", "a.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(reports(&d.path().join("m.json")).len(), 1);
    let o = jacob(d.path(), &["report-merge", "--output", "m.json", "a.json", "b.json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(reports(&d.path().join("m.json")).len(), 2);
    assert!(std::fs::read_to_string(d.path().join("m.tsv")).unwrap().contains("# failed"));
    let o = jacob(d.path(), &["report-merge", "--output", "m.json", "missing.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn shipped_grids_parse() {
    use jacob_core::verify::{standard_grid, GridSpec};
    let read = |f: &str| -> GridSpec { toml::from_str(&std::fs::read_to_string(config_dir().join(f)).unwrap()).unwrap() };
    assert_eq!(read("standard_grid.toml"), standard_grid());
    assert_eq!(read("exact_grid.toml").t, vec![3000.0, 10000.0]);
}
