use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hsc_cli::report::{strip_timings, summarize};
use hsc_cli::{run_sweep, run_trial, ExperimentConfig};

fn hsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsc")).args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(2, |n| n.get())
}

const SBM: &str = r#"
seed = 11
trials = 3

[model]
kind = "sbm"
n = 80
d = 3
k = 2
p = 0.9
q = 0.1
c = 4.0

[algorithm]
kind = "hsclr"
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", &SBM.replace("p = 0.9", "p = 1.9"));
    assert_eq!(hsc(&["sweep", bad.to_str().unwrap()]).status.code(), Some(2));
    let typo = write_config(dir.path(), "typo.toml", &SBM.replace("n = 80", "nn = 80"));
    assert_eq!(hsc(&["sweep", typo.to_str().unwrap()]).status.code(), Some(2));
    let ok = write_config(dir.path(), "ok.toml", SBM);
    let out = hsc(&["sweep", ok.to_str().unwrap(), "--set", "model.q=oops"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(hsc(&["hsc", &path(dir.path(), "missing.hg")]).status.code(), Some(3));
    let garbage = write_config(dir.path(), "garbage.hg", "not a hypergraph\n");
    assert_eq!(hsc(&["hsc", garbage.to_str().unwrap()]).status.code(), Some(3));
    // wrong usage is clap's business
    assert_eq!(hsc(&["hsc"]).status.code(), Some(2));
}

#[test]
fn generate_solve_score_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sbm.toml", &SBM.replace("c = 4.0", "c = 8.0"));
    let prefix = path(dir.path(), "inst");
    assert!(hsc(&["generate", cfg.to_str().unwrap(), "--out", &prefix]).status.success());
    let hg = format!("{prefix}.hg");
    let truth = format!("{prefix}.part");
    for cmd in ["hsc", "hsclr"] {
        let est = path(dir.path(), &format!("{cmd}.part"));
        let out = hsc(&[cmd, &hg, "--k", "2", "--seed", "3", "--out", &est]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let line = String::from_utf8(hsc(&["score", &est, &truth]).stdout).unwrap();
        let fields: Vec<&str> = line.trim().split(',').collect();
        assert_eq!(fields.len(), 3, "{line}");
        let e: f64 = fields[0].parse().unwrap();
        assert!(e <= 0.05, "{cmd}: {line}");
        assert_eq!(fields[2] == "true", e == 0.0);
    }
}

#[test]
fn score_reports_both_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.part", "1 1\n2 1\n3 1\n4 2\n");
    let b = write_config(dir.path(), "b.part", "1 1\n2 1\n3 2\n4 2\n");
    let out = hsc(&["score", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0.25,0.5,false\n");
}

#[test]
fn cbm_refine_repairs_a_given_start() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cbm.toml",
        "seed = 2\n[model]\nkind = \"cbm\"\nn = 80\nd = 3\ntheta = 0.05\nlimit_multiple = 3.0\n[algorithm]\nkind = \"hsclr-ml\"\n",
    );
    let prefix = path(dir.path(), "cbm");
    assert!(hsc(&["generate", cfg.to_str().unwrap(), "--out", &prefix]).status.success());
    let truth = std::fs::read_to_string(format!("{prefix}.part")).unwrap();
    // flip a few labels of the truth
    let noisy: String = truth
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let (node, label) = l.split_once(' ').unwrap();
            let label = match (i % 10, label) {
                (0, "1") => "2",
                (0, _) => "1",
                _ => label,
            };
            format!("{node} {label}\n")
        })
        .collect();
    let init = write_config(dir.path(), "init.part", &noisy);
    let est = path(dir.path(), "est.part");
    let hg = format!("{prefix}.hg");
    let out = hsc(&["cbm-refine", &hg, "--init", init.to_str().unwrap(), "--out", &est]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let line = String::from_utf8(hsc(&["score", &est, &format!("{prefix}.part")]).stdout).unwrap();
    assert!(line.ends_with(",true\n"), "{line}");
}

#[test]
fn sweep_rows_cover_grid_times_trials() {
    let text = format!("{SBM}\n[sweep]\nc = [2.0, 4.0]\nn = [40, 60, 80]\n");
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    let rows = run_sweep(&cfg, jobs()).unwrap();
    assert_eq!(rows.len(), 6 * 3);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.trial, i % 3);
        assert_eq!(r.exact(), r.error_fraction() == Some(0.0));
    }

    let dir = tempfile::tempdir().unwrap();
    let file = write_config(dir.path(), "grid.toml", &text);
    let csv_path = path(dir.path(), "rows.csv");
    let summary_path = path(dir.path(), "summary.csv");
    let out = hsc(&["sweep", file.to_str().unwrap(), "--jobs", "4", "--out", &csv_path, "--summary", &summary_path]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with(&format!("# hsc 0.1.0 csv-format=1 config-sha256={}", cfg.hash())));
    assert_eq!(csv.lines().count(), 2 + 18);
    assert_eq!(std::fs::read_to_string(&summary_path).unwrap().lines().count(), 2 + 6);
}

#[test]
fn exact_recovery_rate_grows_with_density() {
    let text = String::from(
        "seed = 8\ntrials = 50\n[model]\nkind = \"sbm\"\nn = 120\nd = 3\nk = 2\np = 0.9\nq = 0.1\nc = 1.0\n[algorithm]\nkind = \"hsclr\"\n[sweep]\nc = [0.5, 1.0, 2.0, 4.0, 8.0]\n"
    );
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    let summary = summarize(&run_sweep(&cfg, jobs()).unwrap());
    let rates: Vec<f64> = summary.iter().map(|s| s.exact_rate).collect();
    assert!(summary.iter().all(|s| s.trials == 50 && s.failed == 0));
    assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{rates:?}");
    assert!(rates[0] < rates[4], "{rates:?}");
}

#[test]
fn build_time_grows_with_n() {
    let median_build = |n: usize| {
        let cfg = ExperimentConfig::from_toml_with(
            SBM,
            &[format!("model.n={n}"), "model.c=".to_string() + "20.0"],
        )
        .unwrap();
        let mut t: Vec<f64> = (0..7)
            .map(|i| run_trial(&cfg, &[], i).timings.build.as_secs_f64())
            .collect();
        t.sort_by(f64::total_cmp);
        t[3]
    };
    let (small, large) = (median_build(200), median_build(400));
    assert!(small > 0.0);
    assert!(large >= 2.0 * small, "build {small}s at n=200, {large}s at n=400");
}

#[test]
fn noiseless_subspaces_are_separated() {
    let out = hsc(&[
        "subspace", "--k", "2", "--m", "1", "--ell", "3", "--points-per-cluster", "50",
        "--sigma", "0", "--trials", "20", "--seed", "5", "--jobs", "4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let errors: Vec<f64> = csv
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 20);
    let good = errors.iter().filter(|&&e| e <= 0.01).count();
    assert!(good >= 18, "{errors:?}");
}

#[test]
fn empty_sketch_is_flagged_in_its_row() {
    let out = hsc(&[
        "subspace", "--k", "2", "--m", "1", "--ell", "3", "--points-per-cluster", "20",
        "--sigma", "0", "--budget", "0", "--trials", "2",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains(",false,error: ")), "{csv}");
}

#[test]
fn subspace_grid_has_one_row_per_cell_and_trial() {
    let run = |jobs: &str| {
        let out = hsc(&[
            "subspace", "--k", "2", "--m", "1", "--ell", "4", "--points-per-cluster", "20,30",
            "--sigma", "0,0.05,0.1", "--trials", "2", "--seed", "1", "--jobs", jobs,
        ]);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let csv = run("1");
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[1].starts_with("points_per_cluster,sigma,trial,seed,"));
    assert_eq!(lines.len(), 2 + 2 * 3 * 2);
    assert_eq!(strip_timings(&csv), strip_timings(&run("3")));
}
