//! CSV output for trial rows and per-grid-point summaries.

use std::fmt::Write as _;

use crate::experiment::TrialReport;

/// Version of the CSV column layout.
pub const CSV_FORMAT: u32 = 1;

pub const TIMING_COLUMNS: [&str; 4] = ["build_s", "eigen_s", "kmeans_s", "refine_s"];

fn clean(msg: &str) -> String {
    msg.replace([',', '\n', '\r'], ";")
}

/// Header comment naming the tool version, CSV layout and config hash.
pub fn header_comment(config_hash: &str) -> String {
    format!(
        "# hsc {} csv-format={CSV_FORMAT} config-sha256={config_hash}\n",
        env!("CARGO_PKG_VERSION")
    )
}

/// Column names; the grid axes come first and the timings last.
pub fn columns(axes: &[String]) -> String {
    let mut cols: Vec<&str> = axes.iter().map(String::as_str).collect();
    cols.extend([
        "trial",
        "seed",
        "error_fraction",
        "worst_cluster_error",
        "exact",
        "status",
    ]);
    cols.extend(TIMING_COLUMNS);
    cols.join(",")
}

pub fn row(r: &TrialReport) -> String {
    let mut out = String::new();
    for (_, v) in &r.point {
        let _ = write!(out, "{v},");
    }
    let _ = write!(out, "{},{},", r.trial, r.seed);
    match &r.outcome {
        Ok(s) => {
            let _ = write!(
                out,
                "{},{},{},ok,",
                s.error_fraction,
                s.worst_cluster_error,
                s.exact()
            );
        }
        Err(m) => {
            let _ = write!(out, ",,false,error: {},", clean(m));
        }
    }
    let t = &r.timings;
    let secs = [t.build, t.eigen, t.kmeans, t.refine].map(|d| format!("{:.6}", d.as_secs_f64()));
    out.push_str(&secs.join(","));
    out
}

/// Full CSV document: header comment, column names, one row per report.
pub fn trials_csv(config_hash: &str, reports: &[TrialReport]) -> String {
    let axes: Vec<String> = reports
        .first()
        .map(|r| r.point.iter().map(|(n, _)| n.clone()).collect())
        .unwrap_or_default();
    let mut out = header_comment(config_hash);
    out.push_str(&columns(&axes));
    out.push('\n');
    for r in reports {
        out.push_str(&row(r));
        out.push('\n');
    }
    out
}

/// Wilson score interval for `successes` out of `n` at 95% confidence.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054f64;
    let n = n as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub point: Vec<(String, f64)>,
    pub trials: usize,
    pub failed: usize,
    /// Mean over the trials that ran; `NaN` if none did.
    pub mean_error: f64,
    pub exact_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// One summary per grid point, in the order the points first appear.
pub fn summarize(reports: &[TrialReport]) -> Vec<PointSummary> {
    let mut groups: Vec<(Vec<(String, f64)>, Vec<&TrialReport>)> = Vec::new();
    for r in reports {
        match groups.iter_mut().find(|(p, _)| *p == r.point) {
            Some((_, v)) => v.push(r),
            None => groups.push((r.point.clone(), vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(point, rows)| {
            let errors: Vec<f64> = rows.iter().filter_map(|r| r.error_fraction()).collect();
            let exact = rows.iter().filter(|r| r.exact()).count();
            let (ci_low, ci_high) = wilson_interval(exact, rows.len());
            PointSummary {
                point,
                trials: rows.len(),
                failed: rows.len() - errors.len(),
                mean_error: if errors.is_empty() {
                    f64::NAN
                } else {
                    errors.iter().sum::<f64>() / errors.len() as f64
                },
                exact_rate: exact as f64 / rows.len() as f64,
                ci_low,
                ci_high,
            }
        })
        .collect()
}

pub fn summary_csv(config_hash: &str, summaries: &[PointSummary]) -> String {
    let mut out = header_comment(config_hash);
    let axes: Vec<&str> = summaries
        .first()
        .map(|s| s.point.iter().map(|(n, _)| n.as_str()).collect())
        .unwrap_or_default();
    let mut cols = axes;
    cols.extend([
        "trials",
        "failed",
        "mean_error_fraction",
        "exact_rate",
        "exact_ci95_low",
        "exact_ci95_high",
    ]);
    out.push_str(&cols.join(","));
    out.push('\n');
    for s in summaries {
        for (_, v) in &s.point {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.trials, s.failed, s.mean_error, s.exact_rate, s.ci_low, s.ci_high
        );
    }
    out
}

/// Drops the timing columns from every data row, leaving comments alone.
pub fn strip_timings(csv: &str) -> String {
    csv.lines()
        .map(|l| {
            if l.starts_with('#') {
                l.to_string()
            } else {
                let fields: Vec<&str> = l.split(',').collect();
                fields[..fields.len().saturating_sub(TIMING_COLUMNS.len())].join(",")
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}
