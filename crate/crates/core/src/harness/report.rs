use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentReport, HarnessError, RankTable};
use crate::metrics::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
            ReportFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            other => Err(HarnessError::Config(format!("unknown report format '{other}'"))),
        }
    }
}

pub fn render_report(r: &ExperimentReport, format: ReportFormat) -> Result<String, HarnessError> {
    match format {
        ReportFormat::Json => r.to_json(),
        ReportFormat::Csv => render_csv(r),
        ReportFormat::Markdown => Ok(render_markdown(r)),
    }
}

/// Writes `report.<ext>` into `dir` and returns its path.
pub fn emit_report(r: &ExperimentReport, format: ReportFormat, dir: &Path) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let path = dir.join(format!("report.{}", format.extension()));
    std::fs::write(&path, render_report(r, format)?).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

fn render_csv(r: &ExperimentReport) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| HarnessError::Config(format!("CSV: {e}"));
    w.write_record(["dataset", "method", "d", "metric", "mean", "std", "n", "seed"]).map_err(csv_err)?;
    for s in &r.summaries {
        w.write_record([
            s.dataset.clone(),
            s.method.clone(),
            s.d.to_string(),
            s.measure.as_str().to_string(),
            s.mean.to_string(),
            s.std.to_string(),
            s.n.to_string(),
            r.config.master_seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Config(format!("CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Index of the best mean; ties go to the lowest method index.
fn best_index(row: &[f64], dir: Direction) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        let better = match dir {
            Direction::HigherBetter => v > row[best],
            Direction::LowerBetter => v < row[best],
        };
        if better {
            best = j;
        }
    }
    best
}

fn table_markdown(out: &mut String, t: &RankTable) {
    let dir = t.measure.direction();
    let arrow = if dir == Direction::HigherBetter { "↑" } else { "↓" };
    let d = t.d_requested.map_or("default".to_string(), |d| d.to_string());
    let _ = writeln!(out, "### {} {arrow} (d = {d})\n", t.measure.title());
    let _ = writeln!(out, "| Dataset | {} |", t.methods.join(" | "));
    let _ = writeln!(out, "|---|{}", "---|".repeat(t.methods.len()));
    for (i, name) in t.datasets.iter().enumerate() {
        let best = best_index(&t.means[i], dir);
        let cells: Vec<String> = t.means[i]
            .iter()
            .zip(&t.stds[i])
            .enumerate()
            .map(|(j, (m, s))| {
                let cell = format!("{m:.3}±{s:.3}");
                if j == best {
                    format!("**{cell}**")
                } else {
                    cell
                }
            })
            .collect();
        let _ = writeln!(out, "| {name} (d={}) | {} |", t.d_used[i], cells.join(" | "));
    }
    let ranks: Vec<String> = t.average_rank.iter().map(|r| format!("{r:.2}")).collect();
    let _ = writeln!(out, "| Avg.Rank | {} |", ranks.join(" | "));
    if !t.excluded.is_empty() {
        let _ = writeln!(out, "\nIncomplete, not ranked: {}", t.excluded.join(", "));
    }
    out.push('\n');
}

fn render_markdown(r: &ExperimentReport) -> String {
    let mut out = String::from("# Experiment report\n\n");
    let _ = writeln!(
        out,
        "master seed {}, {} repeats, train fraction {}, k = {}\n",
        r.config.master_seed, r.config.repeats, r.config.train_fraction, r.config.knn_k
    );
    for t in &r.rank_tables {
        table_markdown(&mut out, t);
    }
    if !r.failures.is_empty() {
        out.push_str("## Failures\n\n");
        for f in &r.failures {
            let what = match (&f.method, f.repeat) {
                (Some(m), Some(rep)) => format!("{} / {m} / repeat {rep}", f.dataset),
                _ => f.dataset.clone(),
            };
            let _ = writeln!(out, "- {what}: {}", f.message);
        }
    }
    out
}
