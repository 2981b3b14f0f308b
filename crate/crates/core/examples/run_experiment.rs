//! Runs a small selector × dataset × repeat grid and prints the Markdown
//! report. Pass a directory to also write report.{json,csv,md}.

use mlufs::dataset::{LabelMatrix, MultiLabelDataset};
use mlufs::harness::{self, emit_report, render_report, ExperimentConfig, FeatureCount, ReportFormat};
use mlufs::numerics::DenseMatrix;
use mlufs::rng::SplitMix64;
use mlufs::selectors::{Method, SelectorConfig};

fn synthetic(name: &str, seed: u64, p: usize, f: usize) -> Result<MultiLabelDataset, Box<dyn std::error::Error>> {
    let mut rng = SplitMix64::new(seed);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for _ in 0..p {
        let r: Vec<f64> = (0..f).map(|_| rng.next_f64()).collect();
        ys.push(vec![u8::from(r[0] > 0.6), u8::from(r[1] + r[2] > 1.1), u8::from(r[0] < 0.2)]);
        xs.push(r);
    }
    Ok(MultiLabelDataset::unnamed(name, DenseMatrix::from_rows(&xs)?, LabelMatrix::from_rows(&ys)?)?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let datasets = vec![synthetic("small", 1, 150, 10)?, synthetic("wide", 2, 200, 30)?];
    let mut cfg = ExperimentConfig::new(
        [Method::Variance, Method::LaplacianScore, Method::Mcfs, Method::Random]
            .into_iter()
            .map(SelectorConfig::new)
            .collect(),
    );
    cfg.repeats = 5;
    cfg.d = Some(FeatureCount::Sweep(vec![3, 6]));
    cfg.master_seed = 42;

    let report = harness::run_on_datasets(&cfg, &datasets)?;
    print!("{}", render_report(&report, ReportFormat::Markdown)?);
    if let Some(dir) = std::env::args().nth(1) {
        for fmt in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown] {
            println!("wrote {}", emit_report(&report, fmt, dir.as_ref())?.display());
        }
    }
    Ok(())
}
