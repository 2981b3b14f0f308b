//! Shows that the ranking of two selectors depends on which label is kept
//! when a multi-label dataset is reduced to a single-label one.

use mlufs::dataset::{LabelMatrix, MultiLabelDataset};
use mlufs::harness::{self, ExperimentConfig, FeatureCount};
use mlufs::numerics::DenseMatrix;
use mlufs::rng::SplitMix64;
use mlufs::selectors::{Method, SelectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = SplitMix64::new(7);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..200 {
        // Uniform features a0, a1: high variance, no graph structure.
        let a = [rng.next_f64(), rng.next_f64()];
        // Clustered features b0..b7 with rare outliers: low variance, smooth on the graph.
        let c = rng.next_below(2) as f64;
        let b = (0..8).map(|_| match i % 25 {
            0 => -4.0,
            1 => 5.0,
            _ => c + 0.02 * rng.next_gaussian(),
        });
        xs.push(a.iter().copied().chain(b).collect::<Vec<f64>>());
        ys.push(vec![u8::from(a[0] > 0.5), u8::from(a[1] > 0.5), c as u8, 1 - c as u8]);
    }
    let ds = MultiLabelDataset::unnamed("two-groups", DenseMatrix::from_rows(&xs)?, LabelMatrix::from_rows(&ys)?)?;

    let mut cfg =
        ExperimentConfig::new(vec![SelectorConfig::new(Method::Variance), SelectorConfig::new(Method::LaplacianScore)]);
    cfg.d = Some(FeatureCount::One(2));
    cfg.repeats = 5;

    let study = harness::single_label_study(&cfg, &ds)?;
    for l in &study.per_label {
        println!("label {}: accuracy {:?} -> ranks {:?}", l.target, l.accuracy, l.ranks);
    }
    println!("multi-label ranks: {:?}", study.multi_label);
    println!("minimum pairwise Kendall tau between labels: {}", study.min_pairwise_tau);
    Ok(())
}
