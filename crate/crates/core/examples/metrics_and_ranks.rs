//! Scores predictions with the four multi-label measures and ranks methods
//! across datasets.

use mlufs::dataset::LabelMatrix;
use mlufs::metrics::{self, average_rank, Direction, Measure, TieRule};
use mlufs::numerics::DenseMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = LabelMatrix::from_rows(&[[1, 0, 1], [0, 1, 0], [0, 0, 0]])?;
    let preds = LabelMatrix::from_rows(&[[1, 0, 0], [0, 1, 1], [0, 0, 0]])?;
    let scores = DenseMatrix::from_rows(&[[0.9, 0.2, 0.4], [0.1, 0.8, 0.6], [0.3, 0.3, 0.1]])?;
    let r = metrics::evaluate(&preds, &scores, &truth)?;
    for m in Measure::ALL {
        println!("{:<28} {:.4}", m.title(), r.get(m));
    }
    println!("instances skipped: {:?}", r.skipped);

    // Accuracy of three methods on four datasets.
    let table = vec![vec![0.51, 0.49, 0.51], vec![0.30, 0.35, 0.28], vec![0.77, 0.70, 0.71], vec![0.42, 0.42, 0.40]];
    for tie in [TieRule::Average, TieRule::Competition] {
        println!("average rank ({tie:?} ties): {:?}", average_rank(&table, Direction::HigherBetter, tie)?);
    }
    Ok(())
}
