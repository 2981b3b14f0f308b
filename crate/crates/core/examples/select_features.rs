//! Ranks the features of a synthetic dataset with every built-in selector.

use mlufs::numerics::DenseMatrix;
use mlufs::rng::SplitMix64;
use mlufs::selectors::{self, Method, SelectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = SplitMix64::new(3);
    // Feature 0 separates two clusters; 1-7 are uniform noise.
    let rows: Vec<Vec<f64>> = (0..120)
        .map(|_| {
            let c = rng.next_below(2) as f64;
            let mut r = vec![c + 0.1 * rng.next_gaussian()];
            r.extend((0..7).map(|_| rng.next_f64()));
            r
        })
        .collect();
    let x = DenseMatrix::from_rows(&rows)?;

    for method in [Method::Variance, Method::LaplacianScore, Method::Mcfs, Method::Random] {
        let mut cfg = SelectorConfig::new(method);
        cfg.mcfs_clusters = 2;
        cfg.mcfs_cardinality = Some(3);
        let ranking = selectors::select(&x, &cfg)?;
        println!("{:<16} top 3 = {:?}", method.as_str(), ranking.top_d(3)?);
    }
    Ok(())
}
