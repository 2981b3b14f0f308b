mod common;

use common::random_matrix;
use mlufs::numerics::DenseMatrix;
use mlufs::rng::SplitMix64;
use mlufs::selectors::{self, top_d, FeatureRanking, Method, SelectorConfig};
use proptest::prelude::*;

fn config(method: Method) -> SelectorConfig {
    let mut cfg = SelectorConfig::new(method);
    cfg.graph_k = 4;
    cfg.mcfs_clusters = 2;
    cfg.mcfs_cardinality = Some(3);
    cfg
}

fn matrix(seed: u64, rows: usize, cols: usize) -> DenseMatrix {
    let mut rng = SplitMix64::new(seed);
    let x = random_matrix(&mut rng, rows, cols);
    // Distinct column scales keep scores well separated.
    let data = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| x[(i, j)] * (1.0 + j as f64 * 0.37))
        .collect();
    DenseMatrix::new(rows, cols, data).unwrap()
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) -> Result<(), TestCaseError> {
    for (x, y) in a.iter().zip(b) {
        prop_assert!((x - y).abs() <= tol * (1.0 + x.abs()), "{x} vs {y}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn column_permutation_permutes_scores(seed in any::<u64>(), method in prop::sample::select(vec![Method::Variance, Method::LaplacianScore, Method::Mcfs])) {
        let x = matrix(seed, 30, 6);
        let mut perm: Vec<usize> = (0..6).collect();
        SplitMix64::new(seed ^ 1).shuffle(&mut perm);
        let a = selectors::select(&x, &config(method)).unwrap();
        let b = selectors::select(&x.select_columns(&perm), &config(method)).unwrap();
        let moved: Vec<f64> = perm.iter().map(|&j| a.scores[j]).collect();
        assert_close(&b.scores, &moved, 1e-8)?;
    }

    #[test]
    fn row_order_does_not_matter(seed in any::<u64>(), method in prop::sample::select(vec![Method::Variance, Method::LaplacianScore, Method::Mcfs])) {
        let x = matrix(seed, 30, 5);
        let mut perm: Vec<usize> = (0..30).collect();
        SplitMix64::new(seed ^ 2).shuffle(&mut perm);
        let a = selectors::select(&x, &config(method)).unwrap();
        let b = selectors::select(&x.select_rows(&perm), &config(method)).unwrap();
        assert_close(&a.scores, &b.scores, 1e-8)?;
    }

    #[test]
    fn top_d_grows_by_prefix(scores in prop::collection::vec(-10i32..10, 1..40)) {
        let r = FeatureRanking::from_scores(scores.iter().map(|&v| f64::from(v)).collect(), "t").unwrap();
        for d in 1..r.len() {
            let small = top_d(&r, d).unwrap();
            let big = top_d(&r, d + 1).unwrap();
            prop_assert_eq!(&big[..d], &small[..]);
            prop_assert!(r.scores[big[d - 1]] >= r.scores[big[d]]);
        }
        prop_assert!(top_d(&r, 0).is_err());
        prop_assert!(top_d(&r, r.len() + 1).is_err());
    }

    #[test]
    fn rankings_are_permutations(seed in any::<u64>(), method in prop::sample::select(vec![Method::Variance, Method::LaplacianScore, Method::Mcfs, Method::Random])) {
        let x = matrix(seed, 20, 7);
        let r = selectors::select(&x, &config(method)).unwrap();
        let mut order = r.order.clone();
        order.sort_unstable();
        prop_assert_eq!(order, (0..7).collect::<Vec<_>>());
        prop_assert!(r.scores.iter().all(|s| s.is_finite()));
    }
}

#[test]
fn random_ranking_depends_only_on_seed() {
    let x = matrix(3, 10, 12);
    let y = matrix(4, 10, 12);
    let mut cfg = config(Method::Random);
    cfg.seed = 99;
    assert_eq!(selectors::select(&x, &cfg).unwrap(), selectors::select(&y, &cfg).unwrap());
    cfg.seed = 100;
    assert_ne!(
        selectors::select(&x, &cfg).unwrap().order,
        selectors::select(&y, &config(Method::Random)).unwrap().order
    );
}
