//! Acceptance checks. Each returns a one-line detail on success and the
//! reason on failure.

use std::collections::BTreeMap;
use std::sync::Mutex;

use mlufs::dataset::{LabelMatrix, MultiLabelDataset};
use mlufs::harness::{self, ExperimentConfig, FeatureCount};
use mlufs::metrics::{self, average_rank, Direction, Measure, TieRule};
use mlufs::mlknn;
use mlufs::numerics::{eigh_smallest, lars_path, lars_trace, DenseMatrix, Tolerances};
use mlufs::rng::SplitMix64;
use mlufs::selectors::{FeatureRanking, Method, SelectorConfig};

use super::oracles;
use super::*;

pub type Check = Result<String, String>;

fn rows_u8(m: &LabelMatrix) -> Vec<Vec<u8>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn rows_f64(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// All four measures against the set-based transcription.
pub fn metric_oracle(instances: usize, seed: u64) -> Check {
    let mut rng = SplitMix64::new(seed);
    let tol = 1e-12;
    let mut undefined = 0;
    for case in 0..instances {
        let p = 1 + rng.next_below(30) as usize;
        let q = 1 + rng.next_below(10) as usize;
        let density = 0.05 + 0.9 * rng.next_f64();
        let truth = random_labels(&mut rng, p, q, density);
        let preds = random_labels(&mut rng, p, q, density);
        // Coarse scores so that ties occur.
        let levels = 2 + rng.next_below(20);
        let scores =
            DenseMatrix::new(p, q, (0..p * q).map(|_| rng.next_below(levels) as f64 / levels as f64).collect())
                .unwrap();
        let (t, h, f) = (rows_u8(&truth), rows_u8(&preds), rows_f64(&scores));

        let hl = metrics::hamming_loss(&preds, &truth).map_err(|e| e.to_string())?;
        if !close(hl, oracles::hamming_loss(&h, &t), tol) {
            return Err(format!("case {case}: hamming loss {hl} vs {}", oracles::hamming_loss(&h, &t)));
        }
        let acc = metrics::ml_accuracy(&preds, &truth).map_err(|e| e.to_string())?;
        if !close(acc, oracles::ml_accuracy(&h, &t), tol) {
            return Err(format!("case {case}: accuracy {acc} vs {}", oracles::ml_accuracy(&h, &t)));
        }
        match (metrics::one_error(&scores, &truth), oracles::one_error(&f, &t)) {
            (Ok(a), Some((b, sk))) if close(a.value, b, tol) && a.skipped == sk => {}
            (Err(_), None) => undefined += 1,
            (a, b) => return Err(format!("case {case}: one-error {a:?} vs {b:?}")),
        }
        match (metrics::ranking_loss(&scores, &truth), oracles::ranking_loss(&f, &t)) {
            (Ok(a), Some((b, sk))) if close(a.value, b, tol) && a.skipped == sk => {}
            (Err(_), None) => undefined += 1,
            (a, b) => return Err(format!("case {case}: ranking loss {a:?} vs {b:?}")),
        }
    }
    Ok(format!("{instances} random instances agree to 1e-12 ({undefined} undefined cases agree too)"))
}

/// ML-kNN against the direct transcription, compared bit for bit.
pub fn mlknn_oracle(instances: usize, seed: u64) -> Check {
    let mut rng = SplitMix64::new(seed);
    for case in 0..instances {
        let k = [1, 3, 10][case % 3];
        let p = k + 2 + rng.next_below((60 - k - 1) as u64) as usize;
        let q = 1 + rng.next_below(8) as usize;
        let f = 1 + rng.next_below(6) as usize;
        let quantized = case % 2 == 0;
        let x = DenseMatrix::new(
            p,
            f,
            (0..p * f).map(|_| if quantized { rng.next_below(4) as f64 } else { rng.next_gaussian() }).collect(),
        )
        .unwrap();
        let density = 0.1 + 0.8 * rng.next_f64();
        let y = random_labels(&mut rng, p, q, density);
        let model = mlknn::fit(&x, &y, k, 1.0).map_err(|e| e.to_string())?;
        let naive = oracles::mlknn_fit(&rows_f64(&x), &rows_u8(&y), k, 1.0);
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        if bits(&model.prior) != bits(&naive.prior) {
            return Err(format!("case {case}: priors differ"));
        }
        for l in 0..q {
            if bits(&model.cond1[l]) != bits(&naive.cond1[l]) || bits(&model.cond0[l]) != bits(&naive.cond0[l]) {
                return Err(format!("case {case}: conditionals of label {l} differ"));
            }
        }
        let mut queries = rows_f64(&x);
        for _ in 0..10 {
            queries
                .push((0..f).map(|_| if quantized { rng.next_below(4) as f64 } else { rng.next_gaussian() }).collect());
        }
        for (qi, query) in queries.iter().enumerate() {
            let got = model.predict(query).map_err(|e| e.to_string())?;
            let (h, s) = naive.predict(query);
            if got.label_set != h || bits(&got.scores) != bits(&s) {
                return Err(format!("case {case}, query {qi}: prediction differs"));
            }
        }
    }
    Ok(format!("{instances} random instances (k in {{1,3,10}}, s = 1) agree bitwise"))
}

/// Residual/orthonormality bounds on random symmetric matrices and an
/// inertia-bisection oracle on 8×8 matrices.
pub fn eigen_suite(instances: usize, seed: u64) -> Check {
    let mut rng = SplitMix64::new(seed);
    let tol = Tolerances::default();
    for case in 0..instances {
        let n = 1 + rng.next_below(20) as usize;
        let a = random_symmetric(&mut rng, n);
        let pairs = eigh_smallest(&a, n).map_err(|e| format!("case {case}: {e}"))?;
        let norm = a.norm_inf();
        for j in 0..n {
            let v = pairs.vector(j);
            let av = a.matvec(&v);
            let res = av.iter().zip(&v).map(|(x, y)| (x - pairs.values[j] * y).abs()).fold(0.0, f64::max);
            if res > tol.eigen_residual * norm {
                return Err(format!("case {case}: residual {res:e} for pair {j}"));
            }
            for i in 0..=j {
                let d: f64 = pairs.vector(i).iter().zip(&v).map(|(x, y)| x * y).sum();
                let (target, bound) = if i == j { (1.0, tol.eigen_norm) } else { (0.0, tol.eigen_orthogonality) };
                if (d - target).abs() > bound {
                    return Err(format!("case {case}: v{i}·v{j} = {d}"));
                }
            }
            if j > 0 && pairs.values[j] < pairs.values[j - 1] {
                return Err(format!("case {case}: values not ascending"));
            }
        }
    }
    let mut worst = 0.0f64;
    for case in 0..20 {
        let a = random_symmetric(&mut rng, 8);
        let got = eigh_smallest(&a, 8).map_err(|e| e.to_string())?.values;
        let want = oracles::eigenvalues_by_bisection(&a);
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
            if (g - w).abs() > 1e-8 {
                return Err(format!("8x8 case {case}: eigenvalue {g} vs oracle {w}"));
            }
        }
    }
    Ok(format!("{instances} matrices within bounds; 20 8x8 spectra match the oracle (max err {worst:.1e})"))
}

/// First LARS feature against single-feature fits; full-cardinality path
/// against the normal equations.
pub fn lars_suite(instances: usize, seed: u64) -> Check {
    let mut rng = SplitMix64::new(seed);
    for case in 0..instances {
        let n = 20 + rng.next_below(30) as usize;
        let m = 2 + rng.next_below(10) as usize;
        let x = random_matrix(&mut rng, n, m);
        let w: Vec<f64> = (0..m).map(|_| rng.next_gaussian()).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| x.row(i).iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + 0.3 * rng.next_gaussian())
            .collect();
        let path = lars_trace(&x, &y, m, &Tolerances::default()).map_err(|e| e.to_string())?;
        let first = path.steps.first().and_then(|s| s.added);
        let want = oracles::best_single_feature(&x, &y);
        if first != Some(want) {
            return Err(format!("case {case}: first active {first:?}, brute force {want}"));
        }
    }
    let mut worst = 0.0f64;
    for case in 0..20 {
        let x = random_matrix(&mut rng, 40, 5);
        let y: Vec<f64> = (0..40).map(|i| x.row(i)[0] - 0.5 * x.row(i)[3] + rng.next_gaussian()).collect();
        let coef = lars_path(&x, &y, 5).map_err(|e| e.to_string())?;
        let mut beta = [0.0; 5];
        for (j, c) in coef {
            beta[j] = c;
        }
        for (b, o) in beta.iter().zip(oracles::ols_slopes(&x, &y)) {
            worst = worst.max((b - o).abs());
            if (b - o).abs() > 1e-6 {
                return Err(format!("normal-equations case {case}: {b} vs {o}"));
            }
        }
    }
    Ok(format!("{instances} first-active checks pass; 20 full paths match least squares (max err {worst:.1e})"))
}

fn rank_row_check(label: &str, table: &[[f64; 6]; 21], dir: Direction, want: &[f64; 6]) -> Check {
    let got = average_rank(&table_rows(table), dir, TieRule::Competition).map_err(|e| e.to_string())?;
    let text = got.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", ");
    if got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 0.01) {
        Ok(format!("{label} [{text}]"))
    } else {
        Err(format!("{label} [{text}] vs published {want:?}"))
    }
}

pub fn average_rank_tables() -> Check {
    let a = rank_row_check("Table 1", &TABLE1_ACCURACY, Direction::HigherBetter, &TABLE1_AVG_RANK)?;
    let b = rank_row_check("Table 2", &TABLE2_HAMMING, Direction::LowerBetter, &TABLE2_AVG_RANK)?;
    Ok(format!("{a}; {b} (competition ties)"))
}

pub fn mcfs_config(sweep: &[usize]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(vec![SelectorConfig::new(Method::Mcfs)]);
    cfg.d = Some(FeatureCount::Sweep(sweep.to_vec()));
    cfg.master_seed = 2024;
    cfg
}

pub struct Band {
    pub accuracy: (f64, f64),
    pub hamming: (f64, f64),
}

/// Runs MCFS over `sweep` and looks for a `d` inside both bands.
pub fn mcfs_band(name: &str, sweep: &[usize], band: &Band) -> Check {
    let ds = load_benchmark(name)?;
    let report = harness::run_on_datasets(&mcfs_config(sweep), std::slice::from_ref(&ds)).map_err(|e| e.to_string())?;
    let mut seen = Vec::new();
    let mut hit = None;
    for (pos, d) in sweep.iter().enumerate() {
        let acc = report.summary(&ds.name, "mcfs", pos, Measure::MlAccuracy).map(|s| s.mean);
        let hl = report.summary(&ds.name, "mcfs", pos, Measure::HammingLoss).map(|s| s.mean);
        let (Some(acc), Some(hl)) = (acc, hl) else {
            return Err(format!("no result for d = {d}: {:?}", report.failures));
        };
        seen.push(format!("d={d}: acc {acc:.3}, HL {hl:.3}"));
        let inside = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        if hit.is_none() && inside(acc, band.accuracy) && inside(hl, band.hamming) {
            hit = Some(*d);
        }
    }
    match hit {
        Some(d) => Ok(format!("in band at d = {d} ({})", seen.join("; "))),
        None => Err(format!("no d inside the bands ({})", seen.join("; "))),
    }
}

pub fn determinism(name: &str, sweep: &[usize]) -> Check {
    let ds = load_benchmark(name)?;
    let cfg = mcfs_config(sweep);
    let run = |cfg: &ExperimentConfig| {
        harness::run_on_datasets(cfg, std::slice::from_ref(&ds))
            .and_then(|r| Ok((r.to_json()?, r)))
            .map_err(|e| e.to_string())
    };
    let (a, ra) = run(&cfg)?;
    let (b, _) = run(&cfg)?;
    if a != b {
        return Err("two runs with the same seed differ".into());
    }
    let mut other = cfg.clone();
    other.master_seed += 1;
    let (_, rc) = run(&other)?;
    let changed = ra.cells.iter().zip(&rc.cells).filter(|(x, y)| x.result != y.result).count();
    if changed == 0 {
        return Err("changing master_seed changed no cell".into());
    }
    Ok(format!("{} report bytes identical across runs; new seed changes {changed}/{} cells", a.len(), ra.cells.len()))
}

type RankingLog = BTreeMap<(String, String, usize), Vec<Vec<u64>>>;

fn logged_run(
    cfg: &ExperimentConfig,
    datasets: &[MultiLabelDataset],
) -> Result<(RankingLog, harness::ExperimentReport), String> {
    let log = Mutex::new(RankingLog::new());
    let report = harness::run_on_datasets_with(cfg, datasets, &|t| {
        let bits = t
            .rankings
            .iter()
            .map(|r: &FeatureRanking| {
                r.scores.iter().map(|s| s.to_bits()).chain(r.order.iter().map(|&o| o as u64)).collect()
            })
            .collect();
        log.lock().unwrap().insert((t.dataset.to_string(), t.method.to_string(), t.repeat), bits);
    })
    .map_err(|e| e.to_string())?;
    Ok((log.into_inner().unwrap(), report))
}

/// Shuffles every label column independently across instances.
pub fn shuffle_labels(ds: &MultiLabelDataset, seed: u64) -> MultiLabelDataset {
    let mut rng = SplitMix64::new(seed);
    let mut y = ds.y.clone();
    for l in 0..y.cols() {
        let mut col = ds.y.column(l);
        rng.shuffle(&mut col);
        for (i, v) in col.into_iter().enumerate() {
            y.set(i, l, v == 1);
        }
    }
    ds.with_labels(y, ds.label_names.clone()).unwrap()
}

pub fn label_blindness(datasets: &[MultiLabelDataset]) -> Check {
    let mut cfg = ExperimentConfig::new(
        [Method::Variance, Method::LaplacianScore, Method::Mcfs, Method::Random]
            .into_iter()
            .map(SelectorConfig::new)
            .collect(),
    );
    cfg.repeats = 3;
    cfg.d = Some(FeatureCount::Sweep(vec![2, 4]));
    let shuffled: Vec<_> = datasets.iter().enumerate().map(|(i, d)| shuffle_labels(d, 77 + i as u64)).collect();
    let (log_a, rep_a) = logged_run(&cfg, datasets)?;
    let (log_b, rep_b) = logged_run(&cfg, &shuffled)?;
    if log_a.len() != datasets.len() * cfg.methods.len() * cfg.repeats {
        return Err(format!("hook saw {} cells", log_a.len()));
    }
    if log_a != log_b {
        let diff = log_a.keys().find(|k| log_a.get(*k) != log_b.get(*k));
        return Err(format!("ranking changed with the labels at {diff:?}"));
    }
    let changed = rep_a.summaries.iter().zip(&rep_b.summaries).filter(|(a, b)| a.mean != b.mean).count();
    if changed == 0 {
        return Err("shuffling labels changed no metric".into());
    }
    Ok(format!("{} rankings bitwise identical; {changed}/{} metric means changed", log_a.len(), rep_a.summaries.len()))
}

pub fn study_config() -> ExperimentConfig {
    let mut cfg =
        ExperimentConfig::new(vec![SelectorConfig::new(Method::Variance), SelectorConfig::new(Method::LaplacianScore)]);
    cfg.d = Some(FeatureCount::One(2));
    cfg.repeats = 5;
    cfg.master_seed = 11;
    cfg
}

pub fn rank_instability() -> Check {
    let ds = two_group_dataset(7, 200);
    let cfg = study_config();
    let study = harness::single_label_study(&cfg, &ds).map_err(|e| e.to_string())?;
    let degenerate = harness::single_label_study(&cfg, &identical_labels(&ds)).map_err(|e| e.to_string())?;
    let all_one = degenerate.pairwise_tau.iter().flatten().all(|&t| t == 1.0);
    if study.min_pairwise_tau >= 1.0 {
        return Err(format!("min pairwise tau {} on the two-group dataset", study.min_pairwise_tau));
    }
    if !all_one {
        return Err(format!("identical labels gave taus {:?}", degenerate.pairwise_tau));
    }
    let ranks: Vec<String> = study.per_label.iter().map(|l| format!("{}={:?}", l.target, l.ranks)).collect();
    Ok(format!("min pairwise tau {} ({}); identical labels: all tau = 1", study.min_pairwise_tau, ranks.join(" ")))
}
