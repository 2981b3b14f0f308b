#![allow(dead_code, clippy::approx_constant)]

pub mod checks;
pub mod oracles;

use std::path::{Path, PathBuf};

use mlufs::dataset::{LabelMatrix, ManifestLabels, MultiLabelDataset};
use mlufs::numerics::DenseMatrix;
use mlufs::rng::SplitMix64;

pub fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| rng.next_gaussian()).collect()).unwrap()
}

pub fn random_labels(rng: &mut SplitMix64, rows: usize, cols: usize, density: f64) -> LabelMatrix {
    LabelMatrix::new(rows, cols, (0..rows * cols).map(|_| u8::from(rng.next_f64() < density)).collect()).unwrap()
}

pub fn random_symmetric(rng: &mut SplitMix64, n: usize) -> DenseMatrix {
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.next_gaussian();
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Labels driven by features 0..2 plus noise features.
pub fn synthetic_dataset(name: &str, seed: u64, p: usize, f: usize, q: usize) -> MultiLabelDataset {
    let mut rng = SplitMix64::new(seed);
    let mut xs = Vec::with_capacity(p);
    let mut ys = Vec::with_capacity(p);
    for _ in 0..p {
        let row: Vec<f64> = (0..f).map(|_| rng.next_f64()).collect();
        let y: Vec<u8> = (0..q)
            .map(|l| {
                let signal = row[l % f.min(3)] + 0.3 * row[(l + 1) % f.min(3)];
                u8::from(signal + 0.2 * rng.next_gaussian() > 0.7)
            })
            .collect();
        xs.push(row);
        ys.push(y);
    }
    MultiLabelDataset::unnamed(name, DenseMatrix::from_rows(&xs).unwrap(), LabelMatrix::from_rows(&ys).unwrap())
        .unwrap()
}

/// Two feature groups with opposite selector preferences.
///
/// Group A (`a0`, `a1`) is uniform: high min-max variance, rough on the
/// neighbor graph. Group B (`b0..b7`) places points in two tight clusters
/// between a few outliers: low min-max variance, smooth on the graph.
/// Labels `l0`, `l1` follow group A and `l2`, `l3` follow the B cluster.
pub fn two_group_dataset(seed: u64, p: usize) -> MultiLabelDataset {
    let mut rng = SplitMix64::new(seed);
    let mut xs = Vec::with_capacity(p);
    let mut ys = Vec::with_capacity(p);
    for i in 0..p {
        let a = [rng.next_f64(), rng.next_f64()];
        let c = rng.next_below(2) as f64;
        let b: Vec<f64> = (0..8)
            .map(|_| match i % 25 {
                0 => -4.0,
                1 => 5.0,
                _ => c + 0.02 * rng.next_gaussian(),
            })
            .collect();
        let mut row = a.to_vec();
        row.extend(b);
        ys.push(vec![u8::from(a[0] > 0.5), u8::from(a[1] > 0.5), c as u8, 1 - c as u8]);
        xs.push(row);
    }
    let names = |prefix: &str, n: usize| (0..n).map(|j| format!("{prefix}{j}")).collect::<Vec<_>>();
    let mut feature_names = names("a", 2);
    feature_names.extend(names("b", 8));
    MultiLabelDataset::new(
        "two-groups",
        DenseMatrix::from_rows(&xs).unwrap(),
        LabelMatrix::from_rows(&ys).unwrap(),
        feature_names,
        names("l", 4),
    )
    .unwrap()
}

/// Copies label column 0 into every other label column.
pub fn identical_labels(ds: &MultiLabelDataset) -> MultiLabelDataset {
    let mut y = ds.y.clone();
    for i in 0..y.rows() {
        let v = y.get(i, 0) == 1;
        for l in 1..y.cols() {
            y.set(i, l, v);
        }
    }
    ds.with_labels(y, ds.label_names.clone()).unwrap()
}

pub fn data_dir() -> PathBuf {
    std::env::var_os("MLUFS_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"))
}

/// Loads `<data dir>/<name>.arff`, using `<name>.xml` for labels when
/// present and the MEKA header otherwise.
pub fn load_benchmark(name: &str) -> Result<MultiLabelDataset, String> {
    let dir = data_dir();
    let arff = dir.join(format!("{name}.arff"));
    if !arff.exists() {
        return Err(format!("{} not found (set MLUFS_DATA_DIR)", arff.display()));
    }
    let xml = dir.join(format!("{name}.xml"));
    let labels =
        if xml.exists() { ManifestLabels::Xml(xml.display().to_string()) } else { ManifestLabels::Header(None) };
    mlufs::dataset::load_arff_file(&arff, &labels).map_err(|e| e.to_string())
}

pub const METHODS: [&str; 6] = ["EMUFS", "CNAFS", "EGCFS", "FSDK", "MCFS", "RUSLP"];

/// Published multi-label accuracy means, 21 datasets × 6 methods.
pub const TABLE1_ACCURACY: [[f64; 6]; 21] = [
    [0.189, 0.191, 0.154, 0.182, 0.167, 0.174],
    [0.445, 0.446, 0.469, 0.474, 0.441, 0.461],
    [0.814, 0.350, 0.297, 0.810, 0.808, 0.336],
    [0.618, 0.500, 0.433, 0.621, 0.599, 0.540],
    [0.658, 0.141, 0.101, 0.584, 0.643, 0.121],
    [0.265, 0.139, 0.117, 0.224, 0.236, 0.214],
    [0.680, 0.456, 0.282, 0.634, 0.709, 0.456],
    [0.401, 0.397, 0.402, 0.399, 0.395, 0.406],
    [0.371, 0.365, 0.265, 0.459, 0.485, 0.288],
    [0.173, 0.179, 0.173, 0.185, 0.179, 0.179],
    [0.508, 0.540, 0.528, 0.530, 0.521, 0.530],
    [0.269, 0.175, 0.203, 0.258, 0.182, 0.087],
    [0.525, 0.513, 0.520, 0.506, 0.499, 0.514],
    [0.254, 0.245, 0.275, 0.246, 0.267, 0.254],
    [0.318, 0.199, 0.358, 0.274, 0.221, 0.375],
    [0.495, 0.544, 0.505, 0.475, 0.527, 0.505],
    [0.042, 0.022, 0.024, 0.064, 0.050, 0.017],
    [0.433, 0.032, 0.033, 0.373, 0.404, 0.031],
    [0.518, 0.645, 0.559, 0.545, 0.668, 0.576],
    [0.067, 0.027, 0.026, 0.059, 0.065, 0.018],
    [0.412, 0.410, 0.374, 0.399, 0.427, 0.435],
];

pub const TABLE1_AVG_RANK: [f64; 6] = [2.76, 3.86, 4.24, 3.05, 3.05, 3.67];

/// Published Hamming loss means, 21 datasets × 6 methods.
pub const TABLE2_HAMMING: [[f64; 6]; 21] = [
    [0.383, 0.414, 0.431, 0.388, 0.411, 0.448],
    [0.397, 0.404, 0.367, 0.359, 0.404, 0.368],
    [0.095, 0.485, 0.586, 0.092, 0.099, 0.492],
    [0.189, 0.261, 0.304, 0.190, 0.207, 0.237],
    [0.059, 0.443, 0.762, 0.077, 0.067, 0.569],
    [0.161, 0.233, 0.287, 0.189, 0.171, 0.183],
    [0.121, 0.228, 0.456, 0.138, 0.111, 0.225],
    [0.336, 0.336, 0.336, 0.336, 0.336, 0.333],
    [0.104, 0.104, 0.112, 0.092, 0.085, 0.109],
    [0.336, 0.324, 0.333, 0.316, 0.323, 0.325],
    [0.242, 0.231, 0.241, 0.238, 0.244, 0.235],
    [0.109, 0.179, 0.133, 0.112, 0.160, 0.594],
    [0.340, 0.345, 0.346, 0.348, 0.354, 0.348],
    [0.331, 0.333, 0.301, 0.329, 0.310, 0.340],
    [0.093, 0.189, 0.083, 0.127, 0.169, 0.093],
    [0.232, 0.212, 0.243, 0.247, 0.223, 0.240],
    [0.089, 0.170, 0.121, 0.098, 0.091, 0.851],
    [0.036, 0.743, 0.682, 0.047, 0.045, 0.789],
    [0.177, 0.120, 0.152, 0.159, 0.112, 0.147],
    [0.083, 0.173, 0.181, 0.087, 0.086, 0.341],
    [0.306, 0.312, 0.350, 0.318, 0.294, 0.288],
];

pub const TABLE2_AVG_RANK: [f64; 6] = [2.43, 3.81, 4.29, 2.95, 2.76, 4.10];

pub fn table_rows(t: &[[f64; 6]; 21]) -> Vec<Vec<f64>> {
    t.iter().map(|r| r.to_vec()).collect()
}
