//! Trains ML-kNN, predicts a few queries and round-trips the model as JSON.

use mlufs::dataset::LabelMatrix;
use mlufs::mlknn::{self, TrainedMLkNN};
use mlufs::numerics::DenseMatrix;
use mlufs::rng::SplitMix64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = SplitMix64::new(9);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for _ in 0..200 {
        let (a, b) = (rng.next_f64(), rng.next_f64());
        xs.push(vec![a, b]);
        ys.push(vec![u8::from(a > 0.5), u8::from(b > 0.5), u8::from(a + b > 1.0)]);
    }
    let model = mlknn::fit(&DenseMatrix::from_rows(&xs)?, &LabelMatrix::from_rows(&ys)?, 10, 1.0)?;
    println!("priors {:?}", model.prior);

    for q in [[0.1, 0.1], [0.9, 0.2], [0.8, 0.9]] {
        let p = model.predict(&q)?;
        let scores: Vec<String> = p.scores.iter().map(|s| format!("{s:.3}")).collect();
        println!("{q:?} -> {:?}  scores [{}]", p.label_set, scores.join(", "));
    }

    let json = model.to_json()?;
    let back = TrainedMLkNN::from_json(&json)?;
    println!(
        "model JSON: {} bytes, identical after reload: {}",
        json.len(),
        back.predict(&[0.3, 0.7])? == model.predict(&[0.3, 0.7])?
    );
    Ok(())
}
