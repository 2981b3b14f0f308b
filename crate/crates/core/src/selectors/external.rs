use std::path::Path;

use super::SelectorError;

/// Reads a score file: one real per non-blank line, in feature order.
pub fn read_score_file(path: &Path, n_features: usize) -> Result<Vec<f64>, SelectorError> {
    let err = |message: String| SelectorError::External { path: path.display().to_string(), message };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let mut scores = Vec::with_capacity(n_features);
    for (no, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| err(format!("line {}: '{t}' is not a number", no + 1)))?;
        if !v.is_finite() {
            return Err(err(format!("line {}: score is not finite", no + 1)));
        }
        scores.push(v);
    }
    if scores.len() != n_features {
        return Err(err(format!("{} scores for {n_features} features", scores.len())));
    }
    Ok(scores)
}
