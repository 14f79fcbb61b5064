use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_jsonl, read_records, DataError, DatasetManifest};
use crate::expr::HamFunction;
use crate::tokens::token_set;

/// One line of a predictions file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub sample_id: u64,
    pub predicted: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleScore {
    pub sample_id: u64,
    pub distance: f64,
    pub exact: bool,
    pub parsed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub predictions: usize,
    pub exact_match_rate: f64,
    pub mean_distance: f64,
    pub token_precision: f64,
    pub token_recall: f64,
    pub token_f1: f64,
    pub unparsable: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SampleScore>,
}

fn ratio_or_zero(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores predictions against a dataset's ground truth. An unparsable
/// prediction counts as the empty token set at the largest distance any
/// basis function could reach, `sqrt(|truth| + S)`.
pub fn score_predictions(dataset_dir: &Path, predictions: &Path) -> Result<ScoreReport, DataError> {
    let manifest = DatasetManifest::load(dataset_dir)?;
    let shape_count = manifest.basis()?.shape_count();
    let truth: HashMap<u64, String> = read_records(dataset_dir)?
        .into_iter()
        .map(|r| (r.sample_id, r.hamiltonian))
        .collect();
    let preds: Vec<Prediction> = read_jsonl(predictions)?;
    if preds.is_empty() {
        return Err(DataError::EmptyPredictions);
    }

    let mut seen = BTreeSet::new();
    let mut samples = Vec::with_capacity(preds.len());
    let (mut hits, mut predicted_total, mut truth_total, mut unparsable) = (0, 0, 0, 0);
    for p in &preds {
        if !seen.insert(p.sample_id) {
            return Err(DataError::DuplicatePrediction(p.sample_id));
        }
        let truth_text = truth
            .get(&p.sample_id)
            .ok_or(DataError::UnknownSample(p.sample_id))?;
        let t = token_set(&HamFunction::parse(truth_text)?);
        truth_total += t.len();
        let score = match HamFunction::parse(&p.predicted) {
            Ok(f) => {
                let g = token_set(&f);
                let common = t.intersection(&g).count();
                hits += common;
                predicted_total += g.len();
                let diff = t.len() + g.len() - 2 * common;
                SampleScore {
                    sample_id: p.sample_id,
                    distance: (diff as f64).sqrt(),
                    exact: diff == 0,
                    parsed: true,
                }
            }
            Err(_) => {
                unparsable += 1;
                SampleScore {
                    sample_id: p.sample_id,
                    distance: ((t.len() + shape_count) as f64).sqrt(),
                    exact: false,
                    parsed: false,
                }
            }
        };
        samples.push(score);
    }

    let n = samples.len();
    let precision = ratio_or_zero(hits, predicted_total);
    let recall = ratio_or_zero(hits, truth_total);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(ScoreReport {
        predictions: n,
        exact_match_rate: ratio_or_zero(samples.iter().filter(|s| s.exact).count(), n),
        mean_distance: samples.iter().map(|s| s.distance).sum::<f64>() / n as f64,
        token_precision: precision,
        token_recall: recall,
        token_f1: f1,
        unparsable,
        samples,
    })
}
