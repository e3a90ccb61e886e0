use serde::{Deserialize, Serialize};

use super::score::Rating;
use super::tree::{DecisionTree, N_CLASSES};
use crate::corpus::CvssVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub rating: Rating,
    pub support: usize,
    pub predicted: usize,
    /// `None` when nothing was predicted as this class.
    pub precision: Option<f64>,
    /// `None` when the class never occurs in the truth.
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub samples: usize,
    pub accuracy: f64,
    /// `confusion[truth][predicted]`, indexed by rating order.
    pub confusion: [[usize; N_CLASSES]; N_CLASSES],
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: Option<f64>,
    pub macro_recall: Option<f64>,
    /// Classes left out of the macro precision average.
    pub precision_undefined: Vec<Rating>,
    /// Classes left out of the macro recall average.
    pub recall_undefined: Vec<Rating>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn evaluate_predictions(truth: &[Rating], predicted: &[Rating]) -> Evaluation {
    assert_eq!(truth.len(), predicted.len(), "truth and predictions must align");
    let mut confusion = [[0usize; N_CLASSES]; N_CLASSES];
    for (t, p) in truth.iter().zip(predicted) {
        confusion[t.index()][p.index()] += 1;
    }
    let correct: usize = (0..N_CLASSES).map(|k| confusion[k][k]).sum();
    let samples = truth.len();
    let accuracy = if samples == 0 { 0.0 } else { correct as f64 / samples as f64 };

    let mut per_class = Vec::with_capacity(N_CLASSES);
    let (mut precisions, mut recalls) = (Vec::new(), Vec::new());
    let (mut precision_undefined, mut recall_undefined) = (Vec::new(), Vec::new());
    for rating in Rating::ALL {
        let k = rating.index();
        let tp = confusion[k][k];
        let support: usize = confusion[k].iter().sum();
        let predicted: usize = (0..N_CLASSES).map(|t| confusion[t][k]).sum();
        let precision = (predicted > 0).then(|| tp as f64 / predicted as f64);
        let recall = (support > 0).then(|| tp as f64 / support as f64);
        match precision {
            Some(p) => precisions.push(p),
            None => precision_undefined.push(rating),
        }
        match recall {
            Some(r) => recalls.push(r),
            None => recall_undefined.push(rating),
        }
        per_class.push(ClassMetrics { rating, support, predicted, precision, recall });
    }
    Evaluation {
        samples,
        accuracy,
        confusion,
        per_class,
        macro_precision: mean(&precisions),
        macro_recall: mean(&recalls),
        precision_undefined,
        recall_undefined,
    }
}

pub fn evaluate(tree: &DecisionTree, test: &[(CvssVector, Rating)]) -> Evaluation {
    let truth: Vec<Rating> = test.iter().map(|(_, r)| *r).collect();
    let pred: Vec<Rating> = test.iter().map(|(v, _)| tree.predict(v)).collect();
    evaluate_predictions(&truth, &pred)
}
