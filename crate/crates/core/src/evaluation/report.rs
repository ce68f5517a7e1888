use serde::Serialize;

use super::contingency::{error_rates, loss, metrics, ContingencyMatrix, Metrics};
use super::roc::{optimal_threshold, roc_auc};
use super::PreferenceMu;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub mu: f64,
    pub tau: f64,
    pub matrix: ContingencyMatrix,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub loss: f64,
    pub absolute_usefulness: f64,
    pub relative_usefulness: f64,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub model: String,
    pub auc: f64,
    pub observations: usize,
    pub rows: Vec<EvalRow>,
}

/// Evaluates one probability series against labels for every preference in
/// `mu_grid`, each at its usefulness-maximising threshold.
pub fn evaluate(model: &str, scores: &[f64], labels: &[bool], mu_grid: &[f64]) -> Result<EvalReport> {
    let auc = roc_auc(scores, labels)?;
    let rows = mu_grid
        .iter()
        .map(|&m| {
            let mu = PreferenceMu::new(m)?;
            let choice = optimal_threshold(scores, labels, mu)?;
            let rates = error_rates(&choice.matrix);
            Ok(EvalRow {
                mu: m,
                tau: choice.tau,
                matrix: choice.matrix,
                t1: rates.t1,
                t2: rates.t2,
                loss: loss(&choice.matrix, mu),
                absolute_usefulness: choice.usefulness.absolute,
                relative_usefulness: choice.usefulness.relative,
                metrics: metrics(&choice.matrix),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport { model: model.to_string(), auc, observations: scores.len(), rows })
}
