use serde::Serialize;

use super::contingency::{usefulness, ContingencyMatrix, Usefulness};
use super::PreferenceMu;
use crate::error::{Error, Result};

fn check_inputs(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: labels.len(), actual: scores.len() });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParameter("NaN score".into()));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::InsufficientData("both classes are required".into()));
    }
    Ok((pos, neg))
}

/// Area under the ROC curve by a threshold sweep over the distinct scores,
/// integrated with the trapezoid rule. Tied scores form one diagonal step.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check_inputs(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_tpr, mut prev_fpr) = (0.0, 0.0);
    let mut area = 0.0;
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if labels[order[k]] {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        let tpr = tp as f64 / pos as f64;
        let fpr = fp as f64 / neg as f64;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    Ok(area)
}

/// Mann-Whitney form of the AUC from average ranks.
pub fn rank_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check_inputs(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        while end + 1 < order.len() && scores[order[end + 1]] == scores[order[k]] {
            end += 1;
        }
        let avg_rank = (k + end) as f64 / 2.0 + 1.0;
        rank_sum += avg_rank * order[k..=end].iter().filter(|&&i| labels[i]).count() as f64;
        k = end + 1;
    }
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdChoice {
    pub tau: f64,
    pub matrix: ContingencyMatrix,
    pub usefulness: Usefulness,
}

/// Threshold maximising absolute usefulness over the observed score values,
/// ties broken toward the smaller threshold.
pub fn optimal_threshold(scores: &[f64], labels: &[bool], mu: PreferenceMu) -> Result<ThresholdChoice> {
    let (pos, neg) = check_inputs(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Ascending sweep: at τ = s, every score <= s is silent.
    let (mut silent_pos, mut silent_neg) = (0u64, 0u64);
    let mut best: Option<ThresholdChoice> = None;
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if labels[order[k]] {
                silent_pos += 1;
            } else {
                silent_neg += 1;
            }
            k += 1;
        }
        let matrix = ContingencyMatrix {
            tp: pos as u64 - silent_pos,
            fn_: silent_pos,
            fp: neg as u64 - silent_neg,
            tn: silent_neg,
        };
        let u = usefulness(&matrix, mu);
        if best.is_none_or(|b| u.absolute > b.usefulness.absolute) {
            best = Some(ThresholdChoice { tau: s, matrix, usefulness: u });
        }
    }
    Ok(best.expect("non-empty input"))
}
