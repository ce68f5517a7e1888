use serde::Serialize;

use super::PreferenceMu;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ContingencyMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ContingencyMatrix {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Result<Self> {
        let cm = ContingencyMatrix { tp, tn, fp, fn_ };
        if cm.total() == 0 {
            return Err(Error::InsufficientData("empty contingency matrix".into()));
        }
        Ok(cm)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn priors(&self) -> ClassPriors {
        let n = self.total() as f64;
        ClassPriors { p1: (self.tp + self.fn_) as f64 / n, p2: (self.tn + self.fp) as f64 / n }
    }
}

/// Unconditional class frequencies: crises `p1`, tranquil periods `p2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassPriors {
    pub p1: f64,
    pub p2: f64,
}

/// `B_n = 1` iff `p_n > τ`.
pub fn binarize(probs: &[f64], tau: f64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!("threshold {tau} outside [0,1]")));
    }
    Ok(probs.iter().map(|&p| p > tau).collect())
}

/// Counts predictions against actual labels, skipping entries whose `mask`
/// flag is set.
pub fn contingency(predicted: &[bool], actual: &[bool], mask: &[bool]) -> Result<ContingencyMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch { expected: actual.len(), actual: predicted.len() });
    }
    if mask.len() != actual.len() {
        return Err(Error::DimensionMismatch { expected: actual.len(), actual: mask.len() });
    }
    let mut cm = ContingencyMatrix::default();
    for ((&b, &c), &skip) in predicted.iter().zip(actual).zip(mask) {
        if skip {
            continue;
        }
        match (b, c) {
            (true, true) => cm.tp += 1,
            (false, false) => cm.tn += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
        }
    }
    if cm.total() == 0 {
        return Err(Error::InsufficientData("no observations left after masking".into()));
    }
    Ok(cm)
}

/// Type I (`FN/(FN+TP)`) and type II (`FP/(TN+FP)`) error rates; `None`
/// when the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRates {
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn error_rates(cm: &ContingencyMatrix) -> ErrorRates {
    ErrorRates { t1: ratio(cm.fn_, cm.fn_ + cm.tp), t2: ratio(cm.fp, cm.tn + cm.fp) }
}

/// `L(μ) = μ T1 P1 + (1 − μ) T2 P2`. An undefined rate only occurs with a
/// zero prior, so its term vanishes.
pub fn loss(cm: &ContingencyMatrix, mu: PreferenceMu) -> f64 {
    let mu = mu.value();
    let ErrorRates { t1, t2 } = error_rates(cm);
    let ClassPriors { p1, p2 } = cm.priors();
    mu * t1.unwrap_or(0.0) * p1 + (1.0 - mu) * t2.unwrap_or(0.0) * p2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Usefulness {
    /// `U_a = min(μ P1, (1 − μ) P2) − L(μ)`.
    pub absolute: f64,
    /// `U_a` over the perfect model's `U_a`, i.e. `min(μ P1, (1 − μ) P2)`.
    /// Reported as 0 when that best-guess loss is already 0.
    pub relative: f64,
    pub best_guess_loss: f64,
}

pub fn usefulness(cm: &ContingencyMatrix, mu: PreferenceMu) -> Usefulness {
    let ClassPriors { p1, p2 } = cm.priors();
    let m = mu.value();
    let best = (m * p1).min((1.0 - m) * p2);
    let absolute = best - loss(cm, mu);
    let relative = if best > 0.0 { absolute / best } else { 0.0 };
    Usefulness { absolute, relative, best_guess_loss: best }
}

/// Precision and recall of signals (crisis class) and of tranquil
/// predictions, plus accuracy. Undefined ratios are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub precision_crisis: Option<f64>,
    pub recall_crisis: Option<f64>,
    pub precision_tranquil: Option<f64>,
    pub recall_tranquil: Option<f64>,
    pub accuracy: f64,
}

pub fn metrics(cm: &ContingencyMatrix) -> Metrics {
    Metrics {
        precision_crisis: ratio(cm.tp, cm.fp + cm.tp),
        recall_crisis: ratio(cm.tp, cm.fn_ + cm.tp),
        precision_tranquil: ratio(cm.tn, cm.fn_ + cm.tn),
        recall_tranquil: ratio(cm.tn, cm.fp + cm.tn),
        accuracy: (cm.tp + cm.tn) as f64 / cm.total() as f64,
    }
}
