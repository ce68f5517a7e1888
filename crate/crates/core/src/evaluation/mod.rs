//! Signal evaluation for early-warning outputs: contingency matrices, type I
//! and II error rates, the preference-weighted loss, absolute and relative
//! usefulness, ROC/AUC and threshold selection.

mod contingency;
pub mod fixtures;
mod report;
mod roc;

pub use contingency::{
    binarize, contingency, error_rates, loss, metrics, usefulness, ClassPriors, ContingencyMatrix, ErrorRates,
    Metrics, Usefulness,
};
pub use report::{evaluate, EvalReport, EvalRow};
pub use roc::{optimal_threshold, rank_auc, roc_auc, ThresholdChoice};

use crate::error::{Error, Result};

/// Policymaker preference between missed crises and false alarms.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PreferenceMu(f64);

impl PreferenceMu {
    pub fn new(mu: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&mu) {
            Ok(PreferenceMu(mu))
        } else {
            Err(Error::InvalidParameter(format!("preference {mu} outside [0,1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `0.0, 0.1, .., 1.0`.
pub fn default_mu_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}
