//! Reference contingency counts for a country-level early-warning model and
//! its RiskRank counterpart (horizon 5-12 quarters, 1286 observations), with
//! the relative usefulness printed alongside them. Used to check the chain
//! counts → error rates → loss → usefulness.

use serde::Serialize;

use super::contingency::{usefulness, ContingencyMatrix};
use super::PreferenceMu;

/// `(μ, TP, TN, FP, FN)` per preference for the individual-probability model.
pub const INDIVIDUAL_COUNTS: [(f64, u64, u64, u64, u64); 11] = [
    (0.0, 0, 1146, 1, 139),
    (0.1, 0, 1146, 1, 139),
    (0.2, 0, 1146, 1, 139),
    (0.3, 30, 1138, 9, 109),
    (0.4, 30, 1138, 9, 109),
    (0.5, 30, 1138, 9, 109),
    (0.6, 98, 1052, 95, 41),
    (0.7, 113, 1028, 119, 26),
    (0.8, 116, 1018, 129, 23),
    (0.9, 121, 997, 150, 18),
    (1.0, 139, 0, 1147, 0),
];

/// `(μ, TP, TN, FP, FN)` per preference for RiskRank.
pub const RISKRANK_COUNTS: [(f64, u64, u64, u64, u64); 11] = [
    (0.0, 0, 1146, 1, 139),
    (0.1, 0, 1146, 1, 139),
    (0.2, 0, 1146, 1, 139),
    (0.3, 30, 1138, 9, 109),
    (0.4, 30, 1138, 9, 109),
    (0.5, 45, 1127, 20, 94),
    (0.6, 114, 1055, 92, 25),
    (0.7, 114, 1055, 92, 25),
    (0.8, 114, 1055, 92, 25),
    (0.9, 122, 998, 149, 17),
    (1.0, 139, 0, 1147, 0),
];

/// Printed relative usefulness (%) of the individual model, μ = 0.0..1.0.
pub const INDIVIDUAL_PRINTED_UR: [f64; 11] = [0.0, -6.0, -3.0, 6.0, 12.0, 15.0, 25.0, 44.0, 60.0, 73.0, 0.0];

/// Printed relative usefulness (%) of RiskRank, μ = 0.0..1.0.
pub const RISKRANK_PRINTED_UR: [f64; 11] = [0.0, -6.0, -3.0, 7.0, 18.0, 38.0, 39.0, 54.0, 66.0, 74.0, 0.0];

/// Printed metric cells (%) of the individual model at μ = 0.6.
pub const INDIVIDUAL_MU06_CELLS: PrintedMetrics = PrintedMetrics {
    precision_crisis: Some(50.78),
    recall_crisis: Some(70.50),
    precision_tranquil: Some(96.25),
    recall_tranquil: Some(91.72),
    accuracy: 89.42,
};

/// Printed metric cells (%) of the individual model at μ = 1.0; the tranquil
/// precision is printed as "-".
pub const INDIVIDUAL_MU10_CELLS: PrintedMetrics = PrintedMetrics {
    precision_crisis: Some(10.81),
    recall_crisis: Some(100.0),
    precision_tranquil: None,
    recall_tranquil: Some(0.0),
    accuracy: 10.81,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrintedMetrics {
    pub precision_crisis: Option<f64>,
    pub recall_crisis: Option<f64>,
    pub precision_tranquil: Option<f64>,
    pub recall_tranquil: Option<f64>,
    pub accuracy: f64,
}

pub fn matrix(row: (f64, u64, u64, u64, u64)) -> (f64, ContingencyMatrix) {
    let (mu, tp, tn, fp, fn_) = row;
    (mu, ContingencyMatrix { tp, tn, fp, fn_ })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reconciliation {
    pub mu: f64,
    /// Derived relative usefulness in percent, rounded to 0.1.
    pub derived_pct: f64,
    pub printed_pct: f64,
    /// `|derived − printed| <= tolerance`.
    pub consistent: bool,
}

/// Recomputes relative usefulness from each count row and compares it with
/// the printed percentage.
pub fn reconcile(
    counts: &[(f64, u64, u64, u64, u64)],
    printed_pct: &[f64],
    tolerance_pp: f64,
) -> Vec<Reconciliation> {
    counts
        .iter()
        .zip(printed_pct)
        .map(|(&row, &printed)| {
            let (mu, cm) = matrix(row);
            let u = usefulness(&cm, PreferenceMu::new(mu).expect("fixture μ in [0,1]"));
            let derived = (u.relative * 1000.0).round() / 10.0;
            Reconciliation {
                mu,
                derived_pct: derived,
                printed_pct: printed,
                consistent: (derived - printed).abs() <= tolerance_pp + 1e-9,
            }
        })
        .collect()
}

/// Rounds a fraction to a percentage with two decimals.
pub fn pct2(v: f64) -> f64 {
    (v * 10000.0).round() / 100.0
}
