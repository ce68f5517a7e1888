use rayon::prelude::*;
use serde::Serialize;

use super::labels::{label_precrisis, CrisisEvents, Label};
use super::logit::{fit_logit_with, predict_prob, LogitModel, LogitOptions};
use super::panel::IndicatorPanel;
use crate::error::{Error, Result};
use crate::quarter::Quarter;

/// Minimum number of quarters available for the first training window.
pub const MIN_TRAINING_QUARTERS: i32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BacktestConfig {
    pub h1: i32,
    pub h2: i32,
    /// Publication lag in quarters.
    pub lag: i32,
    /// First evaluation quarter.
    pub start: Quarter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub entity: String,
    pub quarter: Quarter,
    /// `None` when no model could be fitted or the row has missing values.
    pub probability: Option<f64>,
    pub train_end: Option<Quarter>,
    pub label: Label,
}

#[derive(Debug, Clone)]
pub struct BacktestResult {
    /// Ordered by (entity, quarter).
    pub predictions: Vec<Prediction>,
    /// The model fitted for each evaluation quarter, if any.
    pub models: Vec<(Quarter, Option<LogitModel>)>,
}

/// Recursive real-time exercise over an increasing window: for every panel
/// quarter `t >= start`, a model is fitted on all usable labelled rows dated
/// at or before `t - lag` and used to predict every entity at `t`.
pub fn recursive_backtest(panel: &IndicatorPanel, events: &CrisisEvents, cfg: &BacktestConfig) -> Result<BacktestResult> {
    if cfg.lag < 0 {
        return Err(Error::InvalidParameter(format!("lag {} must be >= 0", cfg.lag)));
    }
    let labels = label_precrisis(events, panel, cfg.h1, cfg.h2)?;
    let first = *panel
        .quarters()
        .first()
        .ok_or_else(|| Error::InsufficientData("empty indicator panel".into()))?;
    let available = cfg.start.offset(-cfg.lag).since(first) + 1;
    if available < MIN_TRAINING_QUARTERS {
        return Err(Error::InsufficientData(format!(
            "start {} leaves {available} training quarters, need {MIN_TRAINING_QUARTERS}",
            cfg.start
        )));
    }

    let eval_quarters: Vec<(usize, Quarter)> =
        panel.quarters().iter().copied().enumerate().filter(|&(_, q)| q >= cfg.start).collect();
    if eval_quarters.is_empty() {
        return Err(Error::InsufficientData(format!("start {} is after the last panel quarter", cfg.start)));
    }
    let opts = LogitOptions::default();

    let per_quarter: Vec<(Quarter, Option<LogitModel>, Vec<Prediction>)> = eval_quarters
        .par_iter()
        .map(|&(qi, t)| {
            let window_end = t.offset(-cfg.lag);
            let mut x = Vec::new();
            let mut y = Vec::new();
            let mut latest: Option<Quarter> = None;
            for (e, _) in panel.entities().iter().enumerate() {
                for (pq, &q) in panel.quarters().iter().enumerate() {
                    if q > window_end {
                        break;
                    }
                    let Some(label) = labels.get(e, pq).as_bool() else { continue };
                    let Some(row) = panel.complete_row(e, pq) else { continue };
                    x.push(row);
                    y.push(label);
                    latest = Some(latest.map_or(q, |l: Quarter| l.max(q)));
                }
            }
            let model = fit_logit_with(&x, &y, &opts).ok().map(|mut m| {
                m.train_end = latest;
                m
            });
            let preds = panel
                .entities()
                .iter()
                .enumerate()
                .map(|(e, entity)| {
                    let probability = model
                        .as_ref()
                        .and_then(|m| predict_prob(m, panel.row(e, qi)).ok().flatten());
                    Prediction {
                        entity: entity.clone(),
                        quarter: t,
                        probability,
                        train_end: model.as_ref().and_then(|m| m.train_end),
                        label: labels.get(e, qi),
                    }
                })
                .collect();
            (t, model, preds)
        })
        .collect();

    let mut predictions = Vec::new();
    let mut models = Vec::with_capacity(per_quarter.len());
    for (t, model, preds) in per_quarter {
        predictions.extend(preds);
        models.push((t, model));
    }
    predictions.sort_by(|a, b| (&a.entity, a.quarter).cmp(&(&b.entity, b.quarter)));
    Ok(BacktestResult { predictions, models })
}
