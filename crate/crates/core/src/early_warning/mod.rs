//! Early-warning models: pre-crisis labels over an entity × quarter panel,
//! a ridge-stabilised logistic regression, and the recursive out-of-sample
//! exercise that turns them into real-time crisis probabilities.

mod backtest;
mod labels;
mod logit;
mod panel;

pub use backtest::{recursive_backtest, BacktestConfig, BacktestResult, Prediction, MIN_TRAINING_QUARTERS};
pub use labels::{label_precrisis, CrisisEvent, CrisisEvents, Label, LabelSeries};
pub use logit::{fit_logit, fit_logit_with, predict_prob, LogitModel, LogitOptions};
pub use panel::IndicatorPanel;
