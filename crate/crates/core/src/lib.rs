//! RiskRank: aggregation of node-level risk and link-level interconnectedness
//! over hierarchical networks with a 2-additive Choquet integral, plus the
//! early-warning backtesting and usefulness evaluation used to validate it.
//!
//! The crate is organised bottom-up:
//!
//! - [`capacity`]: fuzzy measures, Choquet integrals, Shapley and interaction
//!   indices, weighted mean and OWA.
//! - [`network`]: the hierarchical risk network, its validation and the
//!   construction of a 2-additive capacity for a target node.
//! - [`engine`]: RiskRank for the root and for internal nodes, decomposed into
//!   individual, direct and indirect effects, and the k-path extension.
//! - [`early_warning`]: pre-crisis labelling, logistic estimation and the
//!   recursive out-of-sample backtest.
//! - [`evaluation`]: contingency matrices, loss, usefulness, ROC/AUC.
//! - [`io`], [`synth`], [`config`]: file formats, synthetic fixtures and run
//!   configuration used by the `riskrank` binary.

pub mod capacity;
pub mod config;
pub mod early_warning;
pub mod engine;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod network;
pub mod quarter;
pub mod synth;
pub mod validation;

pub use error::{Error, Result};
pub use quarter::Quarter;
pub use validation::{Issue, Severity, ValidationReport};
