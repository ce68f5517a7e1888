//! RiskRank: a 2-additive Choquet-style aggregation of predecessor risk
//! values, with the `min` of the conjunctive term replaced by a product.
//!
//! For a target with normalized capacity `(a_i, a_ij)` over its predecessors,
//!
//! ```text
//! RR = Σ_i (v_i − ½ Σ_j I_ij) x_i  +  Σ_{i<j} I_ij x_i x_j
//!      \______ direct _______/       \____ indirect ____/
//! ```
//!
//! with `v_i` the Shapley value and `I_ij` the interaction index. A non-root
//! node also carries its own risk through a self-loop (the individual
//! effect), optionally with unit weight, in which case the total is clamped
//! at 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{
    build_capacity, k_paths, validate_hierarchy, CapacityMode, NetworkSnapshot, RiskNetwork,
};
use crate::network::build::default_self_exposure;
use crate::quarter::Quarter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralWeightMode {
    /// Self-loop weight is its share of the normalized capacity.
    #[default]
    Shapley,
    /// Self-loop weight is fixed at 1.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RiskRankConfig {
    pub central_weight_mode: CentralWeightMode,
    pub clamp: bool,
    /// Longest predecessor path taken into account.
    pub max_path_length: usize,
}

impl Default for RiskRankConfig {
    fn default() -> Self {
        RiskRankConfig { central_weight_mode: CentralWeightMode::Shapley, clamp: true, max_path_length: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskDecomposition {
    pub target: String,
    pub individual: f64,
    pub direct: f64,
    pub indirect: f64,
    /// `individual + direct + indirect`.
    pub total_raw: f64,
    /// `total_raw`, clamped to 1 when clamping is on.
    pub total: f64,
}

impl RiskDecomposition {
    fn new(target: &str, individual: f64, direct: f64, indirect: f64, clamp: bool) -> Self {
        let total_raw = individual + direct + indirect;
        RiskDecomposition {
            target: target.to_string(),
            individual,
            direct,
            indirect,
            total_raw,
            total: if clamp { total_raw.min(1.0) } else { total_raw },
        }
    }
}

fn ensure_valid(net: &RiskNetwork) -> Result<()> {
    let report = validate_hierarchy(net);
    if report.is_valid() {
        Ok(())
    } else {
        let first: Vec<String> = report.errors().take(3).map(|i| i.message.clone()).collect();
        Err(Error::InvalidNetwork(first.join("; ")))
    }
}

fn root_id(net: &RiskNetwork) -> Result<&str> {
    net.root()
        .map(|r| net.node(r).id.as_str())
        .ok_or_else(|| Error::InvalidNetwork("no level-0 node".into()))
}

/// RiskRank of the root `S` from the 2-additive capacity of its predecessors.
pub fn riskrank_root(snapshot: &NetworkSnapshot) -> Result<RiskDecomposition> {
    let net = &snapshot.network;
    ensure_valid(net)?;
    let root = root_id(net)?;
    let nc = build_capacity(net, root, CapacityMode::Root)?;
    let x: Vec<f64> = nc.members.iter().map(|&m| net.risk(m)).collect::<Result<_>>()?;
    let (direct, indirect) = aggregate(&nc.capacity, &x, None);
    Ok(RiskDecomposition::new(root, 0.0, direct, indirect, true))
}

/// RiskRank of a non-root node, including its own risk through a self-loop.
///
/// With `max_path_length != 2` this delegates to [`riskrank_kpath`].
pub fn riskrank_node(snapshot: &NetworkSnapshot, target: &str, cfg: &RiskRankConfig) -> Result<RiskDecomposition> {
    if cfg.max_path_length != 2 {
        return riskrank_kpath(snapshot, target, cfg);
    }
    let net = &snapshot.network;
    ensure_valid(net)?;
    let t = net.index_of(target)?;
    let x_c = net.risk(t)?;
    let nc = build_capacity(net, target, CapacityMode::Central)?;
    let s = nc.self_element.expect("central mode has a self element");
    let x: Vec<f64> = nc
        .members
        .iter()
        .map(|&m| if m == t { Ok(x_c) } else { net.risk(m) })
        .collect::<Result<_>>()?;
    let (direct, indirect) = aggregate(&nc.capacity, &x, Some(s));
    let weight = match cfg.central_weight_mode {
        CentralWeightMode::Shapley => nc.capacity.shapley()[s],
        CentralWeightMode::Unit => 1.0,
    };
    Ok(RiskDecomposition::new(target, weight * x_c, direct, indirect, cfg.clamp))
}

/// Direct and indirect parts of the product-form 2-additive aggregation,
/// leaving out the `skip` element (the self-loop).
fn aggregate(
    cap: &crate::capacity::TwoAdditiveCapacity,
    x: &[f64],
    skip: Option<usize>,
) -> (f64, f64) {
    let v = cap.shapley();
    let n = cap.n();
    let mut direct = 0.0;
    for i in (0..n).filter(|&i| Some(i) != skip) {
        let spread: f64 = (0..n).map(|j| cap.interaction(i, j)).sum();
        direct += (v[i] - 0.5 * spread) * x[i];
    }
    let indirect = cap.pairs().map(|(i, j, a)| a * x[i] * x[j]).sum();
    (direct, indirect)
}

/// RiskRank counting every simple predecessor path of length up to `k`.
///
/// A path `n_m → … → n_1 → target` of length `m >= 2` adds mass equal to the
/// product of its link weights, contributing that mass times the product of
/// the risk values on the path. All masses, including the singletons and the
/// self-loop, share one normalizer, so `k = 2` coincides with the 2-additive
/// operators and the root total stays in `[0,1]`.
pub fn riskrank_kpath(snapshot: &NetworkSnapshot, target: &str, cfg: &RiskRankConfig) -> Result<RiskDecomposition> {
    let k = cfg.max_path_length;
    if k < 1 {
        return Err(Error::InvalidParameter(format!("max_path_length {k} must be >= 1")));
    }
    let net = &snapshot.network;
    ensure_valid(net)?;
    let t = net.index_of(target)?;
    let is_root = net.is_root(t);
    let paths = k_paths(net, t, k)?;

    let mut singleton_mass = 0.0;
    let mut path_mass = 0.0;
    let mut direct = 0.0;
    let mut indirect = 0.0;
    for p in &paths {
        let risk: f64 = p.nodes[..p.len()].iter().map(|&m| net.risk(m)).product::<Result<f64>>()?;
        if p.len() == 1 {
            singleton_mass += p.weight;
            direct += p.weight * risk;
        } else {
            path_mass += p.weight;
            indirect += p.weight * risk;
        }
    }

    if is_root {
        let z = singleton_mass + path_mass;
        if !(z > 0.0) {
            return Err(Error::NoCapacity(target.to_string()));
        }
        return Ok(RiskDecomposition::new(target, 0.0, direct / z, indirect / z, true));
    }

    let x_c = net.risk(t)?;
    let mut self_mass = net.node(t).self_exposure.unwrap_or_else(|| default_self_exposure(net, t));
    let mut z = singleton_mass + path_mass + self_mass;
    if !(z > 0.0) {
        self_mass = 1.0;
        z = 1.0;
    }
    let weight = match cfg.central_weight_mode {
        CentralWeightMode::Shapley => self_mass / z,
        CentralWeightMode::Unit => 1.0,
    };
    Ok(RiskDecomposition::new(target, weight * x_c, direct / z, indirect / z, cfg.clamp))
}

/// RiskRank of any node: root mode for the level-0 node, self-loop mode
/// otherwise.
pub fn riskrank(snapshot: &NetworkSnapshot, target: &str, cfg: &RiskRankConfig) -> Result<RiskDecomposition> {
    let t = snapshot.network.index_of(target)?;
    if snapshot.network.is_root(t) {
        if cfg.max_path_length == 2 {
            riskrank_root(snapshot)
        } else {
            riskrank_kpath(snapshot, target, cfg)
        }
    } else {
        riskrank_node(snapshot, target, cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub date: Quarter,
    #[serde(flatten)]
    pub decomposition: RiskDecomposition,
}

/// One decomposition per (date, target), ordered by snapshot then target.
pub fn riskrank_series(
    snapshots: &[NetworkSnapshot],
    targets: &[String],
    cfg: &RiskRankConfig,
) -> Result<Vec<SeriesRow>> {
    if let Some(first) = snapshots.first() {
        for s in &snapshots[1..] {
            first.check_same_structure(s)?;
        }
    }
    let per_snapshot: Vec<Vec<SeriesRow>> = snapshots
        .par_iter()
        .map(|snap| {
            targets
                .iter()
                .map(|t| {
                    riskrank(snap, t, cfg).map(|decomposition| SeriesRow { date: snap.date, decomposition })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_snapshot.into_iter().flatten().collect())
}
