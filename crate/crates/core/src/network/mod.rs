//! Hierarchical risk network: a root `S` at level 0, and below every node a
//! complete directed sub-network of its children. Nodes other than the root
//! carry a risk value in `[0,1]`; links carry nonnegative exposure weights.

pub(crate) mod build;
mod paths;

use std::collections::{HashMap, HashSet};

use serde::Serialize;

pub use build::{build_capacity, CapacityMode, NetworkCapacity};
pub use paths::{k_paths, WeightedPath};

use crate::error::{Error, Result};
use crate::quarter::Quarter;
use crate::validation::ValidationReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub id: String,
    pub level: u32,
    pub parent: Option<String>,
    pub risk: Option<f64>,
    /// Weight of the self-loop used when the node is evaluated with its own
    /// prior risk level.
    pub self_exposure: Option<f64>,
}

impl Node {
    pub fn root(id: impl Into<String>) -> Self {
        Node { id: id.into(), level: 0, parent: None, risk: None, self_exposure: None }
    }

    pub fn child(id: impl Into<String>, level: u32, parent: impl Into<String>, risk: f64) -> Self {
        Node {
            id: id.into(),
            level,
            parent: Some(parent.into()),
            risk: Some(risk),
            self_exposure: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Link {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

impl Link {
    pub fn new(source: impl Into<String>, target: impl Into<String>, weight: f64) -> Self {
        Link { source: source.into(), target: target.into(), weight }
    }
}

/// Directed weighted graph over hierarchically organised nodes.
///
/// Missing links are treated as weight 0. Range and hierarchy conditions are
/// not enforced at construction; see [`validate_hierarchy`].
#[derive(Debug, Clone)]
pub struct RiskNetwork {
    nodes: Vec<Node>,
    links: Vec<Link>,
    index: HashMap<String, usize>,
    weights: HashMap<(usize, usize), f64>,
    incoming: Vec<Vec<(usize, f64)>>,
}

impl RiskNetwork {
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (k, node) in nodes.iter().enumerate() {
            if node.id.is_empty() {
                return Err(Error::InvalidNetwork("empty node id".into()));
            }
            if index.insert(node.id.clone(), k).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate node id `{}`", node.id)));
            }
        }
        let mut weights = HashMap::with_capacity(links.len());
        let mut incoming = vec![Vec::new(); nodes.len()];
        for link in &links {
            let s = *index.get(&link.source).ok_or_else(|| Error::UnknownNode(link.source.clone()))?;
            let t = *index.get(&link.target).ok_or_else(|| Error::UnknownNode(link.target.clone()))?;
            if s == t {
                return Err(Error::InvalidNetwork(format!(
                    "self link on `{}`, use self_exposure instead",
                    link.source
                )));
            }
            if !link.weight.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "non-finite weight on {} -> {}",
                    link.source, link.target
                )));
            }
            if weights.insert((s, t), link.weight).is_some() {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate link {} -> {}",
                    link.source, link.target
                )));
            }
            incoming[t].push((s, link.weight));
        }
        for list in &mut incoming {
            list.sort_by_key(|&(s, _)| s);
        }
        Ok(RiskNetwork { nodes, links, index, weights, incoming })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn node_by_id(&self, id: &str) -> Result<&Node> {
        Ok(&self.nodes[self.index_of(id)?])
    }

    /// Weight of `source -> target`, 0 when the link is absent.
    pub fn weight(&self, source: usize, target: usize) -> f64 {
        self.weights.get(&(source, target)).copied().unwrap_or(0.0)
    }

    pub fn has_link(&self, source: usize, target: usize) -> bool {
        self.weights.contains_key(&(source, target))
    }

    /// Incoming `(source, weight)` pairs of a node, ordered by source index.
    pub fn incoming(&self, target: usize) -> &[(usize, f64)] {
        &self.incoming[target]
    }

    /// Index of the first level-0 node.
    pub fn root(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.level == 0)
    }

    pub fn is_root(&self, idx: usize) -> bool {
        self.nodes[idx].level == 0
    }

    pub fn children(&self, parent: usize) -> Vec<usize> {
        let pid = &self.nodes[parent].id;
        (0..self.nodes.len())
            .filter(|&k| self.nodes[k].parent.as_deref() == Some(pid.as_str()))
            .collect()
    }

    pub fn risk(&self, idx: usize) -> Result<f64> {
        self.nodes[idx].risk.ok_or_else(|| Error::MissingRiskValue(self.nodes[idx].id.clone()))
    }

    /// Copy of the network with risk values replaced where `f` returns
    /// `Some`. Structure and weights are unchanged.
    pub fn with_risk_values(&self, f: impl Fn(&Node) -> Option<f64>) -> RiskNetwork {
        let mut out = self.clone();
        for node in &mut out.nodes {
            if let Some(v) = f(node) {
                node.risk = Some(v);
            }
        }
        out
    }

    /// Copy of the network with every link weight replaced by `f(link)`.
    pub fn map_weights(&self, f: impl Fn(&Link) -> f64) -> Result<RiskNetwork> {
        let links = self.links.iter().map(|l| Link { weight: f(l), ..l.clone() }).collect();
        RiskNetwork::new(self.nodes.clone(), links)
    }
}

/// Level sizes `S_i` and per-parent sub-network sizes `S_i^j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchySpec {
    pub level_sizes: Vec<usize>,
    /// `subnetwork_sizes[i][j]`: number of children of the `j`-th level-`i`
    /// node (in node order).
    pub subnetwork_sizes: Vec<Vec<usize>>,
}

impl HierarchySpec {
    pub fn of(net: &RiskNetwork) -> Self {
        let depth = net.nodes.iter().map(|n| n.level as usize + 1).max().unwrap_or(0);
        let mut level_sizes = vec![0; depth];
        for n in &net.nodes {
            level_sizes[n.level as usize] += 1;
        }
        let subnetwork_sizes = (0..depth)
            .map(|lvl| {
                (0..net.len())
                    .filter(|&k| net.nodes[k].level as usize == lvl)
                    .map(|k| {
                        net.children(k)
                            .into_iter()
                            .filter(|&c| net.nodes[c].level as usize == lvl + 1)
                            .count()
                    })
                    .collect()
            })
            .collect();
        HierarchySpec { level_sizes, subnetwork_sizes }
    }

    /// `S_{i+1} = Σ_j S_i^j` for every level.
    pub fn is_consistent(&self) -> bool {
        (0..self.level_sizes.len()).all(|i| {
            let next = self.level_sizes.get(i + 1).copied().unwrap_or(0);
            self.subnetwork_sizes[i].iter().sum::<usize>() == next
        })
    }
}

/// Reports root uniqueness, parent/level consistency, value ranges and the
/// completeness of sibling sub-networks.
///
/// Absent sibling links and absent child-to-parent links are reported as
/// warnings only: they are read as weight 0.
pub fn validate_hierarchy(net: &RiskNetwork) -> ValidationReport {
    let mut report = ValidationReport::new();
    let roots: Vec<&Node> = net.nodes.iter().filter(|n| n.level == 0).collect();
    match roots.len() {
        0 => report.error("root", "no level-0 node"),
        1 => {}
        k => report.error(
            "root",
            format!(
                "{k} level-0 nodes: {}",
                roots.iter().map(|n| n.id.as_str()).collect::<Vec<_>>().join(", ")
            ),
        ),
    }

    for node in &net.nodes {
        if node.level == 0 {
            if node.parent.is_some() {
                report.error("level", format!("root `{}` has a parent", node.id));
            }
            if node.risk.is_some() {
                report.error("root_value", format!("root `{}` has a risk value", node.id));
            }
        } else {
            match node.parent.as_deref().map(|p| net.index.get(p)) {
                None => report.error("parent", format!("node `{}` has no parent", node.id)),
                Some(None) => report.error(
                    "parent",
                    format!("node `{}` has unknown parent `{}`", node.id, node.parent.as_deref().unwrap_or("")),
                ),
                Some(Some(&p)) => {
                    let pl = net.nodes[p].level;
                    if pl + 1 != node.level {
                        report.error(
                            "level",
                            format!(
                                "node `{}` at level {} has parent `{}` at level {pl}",
                                node.id, node.level, net.nodes[p].id
                            ),
                        );
                    }
                }
            }
            match node.risk {
                None => report.error("risk_value", format!("node `{}` has no risk value", node.id)),
                Some(x) if !(0.0..=1.0).contains(&x) => {
                    report.error("risk_range", format!("node `{}` risk value {x} outside [0,1]", node.id))
                }
                _ => {}
            }
        }
        if let Some(e) = node.self_exposure {
            if !(e >= 0.0) || !e.is_finite() {
                report.error("exposure_range", format!("node `{}` self exposure {e} < 0", node.id));
            }
        }
    }

    for link in &net.links {
        if link.weight < 0.0 {
            report.error(
                "weight_range",
                format!("link {} -> {} has negative weight {}", link.source, link.target, link.weight),
            );
        }
    }

    for parent in 0..net.len() {
        let kids = net.children(parent);
        for &a in &kids {
            if !net.has_link(a, parent) {
                report.warning(
                    "parent_link",
                    format!("no link {} -> {}", net.nodes[a].id, net.nodes[parent].id),
                );
            }
            for &b in &kids {
                if a != b && !net.has_link(a, b) {
                    report.warning(
                        "completeness",
                        format!("sibling link {} -> {} absent", net.nodes[a].id, net.nodes[b].id),
                    );
                }
            }
        }
    }

    if !HierarchySpec::of(net).is_consistent() {
        report.error("level", "level sizes do not match the per-parent sub-network sizes");
    }
    report
}

/// A network observed at one quarter.
#[derive(Debug, Clone)]
pub struct NetworkSnapshot {
    pub date: Quarter,
    pub network: RiskNetwork,
}

impl NetworkSnapshot {
    pub fn new(date: Quarter, network: RiskNetwork) -> Self {
        NetworkSnapshot { date, network }
    }

    /// Errors unless both snapshots have the same nodes (id, level, parent)
    /// and the same set of directed links. Values may differ.
    pub fn check_same_structure(&self, other: &NetworkSnapshot) -> Result<()> {
        let (a, b) = (&self.network, &other.network);
        let drift = |msg: String| Err(Error::StructuralDrift(format!("{} vs {}: {msg}", self.date, other.date)));
        if a.len() != b.len() {
            return drift(format!("{} vs {} nodes", a.len(), b.len()));
        }
        for (x, y) in a.nodes.iter().zip(&b.nodes) {
            if x.id != y.id || x.level != y.level || x.parent != y.parent {
                return drift(format!("node `{}` differs from `{}`", x.id, y.id));
            }
        }
        let ka: HashSet<_> = a.weights.keys().collect();
        let kb: HashSet<_> = b.weights.keys().collect();
        if ka != kb {
            return drift("link sets differ".into());
        }
        Ok(())
    }
}
