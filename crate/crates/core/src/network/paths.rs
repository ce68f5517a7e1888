use serde::Serialize;

use super::RiskNetwork;
use crate::error::{Error, Result};

/// A simple directed path ending at the target, listed source first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedPath {
    pub nodes: Vec<usize>,
    /// Product of the link weights along the path.
    pub weight: f64,
}

impl WeightedPath {
    /// Number of links.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() < 2
    }

    pub fn ids<'a>(&self, net: &'a RiskNetwork) -> Vec<&'a str> {
        self.nodes.iter().map(|&k| net.node(k).id.as_str()).collect()
    }
}

/// All simple paths of length `1..=k` that end at `target`.
///
/// Level-0 nodes carry no risk value and are never traversed; they only
/// appear as the target. Output order is deterministic: depth-first from the
/// target over incoming links in node order.
pub fn k_paths(net: &RiskNetwork, target: usize, k: usize) -> Result<Vec<WeightedPath>> {
    if k < 1 {
        return Err(Error::InvalidParameter(format!("path length bound k={k} must be >= 1")));
    }
    if target >= net.len() {
        return Err(Error::InvalidParameter(format!("target index {target} out of range")));
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; net.len()];
    on_path[target] = true;
    // Reversed path: target first.
    let mut stack = vec![target];
    extend(net, k, 1.0, &mut stack, &mut on_path, &mut out);
    Ok(out)
}

fn extend(
    net: &RiskNetwork,
    k: usize,
    weight: f64,
    stack: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<WeightedPath>,
) {
    let head = *stack.last().expect("non-empty stack");
    for &(source, w) in net.incoming(head) {
        if on_path[source] || net.is_root(source) {
            continue;
        }
        let pw = weight * w;
        stack.push(source);
        on_path[source] = true;
        out.push(WeightedPath { nodes: stack.iter().rev().copied().collect(), weight: pw });
        if stack.len() <= k {
            extend(net, k, pw, stack, on_path, out);
        }
        on_path[source] = false;
        stack.pop();
    }
}
