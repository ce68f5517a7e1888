use std::collections::BTreeMap;

use super::paths::k_paths;
use super::RiskNetwork;
use crate::capacity::TwoAdditiveCapacity;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMode {
    /// The target has no value of its own; only its predecessors count.
    Root,
    /// The target joins its own ground set through a self-loop.
    Central,
}

/// A normalized 2-additive capacity over the predecessors of a target node.
#[derive(Debug, Clone)]
pub struct NetworkCapacity {
    pub target: usize,
    /// Network node index of every ground-set element, in ground-set order.
    /// In central mode the target is the last element.
    pub members: Vec<usize>,
    /// Ground-set position of the target's self-loop (central mode only).
    pub self_element: Option<usize>,
    pub capacity: TwoAdditiveCapacity,
    /// Total unnormalized mass the coefficients were divided by.
    pub normalizer: f64,
}

impl NetworkCapacity {
    pub fn position(&self, node: usize) -> Option<usize> {
        self.members.iter().position(|&m| m == node)
    }
}

/// Default self-loop weight: the node's total incoming exposure capped at 1.
pub(crate) fn default_self_exposure(net: &RiskNetwork, target: usize) -> f64 {
    net.incoming(target).iter().map(|&(_, w)| w).sum::<f64>().min(1.0)
}

/// Builds the capacity a target node aggregates its predecessors with.
///
/// The ground set holds every node with a path of length 1 or 2 into the
/// target. Singleton masses are the direct link weights `l(i→t)`. The pair
/// mass of `{i, j}` sums the weight products of the 2-paths `j→i→t` and
/// `i→j→t`, so only nonnegative interactions arise. In central mode the
/// target is appended with mass equal to its self exposure and no pair mass.
/// Everything is then divided by the total mass.
pub fn build_capacity(net: &RiskNetwork, target: &str, mode: CapacityMode) -> Result<NetworkCapacity> {
    let t = net.index_of(target)?;
    let paths = k_paths(net, t, 2)?;

    let mut singleton: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pair: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for p in &paths {
        match p.nodes.as_slice() {
            &[i, _] => *singleton.entry(i).or_default() += p.weight,
            &[j, i, _] => {
                singleton.entry(i).or_default();
                singleton.entry(j).or_default();
                *pair.entry((i.min(j), i.max(j))).or_default() += p.weight;
            }
            _ => unreachable!("k_paths(.., 2) yields paths of length 1 or 2"),
        }
    }

    let mut members: Vec<usize> = singleton.keys().copied().collect();
    let mut coeffs: Vec<f64> = singleton.values().copied().collect();
    // Pair endpoints are predecessors, never the target, so positions are
    // taken from the sorted predecessor list before any self element.
    let pos = |node: usize| members.binary_search(&node).expect("member");
    let pairs: Vec<(usize, usize, f64)> = pair.iter().map(|(&(i, j), &a)| (pos(i), pos(j), a)).collect();
    let self_element = match mode {
        CapacityMode::Root => None,
        CapacityMode::Central => {
            let exposure = net
                .node(t)
                .self_exposure
                .unwrap_or_else(|| default_self_exposure(net, t));
            members.push(t);
            coeffs.push(exposure);
            Some(members.len() - 1)
        }
    };

    let mut z = coeffs.iter().sum::<f64>() + pairs.iter().map(|p| p.2).sum::<f64>();
    if !(z > 0.0) {
        match self_element {
            None => return Err(Error::NoCapacity(target.to_string())),
            // No exposure at all: the node only carries its own risk.
            Some(s) => {
                coeffs.iter_mut().for_each(|c| *c = 0.0);
                coeffs[s] = 1.0;
                z = 1.0;
            }
        }
    }
    let raw = TwoAdditiveCapacity::new(coeffs, pairs)?;
    Ok(NetworkCapacity {
        target: t,
        members,
        self_element,
        capacity: raw.scaled(1.0 / z),
        normalizer: z,
    })
}
