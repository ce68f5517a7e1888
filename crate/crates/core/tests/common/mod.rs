//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls the library's numerical routines.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riskrank::capacity::{FuzzyMeasure, TwoAdditiveCapacity};
use riskrank::network::{Link, Node, RiskNetwork};
use riskrank::Quarter;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fact(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn popcount(s: u32) -> usize {
    s.count_ones() as usize
}

/// Discrete Choquet integral straight from the definition: sort ascending,
/// then telescope `Σ (x_(i) − x_(i−1)) μ({(i), …, (n)})` with `x_(0) = 0`.
pub fn choquet_oracle(x: &[f64], mu: impl Fn(u32) -> f64) -> f64 {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut prev = 0.0;
    let mut total = 0.0;
    for pos in 0..idx.len() {
        let upper: u32 = idx[pos..].iter().fold(0, |s, &k| s | (1 << k));
        total += (x[idx[pos]] - prev) * mu(upper);
        prev = x[idx[pos]];
    }
    total
}

/// Shapley values by enumerating every coalition `K ⊆ N∖{i}`.
pub fn shapley_oracle(n: usize, mu: impl Fn(u32) -> f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let bit = 1u32 << i;
            (0..1u32 << n)
                .filter(|k| k & bit == 0)
                .map(|k| {
                    let s = popcount(k);
                    fact(n - s - 1) * fact(s) / fact(n) * (mu(k | bit) - mu(k))
                })
                .sum()
        })
        .collect()
}

/// Shapley interaction index by enumerating every `K ⊆ N∖{i,j}`.
pub fn interaction_oracle(n: usize, mu: impl Fn(u32) -> f64) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (bi, bj) = (1u32 << i, 1u32 << j);
            out[i][j] = (0..1u32 << n)
                .filter(|k| k & (bi | bj) == 0)
                .map(|k| {
                    let s = popcount(k);
                    fact(n - s - 2) * fact(s) / fact(n - 1) * (mu(k | bi | bj) - mu(k | bi) - mu(k | bj) + mu(k))
                })
                .sum();
        }
    }
    out
}

/// The n=3 measure used in the capacity examples.
pub fn example_measure_values() -> Vec<f64> {
    // Bitmask order: ∅, {1}, {2}, {1,2}, {3}, {1,3}, {2,3}, N.
    vec![0.0, 0.2, 0.3, 0.6, 0.1, 0.4, 0.5, 1.0]
}

/// A random monotone normalized measure: each subset exceeds the largest of
/// its maximal proper subsets by a random increment, then everything is
/// divided by `μ(N)`.
pub fn random_measure(rng: &mut impl Rng, n: usize) -> FuzzyMeasure {
    let size = 1usize << n;
    let mut v = vec![0.0; size];
    let mut order: Vec<u32> = (1..size as u32).collect();
    order.sort_by_key(|&s| popcount(s));
    for s in order {
        let base = (0..n).filter(|&i| s & (1 << i) != 0).map(|i| v[(s & !(1 << i)) as usize]).fold(0.0, f64::max);
        let inc = if rng.random::<f64>() < 0.2 { 0.0 } else { rng.random::<f64>() };
        v[s as usize] = base + inc;
    }
    let top = v[size - 1];
    if top == 0.0 {
        v[size - 1] = 1.0;
    } else {
        v.iter_mut().for_each(|x| *x /= top);
    }
    FuzzyMeasure::from_values(n, v).unwrap()
}

/// Raw 2-additive Möbius masses `(a_i, [(i, j, a_ij)])`, monotone and
/// normalized, with interactions of both signs.
pub fn random_two_additive(rng: &mut impl Rng, n: usize) -> (Vec<f64>, Vec<(usize, usize, f64)>) {
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < 0.7 {
                pairs.push((i, j, rng.random_range(-0.6..1.0f64)));
            }
        }
    }
    let mut single: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    // Monotone iff a_i + Σ_j min(a_ij, 0) >= 0 for every i.
    for (i, a) in single.iter_mut().enumerate() {
        let neg: f64 = pairs.iter().filter(|p| p.0 == i || p.1 == i).map(|p| p.2.min(0.0)).sum();
        if *a + neg < 0.0 {
            *a = -neg + 0.1 * rng.random::<f64>();
        }
    }
    let z: f64 = single.iter().sum::<f64>() + pairs.iter().map(|p| p.2).sum::<f64>();
    let single = single.into_iter().map(|a| a / z).collect();
    let pairs = pairs.into_iter().map(|(i, j, a)| (i, j, a / z)).collect();
    (single, pairs)
}

pub fn two_additive(single: &[f64], pairs: &[(usize, usize, f64)]) -> TwoAdditiveCapacity {
    TwoAdditiveCapacity::new(single.to_vec(), pairs.iter().copied()).unwrap()
}

/// `μ(A) = Σ_{i∈A} a_i + Σ_{{i,j}⊆A} a_ij`.
pub fn induced(single: &[f64], pairs: &[(usize, usize, f64)], s: u32) -> f64 {
    let a: f64 = (0..single.len()).filter(|&i| s & (1 << i) != 0).map(|i| single[i]).sum();
    let b: f64 = pairs.iter().filter(|p| s & (1 << p.0) != 0 && s & (1 << p.1) != 0).map(|p| p.2).sum();
    a + b
}

pub fn child_id(k: usize) -> String {
    format!("N{k}")
}

/// Root `S` with `m` level-1 children forming a complete sibling network.
/// About a fifth of the sibling links carry zero weight.
pub fn random_network(rng: &mut impl Rng, m: usize) -> RiskNetwork {
    let mut nodes = vec![Node::root("S")];
    nodes.extend((0..m).map(|k| Node::child(child_id(k), 1, "S", rng.random::<f64>())));
    let mut links = Vec::new();
    for a in 0..m {
        links.push(Link::new(child_id(a), "S", rng.random_range(0.05..1.0)));
        for b in 0..m {
            if a != b {
                let w = if rng.random::<f64>() < 0.2 { 0.0 } else { rng.random::<f64>() };
                links.push(Link::new(child_id(a), child_id(b), w));
            }
        }
    }
    RiskNetwork::new(nodes, links).unwrap()
}

/// Link weight by id, zero when absent.
pub fn w(net: &RiskNetwork, from: &str, to: &str) -> f64 {
    net.links().iter().find(|l| l.source == from && l.target == to).map_or(0.0, |l| l.weight)
}

pub fn x(net: &RiskNetwork, id: &str) -> f64 {
    net.nodes().iter().find(|n| n.id == id).and_then(|n| n.risk).unwrap()
}

/// RiskRank of the root written in Möbius form, built directly from the
/// link table: `a_i = l(i→S)`, `a_ij = l(j→i)l(i→S) + l(i→j)l(j→S)`,
/// everything divided by the total mass.
pub fn root_mobius_oracle(net: &RiskNetwork) -> f64 {
    let ids: Vec<String> = net.nodes().iter().filter(|n| n.level > 0).map(|n| n.id.clone()).collect();
    let mut z = 0.0;
    let mut acc = 0.0;
    for (p, i) in ids.iter().enumerate() {
        let a = w(net, i, "S");
        z += a;
        acc += a * x(net, i);
        for j in &ids[p + 1..] {
            let a = w(net, j, i) * w(net, i, "S") + w(net, i, j) * w(net, j, "S");
            z += a;
            acc += a * x(net, i) * x(net, j);
        }
    }
    acc / z
}

/// Node-mode RiskRank in Möbius form with the self-loop as an extra
/// singleton of mass `self_mass`, in Shapley-weight mode.
pub fn node_mobius_oracle(net: &RiskNetwork, target: &str, self_mass: f64) -> f64 {
    let preds: Vec<String> = net
        .nodes()
        .iter()
        .filter(|n| n.level > 0 && n.id != target)
        .map(|n| n.id.clone())
        .collect();
    let mut z = self_mass;
    let mut acc = self_mass * x(net, target);
    for (p, i) in preds.iter().enumerate() {
        let a = w(net, i, target);
        z += a;
        acc += a * x(net, i);
        for j in &preds[p + 1..] {
            let a = w(net, j, i) * w(net, i, target) + w(net, i, j) * w(net, j, target);
            z += a;
            acc += a * x(net, i) * x(net, j);
        }
    }
    acc / z
}

pub fn q(s: &str) -> Quarter {
    s.parse().unwrap()
}
