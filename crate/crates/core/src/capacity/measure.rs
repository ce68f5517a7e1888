use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{cardinality, full_set, subset_label};
use crate::error::{Error, Result};
use crate::validation::ValidationReport;

pub type Subset = u32;

/// Largest ground set for which the dense subset table is kept.
pub const MAX_GROUND_SIZE: usize = 20;

/// Slack allowed when checking `A ⊆ B => μ(A) <= μ(B)`.
pub const MONOTONICITY_EPS: f64 = 1e-12;

/// Cap on individually reported monotonicity violations.
const MAX_REPORTED: usize = 1000;

/// A set function over `{0, .., n-1}` stored as a dense table of all `2^n`
/// subset values, indexed by bitmask.
///
/// Construction only checks the table shape; boundary and monotonicity
/// conditions are reported by [`validate_measure`] and enforced by the
/// operators that need a proper capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyMeasure {
    n: usize,
    values: Vec<f64>,
    valid: bool,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    n: usize,
    mu: BTreeMap<String, f64>,
}

impl FuzzyMeasure {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_GROUND_SIZE {
            return Err(Error::InvalidMeasure(format!(
                "ground set size {n} outside 1..={MAX_GROUND_SIZE}"
            )));
        }
        if values.len() != 1 << n {
            return Err(Error::InvalidMeasure(format!(
                "expected {} subset values for n={n}, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure(format!(
                "non-finite value at subset {}",
                subset_label(pos as Subset)
            )));
        }
        let mut m = FuzzyMeasure { n, values, valid: false };
        m.valid = m.check(false).is_valid();
        Ok(m)
    }

    pub fn from_fn(n: usize, f: impl Fn(Subset) -> f64) -> Result<Self> {
        if n == 0 || n > MAX_GROUND_SIZE {
            return Err(Error::InvalidMeasure(format!(
                "ground set size {n} outside 1..={MAX_GROUND_SIZE}"
            )));
        }
        Self::from_values(n, (0..1u32 << n).map(f).collect())
    }

    /// The additive measure `μ(A) = Σ_{i∈A} w_i`.
    pub fn additive(weights: &[f64]) -> Result<Self> {
        Self::from_fn(weights.len(), |s| {
            weights.iter().enumerate().filter(|(i, _)| s & (1 << i) != 0).map(|(_, w)| w).sum()
        })
    }

    /// A symmetric measure whose value depends only on `|A|`; `by_size[k]` is
    /// the value of every subset of size `k`.
    pub fn symmetric(by_size: &[f64]) -> Result<Self> {
        let n = by_size.len().saturating_sub(1);
        Self::from_fn(n, |s| by_size[cardinality(s)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, subset: Subset) -> f64 {
        self.values[subset as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    fn ensure_valid(&self) -> Result<()> {
        if self.valid {
            Ok(())
        } else {
            Err(Error::InvalidMeasure(self.check(true).to_string()))
        }
    }

    fn check(&self, limit: bool) -> ValidationReport {
        let mut report = ValidationReport::new();
        let full = full_set(self.n);
        if self.values[0].abs() > MONOTONICITY_EPS {
            report.error("boundary", format!("mu({{}}) = {} != 0", self.values[0]));
        }
        if (self.values[full as usize] - 1.0).abs() > MONOTONICITY_EPS {
            report.error(
                "boundary",
                format!("mu(N) = {} != 1", self.values[full as usize]),
            );
        }
        let mut violations = 0usize;
        for a in 0..=full {
            let va = self.values[a as usize];
            for i in 0..self.n {
                let bit = 1 << i;
                if a & bit != 0 {
                    continue;
                }
                let b = a | bit;
                let vb = self.values[b as usize];
                if va > vb + MONOTONICITY_EPS {
                    violations += 1;
                    if !limit || violations <= MAX_REPORTED {
                        report.error(
                            "monotonicity",
                            format!(
                                "mu({}) = {va} > mu({}) = {vb}",
                                subset_label(a),
                                subset_label(b)
                            ),
                        );
                    }
                }
            }
        }
        if limit && violations > MAX_REPORTED {
            report.error(
                "monotonicity",
                format!("{} further violations not listed", violations - MAX_REPORTED),
            );
        }
        report
    }

    /// Serializes as `{"n": n, "mu": {"<sorted 1-based labels>": value}}`;
    /// the empty set has the key `""`.
    pub fn to_json(&self) -> String {
        let mu = (0..self.values.len())
            .map(|s| (json_key(s as Subset), self.values[s]))
            .collect();
        serde_json::to_string_pretty(&MeasureJson { n: self.n, mu }).expect("measure serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MeasureJson = serde_json::from_str(text)?;
        let n = raw.n;
        if n == 0 || n > MAX_GROUND_SIZE {
            return Err(Error::InvalidMeasure(format!(
                "ground set size {n} outside 1..={MAX_GROUND_SIZE}"
            )));
        }
        let mut values = vec![f64::NAN; 1 << n];
        for (key, v) in &raw.mu {
            let s = parse_key(key, n)?;
            values[s as usize] = *v;
        }
        if let Some(pos) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::MissingSubset(subset_label(pos as Subset)));
        }
        Self::from_values(n, values)
    }
}

fn json_key(subset: Subset) -> String {
    let items: Vec<String> = (0..32)
        .filter(|i| subset & (1 << i) != 0)
        .map(|i| (i + 1).to_string())
        .collect();
    items.join(",")
}

fn parse_key(key: &str, n: usize) -> Result<Subset> {
    let key = key.trim();
    if key.is_empty() {
        return Ok(0);
    }
    let mut s: Subset = 0;
    let mut last = 0usize;
    for part in key.split(',') {
        let idx: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::InvalidMeasure(format!("bad subset key `{key}`")))?;
        if idx == 0 || idx > n || idx <= last {
            return Err(Error::InvalidMeasure(format!(
                "subset key `{key}` must list increasing indices in 1..={n}"
            )));
        }
        last = idx;
        s |= 1 << (idx - 1);
    }
    Ok(s)
}

/// Reports every boundary violation and every covering pair `A ⊂ A∪{i}` with
/// `μ(A) > μ(A∪{i})`. Monotonicity on covering pairs implies it on all pairs.
pub fn validate_measure(measure: &FuzzyMeasure) -> ValidationReport {
    measure.check(true)
}

/// Discrete Choquet integral `Σ_i (x_(i) − x_(i−1)) μ(C_(i))`.
///
/// Ties are ordered by original index; any consistent order yields the same
/// value.
pub fn choquet_general(x: &[f64], measure: &FuzzyMeasure) -> Result<f64> {
    if x.len() != measure.n {
        return Err(Error::DimensionMismatch { expected: measure.n, actual: x.len() });
    }
    measure.ensure_valid()?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));

    let mut upper = full_set(measure.n);
    let mut prev = 0.0;
    let mut acc = 0.0;
    for &i in &order {
        acc += (x[i] - prev) * measure.value(upper);
        prev = x[i];
        upper &= !(1 << i);
    }
    Ok(acc)
}

/// Shapley importance index of every element.
pub fn shapley(measure: &FuzzyMeasure) -> Result<Vec<f64>> {
    measure.ensure_valid()?;
    let n = measure.n;
    // (n-k-1)! k! / n! = 1 / (n * C(n-1, k))
    let weights: Vec<f64> = (0..n).map(|k| 1.0 / (n as f64 * binomial(n - 1, k))).collect();
    let mut v = vec![0.0; n];
    for k in 0..=full_set(n) {
        let wk = weights.get(cardinality(k)).copied().unwrap_or(0.0);
        let base = measure.value(k);
        for (i, vi) in v.iter_mut().enumerate() {
            if k & (1 << i) == 0 {
                *vi += wk * (measure.value(k | (1 << i)) - base);
            }
        }
    }
    Ok(v)
}

/// Shapley interaction index for every unordered pair, as a symmetric matrix
/// with zero diagonal:
///
/// `I(i,j) = Σ_{K ⊆ N∖{i,j}} (n−|K|−2)! |K|! / (n−1)! · Δ_{ij} μ(K)`
pub fn interaction_index(measure: &FuzzyMeasure) -> Result<Vec<Vec<f64>>> {
    measure.ensure_valid()?;
    let n = measure.n;
    let mut out = vec![vec![0.0; n]; n];
    if n < 2 {
        return Ok(out);
    }
    // (n-k-2)! k! / (n-1)! = 1 / ((n-1) * C(n-2, k))
    let weights: Vec<f64> =
        (0..n - 1).map(|k| 1.0 / ((n - 1) as f64 * binomial(n - 2, k))).collect();
    for i in 0..n {
        for j in i + 1..n {
            let pair = (1 << i) | (1 << j);
            let mut acc = 0.0;
            for k in 0..=full_set(n) {
                if k & pair != 0 {
                    continue;
                }
                let delta = measure.value(k | pair)
                    - measure.value(k | (1 << i))
                    - measure.value(k | (1 << j))
                    + measure.value(k);
                acc += weights[cardinality(k)] * delta;
            }
            out[i][j] = acc;
            out[j][i] = acc;
        }
    }
    Ok(out)
}

/// Möbius transform `m(A) = Σ_{B⊆A} (−1)^{|A∖B|} μ(B)`.
pub fn mobius(measure: &FuzzyMeasure) -> Vec<f64> {
    let mut m = measure.values.clone();
    for i in 0..measure.n {
        let bit = 1usize << i;
        for s in 0..m.len() {
            if s & bit != 0 {
                m[s] -= m[s ^ bit];
            }
        }
    }
    m
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
