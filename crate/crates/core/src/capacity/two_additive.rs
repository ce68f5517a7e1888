use super::measure::{FuzzyMeasure, MAX_GROUND_SIZE, MONOTONICITY_EPS};
use crate::error::{Error, Result};
use crate::validation::ValidationReport;

/// A capacity whose Möbius transform vanishes on subsets larger than pairs.
///
/// `singleton[i]` is the Möbius mass `a_i` and `pair` holds the symmetric pair
/// masses `a_ij` (zero diagonal). The induced set function is
/// `μ(A) = Σ_{i∈A} a_i + Σ_{{i,j}⊆A} a_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAdditiveCapacity {
    n: usize,
    singleton: Vec<f64>,
    pair: Vec<f64>,
}

impl TwoAdditiveCapacity {
    /// Builds a capacity from singleton masses and `(i, j, a_ij)` pair
    /// masses. Each unordered pair may appear at most once.
    pub fn new(
        singleton: Vec<f64>,
        pairs: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let n = singleton.len();
        if n == 0 {
            return Err(Error::InvalidMeasure("empty ground set".into()));
        }
        if singleton.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite singleton coefficient".into()));
        }
        let mut pair = vec![0.0; n * n];
        let mut seen = vec![false; n * n];
        for (i, j, a) in pairs {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidMeasure(format!("invalid pair ({i}, {j}) for n={n}")));
            }
            if !a.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite pair coefficient ({i}, {j})")));
            }
            if seen[i * n + j] {
                return Err(Error::InvalidMeasure(format!("duplicate pair ({i}, {j})")));
            }
            seen[i * n + j] = true;
            seen[j * n + i] = true;
            pair[i * n + j] = a;
            pair[j * n + i] = a;
        }
        Ok(TwoAdditiveCapacity { n, singleton, pair })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn singleton(&self, i: usize) -> f64 {
        self.singleton[i]
    }

    pub fn singletons(&self) -> &[f64] {
        &self.singleton
    }

    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.pair[i * self.n + j]
    }

    /// Iterates `(i, j, a_ij)` over unordered pairs `i < j` with nonzero mass.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).filter_map(move |j| {
                let a = self.pair(i, j);
                (a != 0.0).then_some((i, j, a))
            })
        })
    }

    /// `μ(N) = Σ a_i + Σ_{i<j} a_ij`.
    pub fn total_mass(&self) -> f64 {
        self.singleton.iter().sum::<f64>() + self.pairs().map(|(_, _, a)| a).sum::<f64>()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-12
    }

    /// Rescales all masses so that `μ(N) = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let z = self.total_mass();
        if !(z > 0.0) {
            return Err(Error::InvalidMeasure(format!("cannot normalize, total mass {z}")));
        }
        Ok(self.scaled(1.0 / z))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        TwoAdditiveCapacity {
            n: self.n,
            singleton: self.singleton.iter().map(|a| a * factor).collect(),
            pair: self.pair.iter().map(|a| a * factor).collect(),
        }
    }

    /// Shapley value `v_i = a_i + ½ Σ_{j≠i} a_ij`.
    pub fn shapley(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let row = &self.pair[i * self.n..(i + 1) * self.n];
                self.singleton[i] + 0.5 * row.iter().sum::<f64>()
            })
            .collect()
    }

    /// Interaction index; for a 2-additive capacity it equals `a_ij`.
    pub fn interaction(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.pair(i, j)
        }
    }

    /// Value of the induced set function on a bitmask subset.
    pub fn induced_value(&self, subset: u32) -> f64 {
        let mut acc = 0.0;
        for i in (0..self.n).filter(|i| subset & (1 << i) != 0) {
            acc += self.singleton[i];
            for j in (i + 1..self.n).filter(|j| subset & (1 << j) != 0) {
                acc += self.pair(i, j);
            }
        }
        acc
    }

    /// Expands to the dense set-function table.
    pub fn to_measure(&self) -> Result<FuzzyMeasure> {
        if self.n > MAX_GROUND_SIZE {
            return Err(Error::InvalidMeasure(format!(
                "ground set of {} too large for a dense table",
                self.n
            )));
        }
        FuzzyMeasure::from_fn(self.n, |s| self.induced_value(s))
    }

    /// Checks normalization (when `require_normalized`), interaction range and
    /// monotonicity of the induced set function.
    ///
    /// A 2-additive set function is monotone iff `a_i + Σ_{j∈K} a_ij >= 0` for
    /// every `i` and `K ⊆ N∖{i}`; the binding `K` collects the negative pairs.
    pub fn validate(&self, require_normalized: bool) -> ValidationReport {
        let mut report = ValidationReport::new();
        if require_normalized && !self.is_normalized() {
            report.error("normalization", format!("total mass {} != 1", self.total_mass()));
        }
        for (i, j, a) in self.pairs() {
            if !(-1.0 - MONOTONICITY_EPS..=1.0 + MONOTONICITY_EPS).contains(&a) {
                report.error("interaction_range", format!("a({},{}) = {a} outside [-1,1]", i + 1, j + 1));
            }
        }
        for i in 0..self.n {
            let negative: f64 = (0..self.n).map(|j| self.pair(i, j).min(0.0)).sum();
            let worst = self.singleton[i] + negative;
            if worst < -MONOTONICITY_EPS {
                report.error(
                    "monotonicity",
                    format!("element {} has worst-case marginal contribution {worst}", i + 1),
                );
            }
        }
        report
    }
}

/// 2-additive Choquet integral in Shapley/interaction form:
///
/// `Σ_i (v_i − ½ Σ_j |I_ij|) x_i + Σ_{I_ij>0} I_ij min(x_i, x_j) + Σ_{I_ij<0} |I_ij| max(x_i, x_j)`
pub fn choquet_2additive(x: &[f64], cap: &TwoAdditiveCapacity) -> Result<f64> {
    if x.len() != cap.n {
        return Err(Error::DimensionMismatch { expected: cap.n, actual: x.len() });
    }
    let v = cap.shapley();
    let mut acc = 0.0;
    for i in 0..cap.n {
        let spread: f64 = (0..cap.n).map(|j| cap.interaction(i, j).abs()).sum();
        acc += (v[i] - 0.5 * spread) * x[i];
    }
    for (i, j, a) in cap.pairs() {
        if a > 0.0 {
            acc += a * x[i].min(x[j]);
        } else {
            acc += a.abs() * x[i].max(x[j]);
        }
    }
    Ok(acc)
}
