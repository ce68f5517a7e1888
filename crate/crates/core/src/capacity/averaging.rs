use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-9;

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::InvalidWeights(format!("weight {w} outside [0,1]")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}, expected 1")));
        }
        Ok(WeightVector(weights))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn weighted_mean(x: &[f64], w: &WeightVector) -> Result<f64> {
    if x.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), actual: x.len() });
    }
    Ok(x.iter().zip(w.as_slice()).map(|(x, w)| x * w).sum())
}

/// Ordered weighted average: weights apply to `x` sorted in descending order.
pub fn owa(x: &[f64], w: &WeightVector) -> Result<f64> {
    if x.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), actual: x.len() });
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted.iter().zip(w.as_slice()).map(|(x, w)| x * w).sum())
}
