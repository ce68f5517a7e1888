use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quarter::Quarter;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogitOptions {
    /// L2 penalty on the slope coefficients (the intercept is unpenalized).
    pub ridge: f64,
    /// Stop when the largest coefficient update falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for LogitOptions {
    fn default() -> Self {
        LogitOptions { ridge: 1e-6, tolerance: 1e-8, max_iterations: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogitModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Latest quarter that contributed training data, when known.
    pub train_end: Option<Quarter>,
    pub iterations: usize,
    pub converged: bool,
}

impl LogitModel {
    pub fn score(&self, row: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(row).map(|(b, x)| b * x).sum::<f64>()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Fits with the default options, dropping rows with missing values.
pub fn fit_logit(rows: &[Vec<Option<f64>>], labels: &[bool]) -> Result<LogitModel> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: rows.len(), actual: labels.len() });
    }
    let (x, y): (Vec<Vec<f64>>, Vec<bool>) = rows
        .iter()
        .zip(labels)
        .filter_map(|(r, &l)| r.iter().copied().collect::<Option<Vec<f64>>>().map(|r| (r, l)))
        .unzip();
    fit_logit_with(&x, &y, &LogitOptions::default())
}

/// Ridge-penalised maximum likelihood by Newton-Raphson (iteratively
/// reweighted least squares) with step halving on the penalised
/// log-likelihood.
pub fn fit_logit_with(rows: &[Vec<f64>], labels: &[bool], opts: &LogitOptions) -> Result<LogitModel> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: rows.len(), actual: labels.len() });
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::DegenerateFit(format!(
            "need both classes, got {positives} positive of {}",
            labels.len()
        )));
    }
    let d = rows[0].len();
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, actual: r.len() });
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite indicator value".into()));
    }

    let p = d + 1;
    let n = rows.len();
    let design = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { rows[i][j - 1] });
    let y = DVector::from_iterator(n, labels.iter().map(|&l| if l { 1.0 } else { 0.0 }));

    let objective = |beta: &DVector<f64>| -> f64 {
        let eta = &design * beta;
        let ll: f64 = eta.iter().zip(y.iter()).map(|(&e, &yy)| yy * e - softplus(e)).sum();
        let penalty: f64 = beta.iter().skip(1).map(|b| b * b).sum();
        ll - 0.5 * opts.ridge * penalty
    };

    let mut beta = DVector::zeros(p);
    let mut current = objective(&beta);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let eta = &design * &beta;
        let mu = eta.map(sigmoid);
        let w = mu.map(|m| (m * (1.0 - m)).max(1e-12));

        let mut grad = design.transpose() * (&y - &mu);
        let weighted = DMatrix::from_fn(n, p, |i, j| design[(i, j)] * w[i]);
        let mut hessian = design.transpose() * weighted;
        for j in 1..p {
            grad[j] -= opts.ridge * beta[j];
            hessian[(j, j)] += opts.ridge;
        }
        let step = match hessian.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => hessian
                .lu()
                .solve(&grad)
                .ok_or_else(|| Error::DegenerateFit("singular information matrix".into()))?,
        };

        let mut scale = 1.0;
        let mut candidate = &beta + &step;
        let mut value = objective(&candidate);
        while value < current && scale > 1e-10 {
            scale *= 0.5;
            candidate = &beta + &step * scale;
            value = objective(&candidate);
        }
        let change = (&step * scale).amax();
        beta = candidate;
        current = value;
        if change < opts.tolerance {
            converged = true;
            break;
        }
    }

    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::DegenerateFit("coefficients diverged".into()));
    }
    Ok(LogitModel {
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
        train_end: None,
        iterations,
        converged,
    })
}

/// Logistic link of the linear score; `None` when any value is missing.
pub fn predict_prob(model: &LogitModel, row: &[Option<f64>]) -> Result<Option<f64>> {
    if row.len() != model.coefficients.len() {
        return Err(Error::DimensionMismatch { expected: model.coefficients.len(), actual: row.len() });
    }
    Ok(row.iter().copied().collect::<Option<Vec<f64>>>().map(|r| sigmoid(model.score(&r))))
}
