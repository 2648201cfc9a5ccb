use crate::domain::FeatureMap;
use crate::error::{invalid, Result};
use crate::linalg::NormalEquations;

use super::model::{LinearModel, ACTIVE_TOL};

/// Sweep limit for coordinate descent.
pub const LASSO_MAX_SWEEPS: usize = 10_000;
/// Convergence threshold on the largest standardized coefficient change in
/// one sweep.
pub const LASSO_TOL: f64 = 1e-8;

/// How the L1 penalty level is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LassoPenalty {
    Fixed(f64),
    /// `c_lambda * sigma_hat * sqrt(2 ln p / n)`, with `sigma_hat` the residual
    /// standard deviation of a preliminary ridge fit.
    Auto {
        c_lambda: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    /// Coefficients on the original (unstandardized) columns.
    pub theta: Vec<f64>,
    /// Column scales `sqrt(mean(z_j^2))`; zero columns have scale 0.
    pub scales: Vec<f64>,
    pub lambda: f64,
    pub sweeps: usize,
    pub converged: bool,
}

/// Minimizes `(1/2n) ||y - Z beta||^2 + lambda * sum_{penalized j} |beta_j|`
/// over standardized columns `Z_j / s_j` by cyclic coordinate descent and
/// maps the result back to the original scale. `design` is row-major
/// `n x p`.
pub fn lasso_coordinate_descent(design: &[f64], y: &[f64], penalized: &[bool], lambda: f64) -> LassoFit {
    let n = y.len();
    let p = penalized.len();
    debug_assert_eq!(design.len(), n * p);
    let nf = n as f64;

    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| (0..n).map(|t| design[t * p + j]).collect()).collect();
    let scales: Vec<f64> = cols
        .iter()
        .map(|c| (c.iter().map(|v| v * v).sum::<f64>() / nf).sqrt())
        .collect();
    for (c, &s) in cols.iter_mut().zip(&scales) {
        if s > 0.0 {
            c.iter_mut().for_each(|v| *v /= s);
        }
    }

    let mut beta = vec![0.0; p];
    let mut resid = y.to_vec();
    let mut sweeps = 0;
    let mut converged = n == 0;
    while !converged && sweeps < LASSO_MAX_SWEEPS {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            if scales[j] == 0.0 {
                continue;
            }
            let col = &cols[j];
            let rho = col.iter().zip(&resid).map(|(z, r)| z * r).sum::<f64>() / nf + beta[j];
            let next = if penalized[j] { soft_threshold(rho, lambda) } else { rho };
            let delta = next - beta[j];
            if delta != 0.0 {
                for (r, z) in resid.iter_mut().zip(col) {
                    *r -= delta * z;
                }
                beta[j] = next;
                max_change = max_change.max(delta.abs());
            }
        }
        converged = max_change < LASSO_TOL;
    }

    let theta = beta
        .iter()
        .zip(&scales)
        .map(|(b, &s)| if s > 0.0 { b / s } else { 0.0 })
        .collect();
    LassoFit {
        theta,
        scales,
        lambda,
        sweeps,
        converged,
    }
}

fn soft_threshold(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// Residual standard deviation of a preliminary ridge fit; falls back to the
/// root mean square of `y` when there are too few rows to estimate it.
pub(crate) fn residual_sd(design: &[f64], y: &[f64], p: usize, ridge: f64) -> f64 {
    let n = y.len();
    if n <= p + 1 {
        return (y.iter().map(|v| v * v).sum::<f64>() / n.max(1) as f64).sqrt();
    }
    let mut ne = NormalEquations::new(p);
    for (t, &yt) in y.iter().enumerate() {
        ne.add_row(&design[t * p..(t + 1) * p], yt);
    }
    let theta = ne.solve(&vec![ridge; p]).x;
    let rss: f64 = y
        .iter()
        .enumerate()
        .map(|(t, &yt)| {
            let fit: f64 = design[t * p..(t + 1) * p]
                .iter()
                .zip(&theta)
                .map(|(z, th)| z * th)
                .sum();
            (yt - fit).powi(2)
        })
        .sum();
    (rss / (n - p) as f64).sqrt()
}

pub(crate) fn fit_lasso_model(
    design: &[f64],
    y: &[f64],
    map: FeatureMap,
    penalty: LassoPenalty,
    prelim_ridge: f64,
) -> Result<LinearModel> {
    let p = map.feature_dim();
    let n = y.len();
    let lambda = match penalty {
        LassoPenalty::Fixed(l) => l,
        LassoPenalty::Auto { c_lambda } => {
            if !(c_lambda >= 0.0) {
                return Err(invalid("c_lambda must be nonnegative"));
            }
            let sigma = residual_sd(design, y, p, prelim_ridge);
            c_lambda * sigma * (2.0 * (p as f64).ln() / n as f64).sqrt()
        }
    };
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid(format!(
            "lasso penalty must be finite and nonnegative, got {lambda}"
        )));
    }
    let penalized: Vec<bool> = (0..p).map(|j| !map.is_intercept(j)).collect();
    let fit = lasso_coordinate_descent(design, y, &penalized, lambda);
    let sparsity = fit
        .theta
        .iter()
        .zip(&penalized)
        .filter(|(v, &pen)| pen && v.abs() > ACTIVE_TOL)
        .count();
    Ok(LinearModel {
        theta: fit.theta,
        feature_map: map,
        sparsity,
        used_pseudo_inverse: false,
        hit_sweep_limit: !fit.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(2.0, 0.5), 1.5);
        assert_eq!(soft_threshold(-2.0, 0.5), -1.5);
        assert_eq!(soft_threshold(0.3, 0.5), 0.0);
    }

    #[test]
    fn orthogonal_design_is_soft_thresholded_least_squares() {
        // Columns are orthogonal with mean square 1, so each coefficient is
        // the soft-thresholded univariate fit.
        let design = [1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0];
        let y = [3.0, 1.0, -1.0, -3.0];
        let fit = lasso_coordinate_descent(&design, &y, &[true, true], 0.5);
        assert!(fit.converged);
        // Univariate fits: 2.0 and 1.0.
        assert!((fit.theta[0] - 1.5).abs() < 1e-12);
        assert!((fit.theta[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_column_stays_zero() {
        let design = [1.0, 0.0, 2.0, 0.0, 3.0, 0.0];
        let fit = lasso_coordinate_descent(&design, &[1.0, 2.0, 3.0], &[true, true], 0.0);
        assert_eq!(fit.theta[1], 0.0);
        assert!((fit.theta[0] - 1.0).abs() < 1e-8);
    }
}
