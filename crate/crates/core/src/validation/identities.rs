use rand::Rng;

use crate::domain::ActionDistribution;
use crate::error::Result;
use crate::linalg::min_norm_solve;

use super::instance::{check_column, check_table, random_kernel, FiniteInstance, Table};

/// `<e_a - p, g> = g(a) - sum_b p(b) g(b)`.
fn centered(values: &[f64], p: &ActionDistribution) -> Vec<f64> {
    let mean: f64 = values.iter().zip(p.probs()).map(|(v, q)| v * q).sum();
    values.iter().map(|v| v - mean).collect()
}

/// Exact R-loss risk by enumeration:
/// `sum_x P(x) sum_a p(a|x) [noise(x, a) + (f*(x, a) - mu_hat(x) - <e_a - p(x), g(x, .)>)^2]`.
pub fn exact_rloss_risk(instance: &FiniteInstance, g: &Table, mu_hat: &[f64], noise_var: &Table) -> Result<f64> {
    let (n, k) = (instance.num_contexts(), instance.num_actions());
    check_table(g, n, k)?;
    check_table(noise_var, n, k)?;
    check_column(mu_hat, n)?;
    let mut risk = 0.0;
    for x in 0..n {
        let p = &instance.kernel()[x];
        let gc = centered(&g[x], p);
        let inner: f64 = (0..k)
            .map(|a| {
                let resid = instance.f_star()[x][a] - mu_hat[x] - gc[a];
                p.prob(a) * (noise_var[x][a] + resid * resid)
            })
            .sum();
        risk += instance.context_probs()[x] * inner;
    }
    Ok(risk)
}

/// Minimum of the R-loss risk over every table, found per context by
/// solving the weighted least-squares problem
/// `min_v sum_a p(a) (u_a - (v_a - p.v))^2`, `u_a = f*(x, a) - mu_hat(x)`,
/// numerically rather than from the known minimizer.
pub fn min_rloss_risk(instance: &FiniteInstance, mu_hat: &[f64], noise_var: &Table) -> Result<f64> {
    let (n, k) = (instance.num_contexts(), instance.num_actions());
    check_table(noise_var, n, k)?;
    check_column(mu_hat, n)?;
    let mut risk = 0.0;
    for x in 0..n {
        let p = instance.kernel()[x].probs();
        let u: Vec<f64> = instance.f_star()[x].iter().map(|f| f - mu_hat[x]).collect();
        // Rows of the centering operator: M[a][b] = 1{a = b} - p(b).
        let m = |a: usize, b: usize| f64::from(u8::from(a == b)) - p[b];
        let mut gram = vec![0.0; k * k];
        let mut rhs = vec![0.0; k];
        for a in 0..k {
            for i in 0..k {
                rhs[i] += p[a] * m(a, i) * u[a];
                for j in 0..k {
                    gram[i * k + j] += p[a] * m(a, i) * m(a, j);
                }
            }
        }
        let v = min_norm_solve(&gram, &rhs, k);
        let inner: f64 = (0..k)
            .map(|a| {
                let fitted: f64 = (0..k).map(|b| m(a, b) * v[b]).sum();
                let resid = u[a] - fitted;
                p[a] * (noise_var[x][a] + resid * resid)
            })
            .sum();
        risk += instance.context_probs()[x] * inner;
    }
    Ok(risk)
}

/// Weighted squared gap error `E_{D(p)} <e_a - p(x), g(x, .) - f*(x, .)>^2`.
#[allow(clippy::needless_range_loop)]
pub fn gap_excess_risk(instance: &FiniteInstance, g: &Table) -> Result<f64> {
    let (n, k) = (instance.num_contexts(), instance.num_actions());
    check_table(g, n, k)?;
    let mut total = 0.0;
    for x in 0..n {
        let p = &instance.kernel()[x];
        let diff: Vec<f64> = g[x].iter().zip(&instance.f_star()[x]).map(|(a, b)| a - b).collect();
        let dc = centered(&diff, p);
        let inner: f64 = dc.iter().zip(p.probs()).map(|(d, q)| q * d * d).sum();
        total += instance.context_probs()[x] * inner;
    }
    Ok(total)
}

/// Squared-error excess risk `E_{D(p)} (g(x, a) - f*(x, a))^2`.
#[allow(clippy::needless_range_loop)]
pub fn squared_excess_risk(instance: &FiniteInstance, g: &Table) -> Result<f64> {
    let (n, k) = (instance.num_contexts(), instance.num_actions());
    check_table(g, n, k)?;
    let mut total = 0.0;
    for x in 0..n {
        let p = instance.kernel()[x].probs();
        let inner: f64 = (0..k).map(|a| p[a] * (g[x][a] - instance.f_star()[x][a]).powi(2)).sum();
        total += instance.context_probs()[x] * inner;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    /// Risk minus minimum risk with the first mean-reward estimate.
    pub excess_a: f64,
    /// The same with the second estimate.
    pub excess_b: f64,
    /// The weighted squared gap error.
    pub gap_form: f64,
    /// Largest absolute pairwise difference of the three quantities.
    pub max_deviation: f64,
}

/// Checks that the R-loss excess risk of `g` does not depend on the fixed
/// mean-reward estimate and equals the weighted squared gap error.
pub fn verify_identity(
    instance: &FiniteInstance,
    g: &Table,
    mu_hat_a: &[f64],
    mu_hat_b: &[f64],
) -> Result<IdentityCheck> {
    verify_identity_with(instance, g, mu_hat_a, mu_hat_b, gap_excess_risk)
}

/// [`verify_identity`] with a caller-supplied gap-form evaluator, so that a
/// deliberately broken evaluator can be shown to fail the check.
pub fn verify_identity_with(
    instance: &FiniteInstance,
    g: &Table,
    mu_hat_a: &[f64],
    mu_hat_b: &[f64],
    gap_form: impl Fn(&FiniteInstance, &Table) -> Result<f64>,
) -> Result<IdentityCheck> {
    let noise = vec![vec![0.0; instance.num_actions()]; instance.num_contexts()];
    let excess = |mu: &[f64]| -> Result<f64> {
        Ok(exact_rloss_risk(instance, g, mu, &noise)? - min_rloss_risk(instance, mu, &noise)?)
    };
    let excess_a = excess(mu_hat_a)?;
    let excess_b = excess(mu_hat_b)?;
    let gap_form = gap_form(instance, g)?;
    let max_deviation = (excess_a - excess_b)
        .abs()
        .max((excess_a - gap_form).abs())
        .max((excess_b - gap_form).abs());
    Ok(IdentityCheck {
        excess_a,
        excess_b,
        gap_form,
        max_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonCheck {
    pub kernels: usize,
    /// Kernels for which the R-loss class minimum exceeded the squared-error
    /// class minimum by more than `1e-12`.
    pub violations: usize,
    /// Largest best-in-class R-loss excess risk over the sampled kernels.
    pub rloss_misspecification: f64,
    /// Largest best-in-class squared-error excess risk over the kernels.
    pub squared_misspecification: f64,
    /// Smallest `squared - rloss` class minimum over the kernels.
    pub min_gap: f64,
}

impl ComparisonCheck {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

pub const COMPARISON_TOL: f64 = 1e-12;

fn class_minima(instance: &FiniteInstance, class: &[Table]) -> Result<(f64, f64)> {
    let mut best_r = f64::INFINITY;
    let mut best_sq = f64::INFINITY;
    for g in class {
        best_r = best_r.min(gap_excess_risk(instance, g)?);
        best_sq = best_sq.min(squared_excess_risk(instance, g)?);
    }
    Ok((best_r, best_sq))
}

/// Compares the best-in-class R-loss and squared-error excess risks of
/// `model_class` under `kernel_samples` random kernels.
pub fn verify_comparison<R: Rng + ?Sized>(
    instance: &FiniteInstance,
    model_class: &[Table],
    kernel_samples: usize,
    rng: &mut R,
) -> Result<ComparisonCheck> {
    let (n, k) = (instance.num_contexts(), instance.num_actions());
    let kernels: Vec<_> = (0..kernel_samples).map(|_| random_kernel(rng, n, k)).collect();
    verify_comparison_kernels(instance, model_class, kernels)
}

/// [`verify_comparison`] over explicitly supplied kernels.
pub fn verify_comparison_kernels(
    instance: &FiniteInstance,
    model_class: &[Table],
    kernels: Vec<Vec<ActionDistribution>>,
) -> Result<ComparisonCheck> {
    if model_class.is_empty() {
        return Err(crate::error::invalid("model class must not be empty"));
    }
    let mut check = ComparisonCheck {
        kernels: kernels.len(),
        violations: 0,
        rloss_misspecification: 0.0,
        squared_misspecification: 0.0,
        min_gap: f64::INFINITY,
    };
    for kernel in kernels {
        let inst = instance.with_kernel(kernel)?;
        let (r, sq) = class_minima(&inst, model_class)?;
        if r > sq + COMPARISON_TOL {
            check.violations += 1;
        }
        check.rloss_misspecification = check.rloss_misspecification.max(r);
        check.squared_misspecification = check.squared_misspecification.max(sq);
        check.min_gap = check.min_gap.min(sq - r);
    }
    Ok(check)
}

/// The class `{f* + c}` of reward tables shifted by a per-context constant:
/// every member has the true gaps, so it is exact under the R-loss while its
/// squared error is the mean squared shift.
pub fn shifted_class(instance: &FiniteInstance, shifts: &[f64]) -> Table {
    instance
        .f_star()
        .iter()
        .zip(shifts)
        .map(|(row, c)| row.iter().map(|v| v + c).collect())
        .collect()
}
