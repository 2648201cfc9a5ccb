use crate::domain::ActionDistribution;
use crate::env::argmax;
use crate::error::{invalid, Result};

/// Inverse gap weighting: with `a_hat = argmax scores` (lowest index on
/// ties), every other action gets `1 / (K + gamma (s[a_hat] - s[a]))` and
/// `a_hat` takes the remaining mass.
pub fn igw_kernel(scores: &[f64], gamma: f64) -> Result<ActionDistribution> {
    let k = scores.len();
    if k < 2 {
        return Err(invalid("inverse gap weighting needs at least two actions"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("gamma must be positive and finite, got {gamma}")));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(invalid("scores must be finite"));
    }
    let best = argmax(scores);
    let kf = k as f64;
    let mut probs = vec![0.0; k];
    let mut rest = 0.0;
    for (a, &s) in scores.iter().enumerate() {
        if a != best {
            let p = 1.0 / (kf + gamma * (scores[best] - s));
            probs[a] = p;
            rest += p;
        }
    }
    probs[best] = 1.0 - rest;
    ActionDistribution::new(probs)
}

/// `sum_a p(a) (s[a_hat] - s[a])`: the model's own estimate of the regret of
/// the kernel at this context.
pub fn estimated_implicit_regret(scores: &[f64], kernel: &ActionDistribution) -> f64 {
    let top = scores[argmax(scores)];
    kernel.probs().iter().zip(scores).map(|(p, s)| p * (top - s)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_scores_are_uniform() {
        for gamma in [0.1, 1.0, 50.0] {
            let p = igw_kernel(&[0.5, 0.5], gamma).unwrap();
            assert_eq!(p.probs(), &[0.5, 0.5]);
        }
    }

    #[test]
    fn two_action_example() {
        let p = igw_kernel(&[1.0, 0.0], 2.0).unwrap();
        assert!((p.prob(1) - 0.25).abs() < 1e-15);
        assert!((p.prob(0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn three_action_tie_break_example() {
        let p = igw_kernel(&[1.0, 1.0, 0.0], 4.0).unwrap();
        assert!((p.prob(1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.prob(2) - 1.0 / 7.0).abs() < 1e-15);
        assert!((p.prob(0) - 11.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(igw_kernel(&[f64::NAN, 0.0], 1.0).is_err());
        assert!(igw_kernel(&[1.0, f64::INFINITY], 1.0).is_err());
        assert!(igw_kernel(&[1.0, 0.0], 0.0).is_err());
        assert!(igw_kernel(&[1.0], 1.0).is_err());
    }

    proptest! {
        #[test]
        fn larger_gamma_never_raises_non_best(
            scores in proptest::collection::vec(-2.0f64..2.0, 2..6),
            g1 in 0.01f64..100.0,
            bump in 0.0f64..100.0,
        ) {
            let lo = igw_kernel(&scores, g1).unwrap();
            let hi = igw_kernel(&scores, g1 + bump).unwrap();
            let best = argmax(&scores);
            for a in 0..scores.len() {
                if a != best {
                    prop_assert!(hi.prob(a) <= lo.prob(a));
                }
            }
        }

        #[test]
        fn implicit_regret_below_k_over_gamma(
            scores in proptest::collection::vec(-5.0f64..5.0, 2..6),
            gamma in 1.0f64..1e4,
        ) {
            let p = igw_kernel(&scores, gamma).unwrap();
            let k = scores.len() as f64;
            prop_assert!(estimated_implicit_regret(&scores, &p) <= k / gamma + 1e-12);
        }
    }
}
