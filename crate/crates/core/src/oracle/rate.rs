use crate::error::{invalid, Result};

/// Estimation rate `xi(n, zeta)` for a VC-type class of dimension `dim`:
/// `c_xi * (dim * ln(max(n, 3)) + ln(1 / zeta)) / n`, capped at 1.
///
/// The logarithm's argument is floored at 3 rather than 2; with 2 the rate
/// increases from `n = 2` to `n = 3` whenever `ln(1/zeta)` is small
/// relative to `dim`, which breaks the non-increasing requirement.
pub fn estimation_rate_xi(n: u64, zeta: f64, dim: usize, c_xi: f64) -> Result<f64> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(invalid(format!("zeta must lie in (0, 1), got {zeta}")));
    }
    if n == 0 {
        return Err(invalid("sample size must be positive"));
    }
    if !(c_xi > 0.0 && c_xi.is_finite()) {
        return Err(invalid("rate constant must be positive"));
    }
    let log_n = (n.max(3) as f64).ln();
    let raw = c_xi * (dim as f64 * log_n + (1.0 / zeta).ln()) / n as f64;
    Ok(raw.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_engages_for_tiny_samples() {
        let xi = estimation_rate_xi(2, (-1.0f64).exp(), 2, 1.0).unwrap();
        assert_eq!(xi, 1.0);
    }

    #[test]
    fn decays_to_zero() {
        let mut prev = f64::INFINITY;
        for n in [10u64, 100, 1_000, 10_000, 100_000, 1_000_000] {
            let xi = estimation_rate_xi(n, 0.1, 1, 1.0).unwrap();
            assert!(xi < prev);
            prev = xi;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn rejects_bad_zeta() {
        assert!(estimation_rate_xi(10, 0.0, 1, 1.0).is_err());
        assert!(estimation_rate_xi(10, 1.0, 1, 1.0).is_err());
        assert!(estimation_rate_xi(10, 1.5, 1, 1.0).is_err());
    }

    #[test]
    fn non_increasing_sweep() {
        for &zeta in &[1e-9, 1e-4, 0.01, 0.1, 0.5, 0.9, 0.999] {
            for &dim in &[1usize, 2, 42] {
                for &c in &[0.01, 1.0] {
                    let mut prev = estimation_rate_xi(1, zeta, dim, c).unwrap();
                    for n in 2..=1_000_000u64 {
                        let xi = estimation_rate_xi(n, zeta, dim, c).unwrap();
                        assert!(xi <= prev, "n={n} zeta={zeta} dim={dim} c={c}");
                        prev = xi;
                    }
                }
            }
        }
    }
}
