/// The constant `c` in `gamma_m = c * sqrt(K / xi)`.
pub const GAMMA_CONSTANT: f64 = 0.353_553_390_593_273_8; // sqrt(1/8)

/// Exploration parameter for epoch `next_epoch`:
/// `sqrt(1/8) * sqrt(K / xi(prev_epoch_len, delta' / m^2))`, floored at 1.
pub fn gamma_schedule(
    prev_epoch_len: u64,
    next_epoch: u64,
    delta_prime: f64,
    num_actions: usize,
    xi: impl Fn(u64, f64) -> f64,
) -> f64 {
    debug_assert!(prev_epoch_len >= 1 && next_epoch >= 2);
    let m = next_epoch as f64;
    let rate = xi(prev_epoch_len, delta_prime / (m * m));
    (GAMMA_CONSTANT * (num_actions as f64 / rate).sqrt()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::EpochSchedule;
    use crate::oracle::estimation_rate_xi;

    #[test]
    fn constant_is_sqrt_one_eighth() {
        assert!((GAMMA_CONSTANT - (1.0f64 / 8.0).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn cancellation_gives_one() {
        let g = gamma_schedule(10, 2, 0.025, 4, |_, _| 4.0 / 8.0);
        assert!((g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn floor_engages() {
        // sqrt(1/8) * sqrt(2 / 0.5) = 1/sqrt(2) < 1.
        assert_eq!(gamma_schedule(10, 2, 0.025, 2, |_, _| 0.5), 1.0);
    }

    #[test]
    fn non_decreasing_over_doubling_epochs_at_fixed_confidence() {
        let schedule = EpochSchedule::Doubling;
        for &(dim, c) in &[(1usize, 1.0), (42, 1.0), (42, 0.01), (3, 0.1)] {
            let mut prev = 1.0;
            for m in 2..=30u64 {
                let len = schedule.epoch_len(m - 1).unwrap();
                let g = gamma_schedule(len, m, 0.025, 2, |n, _| estimation_rate_xi(n, 0.01, dim, c).unwrap());
                assert!(g >= prev, "dim={dim} c={c} m={m}: {g} < {prev}");
                prev = g;
            }
        }
    }
}
