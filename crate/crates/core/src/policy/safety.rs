//! Hoeffding-style misspecification test.
//!
//! Every epoch `j` with at least `n_min` rewards certifies a lower bound
//! `L_j = S_j / n_j - (r_hi - r_lo) sqrt(ln(4 j^2 t^2 / delta) / (2 n_j))` on the
//! per-round reward of its kernel. The test fails once the current epoch's
//! upper confidence bound on its mean reward drops below the best certified
//! `L_j` of an earlier epoch; the learner then reverts to that epoch's kernel.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct EpochStats {
    n: u64,
    sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SafetyVerdict {
    pub safe: bool,
    /// Epoch whose kernel to fall back to when `safe` is false.
    pub safe_epoch: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SafetyMonitor {
    range: (f64, f64),
    delta: f64,
    n_min: u64,
    epochs: Vec<EpochStats>,
    total_reward: f64,
    total_rounds: u64,
}

impl SafetyMonitor {
    pub fn new(range: (f64, f64), delta: f64, n_min: u64) -> Result<Self> {
        if !(range.0 < range.1) || !range.0.is_finite() || !range.1.is_finite() {
            return Err(invalid("reward range must be finite with lo < hi"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("delta must lie in (0, 1)"));
        }
        Ok(Self {
            range,
            delta,
            n_min: n_min.max(1),
            epochs: Vec::new(),
            total_reward: 0.0,
            total_rounds: 0,
        })
    }

    pub fn reward_range(&self) -> (f64, f64) {
        self.range
    }

    pub fn record(&mut self, epoch: u64, reward: f64) -> Result<()> {
        let (lo, hi) = self.range;
        if !(lo..=hi).contains(&reward) {
            return Err(invalid(format!(
                "reward {reward} outside the declared range [{lo}, {hi}]"
            )));
        }
        if epoch == 0 {
            return Err(invalid("epochs are numbered from 1"));
        }
        let idx = (epoch - 1) as usize;
        if self.epochs.len() <= idx {
            self.epochs.resize(idx + 1, EpochStats::default());
        }
        self.epochs[idx].n += 1;
        self.epochs[idx].sum += reward;
        self.total_reward += reward;
        self.total_rounds += 1;
        Ok(())
    }

    pub fn epoch_count(&self, epoch: u64) -> u64 {
        self.stats(epoch).n
    }

    pub fn epoch_mean(&self, epoch: u64) -> Option<f64> {
        let s = self.stats(epoch);
        (s.n > 0).then(|| s.sum / s.n as f64)
    }

    pub fn total_rounds(&self) -> u64 {
        self.total_rounds
    }

    pub fn total_reward(&self) -> f64 {
        self.total_reward
    }

    fn stats(&self, epoch: u64) -> EpochStats {
        epoch
            .checked_sub(1)
            .and_then(|i| self.epochs.get(i as usize).copied())
            .unwrap_or_default()
    }

    /// Hoeffding half-width for `n` rewards of epoch `epoch` at round `t`.
    pub fn width(&self, epoch: u64, n: u64, t: u64) -> f64 {
        let (j, t) = (epoch as f64, t as f64);
        let log_term = (4.0 * j * j * t * t / self.delta).ln();
        (self.range.1 - self.range.0) * (log_term / (2.0 * n as f64)).sqrt()
    }

    /// `L_j` at round `t`, or `None` below `n_min` samples.
    pub fn lower_bound(&self, epoch: u64, t: u64) -> Option<f64> {
        let s = self.stats(epoch);
        (s.n >= self.n_min).then(|| s.sum / s.n as f64 - self.width(epoch, s.n, t))
    }

    /// Runs the test at round `t` for the current epoch.
    pub fn check(&self, t: u64, current_epoch: u64) -> SafetyVerdict {
        let safe = SafetyVerdict {
            safe: true,
            safe_epoch: None,
        };
        let mut benchmark: Option<(u64, f64)> = None;
        for j in 1..current_epoch {
            if let Some(lb) = self.lower_bound(j, t) {
                // Ties go to the most recent epoch.
                if benchmark.is_none_or(|(_, best)| lb >= best) {
                    benchmark = Some((j, lb));
                }
            }
        }
        let Some((best_epoch, best_lb)) = benchmark else {
            return safe;
        };
        let cur = self.stats(current_epoch);
        if cur.n == 0 {
            return safe;
        }
        let upper = cur.sum / cur.n as f64 + self.width(current_epoch, cur.n, t);
        if upper < best_lb {
            SafetyVerdict {
                safe: false,
                safe_epoch: Some(best_epoch),
            }
        } else {
            safe
        }
    }
}
