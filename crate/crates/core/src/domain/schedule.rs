use crate::error::{invalid, Result};

/// Epoch boundaries `0 = tau_0 < tau_1 < tau_2 < ...`. Epoch `m` covers
/// rounds `tau_{m-1} + 1 ..= tau_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpochSchedule {
    /// `tau_m = 2^m`.
    Doubling,
    /// `tau_m = m * len`.
    FixedLength(u64),
    /// Explicit boundaries. Rounds past the last boundary fall into one final
    /// open-ended epoch.
    Explicit(Vec<u64>),
}

impl EpochSchedule {
    pub fn explicit(boundaries: Vec<u64>) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(invalid("explicit schedule needs at least one boundary"));
        }
        let mut prev = 0;
        for &b in &boundaries {
            if b <= prev {
                return Err(invalid("epoch boundaries must be positive and strictly increasing"));
            }
            prev = b;
        }
        Ok(Self::Explicit(boundaries))
    }

    pub fn fixed(len: u64) -> Result<Self> {
        if len == 0 {
            return Err(invalid("fixed epoch length must be positive"));
        }
        Ok(Self::FixedLength(len))
    }

    /// `tau_m`; `None` when the epoch never ends.
    pub fn boundary(&self, m: u64) -> Option<u64> {
        match self {
            Self::Doubling => match m {
                0 => Some(0),
                1..=63 => Some(1u64 << m),
                _ => None,
            },
            Self::FixedLength(len) => m.checked_mul(*len),
            Self::Explicit(list) => {
                if m == 0 {
                    Some(0)
                } else {
                    list.get((m - 1) as usize).copied()
                }
            }
        }
    }

    /// The epoch `m(t)` containing round `t` (rounds are one-based).
    pub fn epoch_of(&self, t: u64) -> Result<u64> {
        if t == 0 {
            return Err(invalid("rounds are numbered from 1"));
        }
        Ok(match self {
            Self::Doubling => {
                if t <= 2 {
                    1
                } else {
                    u64::from(64 - (t - 1).leading_zeros())
                }
            }
            Self::FixedLength(len) => t.div_ceil(*len),
            Self::Explicit(list) => match list.iter().position(|&b| b >= t) {
                Some(i) => i as u64 + 1,
                None => list.len() as u64 + 1,
            },
        })
    }

    /// `tau_m - tau_{m-1}`, or `None` for an open-ended epoch.
    pub fn epoch_len(&self, m: u64) -> Option<u64> {
        debug_assert!(m >= 1);
        let end = self.boundary(m)?;
        let start = self.boundary(m - 1).unwrap_or(0);
        Some(end - start)
    }
}
