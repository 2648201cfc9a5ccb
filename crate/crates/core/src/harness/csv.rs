//! CSV emission. Floats use Rust's shortest round-trip formatting, so equal
//! runs give byte-identical files. Actions are written one-based.

use std::fmt::Write as _;

use super::run::{RegretCurve, RunHistory};

pub const RUN_HEADER: &str = "t,epoch,safe,gamma,action,propensity,reward,expected_regret,cum_expected_regret";
pub const CURVE_HEADER: &str = "t,mean_cum_regret,std_cum_regret";
pub const COMPARE_HEADER: &str = "algorithm,final_mean_regret,final_std_regret,ratio_to_baseline";

pub fn run_csv(run: &RunHistory) -> String {
    let mut s = String::with_capacity(64 * (run.rounds.len() + 1));
    s.push_str(RUN_HEADER);
    s.push('\n');
    for r in &run.rounds {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.t,
            r.epoch,
            u8::from(r.safe),
            r.gamma,
            r.action + 1,
            r.propensity,
            r.reward,
            r.expected_regret,
            r.cum_expected_regret
        );
    }
    s
}

pub fn curve_csv(curve: &RegretCurve) -> String {
    let mut s = String::with_capacity(48 * (curve.horizon() + 1));
    s.push_str(CURVE_HEADER);
    s.push('\n');
    for (t, (m, sd)) in curve.mean.iter().zip(&curve.std).enumerate() {
        let _ = writeln!(s, "{},{},{}", t + 1, m, sd);
    }
    s
}

/// One row per algorithm: `(name, final mean, final std, ratio to the first
/// row's final mean)`.
pub fn compare_csv(rows: &[(String, f64, f64, f64)]) -> String {
    let mut s = String::from(COMPARE_HEADER);
    s.push('\n');
    for (name, mean, std, ratio) in rows {
        let _ = writeln!(s, "{name},{mean},{std},{ratio}");
    }
    s
}
