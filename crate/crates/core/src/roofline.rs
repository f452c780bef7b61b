//! Roofline bounds for a two-node machine: circuit CCR versus machine CCR,
//! capped by gate density.

use serde::{Deserialize, Serialize};

use crate::bench::CircuitStats;
use crate::distillation::nested_time;
use crate::error::{MnqcError, Result};

/// Reference compilation profiles of the four 10-qubit benchmarks:
/// `(name, depth, 1q, 2q, comm, density)`.
pub const REFERENCE_PROFILES: [(&str, usize, usize, usize, usize, f64); 4] = [
    ("ghz", 13, 3, 8, 1, 0.162),
    ("bv", 26, 57, 24, 7, 0.458),
    ("qft", 633, 323, 439, 164, 0.242),
    ("adder", 219, 101, 177, 55, 0.258),
];

pub fn reference_profile(name: &str) -> Option<CircuitStats> {
    REFERENCE_PROFILES
        .iter()
        .find(|p| p.0 == name)
        .map(|&(_, depth, n_1q, n_2q, n_comm, gate_density)| CircuitStats {
            n_qubits: 10,
            depth,
            n_1q,
            n_2q,
            n_comm,
            gate_density,
        })
}

/// How local and internode gates are counted in the CCR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcrFormula {
    /// `(n_1q + 2 n_2q) / (2 n_comm)`: qubit-operations, two per two-qubit
    /// gate. Reproduces all four reference CCR values.
    #[default]
    QubitOps,
    /// `(n_1q + n_2q - n_comm) / n_comm`: local gates over internode gates.
    LocalOverComm,
}

/// `None` when the circuit has no internode gates (infinite CCR).
pub fn compute_ccr(stats: &CircuitStats, formula: CcrFormula) -> Option<f64> {
    if stats.n_comm == 0 {
        return None;
    }
    let comm = stats.n_comm as f64;
    Some(match formula {
        CcrFormula::QubitOps => (stats.n_1q + 2 * stats.n_2q) as f64 / (2.0 * comm),
        CcrFormula::LocalOverComm => (stats.n_1q + stats.n_2q) as f64 / comm - 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RooflineMachine {
    pub n_qubits: usize,
    pub t_local: f64,
    pub t_link: f64,
    pub n_links: usize,
}

impl RooflineMachine {
    pub fn new(n_qubits: usize, t_local: f64, t_link: f64) -> Result<Self> {
        let m = Self {
            n_qubits,
            t_local,
            t_link,
            n_links: 1,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_links == 0 {
            return Err(MnqcError::Domain("machine needs qubits and a link".into()));
        }
        if !(self.t_local > 0.0 && self.t_link >= self.t_local && self.t_link.is_finite()) {
            return Err(MnqcError::Domain(format!(
                "need 0 < t_local <= t_link, got {} and {}",
                self.t_local, self.t_link
            )));
        }
        Ok(())
    }

    /// Local gate rate bound, gates per local-gate time.
    pub fn peak_rate(&self) -> f64 {
        self.n_qubits as f64
    }
}

pub fn compute_mccr(m: &RooflineMachine) -> f64 {
    m.t_link / m.t_local
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Communication,
    Computation,
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limiter {
    Density,
    Communication,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RooflineReport {
    /// `None` = infinite.
    pub ccr: Option<f64>,
    pub mccr: f64,
    pub density: f64,
    pub bound: BoundKind,
    /// Which cap sets the delivered rate.
    pub limiter: Limiter,
    /// Gates per local-gate time.
    pub delivered_rate: f64,
    /// `(MCCR, N_q)`.
    pub ridge_point: (f64, f64),
}

/// Height of the roofline at `ccr`.
pub fn roofline_bound(m: &RooflineMachine, ccr: f64) -> f64 {
    (m.peak_rate() * ccr / compute_mccr(m)).min(m.peak_rate())
}

pub fn classify_bound(
    stats: &CircuitStats,
    m: &RooflineMachine,
    formula: CcrFormula,
) -> Result<RooflineReport> {
    m.validate()?;
    if !(stats.gate_density > 0.0 && stats.gate_density <= 1.0) {
        return Err(MnqcError::OutOfRange {
            name: "gate density",
            value: stats.gate_density,
            range: "(0, 1]",
        });
    }
    let ccr = compute_ccr(stats, formula);
    let mccr = compute_mccr(m);
    let bound = match ccr {
        Some(c) if (c - mccr).abs() <= 1e-12 * mccr => BoundKind::Balanced,
        Some(c) if c < mccr => BoundKind::Communication,
        _ => BoundKind::Computation,
    };
    let density_cap = m.peak_rate() * stats.gate_density;
    let comm_cap = ccr.map_or(f64::INFINITY, |c| m.peak_rate() * c / mccr);
    let (delivered_rate, limiter) = if comm_cap < density_cap {
        (comm_cap, Limiter::Communication)
    } else {
        (density_cap, Limiter::Density)
    };
    Ok(RooflineReport {
        ccr,
        mccr,
        density: stats.gate_density,
        bound,
        limiter,
        delivered_rate,
        ridge_point: (mccr, m.peak_rate()),
    })
}

/// Link latency after distillation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ShiftMode {
    /// Stepwise multipliers: `x(rounds + 1)`, i.e. 10.4 -> 20.8 -> 31.2.
    Stepwise,
    /// Raw pair time `tau` inside `t_link` is replaced by `t_n / P_n` from
    /// the nested schedule.
    Recurrence {
        raw_pair_time: f64,
        purification_step_time: f64,
        success_prob: f64,
    },
}

pub fn distillation_shift(m: &RooflineMachine, rounds: usize, mode: ShiftMode) -> Result<RooflineMachine> {
    m.validate()?;
    let t_link = match mode {
        ShiftMode::Stepwise => m.t_link * (rounds + 1) as f64,
        ShiftMode::Recurrence {
            raw_pair_time,
            purification_step_time,
            success_prob,
        } => {
            if !(raw_pair_time > 0.0 && raw_pair_time <= m.t_link) {
                return Err(MnqcError::Domain(format!(
                    "raw pair time {raw_pair_time} must lie in (0, t_link]"
                )));
            }
            if !(success_prob > 0.0 && success_prob <= 1.0) {
                return Err(MnqcError::OutOfRange {
                    name: "distillation success probability",
                    value: success_prob,
                    range: "(0, 1]",
                });
            }
            let overhead = m.t_link - raw_pair_time;
            nested_time(rounds, raw_pair_time, purification_step_time) / success_prob + overhead
        }
    };
    Ok(RooflineMachine { t_link, ..*m })
}

/// `(ccr, bound)` samples of the roofline polyline.
pub fn roofline_curve(m: &RooflineMachine, ccrs: &[f64]) -> Vec<(f64, f64)> {
    ccrs.iter().map(|&c| (c, roofline_bound(m, c))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_ccr_values() {
        for (name, want) in [("ghz", 9.5), ("bv", 7.5), ("qft", 3.662), ("adder", 4.136)] {
            let s = reference_profile(name).unwrap();
            let got = compute_ccr(&s, CcrFormula::QubitOps).unwrap();
            assert!((got - want).abs() < 5e-4, "{name}: {got}");
        }
    }

    #[test]
    fn no_comm_is_infinite() {
        let mut s = reference_profile("ghz").unwrap();
        s.n_comm = 0;
        assert_eq!(compute_ccr(&s, CcrFormula::QubitOps), None);
        let m = RooflineMachine::new(10, 100e-9, 1.041e-6).unwrap();
        let r = classify_bound(&s, &m, CcrFormula::QubitOps).unwrap();
        assert_eq!(r.bound, BoundKind::Computation);
        assert_eq!(r.limiter, Limiter::Density);
    }
}
