//! Success regions over (internode gate time, internode infidelity), the
//! achievable-link frontier, and the two-term analytic boundary.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exec::simulate_noisy;
use super::routing::RoutedCircuit;
use crate::densmat::{BellState, NoiseParams};
use crate::distillation::{nested_distillation, DistillationConfig};
use crate::error::{check_range, MnqcError, Result};
use crate::internode::{effective_link_channel, teleported_cx};
use crate::physical::{simulate_heralded_cycle, M2OConverterPreset, SimulationOptions};

pub const SUCCESS_THRESHOLD: f64 = 0.9;

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(MnqcError::Domain(format!(
            "log axis needs 0 < lo <= hi and n >= 1, got ({lo}, {hi}, {n})"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

/// An achievable link configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub pe: f64,
    pub rounds: usize,
    pub t_ll_seconds: f64,
    pub infidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapGrid {
    pub benchmark: String,
    /// Internode gate times (s), ascending.
    pub times: Vec<f64>,
    /// Internode infidelities, ascending.
    pub infidelities: Vec<f64>,
    /// `scores[i][j]` at `(times[i], infidelities[j])`.
    pub scores: Vec<Vec<f64>>,
    /// Fidelity to the ideal output, kept alongside readout-based scores.
    pub fidelities: Vec<Vec<f64>>,
    pub success: Vec<Vec<bool>>,
    pub threshold: f64,
    pub frontier: Vec<FrontierPoint>,
}

impl GapGrid {
    /// Success at `(i, j)` implies success at every `(i' <= i, j' <= j)`.
    pub fn down_closed_violations(&self) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for i in 0..self.times.len() {
            for j in 0..self.infidelities.len() {
                let up_ok = i + 1 >= self.times.len() || !self.success[i + 1][j] || self.success[i][j];
                let right_ok = j + 1 >= self.infidelities.len()
                    || !self.success[i][j + 1]
                    || self.success[i][j];
                if !(up_ok && right_ok) {
                    bad.push((i, j));
                }
            }
        }
        bad
    }

    pub fn is_down_closed(&self) -> bool {
        self.down_closed_violations().is_empty()
    }

    /// Index of the largest passing time at infidelity column `j`.
    pub fn time_edge(&self, j: usize) -> Option<usize> {
        (0..self.times.len()).rev().find(|&i| self.success[i][j])
    }

    /// Index of the largest passing infidelity at time row `i`.
    pub fn infidelity_edge(&self, i: usize) -> Option<usize> {
        (0..self.infidelities.len()).rev().find(|&j| self.success[i][j])
    }

    /// Whether any frontier point lies inside the success region
    /// (bounded by the nearest grid point at or above it on both axes).
    pub fn frontier_reaches_success(&self) -> bool {
        self.frontier.iter().any(|p| {
            let i = self.times.iter().position(|&t| t >= p.t_ll_seconds);
            let j = self.infidelities.iter().position(|&x| x >= p.infidelity);
            matches!((i, j), (Some(i), Some(j)) if self.success[i][j])
        })
    }

    /// Row-per-time CSV matrix of scores.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t_ll_seconds");
        for x in &self.infidelities {
            s.push_str(&format!(",{x:e}"));
        }
        s.push('\n');
        for (t, row) in self.times.iter().zip(&self.scores) {
            s.push_str(&format!("{t:e}"));
            for v in row {
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }
}

fn check_axis(name: &'static str, axis: &[f64], max: f64) -> Result<()> {
    if axis.is_empty() || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MnqcError::Domain(format!("{name} axis must be strictly increasing")));
    }
    for &x in axis {
        check_range(name, x, f64::MIN_POSITIVE, max, "(0, max]")?;
    }
    Ok(())
}

/// Scores `routed` at every grid point (parallel, deterministic order).
pub fn gap_scan(
    routed: &RoutedCircuit,
    times: &[f64],
    infidelities: &[f64],
    noise: &NoiseParams,
    threshold: f64,
) -> Result<GapGrid> {
    check_axis("internode gate time", times, f64::MAX)?;
    check_axis("internode infidelity", infidelities, 1.0)?;
    noise.validate()?;
    let points: Vec<(usize, usize)> = (0..times.len())
        .flat_map(|i| (0..infidelities.len()).map(move |j| (i, j)))
        .collect();
    let spectators = routed.circuit.n_qubits.saturating_sub(2);
    let results: Result<Vec<_>> = points
        .par_iter()
        .map(|&(i, j)| {
            let link = effective_link_channel(1.0 - infidelities[j], times[i], noise, spectators)?;
            simulate_noisy(routed, noise, &link)
        })
        .collect();
    let results = results?;
    let shape = |f: &dyn Fn(usize) -> f64| -> Vec<Vec<f64>> {
        (0..times.len())
            .map(|i| (0..infidelities.len()).map(|j| f(i * infidelities.len() + j)).collect())
            .collect()
    };
    let scores = shape(&|k| results[k].score());
    let fidelities = shape(&|k| results[k].fidelity);
    let success = scores
        .iter()
        .map(|row| row.iter().map(|&s| s > threshold).collect())
        .collect();
    Ok(GapGrid {
        benchmark: routed.circuit.name.clone(),
        times: times.to_vec(),
        infidelities: infidelities.to_vec(),
        scores,
        fidelities,
        success,
        threshold,
        frontier: Vec::new(),
    })
}

/// Achievable `(T_LL, 1 - F_LL)` for every excitation probability in `pes`
/// and every distillation depth `0..=max_rounds`, at unit cooperativity.
pub fn link_frontier(
    preset: &M2OConverterPreset,
    pes: &[f64],
    max_rounds: usize,
    noise: &NoiseParams,
    opts: &SimulationOptions,
) -> Result<Vec<FrontierPoint>> {
    let pump = preset.unit_cooperativity_power();
    let per_pe: Result<Vec<Vec<FrontierPoint>>> = pes
        .par_iter()
        .map(|&pe| {
            let ep = simulate_heralded_cycle(preset, pump, pe, opts)?;
            let Some(raw) = ep.conditional_state else {
                return Ok(Vec::new());
            };
            let tau = 1.0 / ep.rate;
            (0..=max_rounds)
                .map(|rounds| {
                    let d = nested_distillation(&raw, &DistillationConfig::new(rounds, tau, *noise))?;
                    let gate = teleported_cx(
                        &d.state,
                        BellState::PsiPlus,
                        noise,
                        d.total_time / d.success_prob,
                    )?;
                    Ok(FrontierPoint {
                        pe,
                        rounds,
                        t_ll_seconds: gate.gate_time,
                        infidelity: 1.0 - gate.process_fidelity,
                    })
                })
                .collect()
        })
        .collect();
    Ok(per_pe?.into_iter().flatten().collect())
}

/// Minimum-infidelity point, optionally restricted to `T_LL <= budget`.
pub fn best_link(frontier: &[FrontierPoint], time_budget: Option<f64>) -> Option<FrontierPoint> {
    frontier
        .iter()
        .filter(|p| time_budget.map_or(true, |b| p.t_ll_seconds <= b))
        .min_by(|a, b| a.infidelity.total_cmp(&b.infidelity))
        .copied()
}

/// Iso-score curve of the two-term model
/// `I_link + N_q T_LL / T* = 1 - F_target`, in natural-log coordinates
/// `xi_I = ln I_link`, `xi_T = ln T_LL`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticBoundary {
    pub f_target: f64,
    pub n_q: f64,
    pub t_star: f64,
    /// Link infidelity tolerated as `T_LL -> 0`.
    pub infidelity_wall: f64,
    /// Gate time tolerated as `I_link -> 0`.
    pub time_wall: f64,
    /// `(xi_T, xi_I)` samples.
    pub points: Vec<(f64, f64)>,
}

impl AnalyticBoundary {
    /// Whether `(T_LL, I_link)` lies inside the predicted success region.
    pub fn contains(&self, t_ll: f64, infidelity: f64) -> bool {
        infidelity + self.n_q * t_ll / self.t_star < 1.0 - self.f_target
    }
}

pub fn analytic_boundary(
    f_target: f64,
    n_q: f64,
    t_star: f64,
    samples: usize,
) -> Result<AnalyticBoundary> {
    if !(f_target > 0.0 && f_target < 1.0) {
        return Err(MnqcError::OutOfRange {
            name: "target fidelity",
            value: f_target,
            range: "(0, 1)",
        });
    }
    if !(n_q > 0.0 && t_star > 0.0) {
        return Err(MnqcError::Domain("N_q and T* must be positive".into()));
    }
    let budget = 1.0 - f_target;
    let time_wall = budget * t_star / n_q;
    // half the samples uniform in ln T, half uniform in ln I, so both walls
    // are resolved; six decades each
    let span = 6.0 * std::f64::consts::LN_10;
    let half = (samples / 2).max(1);
    let (t_hi, i_hi) = (time_wall.ln(), budget.ln());
    let mut points: Vec<(f64, f64)> = (0..half)
        .filter_map(|k| {
            let xi_t = t_hi - span + span * k as f64 / half as f64;
            let rest = budget - n_q * xi_t.exp() / t_star;
            (rest > 0.0).then(|| (xi_t, rest.ln()))
        })
        .chain((0..samples - half).filter_map(|k| {
            let xi_i = i_hi - span + span * k as f64 / (samples - half) as f64;
            let t = (budget - xi_i.exp()) * t_star / n_q;
            (t > 0.0).then(|| (t.ln(), xi_i))
        }))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|a, b| a.0 == b.0);
    Ok(AnalyticBoundary {
        f_target,
        n_q,
        t_star,
        infidelity_wall: budget,
        time_wall,
        points,
    })
}
