//! Distributed phase estimation: exact QPE statistics, the GHZ-kickback
//! likelihood, a noisy two-node QPE benchmark and unit-constant depth models.
//!
//! Phases are in units of `2 pi` throughout (`phi = 0.658203` is read as
//! `337/512`); `theta`/`xi` in the kickback circuit are radians.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::{readout_distribution, route, Circuit, GateKind, NodeTopology};
use crate::densmat::NoiseParams;
use crate::error::{MnqcError, Result};
use crate::internode::effective_link_channel;

/// `337 / 512`, the benchmark phase.
pub const BENCH_PHASE: f64 = 337.0 / 512.0;
pub const MAX_ANCILLAS: usize = 12;

/// Textbook QPE outcome probabilities for eigenphase `phase` with `n_a`
/// ancillas: `|N^-1 sum_j exp(2 pi i j (phase - k/N))|^2`.
pub fn qpe_outcome_distribution(phase: f64, n_a: usize) -> Result<Vec<f64>> {
    if !(1..=MAX_ANCILLAS).contains(&n_a) {
        return Err(MnqcError::Domain(format!(
            "ancilla count must be in 1..={MAX_ANCILLAS}, got {n_a}"
        )));
    }
    let n = (1usize << n_a) as f64;
    let x = phase.rem_euclid(1.0) * n;
    if (x - x.round()).abs() < 1e-12 {
        let mut d = vec![0.0; 1 << n_a];
        d[x.round() as usize % (1 << n_a)] = 1.0;
        return Ok(d);
    }
    Ok((0..1usize << n_a)
        .map(|k| {
            let delta = (phase - k as f64 / n).rem_euclid(1.0);
            let s = (PI * delta).sin();
            if s.abs() < 1e-13 {
                1.0
            } else {
                ((PI * n * delta).sin() / (n * s)).powi(2)
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Most likely outcome.
    Mode,
    /// Expected absolute error over the outcome distribution.
    ExpectedAbs,
    /// Nearest grid point `k / 2^n_a` (best case).
    MinGrid,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::Mode, Estimator::ExpectedAbs, Estimator::MinGrid];
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Relative error of an estimator applied to an outcome distribution.
pub fn relative_error_of(phase: f64, dist: &[f64], estimator: Estimator) -> f64 {
    let n = dist.len() as f64;
    let err = |k: usize| circular_distance(phase, k as f64 / n);
    let abs = match estimator {
        Estimator::Mode => {
            let k = (0..dist.len())
                .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
                .unwrap_or(0);
            err(k)
        }
        Estimator::ExpectedAbs => dist.iter().enumerate().map(|(k, p)| p * err(k)).sum(),
        Estimator::MinGrid => (0..dist.len()).map(err).fold(f64::INFINITY, f64::min),
    };
    abs / phase.abs()
}

pub fn qpe_relative_error(phase: f64, n_a: usize, estimator: Estimator) -> Result<f64> {
    if phase == 0.0 {
        return Err(MnqcError::Domain("relative error undefined at phase 0".into()));
    }
    Ok(relative_error_of(phase, &qpe_outcome_distribution(phase, n_a)?, estimator))
}

/// Simulates the GHZ-kickback circuit on `p` nodes (one control and one
/// eigenstate target each) and returns the probability of reading zero:
/// GHZ fan-out, controlled phase `theta` at every node, fan-in, `Rz(-p xi)`,
/// Hadamard.
pub fn distributed_kickback_likelihood(p: usize, theta: f64, xi: f64) -> Result<f64> {
    if !(1..=4).contains(&p) {
        return Err(MnqcError::Domain(format!("node count must be in 1..=4, got {p}")));
    }
    // controls 0..p, targets p..2p
    let mut c = Circuit::new(2 * p, "kickback");
    for t in p..2 * p {
        c.push(GateKind::X, &[t])?;
    }
    c.push(GateKind::H, &[0])?;
    for q in 1..p {
        c.push(GateKind::Cx, &[0, q])?;
    }
    for q in 0..p {
        c.push(GateKind::CPhase(theta), &[q, p + q])?;
    }
    for q in (1..p).rev() {
        c.push(GateKind::Cx, &[0, q])?;
    }
    c.push(GateKind::Rz(-(p as f64) * xi), &[0])?;
    c.push(GateKind::H, &[0])?;
    let psi = c.statevector();
    let msb = 1 << (2 * p - 1);
    Ok(psi
        .iter()
        .enumerate()
        .filter(|(x, _)| x & msb == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// QPE on a 10-qubit two-node device: eigenstate target on logical qubit 4
/// (next to the link), ancillas on the remaining qubits, inverse transform
/// without bit reversal. Returns the circuit and the ancillas in
/// most-significant-first order.
pub fn qpe_circuit(phase: f64, n_a: usize) -> Result<(Circuit, Vec<usize>)> {
    if !(1..=9).contains(&n_a) {
        return Err(MnqcError::Domain(format!("device fits 1..=9 ancillas, got {n_a}")));
    }
    let target = 4;
    let ancillas: Vec<usize> = (0..10).filter(|&q| q != target).take(n_a).collect();
    let n_qubits = ancillas.iter().copied().max().unwrap_or(0).max(target) + 1;
    let mut c = Circuit::new(n_qubits, "qpe");
    c.push(GateKind::X, &[target])?;
    for &a in &ancillas {
        c.push(GateKind::H, &[a])?;
    }
    // ancilla j picks up 2 pi phase 2^j; ancilla 0 ends up most significant
    for (j, &a) in ancillas.iter().enumerate() {
        let angle = 2.0 * PI * (phase * f64::from(1u32 << j)).rem_euclid(1.0);
        c.push(GateKind::CPhase(angle), &[a, target])?;
    }
    for i in (0..n_a).rev() {
        for j in (i + 1..n_a).rev() {
            c.push(
                GateKind::CPhase(-PI / f64::from(1u32 << (j - i))),
                &[ancillas[j], ancillas[i]],
            )?;
        }
        c.push(GateKind::H, &[ancillas[i]])?;
    }
    c.params.insert("phase".into(), phase.to_string());
    Ok((c, ancillas))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpeErrorCurve {
    /// `T1 = T2` (s).
    pub t1: f64,
    pub link_times: Vec<f64>,
    /// Relative error with `n_a` ancillas spread over both nodes.
    pub errors: Vec<f64>,
    /// Single-node reference: 4 ancillas, no link use.
    pub baseline_n4: f64,
}

/// Relative QPE error (expected-absolute estimator) versus link gate time,
/// one curve per `T1`. The link itself is taken as error-free so that only
/// its duration matters.
pub fn qpe_link_error_curve(
    t1_values: &[f64],
    link_times: &[f64],
    n_a: usize,
    noise: &NoiseParams,
) -> Result<Vec<QpeErrorCurve>> {
    let topo = NodeTopology::two_rings();
    let (circuit, ancillas) = qpe_circuit(BENCH_PHASE, n_a)?;
    let routed = route(&circuit, &topo)?;
    let (base_circuit, base_anc) = qpe_circuit(BENCH_PHASE, 4)?;
    let base_routed = route(&base_circuit, &topo)?;
    t1_values
        .iter()
        .map(|&t1| {
            let noise = NoiseParams { t1, t2: t1, ..*noise };
            noise.validate()?;
            let errors: Result<Vec<f64>> = link_times
                .par_iter()
                .map(|&t| {
                    let link = effective_link_channel(1.0, t, &noise, 8)?;
                    let dist = readout_distribution(&routed, &noise, &link, &ancillas)?;
                    Ok(relative_error_of(BENCH_PHASE, &dist, Estimator::ExpectedAbs))
                })
                .collect();
            let idle = effective_link_channel(1.0, 0.0, &noise, 8)?;
            let dist = readout_distribution(&base_routed, &noise, &idle, &base_anc)?;
            Ok(QpeErrorCurve {
                t1,
                link_times: link_times.to_vec(),
                errors: errors?,
                baseline_n4: relative_error_of(BENCH_PHASE, &dist, Estimator::ExpectedAbs),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DqpeCostQuery {
    pub epsilon: f64,
    pub delta: f64,
    pub eps_theta: f64,
    /// Link depth relative to one application of `U`.
    pub gamma: f64,
    pub workers: f64,
    pub alpha: f64,
    pub e_gap: f64,
    /// Exponent of the `polylog(x) = (ln x)^k` factor.
    pub polylog_power: f64,
}

impl Default for DqpeCostQuery {
    fn default() -> Self {
        Self {
            epsilon: 1e-2,
            delta: 0.1,
            eps_theta: 1e-3,
            gamma: 1.0,
            workers: 1.0,
            alpha: 1.0,
            e_gap: 1.0,
            polylog_power: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthVariant {
    /// Classical link: state preparation dominates.
    Classical,
    /// Distilled quantum link with `T` workers.
    QuantumDistilled,
    /// Randomized (QDrift) simulation spread over workers.
    Qdrift,
}

fn polylog(x: f64, power: f64) -> f64 {
    x.ln().max(0.0).powf(power)
}

/// Depth in sequential applications of `U`, all implied constants 1.
pub fn parallel_depth_model(q: &DqpeCostQuery, variant: DepthVariant) -> Result<f64> {
    let positive = [q.epsilon, q.delta, q.eps_theta, q.workers, q.alpha, q.e_gap];
    if positive.iter().any(|&x| !(x > 0.0 && x.is_finite())) || !(q.gamma >= 0.0) {
        return Err(MnqcError::Domain("cost-model inputs must be positive".into()));
    }
    let log_inv = (1.0 / q.epsilon).ln();
    let t = q.workers;
    let link = q.gamma * t * polylog(t / q.epsilon, q.polylog_power);
    Ok(match variant {
        DepthVariant::Classical => log_inv / (q.delta * q.eps_theta),
        DepthVariant::QuantumDistilled => log_inv / (q.delta * q.epsilon) + 1.0 / (q.epsilon * t) + link,
        DepthVariant::Qdrift => {
            q.alpha * log_inv / (q.delta * q.e_gap) + q.alpha.powi(4) / (q.epsilon.powi(4) * t) + link
        }
    })
}

/// Per-use channel error budget `epsilon / (m pi)`.
pub fn channel_tolerance(epsilon: f64, m: f64) -> Result<f64> {
    if !(epsilon > 0.0 && m > 0.0) {
        return Err(MnqcError::Domain("epsilon and m must be positive".into()));
    }
    Ok(epsilon / (m * PI))
}

/// `round(sqrt(1 / (epsilon gamma)))`, at least 1.
pub fn optimal_worker_count(epsilon: f64, gamma: f64) -> Result<u64> {
    if !(epsilon > 0.0 && gamma > 0.0) {
        return Err(MnqcError::Domain("epsilon and gamma must be positive".into()));
    }
    Ok(((1.0 / (epsilon * gamma)).sqrt().round() as u64).max(1))
}
