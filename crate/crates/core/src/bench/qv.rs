//! Quantum volume by the heavy-output test.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exec::{active_qubits, ideal_state, run_noisy};
use super::library::qv_model_circuit;
use super::routing::{route, NodeTopology, RoutedCircuit};
use crate::densmat::NoiseParams;
use crate::error::{MnqcError, Result};
use crate::internode::{effective_link_channel, LinkChannel};

pub const MIN_QV_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QvWidthResult {
    pub width: usize,
    pub trials: usize,
    /// `None` when the width cannot be placed on the device.
    pub mean_hop: Option<f64>,
    pub sigma: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QvResult {
    /// `log2 QV`: the largest passing width before the first failure.
    pub log2_qv: usize,
    pub widths: Vec<QvWidthResult>,
}

impl QvResult {
    pub fn quantum_volume(&self) -> u64 {
        1 << self.log2_qv
    }
}

/// Heavy-output probability of one routed model circuit.
pub fn heavy_output_probability(
    routed: &RoutedCircuit,
    width: usize,
    noise: &NoiseParams,
    link: &LinkChannel,
) -> Result<f64> {
    let ideal_only = noise.is_decoherence_free()
        && noise.depolarizing_prob == 0.0
        && (link.f_ll == 1.0 || !routed.circuit.gates.iter().any(|g| g.internode));
    let (noisy_diag, active) = if ideal_only {
        let (active, _) = active_qubits(routed);
        let psi = ideal_state(routed, &active);
        (psi.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>(), active)
    } else {
        let (rho, active, _) = run_noisy(routed, noise, link)?;
        ((0..rho.dim()).map(|i| rho.element(i, i).re).collect(), active)
    };
    let ideal: Vec<f64> = ideal_state(routed, &active).iter().map(|a| a.norm_sqr()).collect();
    let n = active.len();
    let shifts: Vec<usize> = routed.final_layout[..width]
        .iter()
        .map(|q| n - 1 - active.binary_search(q).expect("logical qubit is active"))
        .collect();
    let marginal = |p: &[f64]| {
        let mut out = vec![0.0; 1 << width];
        for (x, &v) in p.iter().enumerate() {
            let key = shifts
                .iter()
                .enumerate()
                .fold(0, |k, (i, &s)| k | (x >> s & 1) << (width - 1 - i));
            out[key] += v;
        }
        out
    };
    let ideal_m = marginal(&ideal);
    let noisy_m = marginal(&noisy_diag);
    let mut sorted = ideal_m.clone();
    sorted.sort_by(f64::total_cmp);
    let half = sorted.len() / 2;
    let median = (sorted[half - 1] + sorted[half]) / 2.0;
    Ok(ideal_m
        .iter()
        .zip(&noisy_m)
        .filter(|(p, _)| **p > median)
        .map(|(_, q)| q)
        .sum())
}

/// Scans widths `2..=max_width` upward, stopping at the first failure.
/// A width passes when the mean heavy-output probability exceeds 2/3 by two
/// standard errors. `link = None` means two isolated nodes.
///
/// Circuit `t` of width `m` is drawn from a ChaCha8 stream keyed by
/// `(seed, m, t)`, so results do not depend on thread count.
pub fn quantum_volume(
    noise: &NoiseParams,
    link: Option<&LinkChannel>,
    trials: usize,
    max_width: usize,
    seed: u64,
) -> Result<QvResult> {
    if trials < MIN_QV_TRIALS {
        return Err(MnqcError::Domain(format!(
            "quantum volume needs at least {MIN_QV_TRIALS} trials, got {trials}"
        )));
    }
    let topo = match link {
        Some(_) => NodeTopology::two_rings(),
        None => NodeTopology::isolated_rings(),
    };
    if !(2..=topo.n_qubits()).contains(&max_width) {
        return Err(MnqcError::Domain(format!("max width {max_width} outside [2, 10]")));
    }
    let ideal_link;
    let link = match link {
        Some(l) => l,
        None => {
            ideal_link = effective_link_channel(1.0, 0.0, noise, 0)?;
            &ideal_link
        }
    };
    let mut widths = Vec::new();
    let mut log2_qv = 0;
    for m in 2..=max_width {
        let hops: Result<Vec<Option<f64>>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((m as u64) << 32) | t as u64);
                let circuit = qv_model_circuit(m, &mut rng)?;
                match route(&circuit, &topo) {
                    Ok(routed) => heavy_output_probability(&routed, m, noise, link).map(Some),
                    Err(MnqcError::Unroutable(..)) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect();
        let hops = hops?;
        let row = if hops.iter().any(Option::is_none) {
            QvWidthResult {
                width: m,
                trials,
                mean_hop: None,
                sigma: 0.0,
                pass: false,
            }
        } else {
            let mean = hops.iter().flatten().sum::<f64>() / trials as f64;
            let sigma = (mean * (1.0 - mean) / trials as f64).sqrt();
            QvWidthResult {
                width: m,
                trials,
                mean_hop: Some(mean),
                sigma,
                pass: mean - 2.0 * sigma > 2.0 / 3.0,
            }
        };
        let pass = row.pass;
        widths.push(row);
        if !pass {
            break;
        }
        log2_qv = m;
    }
    Ok(QvResult { log2_qv, widths })
}
