//! Noisy density-matrix execution of a routed circuit.
//!
//! Timing: local gates are scheduled as soon as their qubits are free;
//! an internode gate is a barrier that holds every qubit for `T_LL`. Idle
//! decoherence is applied lazily, when a qubit is next touched or at the end.
//! Qubits never touched stay in `|0>`, which the idle channel leaves alone,
//! so only the touched qubits are simulated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::routing::RoutedCircuit;
use crate::densmat::{DensityMatrix, HilbertLayout, NoiseParams};
use crate::error::Result;
use crate::internode::LinkChannel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchScore {
    /// Overlap with the noiseless output state.
    pub fidelity: f64,
    /// Probability of the expected readout, for circuits that define one.
    pub success_prob: Option<f64>,
}

impl BenchScore {
    /// Success probability where a readout is defined, fidelity otherwise.
    pub fn score(&self) -> f64 {
        self.success_prob.unwrap_or(self.fidelity)
    }
}

struct Register {
    rho: DensityMatrix,
    /// Time up to which each qubit's decoherence has been applied.
    clock: Vec<f64>,
    noise: NoiseParams,
}

impl Register {
    fn flush(&mut self, q: usize, until: f64) -> Result<()> {
        let dt = until - self.clock[q];
        if dt > 0.0 && !self.noise.is_decoherence_free() {
            let ch = self.noise.idle_channel(dt)?;
            self.rho.apply_superop_unchecked(ch.superoperator(), &[q]);
        }
        self.clock[q] = self.clock[q].max(until);
        Ok(())
    }
}

/// Final noisy state on the touched qubits, the touched physical qubits,
/// and the makespan.
pub fn run_noisy(
    routed: &RoutedCircuit,
    noise: &NoiseParams,
    link: &LinkChannel,
) -> Result<(DensityMatrix, Vec<usize>, f64)> {
    noise.validate()?;
    let circuit = &routed.circuit;
    let (active, index) = active_qubits(routed);
    let n = active.len();
    let mut reg = Register {
        rho: DensityMatrix::basis(HilbertLayout::qubits(n), 0)?,
        clock: vec![0.0; n],
        noise: *noise,
    };
    let mut floor = 0.0f64;
    for gate in &circuit.gates {
        let qs: Vec<usize> = gate.qubits.iter().map(|&q| index[q]).collect();
        let u = gate.kind.matrix();
        let reps = gate.kind.cx_count().max(1);
        if gate.internode {
            let start = reg.clock.iter().copied().fold(floor, f64::max);
            for &q in &qs {
                reg.flush(q, start)?;
            }
            reg.rho.conjugate_unchecked(&u, &qs);
            for _ in 0..reps {
                reg.rho.depolarize_mut(link.depolarizing_prob.min(1.0), &qs);
            }
            // data qubits wait for the pair like everyone else
            floor = start + reps as f64 * link.t_ll;
            for &q in &qs {
                reg.flush(q, floor)?;
            }
        } else {
            let start = qs.iter().map(|&q| reg.clock[q]).fold(floor, f64::max);
            for &q in &qs {
                reg.flush(q, start)?;
            }
            reg.rho.conjugate_unchecked(&u, &qs);
            for _ in 0..reps {
                reg.rho.depolarize_mut(noise.depolarizing_prob, &qs);
            }
            let end = start + reps as f64 * gate.duration;
            for &q in &qs {
                reg.flush(q, end)?;
            }
        }
    }
    let makespan = reg.clock.iter().copied().fold(floor, f64::max);
    for q in 0..n {
        reg.flush(q, makespan)?;
    }
    Ok((reg.rho, active, makespan))
}

/// Sorted touched physical qubits and a physical -> compact index map.
pub(crate) fn active_qubits(routed: &RoutedCircuit) -> (Vec<usize>, Vec<usize>) {
    let c = &routed.circuit;
    let mut used = vec![false; c.n_qubits];
    for g in &c.gates {
        for &q in &g.qubits {
            used[q] = true;
        }
    }
    // the whole logical register, even qubits no gate touches
    for &q in &routed.final_layout {
        used[q] = true;
    }
    let active: Vec<usize> = (0..c.n_qubits).filter(|&q| used[q]).collect();
    let mut index = vec![usize::MAX; c.n_qubits];
    for (i, &q) in active.iter().enumerate() {
        index[q] = i;
    }
    (active, index)
}

/// Noiseless output of the routed circuit restricted to `active` qubits.
pub(crate) fn ideal_state(routed: &RoutedCircuit, active: &[usize]) -> Vec<Complex64> {
    let mut index = vec![usize::MAX; routed.circuit.n_qubits];
    for (i, &q) in active.iter().enumerate() {
        index[q] = i;
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << active.len()];
    psi[0] = Complex64::new(1.0, 0.0);
    for g in &routed.circuit.gates {
        let qs: Vec<usize> = g.qubits.iter().map(|&q| index[q]).collect();
        super::circuit::apply_to_statevector(&mut psi, active.len(), &g.kind.matrix(), &qs);
    }
    psi
}

/// Runs the circuit under `noise` with link gates drawn from `link`, and
/// scores the result against the noiseless output.
pub fn simulate_noisy(
    routed: &RoutedCircuit,
    noise: &NoiseParams,
    link: &LinkChannel,
) -> Result<BenchScore> {
    let (rho, active, _) = run_noisy(routed, noise, link)?;
    let psi = ideal_state(routed, &active);
    let data = rho.data();
    let d = psi.len();
    let mut fid = Complex64::new(0.0, 0.0);
    for c in 0..d {
        if psi[c] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let col = data.column(c);
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..d {
            acc += psi[r].conj() * col[r];
        }
        fid += acc * psi[c];
    }
    let success_prob = routed.physical_readout().map(|readout| {
        let n = active.len();
        let bits: Vec<(usize, bool)> = readout
            .iter()
            .map(|&(q, b)| (n - 1 - active.binary_search(&q).expect("readout qubit active"), b))
            .collect();
        (0..d)
            .filter(|&x| bits.iter().all(|&(s, b)| (x >> s & 1 == 1) == b))
            .map(|x| data[(x, x)].re)
            .sum()
    });
    Ok(BenchScore {
        fidelity: fid.re,
        success_prob,
    })
}

/// Noisy distribution of the listed logical qubits (first = most
/// significant), marginalized over everything else.
pub fn readout_distribution(
    routed: &RoutedCircuit,
    noise: &NoiseParams,
    link: &LinkChannel,
    logical: &[usize],
) -> Result<Vec<f64>> {
    let (rho, active, _) = run_noisy(routed, noise, link)?;
    let n = active.len();
    let shifts: Vec<usize> = logical
        .iter()
        .map(|&l| {
            let p = routed.final_layout[l];
            n - 1 - active.binary_search(&p).expect("logical qubit is active")
        })
        .collect();
    let w = logical.len();
    let mut out = vec![0.0; 1 << w];
    for x in 0..rho.dim() {
        let key = shifts
            .iter()
            .enumerate()
            .fold(0, |k, (i, &s)| k | (x >> s & 1) << (w - 1 - i));
        out[key] += rho.element(x, x).re;
    }
    Ok(out)
}
