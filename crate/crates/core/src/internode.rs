//! Teleported CX across the link and its reduction to an effective channel.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densmat::{
    bell_fidelity, channel_from_choi, gates, process_fidelity, BellState, DensityMatrix,
    HilbertLayout, NoiseParams, QuantumChannel,
};
use crate::distillation::{nested_distillation, DistillationConfig};
use crate::error::{check_range, MnqcError, Result};
use crate::physical::{simulate_heralded_cycle, M2OConverterPreset, SimulationOptions};

#[derive(Debug, Clone)]
pub struct InternodeGateResult {
    /// `T_LL` (s).
    pub gate_time: f64,
    /// `F_LL` against the ideal CX.
    pub process_fidelity: f64,
    pub effective_channel: QuantumChannel,
    pub ep_fidelity: f64,
}

// register: control, target, two reference qubits, EP half at the control
// node (a), EP half at the target node (b)
const C: usize = 0;
const T: usize = 1;
const A: usize = 4;
const B: usize = 5;

/// Number of local gate layers in the teleportation circuit.
pub const LOCAL_GATE_LAYERS: usize = 2;

fn idle_all(rho: &mut DensityMatrix, idle: &Option<QuantumChannel>, qubits: &[usize]) -> Result<()> {
    if let Some(ch) = idle {
        for &q in qubits {
            rho.apply_channel_mut(ch, &[q])?;
        }
    }
    Ok(())
}

/// Measures `qubit` in Z and applies `fix` on `corrected` for outcome 1;
/// the outcomes are summed, so the result is the averaged channel output.
fn measure_and_correct(
    rho: &DensityMatrix,
    qubit: usize,
    fix: &DMatrix<Complex64>,
    corrected: usize,
) -> Result<DensityMatrix> {
    let zero = rho.project(&[qubit], 0)?;
    let one = rho.project(&[qubit], 1)?.apply_unitary(fix, &[corrected])?;
    zero.add(&one)
}

/// Gate teleportation of CX (control at one node, target at the other)
/// consuming one EP with fidelity to `ep_target`.
///
/// `delivery_time` is the average time to have the EP ready; the gate time
/// adds [`LOCAL_GATE_LAYERS`] local gates.
pub fn teleported_cx(
    ep_state: &DensityMatrix,
    ep_target: BellState,
    noise: &NoiseParams,
    delivery_time: f64,
) -> Result<InternodeGateResult> {
    if ep_state.layout().dims() != [2, 2] {
        return Err(MnqcError::InvalidState("EP must be a two-qubit state".into()));
    }
    noise.validate()?;
    check_range("delivery time", delivery_time, 0.0, f64::MAX, "[0, inf)")?;
    let ep_fidelity = bell_fidelity(ep_state, ep_target)?;

    let d = 4;
    let mut omega = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        omega[i * d + i] = Complex64::new(1.0, 0.0);
    }
    let choi_in = DensityMatrix::from_pure(HilbertLayout::qubits(4), &omega)?;
    let mut rho = choi_in.tensor(ep_state);

    // rotate the EP into the Phi+ frame with a Pauli at the target node
    match ep_target {
        BellState::PhiPlus => {}
        BellState::PsiPlus => rho.apply_unitary_mut(&gates::x(), &[B])?,
        BellState::PhiMinus => rho.apply_unitary_mut(&gates::z(), &[B])?,
        BellState::PsiMinus => rho.apply_unitary_mut(&(gates::x() * gates::z()), &[B])?,
    }

    let idle = if noise.is_decoherence_free() {
        None
    } else {
        Some(noise.idle_channel(noise.local_gate_time)?)
    };
    let physical = [C, T, A, B];

    rho.apply_unitary_mut(&gates::cx(), &[C, A])?;
    rho.depolarize_mut(noise.depolarizing_prob, &[C, A]);
    idle_all(&mut rho, &idle, &physical)?;
    let mut rho = measure_and_correct(&rho, A, &gates::x(), B)?;

    rho.apply_unitary_mut(&gates::cx(), &[B, T])?;
    rho.depolarize_mut(noise.depolarizing_prob, &[B, T]);
    idle_all(&mut rho, &idle, &physical)?;
    rho.apply_unitary_mut(&gates::h(), &[B])?;
    let rho = measure_and_correct(&rho, B, &gates::z(), C)?;

    let choi = rho.partial_trace(&[0, 1, 2, 3])?;
    let channel = channel_from_choi(&choi, HilbertLayout::qubits(2))?;
    let f = process_fidelity(&channel, &gates::cx())?;
    Ok(InternodeGateResult {
        gate_time: delivery_time + LOCAL_GATE_LAYERS as f64 * noise.local_gate_time,
        process_fidelity: f,
        effective_channel: channel,
        ep_fidelity,
    })
}

/// Ideal CX followed by depolarizing noise matched to `F_LL`, and the idle
/// channel seen by every other qubit during `T_LL`.
#[derive(Debug, Clone)]
pub struct LinkChannel {
    pub f_ll: f64,
    pub t_ll: f64,
    pub two_qubit: QuantumChannel,
    pub spectator: QuantumChannel,
    pub n_spectators: usize,
    /// Equivalent two-qubit depolarizing probability, `16 (1 - F_LL) / 15`.
    pub depolarizing_prob: f64,
}

pub fn effective_link_channel(
    f_ll: f64,
    t_ll: f64,
    noise: &NoiseParams,
    n_spectators: usize,
) -> Result<LinkChannel> {
    check_range("link fidelity", f_ll, 0.0, 1.0, "[0, 1]")?;
    check_range("link gate time", t_ll, 0.0, f64::MAX, "[0, inf)")?;
    let paulis = gates::pauli_basis(2);
    let cx = gates::cx();
    let rest = (1.0 - f_ll) / 15.0;
    let kraus: Vec<_> = paulis
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let w = if i == 0 { f_ll } else { rest };
            (w > 0.0).then(|| p * &cx * Complex64::new(w.sqrt(), 0.0))
        })
        .collect();
    let two_qubit = QuantumChannel::new(HilbertLayout::qubits(2), kraus)?;
    let spectator = if t_ll == 0.0 {
        QuantumChannel::identity(HilbertLayout::qubits(1))
    } else {
        noise.idle_channel(t_ll)?
    };
    Ok(LinkChannel {
        f_ll,
        t_ll,
        two_qubit,
        spectator,
        n_spectators,
        depolarizing_prob: 16.0 * (1.0 - f_ll) / 15.0,
    })
}

/// Link parameters handed to the gate-level and analytic layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub pe: f64,
    pub pump_watts: f64,
    pub rounds: usize,
    pub t_ll_seconds: f64,
    pub f_ll: f64,
}

/// Physical layer -> distillation -> teleported CX.
///
/// The EP delivery time is the average `t_n / P_n`; for raw pairs this is
/// `1/R`.
pub fn link_from_preset(
    preset: &M2OConverterPreset,
    pump_watts: f64,
    pe: f64,
    rounds: usize,
    noise: &NoiseParams,
    opts: &SimulationOptions,
) -> Result<(LinkRecord, InternodeGateResult)> {
    let ep = simulate_heralded_cycle(preset, pump_watts, pe, opts)?;
    let raw = ep.conditional_state.ok_or(MnqcError::NoHeraldEvent)?;
    let tau = 1.0 / ep.rate;
    let dist = nested_distillation(&raw, &DistillationConfig::new(rounds, tau, *noise))?;
    let delivery = dist.total_time / dist.success_prob;
    let gate = teleported_cx(&dist.state, BellState::PsiPlus, noise, delivery)?;
    let record = LinkRecord {
        pe,
        pump_watts,
        rounds,
        t_ll_seconds: gate.gate_time,
        f_ll: gate.process_fidelity,
    };
    Ok((record, gate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_ep_teleports_cx_exactly() {
        let ep = BellState::PsiPlus.density();
        let r = teleported_cx(&ep, BellState::PsiPlus, &NoiseParams::noiseless(), 0.0).unwrap();
        assert!((r.process_fidelity - 1.0).abs() < 1e-12);
        assert!((r.gate_time - 2.0 * NoiseParams::noiseless().local_gate_time).abs() < 1e-20);
    }

    #[test]
    fn ideal_link_channel_is_cx() {
        let l = effective_link_channel(1.0, 0.0, &NoiseParams::default(), 3).unwrap();
        assert_eq!(l.two_qubit.kraus().len(), 1);
        assert!((process_fidelity(&l.two_qubit, &gates::cx()).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(l.spectator.kraus().len(), 1);
    }
}
