//! Dense density-matrix and quantum-channel machinery shared by every layer.

pub(crate) mod bosonic;
mod channel;
mod fidelity;
pub mod gates;
mod hermitian;
pub(crate) mod kernel;
mod layout;
mod state;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use bosonic::{
    beamsplitter_amplitude, beamsplitter_unitary, thermal_levels_for_tail, thermal_state,
    thermal_weights,
};
pub use channel::{depolarizing_channel, relaxation_dephasing_channel, QuantumChannel};
pub use fidelity::{
    bell_coefficients, bell_diagonal, bell_fidelity, channel_from_choi, choi_state,
    process_fidelity, werner_state, BellState,
};
pub use layout::HilbertLayout;
pub use state::{unitarity_error, DensityMatrix, TraceFlag};

use crate::error::{MnqcError, Result};

/// Numerical tolerances used by validity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
    pub unitarity: f64,
    /// Largest shift of herald observables accepted when doubling `d_f`.
    pub truncation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            trace: 1e-9,
            positivity: 1e-9,
            unitarity: 1e-10,
            truncation: 1e-4,
        }
    }
}

/// Local qubit noise model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    /// Energy relaxation time (s).
    pub t1: f64,
    /// Coherence time (s).
    pub t2: f64,
    /// Duration of a local gate (s).
    pub local_gate_time: f64,
    /// Depolarizing probability applied after each local gate.
    pub depolarizing_prob: f64,
    /// Duration of one purification step: local gates plus measurement (s).
    pub purification_step_time: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            t1: 1e-3,
            t2: 1e-3,
            local_gate_time: 100e-9,
            depolarizing_prob: 1e-4,
            purification_step_time: 1e-6,
        }
    }
}

impl NoiseParams {
    /// No decoherence and no gate error; gate durations are kept.
    pub fn noiseless() -> Self {
        Self {
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            depolarizing_prob: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        Self::check_coherence(self.t1, self.t2)?;
        for (name, v) in [
            ("local gate time", self.local_gate_time),
            ("purification step time", self.purification_step_time),
        ] {
            if !(v > 0.0) {
                return Err(MnqcError::InvalidNoise(format!("{name} must be > 0, got {v}")));
            }
        }
        crate::error::check_range("depolarizing probability", self.depolarizing_prob, 0.0, 1.0, "[0, 1]")
    }

    pub(crate) fn check_coherence(t1: f64, t2: f64) -> Result<()> {
        if !(t1 > 0.0 && t2 > 0.0) {
            return Err(MnqcError::InvalidNoise(format!(
                "T1 and T2 must be > 0 (T1 = {t1}, T2 = {t2})"
            )));
        }
        if t2 > 2.0 * t1 {
            return Err(MnqcError::InvalidNoise(format!(
                "T2 = {t2} exceeds 2 T1 = {}",
                2.0 * t1
            )));
        }
        Ok(())
    }

    /// Effective fidelity lifetime `T1 T2 / (T1 + T2)`.
    pub fn t_star(&self) -> f64 {
        if self.t1.is_infinite() && self.t2.is_infinite() {
            return f64::INFINITY;
        }
        self.t1 * self.t2 / (self.t1 + self.t2)
    }

    pub fn is_decoherence_free(&self) -> bool {
        self.t1.is_infinite() && self.t2.is_infinite()
    }

    /// Single-qubit idle channel for `t` seconds.
    pub fn idle_channel(&self, t: f64) -> Result<QuantumChannel> {
        if self.is_decoherence_free() {
            return Ok(QuantumChannel::identity(HilbertLayout::qubits(1)));
        }
        relaxation_dephasing_channel(t, self.t1, self.t2)
    }
}

/// `a (x) b`.
pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    a.tensor(b)
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

pub fn apply_unitary(
    rho: &DensityMatrix,
    u: &DMatrix<Complex64>,
    targets: &[usize],
) -> Result<DensityMatrix> {
    rho.apply_unitary(u, targets)
}

pub fn apply_channel(
    rho: &DensityMatrix,
    ch: &QuantumChannel,
    targets: &[usize],
) -> Result<DensityMatrix> {
    rho.apply_channel(ch, targets)
}
