use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::channel::QuantumChannel;
use super::layout::HilbertLayout;
use super::state::{DensityMatrix, TraceFlag};
use crate::error::{MnqcError, Result};

/// The four Bell states; qubit basis `|0> = |g>`, `|1> = |e>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiMinus,
    ];

    pub fn vector(self) -> DVector<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = match self {
            BellState::PhiPlus => [s, 0.0, 0.0, s],
            BellState::PhiMinus => [s, 0.0, 0.0, -s],
            BellState::PsiPlus => [0.0, s, s, 0.0],
            BellState::PsiMinus => [0.0, s, -s, 0.0],
        };
        DVector::from_iterator(4, v.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    pub fn density(self) -> DensityMatrix {
        let v = self.vector();
        DensityMatrix::from_parts(HilbertLayout::qubits(2), &v * v.adjoint(), TraceFlag::Normalized)
            .expect("4x4 Bell projector")
    }
}

/// Mixture `sum_i w_i |B_i><B_i|` over the Bell basis, in [`BellState::ALL`] order.
pub fn bell_diagonal(weights: [f64; 4]) -> Result<DensityMatrix> {
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(MnqcError::InvalidState(format!(
            "Bell-diagonal weights {weights:?} are not a distribution"
        )));
    }
    let mut data = DMatrix::zeros(4, 4);
    for (w, b) in weights.iter().zip(BellState::ALL) {
        let v = b.vector();
        data += &v * v.adjoint() * Complex64::new(*w, 0.0);
    }
    DensityMatrix::from_parts(HilbertLayout::qubits(2), data, TraceFlag::Normalized)
}

/// Werner state with fidelity `f` to `target` and the remaining weight spread
/// evenly over the other three Bell states.
pub fn werner_state(f: f64, target: BellState) -> Result<DensityMatrix> {
    crate::error::check_range("Werner fidelity", f, 0.0, 1.0, "[0, 1]")?;
    let rest = (1.0 - f) / 3.0;
    let weights = BellState::ALL.map(|b| if b == target { f } else { rest });
    bell_diagonal(weights)
}

/// Coefficients `<B|rho|B>` in [`BellState::ALL`] order.
pub fn bell_coefficients(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (o, b) in out.iter_mut().zip(BellState::ALL) {
        *o = bell_fidelity(rho, b)?;
    }
    Ok(out)
}

/// `<B|rho|B>` for a normalized two-qubit state.
pub fn bell_fidelity(rho: &DensityMatrix, target: BellState) -> Result<f64> {
    if rho.layout().dims() != [2, 2] {
        return Err(MnqcError::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let v = target.vector();
    let f = (v.adjoint() * rho.data() * &v)[(0, 0)].re;
    Ok(f.clamp(0.0, 1.0))
}

/// Entanglement fidelity of `actual` with the unitary `ideal`:
/// `sum_K |Tr(U^dagger K)|^2 / d^2`.
pub fn process_fidelity(actual: &QuantumChannel, ideal: &DMatrix<Complex64>) -> Result<f64> {
    let d = actual.dim();
    if ideal.nrows() != d || ideal.ncols() != d {
        return Err(MnqcError::DimensionMismatch {
            expected: d,
            actual: ideal.nrows(),
        });
    }
    let u_dag = ideal.adjoint();
    let f: f64 = actual
        .kraus()
        .iter()
        .map(|k| (&u_dag * k).trace().norm_sqr())
        .sum::<f64>()
        / (d * d) as f64;
    Ok(f.clamp(0.0, 1.0))
}

/// Normalized Choi state `(E (x) id)(|Omega><Omega|)`, system factor first.
pub fn choi_state(ch: &QuantumChannel) -> DensityMatrix {
    let d = ch.dim();
    let mut omega = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        omega[i * d + i] = Complex64::new(1.0, 0.0);
    }
    let layout = ch.layout().concat(ch.layout());
    let system: Vec<usize> = (0..ch.layout().count()).collect();
    DensityMatrix::from_pure(layout, &omega)
        .expect("maximally entangled vector")
        .apply_channel(ch, &system)
        .expect("channel matches its own layout")
}

/// Kraus operators recovered from a (normalized) Choi state by eigendecomposition.
pub fn channel_from_choi(choi: &DensityMatrix, system: HilbertLayout) -> Result<QuantumChannel> {
    let d = system.total_dim();
    if choi.dim() != d * d {
        return Err(MnqcError::DimensionMismatch {
            expected: d * d,
            actual: choi.dim(),
        });
    }
    let mut kraus = Vec::new();
    for (lambda, v) in super::hermitian::hermitian_outer_terms(choi.data()) {
        if lambda <= 1e-14 {
            continue;
        }
        // |v> = sum_{i,j} v[i*d + j] |i>_sys |j>_ref  ->  K[i, j] = sqrt(d lambda) v[i*d + j]
        let scale = Complex64::new((d as f64 * lambda).sqrt(), 0.0);
        kraus.push(DMatrix::from_fn(d, d, |i, j| v[i * d + j] * scale));
    }
    QuantumChannel::new(system, kraus)
}
