use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::kernel;
use super::layout::HilbertLayout;
use super::{gates, NoiseParams};
use crate::error::{check_range, MnqcError, Result};

/// Completely positive map in Kraus form. Input and output spaces coincide.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    layout: HilbertLayout,
    kraus: Vec<DMatrix<Complex64>>,
    superop: OnceLock<DMatrix<Complex64>>,
}

impl PartialEq for QuantumChannel {
    fn eq(&self, other: &Self) -> bool {
        self.layout == other.layout && self.kraus == other.kraus
    }
}

impl QuantumChannel {
    pub fn new(layout: HilbertLayout, kraus: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let d = layout.total_dim();
        if kraus.is_empty() {
            return Err(MnqcError::InvalidState("channel needs at least one Kraus operator".into()));
        }
        for k in &kraus {
            if k.nrows() != d || k.ncols() != d {
                return Err(MnqcError::DimensionMismatch {
                    expected: d,
                    actual: k.nrows().max(k.ncols()),
                });
            }
        }
        let ch = Self {
            layout,
            kraus,
            superop: OnceLock::new(),
        };
        let excess = ch.completeness_excess();
        if excess > 1e-9 {
            return Err(MnqcError::InvalidState(format!(
                "sum K^dagger K exceeds identity by {excess:.3e}"
            )));
        }
        Ok(ch)
    }

    pub fn identity(layout: HilbertLayout) -> Self {
        let d = layout.total_dim();
        Self {
            layout,
            kraus: vec![DMatrix::identity(d, d)],
            superop: OnceLock::new(),
        }
    }

    pub fn unitary(layout: HilbertLayout, u: DMatrix<Complex64>) -> Result<Self> {
        let dev = super::state::unitarity_error(&u);
        if dev > super::Tolerances::default().unitarity {
            return Err(MnqcError::NotUnitary { deviation: dev });
        }
        Self::new(layout, vec![u])
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn kraus(&self) -> &[DMatrix<Complex64>] {
        &self.kraus
    }

    pub fn completeness(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        self.kraus
            .iter()
            .fold(DMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k)
    }

    /// Largest eigenvalue of `sum K^dagger K - I` (<= 0 for trace-nonincreasing maps).
    pub fn completeness_excess(&self) -> f64 {
        let d = self.dim();
        let dev = self.completeness() - DMatrix::<Complex64>::identity(d, d);
        super::hermitian::hermitian_eigenvalues(&dev)
            .last()
            .copied()
            .unwrap_or(0.0)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let d = self.dim();
        let dev = self.completeness() - DMatrix::<Complex64>::identity(d, d);
        dev.iter().all(|z| z.norm() <= tol)
    }

    pub(crate) fn superoperator(&self) -> &DMatrix<Complex64> {
        self.superop.get_or_init(|| kernel::superoperator(&self.kraus))
    }

    /// `other . self` (apply `self` first).
    pub fn then(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        if self.layout != other.layout {
            return Err(MnqcError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        let kraus = other
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b * a))
            .filter(|k| k.iter().any(|z| z.norm_sqr() > 1e-30))
            .collect();
        Ok(Self {
            layout: self.layout.clone(),
            kraus,
            superop: OnceLock::new(),
        })
    }

    /// `self (x) other` on the concatenated layout.
    pub fn tensor(&self, other: &QuantumChannel) -> QuantumChannel {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kronecker(b)))
            .collect();
        Self {
            layout: self.layout.concat(&other.layout),
            kraus,
            superop: OnceLock::new(),
        }
    }
}

/// `rho -> (1-p) rho + p I/d` on `n_qubits` qubits, `d = 2^n_qubits`.
pub fn depolarizing_channel(p: f64, n_qubits: usize) -> Result<QuantumChannel> {
    check_range("depolarizing probability", p, 0.0, 1.0, "[0, 1]")?;
    let paulis = gates::pauli_basis(n_qubits);
    let d2 = paulis.len() as f64;
    let kraus = paulis
        .into_iter()
        .enumerate()
        .filter_map(|(i, pauli)| {
            let weight = if i == 0 { 1.0 - p + p / d2 } else { p / d2 };
            (weight > 0.0).then(|| pauli * Complex64::new(weight.sqrt(), 0.0))
        })
        .collect();
    QuantumChannel::new(HilbertLayout::qubits(n_qubits), kraus)
}

/// Amplitude damping (`gamma = 1 - exp(-t/T1)`) composed with pure dephasing
/// so that coherences decay as `exp(-t/T2)`, written with three Kraus operators.
pub fn relaxation_dephasing_channel(t: f64, t1: f64, t2: f64) -> Result<QuantumChannel> {
    let [k0, k1, k2] = relaxation_kraus(t, t1, t2)?;
    QuantumChannel::new(HilbertLayout::qubits(1), vec![k0, k1, k2])
}

pub(crate) fn relaxation_kraus(t: f64, t1: f64, t2: f64) -> Result<[DMatrix<Complex64>; 3]> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(MnqcError::OutOfRange {
            name: "idle time",
            value: t,
            range: "[0, inf)",
        });
    }
    NoiseParams::check_coherence(t1, t2)?;
    let gamma = 1.0 - (-t / t1).exp();
    let dephase_rate = 1.0 / t2 - 0.5 / t1;
    let lambda = (-t * dephase_rate).exp();
    let a = (1.0 - gamma).sqrt() * lambda;
    let b = (1.0 - gamma).sqrt() * (1.0 - lambda * lambda).max(0.0).sqrt();
    let c = |re: f64| Complex64::new(re, 0.0);
    let k0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(a)]);
    let k1 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]);
    let k2 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(b)]);
    Ok([k0, k1, k2])
}
