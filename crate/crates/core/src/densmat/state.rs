use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::channel::QuantumChannel;
use super::kernel;
use super::layout::HilbertLayout;
use super::Tolerances;
use crate::error::{MnqcError, Result};

/// Whether a state carries unit trace or is a heralded (projected) branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceFlag {
    Normalized,
    Subnormalized,
}

/// Dense density operator over a composite Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: HilbertLayout,
    data: DMatrix<Complex64>,
    trace_flag: TraceFlag,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, trace and positivity.
    pub fn new(layout: HilbertLayout, data: DMatrix<Complex64>, flag: TraceFlag) -> Result<Self> {
        let rho = Self::from_parts(layout, data, flag)?;
        rho.validate(&Tolerances::default())?;
        Ok(rho)
    }

    /// Wraps a matrix, checking only its shape.
    pub fn from_parts(
        layout: HilbertLayout,
        data: DMatrix<Complex64>,
        trace_flag: TraceFlag,
    ) -> Result<Self> {
        let dim = layout.total_dim();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(MnqcError::DimensionMismatch {
                expected: dim,
                actual: data.nrows().max(data.ncols()),
            });
        }
        Ok(Self {
            layout,
            data,
            trace_flag,
        })
    }

    /// `|psi><psi|` for a normalized or unnormalized vector (normalized here).
    pub fn from_pure(layout: HilbertLayout, psi: &[Complex64]) -> Result<Self> {
        let dim = layout.total_dim();
        if psi.len() != dim {
            return Err(MnqcError::DimensionMismatch {
                expected: dim,
                actual: psi.len(),
            });
        }
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(MnqcError::InvalidState("zero state vector".into()));
        }
        let v = v / Complex64::new(norm, 0.0);
        let data = &v * v.adjoint();
        Ok(Self {
            layout,
            data,
            trace_flag: TraceFlag::Normalized,
        })
    }

    pub fn basis(layout: HilbertLayout, index: usize) -> Result<Self> {
        let dim = layout.total_dim();
        if index >= dim {
            return Err(MnqcError::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut data = DMatrix::zeros(dim, dim);
        data[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(Self {
            layout,
            data,
            trace_flag: TraceFlag::Normalized,
        })
    }

    pub fn maximally_mixed(layout: HilbertLayout) -> Self {
        let dim = layout.total_dim();
        let data = DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Self {
            layout,
            data,
            trace_flag: TraceFlag::Normalized,
        }
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace_flag(&self) -> TraceFlag {
        self.trace_flag
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    /// Diagonal of the matrix as probabilities in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.data[(i, i)].re).collect()
    }

    /// Rescales to unit trace. Fails on a zero-trace branch.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(MnqcError::InvalidState(format!(
                "cannot normalize state with trace {tr:.3e}"
            )));
        }
        Ok(Self {
            layout: self.layout.clone(),
            data: &self.data / Complex64::new(tr, 0.0),
            trace_flag: TraceFlag::Normalized,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            data: &self.data * Complex64::new(factor, 0.0),
            trace_flag: TraceFlag::Subnormalized,
        }
    }

    /// Sum of two operators on the same layout (e.g. herald branches).
    pub fn add(&self, other: &DensityMatrix) -> Result<Self> {
        if self.layout != other.layout {
            return Err(MnqcError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Self {
            layout: self.layout.clone(),
            data: &self.data + &other.data,
            trace_flag: TraceFlag::Subnormalized,
        })
    }

    /// Max elementwise `|rho - rho^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for c in 0..n {
            for r in c..n {
                worst = worst.max((self.data[(r, c)] - self.data[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        super::hermitian::hermitian_eigenvalues(&self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > tol.hermiticity {
            return Err(MnqcError::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = self.trace();
        match self.trace_flag {
            TraceFlag::Normalized if (tr - 1.0).abs() > tol.trace => {
                return Err(MnqcError::InvalidState(format!("trace {tr} != 1")));
            }
            TraceFlag::Subnormalized if !(tr > 0.0 && tr <= 1.0 + tol.trace) => {
                return Err(MnqcError::InvalidState(format!(
                    "subnormalized trace {tr} outside (0, 1]"
                )));
            }
            _ => {}
        }
        let min = self.min_eigenvalue();
        if min < -tol.positivity {
            return Err(MnqcError::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// `self (x) other`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let flag = if self.trace_flag == TraceFlag::Normalized
            && other.trace_flag == TraceFlag::Normalized
        {
            TraceFlag::Normalized
        } else {
            TraceFlag::Subnormalized
        };
        DensityMatrix {
            layout: self.layout.concat(&other.layout),
            data: self.data.kronecker(&other.data),
            trace_flag: flag,
        }
    }

    /// Reduced state on `keep` (kept subsystems stay in ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(MnqcError::InvalidState(
                "partial trace must keep at least one subsystem".into(),
            ));
        }
        let layout = self.layout.restrict(keep)?;
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        let (kept, traced) = self.layout.split_offsets(&sorted);
        let k = kept.len();
        let mut out = DMatrix::zeros(k, k);
        for (j, &tj) in kept.iter().enumerate() {
            for (i, &ti) in kept.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &o in &traced {
                    acc += self.data[(o + ti, o + tj)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix {
            layout,
            data: out,
            trace_flag: self.trace_flag,
        })
    }

    fn check_local_op(&self, op: &DMatrix<Complex64>, targets: &[usize]) -> Result<()> {
        self.layout.validate_targets(targets)?;
        let k = self.layout.dim_of(targets);
        if op.nrows() != k || op.ncols() != k {
            return Err(MnqcError::DimensionMismatch {
                expected: k,
                actual: op.nrows(),
            });
        }
        Ok(())
    }

    /// `(I (x) U) rho (I (x) U)^dagger` with `U` embedded on `targets`.
    pub fn apply_unitary(&self, u: &DMatrix<Complex64>, targets: &[usize]) -> Result<DensityMatrix> {
        let mut out = self.clone();
        out.apply_unitary_mut(u, targets)?;
        Ok(out)
    }

    pub fn apply_unitary_mut(&mut self, u: &DMatrix<Complex64>, targets: &[usize]) -> Result<()> {
        self.check_local_op(u, targets)?;
        let deviation = unitarity_error(u);
        if deviation > Tolerances::default().unitarity {
            return Err(MnqcError::NotUnitary { deviation });
        }
        self.conjugate_unchecked(u, targets);
        Ok(())
    }

    /// Conjugation by an arbitrary local operator; validity is the caller's job.
    pub(crate) fn conjugate_unchecked(&mut self, op: &DMatrix<Complex64>, targets: &[usize]) {
        let (t, o) = self.layout.split_offsets(targets);
        let dim = self.dim();
        kernel::conjugate(self.data.as_mut_slice(), dim, op, &t, &o);
    }

    /// `sum_K K rho K^dagger` with the channel embedded on `targets`.
    pub fn apply_channel(&self, ch: &QuantumChannel, targets: &[usize]) -> Result<DensityMatrix> {
        let mut out = self.clone();
        out.apply_channel_mut(ch, targets)?;
        Ok(out)
    }

    pub fn apply_channel_mut(&mut self, ch: &QuantumChannel, targets: &[usize]) -> Result<()> {
        self.layout.validate_targets(targets)?;
        let k = self.layout.dim_of(targets);
        if ch.dim() != k {
            return Err(MnqcError::DimensionMismatch {
                expected: k,
                actual: ch.dim(),
            });
        }
        self.apply_superop_unchecked(ch.superoperator(), targets);
        if !ch.is_trace_preserving(Tolerances::default().trace) {
            self.trace_flag = TraceFlag::Subnormalized;
        }
        Ok(())
    }

    pub(crate) fn apply_superop_unchecked(&mut self, superop: &DMatrix<Complex64>, targets: &[usize]) {
        let (t, o) = self.layout.split_offsets(targets);
        let dim = self.dim();
        kernel::superop_apply(self.data.as_mut_slice(), dim, superop, &t, &o);
    }

    /// Depolarizing noise `(1-p) rho + p Tr_T(rho) (x) I/d` on `targets`.
    pub fn depolarize(&self, p: f64, targets: &[usize]) -> Result<DensityMatrix> {
        crate::error::check_range("depolarizing probability", p, 0.0, 1.0, "[0, 1]")?;
        self.layout.validate_targets(targets)?;
        let mut out = self.clone();
        out.depolarize_mut(p, targets);
        Ok(out)
    }

    /// Unchecked `O(D^2)` form of [`Self::depolarize`].
    pub(crate) fn depolarize_mut(&mut self, p: f64, targets: &[usize]) {
        if p == 0.0 {
            return;
        }
        let (t, o) = self.layout.split_offsets(targets);
        let dim = self.dim();
        kernel::depolarize(self.data.as_mut_slice(), dim, p, &t, &o);
    }

    /// Projects the target subsystems onto the basis state `index` (in the
    /// target-ordered basis); the result is subnormalized.
    pub fn project(&self, targets: &[usize], index: usize) -> Result<DensityMatrix> {
        self.layout.validate_targets(targets)?;
        let k = self.layout.dim_of(targets);
        let mut proj = DMatrix::zeros(k, k);
        proj[(index, index)] = Complex64::new(1.0, 0.0);
        let mut out = self.clone();
        out.conjugate_unchecked(&proj, targets);
        out.trace_flag = TraceFlag::Subnormalized;
        Ok(out)
    }

    /// Reorders subsystems: subsystem `perm[i]` of `self` becomes subsystem `i`.
    pub fn permute(&self, perm: &[usize]) -> Result<DensityMatrix> {
        if perm.len() != self.layout.count() {
            return Err(MnqcError::DimensionMismatch {
                expected: self.layout.count(),
                actual: perm.len(),
            });
        }
        self.layout.validate_targets(perm)?;
        let (offsets, _) = self.layout.split_offsets(perm);
        let dims: Vec<usize> = perm.iter().map(|&p| self.layout.dims()[p]).collect();
        let layout = HilbertLayout::new(dims)?;
        let n = self.dim();
        let data = DMatrix::from_fn(n, n, |i, j| self.data[(offsets[i], offsets[j])]);
        Ok(DensityMatrix {
            layout,
            data,
            trace_flag: self.trace_flag,
        })
    }

    /// Frobenius-norm distance, handy for convergence checks.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        (&self.data - &other.data).norm()
    }
}

/// Max elementwise deviation of `U^dagger U` from the identity.
pub fn unitarity_error(u: &DMatrix<Complex64>) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    let prod = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for c in 0..n {
        for r in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((prod[(r, c)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}
