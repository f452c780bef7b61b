//! Standard gate matrices. Basis order `|0>, |1>` with qubit 0 most significant.

use nalgebra::DMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

pub fn identity(d: usize) -> DMatrix<Complex64> {
    DMatrix::identity(d, d)
}

pub fn x() -> DMatrix<Complex64> {
    m2(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn y() -> DMatrix<Complex64> {
    m2(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn z() -> DMatrix<Complex64> {
    m2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

pub fn h() -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    m2(c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0))
}

pub fn rx(theta: f64) -> DMatrix<Complex64> {
    let (s, co) = (theta / 2.0).sin_cos();
    m2(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
}

pub fn ry(theta: f64) -> DMatrix<Complex64> {
    let (s, co) = (theta / 2.0).sin_cos();
    m2(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

pub fn rz(theta: f64) -> DMatrix<Complex64> {
    m2(
        Complex64::from_polar(1.0, -theta / 2.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        Complex64::from_polar(1.0, theta / 2.0),
    )
}

/// `diag(1, e^{i phi})`.
pub fn phase(phi: f64) -> DMatrix<Complex64> {
    m2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, phi))
}

/// CX with the first qubit as control.
pub fn cx() -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 1)] = c(1.0, 0.0);
    m[(2, 3)] = c(1.0, 0.0);
    m[(3, 2)] = c(1.0, 0.0);
    m
}

pub fn cz() -> DMatrix<Complex64> {
    controlled_phase(std::f64::consts::PI)
}

pub fn controlled_phase(phi: f64) -> DMatrix<Complex64> {
    let mut m = DMatrix::identity(4, 4);
    m[(3, 3)] = Complex64::from_polar(1.0, phi);
    m
}

pub fn swap() -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 3)] = c(1.0, 0.0);
    m
}

/// `|1><1| (x) u + |0><0| (x) I`.
pub fn controlled(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = u.nrows();
    let mut m = DMatrix::identity(2 * d, 2 * d);
    for r in 0..d {
        for cc in 0..d {
            m[(d + r, d + cc)] = u[(r, cc)];
        }
    }
    m
}

/// All `4^n` Pauli strings, identity first.
pub fn pauli_basis(n_qubits: usize) -> Vec<DMatrix<Complex64>> {
    let single = [identity(2), x(), y(), z()];
    let mut out = vec![DMatrix::identity(1, 1)];
    for _ in 0..n_qubits {
        out = out
            .iter()
            .flat_map(|p| single.iter().map(move |s| p.kronecker(s)))
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::state::unitarity_error;

    #[test]
    fn gates_are_unitary() {
        for g in [x(), y(), z(), h(), rx(0.3), ry(1.1), rz(-0.7), cx(), cz(), swap(), controlled(&rz(0.4))] {
            assert!(unitarity_error(&g) < 1e-14);
        }
    }

    #[test]
    fn pauli_count() {
        assert_eq!(pauli_basis(2).len(), 16);
        assert_eq!(pauli_basis(0).len(), 1);
    }
}
