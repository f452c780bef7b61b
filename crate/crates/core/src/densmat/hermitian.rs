//! Hermitian eigenproblems through the real symmetric embedding
//! `[[Re H, -Im H], [Im H, Re H]]`, which is more accurate than the complex
//! solver for nearly rank-deficient operators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn real_embedding(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Eigenvalues of the Hermitian part of `h`, ascending.
pub(crate) fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = real_embedding(&herm)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    // every eigenvalue appears twice in the embedding
    ev.into_iter().step_by(2).collect()
}

/// Terms `(w, v)` with `sum w v v^dagger = H` (Hermitian part of `h`).
/// Vectors are unit norm but not mutually orthogonal: each eigenvector of
/// `H` appears twice with half weight, up to phase.
///
/// Uses cyclic Jacobi, whose eigenvectors stay accurate where the QR-based
/// solver loses about eight digits; intended for small operators.
pub(crate) fn hermitian_outer_terms(h: &DMatrix<Complex64>) -> Vec<(f64, DVector<Complex64>)> {
    let n = h.nrows();
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let (values, vectors) = jacobi_eigen(real_embedding(&herm));
    values
        .iter()
        .enumerate()
        .map(|(j, &mu)| {
            let z = DVector::from_fn(n, |i, _| Complex64::new(vectors[(i, j)], vectors[(n + i, j)]));
            (0.5 * mu, z)
        })
        .collect()
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix; returns
/// eigenvalues and eigenvectors as columns.
fn jacobi_eigen(mut a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}
