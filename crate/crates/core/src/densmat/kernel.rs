//! Subsystem-local contraction kernels on column-major dense matrices.
//!
//! None of these build the full `D x D` embedding of a local operator; the cost
//! of a `k`-dimensional local operator is `O(D^2 k)` for unitaries and
//! `O(D^2 k^2)` for superoperators.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// `data <- (op on targets) * data`, where `op` is `k x k`.
pub(crate) fn left_apply(
    data: &mut [Complex64],
    dim: usize,
    op: &DMatrix<Complex64>,
    target_offsets: &[usize],
    outer_offsets: &[usize],
) {
    let k = target_offsets.len();
    let mut gathered = vec![Complex64::new(0.0, 0.0); k];
    for col in data.chunks_exact_mut(dim) {
        for &o in outer_offsets {
            for (g, &t) in gathered.iter_mut().zip(target_offsets) {
                *g = col[o + t];
            }
            for (i, &t) in target_offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, g) in gathered.iter().enumerate() {
                    acc += op[(i, j)] * g;
                }
                col[o + t] = acc;
            }
        }
    }
}

/// `data <- data * op^dagger`, acting on whole columns.
pub(crate) fn right_apply_adjoint(
    data: &mut [Complex64],
    dim: usize,
    op: &DMatrix<Complex64>,
    target_offsets: &[usize],
    outer_offsets: &[usize],
) {
    let k = target_offsets.len();
    let conj: Vec<Complex64> = (0..k * k).map(|x| op[(x / k, x % k)].conj()).collect();
    let mut cols: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); dim]; k];
    for &o in outer_offsets {
        for (c, &t) in cols.iter_mut().zip(target_offsets) {
            c.copy_from_slice(&data[(o + t) * dim..(o + t + 1) * dim]);
        }
        for (i, &t) in target_offsets.iter().enumerate() {
            let out = &mut data[(o + t) * dim..(o + t + 1) * dim];
            out.fill(Complex64::new(0.0, 0.0));
            for (j, c) in cols.iter().enumerate() {
                let w = conj[i * k + j];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (x, y) in out.iter_mut().zip(c) {
                    *x += w * y;
                }
            }
        }
    }
}

/// `data <- U data U^dagger` with `U` acting on the target subsystems.
pub(crate) fn conjugate(
    data: &mut [Complex64],
    dim: usize,
    op: &DMatrix<Complex64>,
    target_offsets: &[usize],
    outer_offsets: &[usize],
) {
    left_apply(data, dim, op, target_offsets, outer_offsets);
    right_apply_adjoint(data, dim, op, target_offsets, outer_offsets);
}

/// Superoperator of a Kraus set: `S[(i,j),(a,b)] = sum_K K[i,a] conj(K[j,b])`,
/// with the row-major pair index `i * k + j`.
pub(crate) fn superoperator(kraus: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let k = kraus.first().map_or(1, |m| m.nrows());
    let mut s = DMatrix::zeros(k * k, k * k);
    for m in kraus {
        for i in 0..k {
            for j in 0..k {
                for a in 0..k {
                    let mia = m[(i, a)];
                    if mia == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for b in 0..k {
                        s[(i * k + j, a * k + b)] += mia * m[(j, b)].conj();
                    }
                }
            }
        }
    }
    s
}

/// `data <- S(data)` for a superoperator acting on the target subsystems.
pub(crate) fn superop_apply(
    data: &mut [Complex64],
    dim: usize,
    superop: &DMatrix<Complex64>,
    target_offsets: &[usize],
    outer_offsets: &[usize],
) {
    let k = target_offsets.len();
    let kk = k * k;
    // Sparse row lists pay off for channels like damping or dephasing.
    let rows: Vec<Vec<(usize, Complex64)>> = (0..kk)
        .map(|r| {
            (0..kk)
                .filter_map(|c| {
                    let v = superop[(r, c)];
                    (v.norm_sqr() > 0.0).then_some((c, v))
                })
                .collect()
        })
        .collect();
    let mut block = vec![Complex64::new(0.0, 0.0); kk];
    for &oc in outer_offsets {
        for &or in outer_offsets {
            for (j, &tj) in target_offsets.iter().enumerate() {
                let base = (oc + tj) * dim + or;
                for (i, &ti) in target_offsets.iter().enumerate() {
                    block[i * k + j] = data[base + ti];
                }
            }
            for (j, &tj) in target_offsets.iter().enumerate() {
                let base = (oc + tj) * dim + or;
                for (i, &ti) in target_offsets.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(c, v) in &rows[i * k + j] {
                        acc += v * block[c];
                    }
                    data[base + ti] = acc;
                }
            }
        }
    }
}

/// `data <- (1-p) data + p * Tr_T(data) (x) I/d_T` on the target subsystems.
pub(crate) fn depolarize(
    data: &mut [Complex64],
    dim: usize,
    p: f64,
    target_offsets: &[usize],
    outer_offsets: &[usize],
) {
    let k = target_offsets.len();
    let keep = 1.0 - p;
    let mix = p / k as f64;
    for &oc in outer_offsets {
        for &or in outer_offsets {
            let mut tr = Complex64::new(0.0, 0.0);
            for &t in target_offsets {
                tr += data[(oc + t) * dim + or + t];
            }
            for &tj in target_offsets {
                let base = (oc + tj) * dim + or;
                for &ti in target_offsets {
                    data[base + ti] *= keep;
                }
            }
            for &t in target_offsets {
                data[(oc + t) * dim + or + t] += tr * mix;
            }
        }
    }
}
