#![allow(dead_code)]

use mnqc::densmat::{DensityMatrix, HilbertLayout, QuantumChannel, TraceFlag};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    })
}

pub fn random_state(rng: &mut impl Rng, layout: HilbertLayout) -> DensityMatrix {
    let d = layout.total_dim();
    let g = ginibre(rng, d, d);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::from_parts(layout, m / tr, TraceFlag::Normalized).unwrap()
}

pub fn random_pure(rng: &mut impl Rng, d: usize) -> Vec<Complex64> {
    let g = ginibre(rng, d, 1);
    let n = g.norm();
    g.iter().map(|z| z / n).collect()
}

pub fn random_unitary(rng: &mut impl Rng, d: usize) -> DMatrix<Complex64> {
    ginibre(rng, d, d).qr().q()
}

/// Random CPTP channel from a random isometry into system (x) environment.
pub fn random_channel(rng: &mut impl Rng, layout: HilbertLayout, n_kraus: usize) -> QuantumChannel {
    let d = layout.total_dim();
    let u = random_unitary(rng, d * n_kraus);
    // columns 0..d of U form an isometry; block k gives K_k
    let kraus = (0..n_kraus)
        .map(|k| DMatrix::from_fn(d, d, |i, j| u[(k * d + i, j)]))
        .collect();
    QuantumChannel::new(layout, kraus).unwrap()
}

/// Dense embedding of `op` acting on `targets` of an n-qubit register (oracle).
pub fn embed_dense(op: &DMatrix<Complex64>, targets: &[usize], n: usize) -> DMatrix<Complex64> {
    let d = 1usize << n;
    let k = targets.len();
    DMatrix::from_fn(d, d, |r, c| {
        for q in 0..n {
            if !targets.contains(&q) {
                let bit = n - 1 - q;
                if (r >> bit) & 1 != (c >> bit) & 1 {
                    return Complex64::new(0.0, 0.0);
                }
            }
        }
        let sub = |x: usize| {
            targets
                .iter()
                .fold(0usize, |acc, &q| (acc << 1) | ((x >> (n - 1 - q)) & 1))
        };
        let _ = k;
        op[(sub(r), sub(c))]
    })
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
