//! Benchmark circuits: GHZ, Bernstein-Vazirani, QFT, ripple-carry adder and
//! quantum-volume model circuits.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::circuit::{Circuit, GateKind};
use crate::error::{MnqcError, Result};

pub const BENCHMARK_NAMES: [&str; 5] = ["ghz", "bv", "qft", "adder", "qv"];

pub fn ghz(n: usize) -> Result<Circuit> {
    need_qubits(n, 2)?;
    let mut c = Circuit::new(n, "ghz");
    c.g(GateKind::H, &[0]);
    for q in 0..n - 1 {
        c.g(GateKind::Cx, &[q, q + 1]);
    }
    Ok(c)
}

/// Bernstein-Vazirani with the oracle ancilla as the last qubit.
pub fn bernstein_vazirani(secret: &[bool]) -> Result<Circuit> {
    need_qubits(secret.len(), 1)?;
    let n = secret.len() + 1;
    let anc = n - 1;
    let mut c = Circuit::new(n, "bv");
    c.g(GateKind::X, &[anc]);
    for q in 0..n {
        c.g(GateKind::H, &[q]);
    }
    for (q, &bit) in secret.iter().enumerate() {
        if bit {
            c.g(GateKind::Cx, &[q, anc]);
        }
    }
    for q in 0..anc {
        c.g(GateKind::H, &[q]);
    }
    let s: String = secret.iter().map(|&b| if b { '1' } else { '0' }).collect();
    c.params.insert("secret".into(), s);
    c.readout = Some(secret.iter().copied().enumerate().collect());
    Ok(c)
}

/// Textbook QFT without the final bit reversal, applied to the basis state
/// `input` (prepared with X gates, not counted as part of the transform).
pub fn qft(n: usize, input: usize) -> Result<Circuit> {
    need_qubits(n, 1)?;
    let mut c = Circuit::new(n, "qft");
    prepare_basis(&mut c, input, &(0..n).collect::<Vec<_>>());
    for i in 0..n {
        c.g(GateKind::H, &[i]);
        for j in i + 1..n {
            c.g(GateKind::CPhase(PI / f64::from(1u32 << (j - i))), &[j, i]);
        }
    }
    c.params.insert("input".into(), input.to_string());
    Ok(c)
}

/// Register layout of [`adder`]: `[cin, b0, a0, b1, a1, ..., cout]`, bit 0
/// least significant.
pub fn adder_layout(bits: usize) -> (usize, Vec<usize>, Vec<usize>, usize) {
    let a = (0..bits).map(|i| 2 + 2 * i).collect();
    let b = (0..bits).map(|i| 1 + 2 * i).collect();
    (0, a, b, 2 * bits + 1)
}

/// Ripple-carry (majority / unmajority-and-add) adder computing
/// `b <- a + b` with the carry-out in the last qubit.
pub fn adder(bits: usize, a_in: usize, b_in: usize) -> Result<Circuit> {
    if bits == 0 || a_in >> bits != 0 || b_in >> bits != 0 {
        return Err(MnqcError::Domain(format!(
            "adder operands {a_in}, {b_in} do not fit in {bits} bits"
        )));
    }
    let (cin, a, b, cout) = adder_layout(bits);
    let mut c = Circuit::new(2 * bits + 2, "adder");
    prepare_basis(&mut c, a_in, &a.iter().rev().copied().collect::<Vec<_>>());
    prepare_basis(&mut c, b_in, &b.iter().rev().copied().collect::<Vec<_>>());
    let maj = |c: &mut Circuit, x: usize, y: usize, z: usize| {
        c.g(GateKind::Cx, &[z, y]);
        c.g(GateKind::Cx, &[z, x]);
        c.g(GateKind::Ccx, &[x, y, z]);
    };
    let uma = |c: &mut Circuit, x: usize, y: usize, z: usize| {
        c.g(GateKind::Ccx, &[x, y, z]);
        c.g(GateKind::Cx, &[z, x]);
        c.g(GateKind::Cx, &[x, y]);
    };
    let carry_in = |i: usize| if i == 0 { cin } else { a[i - 1] };
    for i in 0..bits {
        maj(&mut c, carry_in(i), b[i], a[i]);
    }
    c.g(GateKind::Cx, &[a[bits - 1], cout]);
    for i in (0..bits).rev() {
        uma(&mut c, carry_in(i), b[i], a[i]);
    }
    c.params.insert("a".into(), a_in.to_string());
    c.params.insert("b".into(), b_in.to_string());
    Ok(c)
}

/// Haar-random 4x4 unitary (QR of a complex Ginibre matrix with the phase
/// of `R`'s diagonal folded back into `Q`).
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let phase = r[(j, j)] / r[(j, j)].norm();
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Square model circuit: `m` layers of a random pairing followed by
/// Haar-random two-qubit blocks.
pub fn qv_model_circuit(m: usize, rng: &mut ChaCha8Rng) -> Result<Circuit> {
    need_qubits(m, 2)?;
    let mut c = Circuit::new(m, "qv");
    for _ in 0..m {
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        for pair in perm.chunks_exact(2) {
            c.g(GateKind::Su4(Arc::new(haar_unitary(4, rng))), pair);
        }
    }
    c.params.insert("width".into(), m.to_string());
    Ok(c)
}

/// Builds a logical benchmark on `n` qubits. BV uses the all-ones secret,
/// QFT acts on the alternating input `1010...`, the adder computes
/// `11 + 6` style inputs sized to the register, and QV draws one model
/// circuit from `rng`.
pub fn build_benchmark(name: &str, n: usize, rng: &mut ChaCha8Rng) -> Result<Circuit> {
    match name {
        "ghz" => ghz(n),
        "bv" => bernstein_vazirani(&vec![true; n.saturating_sub(1)]),
        "qft" => {
            let alternating = (0..n).filter(|i| i % 2 == 0).map(|i| 1 << (n - 1 - i)).sum();
            qft(n, alternating)
        }
        "adder" => {
            if n < 4 || n % 2 != 0 {
                return Err(MnqcError::Domain(format!(
                    "adder needs an even register of at least 4 qubits, got {n}"
                )));
            }
            let bits = (n - 2) / 2;
            let mask = (1 << bits) - 1;
            adder(bits, 0b1011 & mask, 0b0110 & mask)
        }
        "qv" => qv_model_circuit(n, rng),
        other => Err(MnqcError::UnknownBenchmark {
            name: other.to_string(),
            valid: BENCHMARK_NAMES.join(", "),
        }),
    }
}

fn need_qubits(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(MnqcError::Domain(format!("need at least {min} qubits, got {n}")));
    }
    Ok(())
}

/// X gates writing `value` into `qubits` (first listed = most significant).
fn prepare_basis(c: &mut Circuit, value: usize, qubits: &[usize]) {
    let n = qubits.len();
    for (i, &q) in qubits.iter().enumerate() {
        if value >> (n - 1 - i) & 1 == 1 {
            c.g(GateKind::X, &[q]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn gate_counts() {
        let g = ghz(10).unwrap();
        assert_eq!(g.count(|g| g.kind == GateKind::H), 1);
        assert_eq!(g.count(|g| g.kind == GateKind::Cx), 9);
        let q = qft(10, 0).unwrap();
        assert_eq!(q.count(|g| g.kind == GateKind::H), 10);
        assert_eq!(q.count(|g| matches!(g.kind, GateKind::CPhase(_))), 45);
    }

    #[test]
    fn haar_blocks_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = haar_unitary(4, &mut rng);
        assert!(crate::densmat::unitarity_error(&u) < 1e-12);
    }

    #[test]
    fn unknown_name() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            build_benchmark("grover", 10, &mut rng),
            Err(MnqcError::UnknownBenchmark { .. })
        ));
    }
}
