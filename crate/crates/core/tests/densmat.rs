mod common;

use common::*;
use mnqc::densmat::{
    self, bell_fidelity, beamsplitter_unitary, choi_state, depolarizing_channel, gates,
    process_fidelity, relaxation_dephasing_channel, werner_state, BellState, DensityMatrix,
    HilbertLayout, QuantumChannel, TraceFlag,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn kron_oracle(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = DMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

#[test]
fn tensor_basis_case() {
    let zero = DensityMatrix::basis(HilbertLayout::qubits(1), 0).unwrap();
    let one = DensityMatrix::basis(HilbertLayout::qubits(1), 1).unwrap();
    let t = densmat::tensor_product(&zero, &one);
    assert_eq!(t.dim(), 4);
    for r in 0..4 {
        for c in 0..4 {
            let expect = if r == 1 && c == 1 { 1.0 } else { 0.0 };
            assert_eq!(t.element(r, c), Complex64::new(expect, 0.0));
        }
    }
}

#[test]
fn tensor_with_scalar_identity() {
    let mut r = rng(1);
    let rho = random_state(&mut r, HilbertLayout::qubits(2));
    let scalar = DensityMatrix::from_parts(
        HilbertLayout::new(vec![1]).unwrap(),
        DMatrix::identity(1, 1),
        TraceFlag::Normalized,
    )
    .unwrap();
    let t = densmat::tensor_product(&rho, &scalar);
    assert!(max_abs_diff(t.data(), rho.data()) == 0.0);
}

#[test]
fn tensor_matches_index_loop_kronecker() {
    let mut r = rng(2);
    let a = random_state(&mut r, HilbertLayout::new(vec![2]).unwrap());
    let b = random_state(&mut r, HilbertLayout::new(vec![3]).unwrap());
    let t = densmat::tensor_product(&a, &b);
    assert!(max_abs_diff(t.data(), &kron_oracle(a.data(), b.data())) < 1e-14);
    assert_eq!(t.layout().dims(), &[2, 3]);
}

#[test]
fn partial_trace_of_product_recovers_factor() {
    let mut r = rng(3);
    let a = random_state(&mut r, HilbertLayout::new(vec![2]).unwrap());
    let b = random_state(&mut r, HilbertLayout::new(vec![3]).unwrap());
    let ab = a.tensor(&b);
    assert!(max_abs_diff(ab.partial_trace(&[0]).unwrap().data(), a.data()) < 1e-14);
    assert!(max_abs_diff(ab.partial_trace(&[1]).unwrap().data(), b.data()) < 1e-14);
}

#[test]
fn partial_trace_of_bell_state_is_maximally_mixed() {
    let rho = BellState::PsiPlus.density();
    let reduced = densmat::partial_trace(&rho, &[1]).unwrap();
    let half = DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
    assert!(max_abs_diff(reduced.data(), &half) < 1e-15);
}

#[test]
fn partial_trace_matches_explicit_summation() {
    let mut r = rng(4);
    let rho = random_state(&mut r, HilbertLayout::qubits(3));
    // keep qubits {0, 2}: out[(a,c),(a',c')] = sum_b rho[(a,b,c),(a',b,c')]
    let reduced = rho.partial_trace(&[2, 0]).unwrap();
    for a in 0..2 {
        for c in 0..2 {
            for a2 in 0..2 {
                for c2 in 0..2 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for b in 0..2 {
                        acc += rho.element(a * 4 + b * 2 + c, a2 * 4 + b * 2 + c2);
                    }
                    let got = reduced.element(a * 2 + c, a2 * 2 + c2);
                    assert!((got - acc).norm() < 1e-13);
                }
            }
        }
    }
    assert!(rho.partial_trace(&[3]).is_err());
    assert!(rho.partial_trace(&[]).is_err());
}

#[test]
fn unitary_identity_and_x_flip() {
    let mut r = rng(5);
    let rho = random_state(&mut r, HilbertLayout::qubits(2));
    let same = densmat::apply_unitary(&rho, &gates::identity(2), &[1]).unwrap();
    assert!(max_abs_diff(same.data(), rho.data()) < 1e-15);

    let zero = DensityMatrix::basis(HilbertLayout::qubits(1), 0).unwrap();
    let flipped = zero.apply_unitary(&gates::x(), &[0]).unwrap();
    assert!((flipped.element(1, 1).re - 1.0).abs() < 1e-15);
}

#[test]
fn rejects_non_unitary() {
    let rho = DensityMatrix::maximally_mixed(HilbertLayout::qubits(1));
    let bad = gates::x() * Complex64::new(1.1, 0.0);
    assert!(matches!(
        rho.apply_unitary(&bad, &[0]),
        Err(mnqc::MnqcError::NotUnitary { .. })
    ));
}

#[test]
fn embedded_cx_matches_dense_conjugation_on_ten_qubits() {
    let mut r = rng(6);
    let n = 10;
    let psi = random_pure(&mut r, 1 << n);
    let rho = DensityMatrix::from_pure(HilbertLayout::qubits(n), &psi).unwrap();
    let got = rho.apply_unitary(&gates::cx(), &[3, 7]).unwrap();
    let full = embed_dense(&gates::cx(), &[3, 7], n);
    let expect = &full * rho.data() * full.adjoint();
    assert!(max_abs_diff(got.data(), &expect) < 1e-12);
}

#[test]
fn channel_identity_and_projector() {
    let mut r = rng(7);
    let rho = random_state(&mut r, HilbertLayout::qubits(1));
    let id = QuantumChannel::identity(HilbertLayout::qubits(1));
    assert!(max_abs_diff(rho.apply_channel(&id, &[0]).unwrap().data(), rho.data()) < 1e-15);

    let plus = DensityMatrix::from_pure(
        HilbertLayout::qubits(1),
        &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
    )
    .unwrap();
    let mut p0 = DMatrix::zeros(2, 2);
    p0[(0, 0)] = Complex64::new(1.0, 0.0);
    let proj = QuantumChannel::new(HilbertLayout::qubits(1), vec![p0]).unwrap();
    let out = plus.apply_channel(&proj, &[0]).unwrap();
    assert!((out.trace() - 0.5).abs() < 1e-15);
    assert_eq!(out.trace_flag(), TraceFlag::Subnormalized);
}

#[test]
fn channel_matches_kraus_sum_oracle() {
    let mut r = rng(8);
    let n = 4;
    let rho = random_state(&mut r, HilbertLayout::qubits(n));
    let ch = random_channel(&mut r, HilbertLayout::qubits(2), 3);
    let targets = [2, 0];
    let got = rho.apply_channel(&ch, &targets).unwrap();
    let mut expect = DMatrix::zeros(16, 16);
    for k in ch.kraus() {
        let full = embed_dense(k, &targets, n);
        expect += &full * rho.data() * full.adjoint();
    }
    assert!(max_abs_diff(got.data(), &expect) < 1e-13);
}

#[test]
fn channel_dimension_mismatch() {
    let rho = DensityMatrix::maximally_mixed(HilbertLayout::qubits(2));
    let ch = depolarizing_channel(0.1, 2).unwrap();
    assert!(rho.apply_channel(&ch, &[0]).is_err());
}

#[test]
fn depolarizing_limits() {
    let mut r = rng(9);
    let rho = random_state(&mut r, HilbertLayout::qubits(1));
    let id = depolarizing_channel(0.0, 1).unwrap();
    assert!(max_abs_diff(rho.apply_channel(&id, &[0]).unwrap().data(), rho.data()) < 1e-15);

    let zero = DensityMatrix::basis(HilbertLayout::qubits(1), 0).unwrap();
    let full = depolarizing_channel(1.0, 1).unwrap();
    let mixed = zero.apply_channel(&full, &[0]).unwrap();
    let half = DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
    assert!(max_abs_diff(mixed.data(), &half) < 1e-15);
}

#[test]
fn depolarizing_average_fidelity_against_state_sampling() {
    let p = 0.0004;
    let d = 4.0;
    let ch = depolarizing_channel(p, 2).unwrap();
    let analytic = 1.0 - p * (d * d - 1.0) / (d * d) * (d / (d + 1.0));
    let mut r = rng(10);
    let samples = 2000;
    let mut acc = 0.0;
    for _ in 0..samples {
        let psi = random_pure(&mut r, 4);
        let rho = DensityMatrix::from_pure(HilbertLayout::qubits(2), &psi).unwrap();
        let out = rho.apply_channel(&ch, &[0, 1]).unwrap();
        acc += (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (psi[i].conj() * out.element(i, j) * psi[j]).re)
            .sum::<f64>();
    }
    let sampled = acc / samples as f64;
    assert!((sampled - analytic).abs() < 1e-9, "{sampled} vs {analytic}");
    // average gate fidelity relation to process fidelity
    let fpro = process_fidelity(&ch, &gates::identity(4)).unwrap();
    assert!(((d * fpro + 1.0) / (d + 1.0) - analytic).abs() < 1e-12);
}

#[test]
fn fast_depolarizing_path_matches_kraus_channel() {
    let mut r = rng(11);
    let rho = random_state(&mut r, HilbertLayout::qubits(3));
    let ch = depolarizing_channel(0.3, 2).unwrap();
    let slow = rho.apply_channel(&ch, &[2, 0]).unwrap();
    let fast = rho.depolarize(0.3, &[2, 0]).unwrap();
    assert!(max_abs_diff(slow.data(), fast.data()) < 1e-14);
}

#[test]
fn relaxation_identity_populations_and_coherence() {
    let (t1, t2) = (1e-3, 1e-3);
    let id = relaxation_dephasing_channel(0.0, t1, t2).unwrap();
    assert!(id.is_trace_preserving(1e-12));
    let mut r = rng(12);
    let rho = random_state(&mut r, HilbertLayout::qubits(1));
    assert!(max_abs_diff(rho.apply_channel(&id, &[0]).unwrap().data(), rho.data()) < 1e-15);

    let t = 3e-4;
    let ch = relaxation_dephasing_channel(t, t1, t2).unwrap();
    let excited = DensityMatrix::basis(HilbertLayout::qubits(1), 1).unwrap();
    let out = excited.apply_channel(&ch, &[0]).unwrap();
    assert!((out.element(1, 1).re - (-t / t1).exp()).abs() < 1e-14);

    let plus = DensityMatrix::from_pure(
        HilbertLayout::qubits(1),
        &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
    )
    .unwrap();
    let out = plus.apply_channel(&ch, &[0]).unwrap();
    assert!((2.0 * out.element(0, 1).norm() - (-t / t2).exp()).abs() < 1e-14);
    assert_eq!(ch.kraus().len(), 3);
}

#[test]
fn relaxation_semigroup() {
    let (t1, t2) = (1e-3, 0.6e-3);
    let a = relaxation_dephasing_channel(2e-4, t1, t2).unwrap();
    let b = relaxation_dephasing_channel(5e-4, t1, t2).unwrap();
    let ab = relaxation_dephasing_channel(7e-4, t1, t2).unwrap();
    let mut r = rng(13);
    for _ in 0..20 {
        let rho = random_state(&mut r, HilbertLayout::qubits(1));
        let seq = rho.apply_channel(&a, &[0]).unwrap().apply_channel(&b, &[0]).unwrap();
        let once = rho.apply_channel(&ab, &[0]).unwrap();
        assert!(max_abs_diff(seq.data(), once.data()) < 1e-10);
    }
}

#[test]
fn bell_fidelity_cases() {
    let psi = BellState::PsiPlus.density();
    assert!((bell_fidelity(&psi, BellState::PsiPlus).unwrap() - 1.0).abs() < 1e-15);
    let mixed = DensityMatrix::maximally_mixed(HilbertLayout::qubits(2));
    for b in BellState::ALL {
        assert!((bell_fidelity(&mixed, b).unwrap() - 0.25).abs() < 1e-15);
    }
    // Werner construction oracle: F |B><B| + (1-F)/3 (I - |B><B|)
    let w = werner_state(0.8, BellState::PsiMinus).unwrap();
    let v = BellState::PsiMinus.vector();
    let proj = &v * v.adjoint();
    let id = DMatrix::<Complex64>::identity(4, 4);
    let oracle = &proj * Complex64::new(0.8, 0.0) + (id - &proj) * Complex64::new(0.2 / 3.0, 0.0);
    assert!(max_abs_diff(w.data(), &oracle) < 1e-15);
    assert!((bell_fidelity(&w, BellState::PsiMinus).unwrap() - 0.8).abs() < 1e-14);
    let single = DensityMatrix::maximally_mixed(HilbertLayout::qubits(1));
    assert!(bell_fidelity(&single, BellState::PhiPlus).is_err());
}

#[test]
fn process_fidelity_cases() {
    let cx = QuantumChannel::unitary(HilbertLayout::qubits(2), gates::cx()).unwrap();
    assert!((process_fidelity(&cx, &gates::cx()).unwrap() - 1.0).abs() < 1e-14);

    let p = 0.07;
    let noisy = cx.then(&depolarizing_channel(p, 2).unwrap()).unwrap();
    let expect = 1.0 - p * 15.0 / 16.0;
    assert!((process_fidelity(&noisy, &gates::cx()).unwrap() - expect).abs() < 1e-12);

    // Choi-state route: <Phi_U| J |Phi_U>
    let choi = choi_state(&noisy);
    let mut phi_u = DMatrix::<Complex64>::zeros(16, 1);
    for j in 0..4 {
        for i in 0..4 {
            phi_u[(i * 4 + j, 0)] = gates::cx()[(i, j)] * Complex64::new(0.5, 0.0);
        }
    }
    let via_choi = (phi_u.adjoint() * choi.data() * &phi_u)[(0, 0)].re;
    assert!((via_choi - expect).abs() < 1e-12);
    assert!(process_fidelity(&noisy, &gates::x()).is_err());
}

#[test]
fn choi_round_trip_recovers_channel() {
    let mut r = rng(14);
    let ch = random_channel(&mut r, HilbertLayout::qubits(1), 2);
    let back = densmat::channel_from_choi(&choi_state(&ch), HilbertLayout::qubits(1)).unwrap();
    let rho = random_state(&mut r, HilbertLayout::qubits(1));
    let a = rho.apply_channel(&ch, &[0]).unwrap();
    let b = rho.apply_channel(&back, &[0]).unwrap();
    assert!(max_abs_diff(a.data(), b.data()) < 1e-12);
}

#[test]
fn beamsplitter_photon_number_blocks() {
    let d = 6;
    let u = beamsplitter_unitary(0.37, d).unwrap();
    for r in 0..d * d {
        for c in 0..d * d {
            if r / d + r % d != c / d + c % d {
                assert!(u[(r, c)].norm() < 1e-12);
            }
        }
    }
}

#[test]
fn thousand_random_channel_applications_stay_physical() {
    let mut r = rng(15);
    for i in 0..1000 {
        let n_kraus = 1 + i % 4;
        let rho = random_state(&mut r, HilbertLayout::qubits(2));
        let ch = random_channel(&mut r, HilbertLayout::qubits(1), n_kraus);
        let out = rho.apply_channel(&ch, &[i % 2]).unwrap();
        assert!(out.hermiticity_error() < 1e-12);
        assert!(out.min_eigenvalue() > -1e-9);
        assert!((out.trace() - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heralding_projections_never_increase_trace(seed in 0u64..10_000, idx in 0usize..4) {
        let mut r = rng(seed);
        let rho = random_state(&mut r, HilbertLayout::qubits(3));
        let projected = rho.project(&[2, 0], idx).unwrap();
        prop_assert!(projected.trace() <= rho.trace() + 1e-12);
        prop_assert!(projected.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn product_states_factor_exactly(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let a = random_state(&mut r, HilbertLayout::new(vec![3]).unwrap());
        let b = random_state(&mut r, HilbertLayout::qubits(2));
        let ab = a.tensor(&b);
        prop_assert!(max_abs_diff(ab.partial_trace(&[0]).unwrap().data(), a.data()) < 1e-14);
        prop_assert!(max_abs_diff(ab.partial_trace(&[1, 2]).unwrap().data(), b.data()) < 1e-14);
    }

    #[test]
    fn trace_preserving_channels_conserve_trace(seed in 0u64..10_000, t in 0.0f64..5e-3) {
        let mut r = rng(seed);
        let rho = random_state(&mut r, HilbertLayout::qubits(2));
        let ch = relaxation_dephasing_channel(t, 1e-3, 1.5e-3).unwrap();
        let out = rho.apply_channel(&ch, &[1]).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-9);
        prop_assert!(out.validate(&Default::default()).is_ok());
    }
}
