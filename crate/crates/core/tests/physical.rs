mod common;

use common::max_abs_diff;
use mnqc::densmat::{
    beamsplitter_unitary, bell_fidelity, thermal_state, BellState, DensityMatrix, HilbertLayout,
};
use mnqc::physical::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn opts() -> SimulationOptions {
    SimulationOptions::default()
}

fn no1() -> M2OConverterPreset {
    M2OConverterPreset::by_name("no1").unwrap()
}

fn node(pe: f64) -> DensityMatrix {
    let z = Complex64::new(0.0, 0.0);
    let psi = [
        Complex64::new((1.0 - pe).sqrt(), 0.0),
        z,
        z,
        Complex64::new(pe.sqrt(), 0.0),
    ];
    DensityMatrix::from_pure(HilbertLayout::new(vec![2, 2]).unwrap(), &psi).unwrap()
}

#[test]
fn microwave_extraction_efficiency_of_no1() {
    let d = derive_converter_params(&no1(), 1e-4).unwrap();
    assert!((d.t_e - 1.4e6 / (1.4e6 + 2.6e5)).abs() < 1e-15);
    assert!((d.t_e - 0.8434).abs() < 1e-4);
    let b = 2.0 * std::f64::consts::PI * (1.4e6 + 2.6e5);
    assert!((d.t_tot - (50e-9 + 2.0 / b)).abs() < 1e-18);
}

#[test]
fn unit_cooperativity_power_matches_bisection() {
    for preset in M2OConverterPreset::all() {
        let c = |p: f64| derive_converter_params(&preset, p).unwrap().cooperativity;
        let (mut lo, mut hi) = (0.0, 10.0);
        assert!(c(hi) > 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if c(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let closed = preset.unit_cooperativity_power();
        assert!((closed - lo).abs() / closed < 1e-10, "{}", preset.name);
    }
}

#[test]
fn intracavity_efficiency_peaks_at_unit_cooperativity() {
    let p = no1();
    let p1 = p.unit_cooperativity_power();
    for f in [0.2, 0.5, 0.9, 1.1, 2.0, 5.0] {
        let d = derive_converter_params(&p, p1 * f).unwrap();
        assert!(d.t_in < 1.0);
    }
}

#[test]
fn lossless_interference_follows_branch_algebra() {
    // one-photon branches carry 2 Pe (1-Pe), half of which clicks A alone;
    // the two-photon branch bunches and never gives a (1,0) pattern
    let model = LinkModel::lossless(1e-6);
    for pe in [0.05, 0.1, 0.25, 0.4, 0.5] {
        let (state, p, f, _) = simulate_link(&model, pe, &opts()).unwrap();
        assert!((p - pe * (1.0 - pe)).abs() < 1e-12);
        assert!((f - 1.0).abs() < 1e-12);
        let rho = state.unwrap();
        assert!((bell_fidelity(&rho, BellState::PsiPlus).unwrap() - f).abs() < 1e-15);
    }
}

#[test]
fn no_photon_no_herald() {
    let (state, p, _, _) = simulate_link(&LinkModel::lossless(1e-6), 0.0, &opts()).unwrap();
    assert_eq!(p, 0.0);
    assert!(state.is_none());
}

#[test]
fn thermal_attenuator_matches_dense_beamsplitter() {
    let (t, n_th, d) = (0.7, 0.15, 22);
    let rho = node(0.3);
    let got = thermal_attenuator(&rho, t, n_th, 6, 1e-15).unwrap();

    // dense oracle: embed the mode in d levels, attach a truncated bath,
    // mix on the beamsplitter, trace the bath out
    let mut big = nalgebra::DMatrix::<Complex64>::zeros(2 * d, 2 * d);
    for q in 0..2 {
        for n in 0..2 {
            for q2 in 0..2 {
                for n2 in 0..2 {
                    big[(q * d + n, q2 * d + n2)] = rho.element(q * 2 + n, q2 * 2 + n2);
                }
            }
        }
    }
    let sig = DensityMatrix::new(
        HilbertLayout::new(vec![2, d]).unwrap(),
        big,
        mnqc::densmat::TraceFlag::Normalized,
    )
    .unwrap();
    let full = sig.tensor(&thermal_state(n_th, d).unwrap());
    let mixed = full
        .apply_unitary(&beamsplitter_unitary(t, d).unwrap(), &[1, 2])
        .unwrap()
        .partial_trace(&[0, 1])
        .unwrap();
    for q in 0..2 {
        for m in 0..6 {
            for q2 in 0..2 {
                for m2 in 0..6 {
                    let a = got.element(q * 6 + m, q2 * 6 + m2);
                    let b = mixed.element(q * d + m, q2 * d + m2);
                    assert!((a - b).norm() < 1e-10, "({q},{m}),({q2},{m2}): {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn pure_losses_compose_and_match_zero_temperature_bath() {
    let rho = thermal_attenuator(&node(0.4), 0.8, 0.5, 12, 1e-15).unwrap();
    let seq = pure_loss(&pure_loss(&rho, 0.6, 12).unwrap(), 0.7, 12).unwrap();
    let once = pure_loss(&rho, 0.42, 12).unwrap();
    assert!(max_abs_diff(seq.data(), once.data()) < 1e-13);
    let via_bath = thermal_attenuator(&rho, 0.42, 0.0, 12, 1e-15).unwrap();
    assert!(max_abs_diff(via_bath.data(), once.data()) < 1e-12);
}

#[test]
fn no1_unit_cooperativity_headline() {
    let p = no1();
    let r = simulate_heralded_cycle(&p, p.unit_cooperativity_power(), 0.5, &opts()).unwrap();
    assert!((0.3e6..=3e6).contains(&r.rate), "rate {}", r.rate);
    assert!((0.1..=0.3).contains(&r.infidelity), "infidelity {}", r.infidelity);
    assert_eq!(r.rate, r.herald_prob / r.cycle_time);
    let rho = r.conditional_state.as_ref().unwrap();
    assert!((rho.trace() - 1.0).abs() < 1e-12);
    assert!((bell_fidelity(rho, BellState::PsiPlus).unwrap() - r.fidelity).abs() < 1e-12);
}

#[test]
fn accepted_cutoff_is_stable_under_doubling() {
    for preset in M2OConverterPreset::all() {
        let pw = preset.unit_cooperativity_power();
        let r = simulate_heralded_cycle(&preset, pw, 0.5, &opts()).unwrap();
        let wide = SimulationOptions {
            d_f_start: 2 * r.d_f,
            ..opts()
        };
        let r2 = simulate_heralded_cycle(&preset, pw, 0.5, &wide).unwrap();
        assert!((r.herald_prob - r2.herald_prob).abs() < 1e-4, "{}", preset.name);
        assert!((r.fidelity - r2.fidelity).abs() < 1e-4, "{}", preset.name);
    }
}

#[test]
fn no1_infidelity_is_lowest_near_unit_cooperativity() {
    let p = no1();
    let p1 = p.unit_cooperativity_power();
    let grid: Vec<f64> = (-10..=10).map(|i| p1 * 10f64.powf(i as f64 / 10.0)).collect();
    let rows = sweep_pump_power(&p, &grid, 0.5, &opts()).unwrap();
    let best = rows
        .iter()
        .min_by(|a, b| a.infidelity.total_cmp(&b.infidelity))
        .unwrap();
    let ratio = best.pump_power / p1;
    assert!((0.5..=2.0).contains(&ratio), "minimum at {ratio} x P(C=1)");
    let fastest = rows.iter().max_by(|a, b| a.rate.total_cmp(&b.rate)).unwrap();
    assert!((0.5..=2.0).contains(&(fastest.pump_power / p1)));
}

#[test]
fn present_day_no2_and_no3_stay_above_half_infidelity() {
    for name in ["no2", "no3"] {
        let p = M2OConverterPreset::by_name(name).unwrap();
        let r = simulate_heralded_cycle(&p, p.unit_cooperativity_power(), 0.5, &opts()).unwrap();
        assert!(r.infidelity > 0.5, "{name}: {}", r.infidelity);
    }
}

#[test]
fn future_preset_reaches_megahertz_at_low_infidelity() {
    let p = M2OConverterPreset::by_name("future").unwrap();
    let p1 = p.unit_cooperativity_power();
    let grid: Vec<f64> = [0.5, 0.8, 1.0, 1.25, 2.0].iter().map(|f| f * p1).collect();
    let rows = sweep_pump_power(&p, &grid, 0.5, &opts()).unwrap();
    assert!(rows.iter().any(|r| r.rate >= 1e6 && r.infidelity <= 0.1));
}

#[test]
fn excitation_sweep_has_false_heralds_and_tradeoff_regime() {
    let p = no1();
    let pes: Vec<f64> = (0..=20).map(|i| i as f64 * 0.025).collect();
    let rows = sweep_excitation_probability(&p, &pes, &opts()).unwrap();
    // false heralds from thermal photons and dark counts
    assert!(rows[0].rate > 0.0 && rows[0].herald_prob > 0.0);
    // longest run of consecutive points where both rate and infidelity rise
    let mut best = 0;
    let mut run = 0;
    for w in rows.windows(2) {
        if w[1].rate > w[0].rate && w[1].infidelity > w[0].infidelity {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    assert!(best >= 3, "tradeoff run of {best} steps");

    let direct = simulate_heralded_cycle(&p, p.unit_cooperativity_power(), 0.5, &opts()).unwrap();
    let last = rows.last().unwrap();
    assert_eq!(last.herald_prob, direct.herald_prob);
    assert_eq!(last.fidelity, direct.fidelity);
    assert_eq!(last.rate, direct.rate);
}

#[test]
fn sweeps_require_sorted_grids() {
    assert!(sweep_pump_power(&no1(), &[2e-4, 1e-4], 0.5, &opts()).is_err());
    assert!(sweep_excitation_probability(&no1(), &[0.3, 0.1], &opts()).is_err());
    assert!(sweep_excitation_probability(&no1(), &[0.1, 0.6], &opts()).is_err());
}

#[test]
fn optical_transmission_never_lowers_herald_probability() {
    for &n_add in &[0.0, 0.05, 0.5] {
        for &pe in &[0.1, 0.3, 0.5] {
            let mut prev = -1.0;
            for i in 0..=10 {
                let model = LinkModel {
                    t_e: 0.85,
                    t_in: 0.9,
                    t_o: i as f64 / 10.0,
                    n_add,
                    dark_prob: 1e-5,
                    cycle_time: 1e-6,
                };
                let (_, p, _, _) = simulate_link(&model, pe, &opts()).unwrap();
                assert!(p >= prev - 1e-12, "n_add={n_add} pe={pe} T_o={}", model.t_o);
                prev = p;
            }
        }
    }
}

#[test]
fn csv_rows_carry_sweep_fields() {
    let p = no1();
    let r = simulate_heralded_cycle(&p, 1e-4, 0.5, &opts()).unwrap();
    let row = M2OSweepRow::from(&r);
    assert_eq!(row.preset, "no1");
    assert_eq!(row.p_watts, 1e-4);
    assert_eq!(row.infidelity, r.infidelity);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn herald_results_are_physical(
        t_e in 0.3f64..1.0, t_in in 0.3f64..1.0, t_o in 0.3f64..1.0,
        n_add in 0.0f64..0.3, pe in 0.01f64..0.5,
    ) {
        let model = LinkModel { t_e, t_in, t_o, n_add, dark_prob: 1e-4, cycle_time: 1e-6 };
        let (state, p, f, _) = simulate_link(&model, pe, &opts()).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((0.0..=1.0).contains(&f));
        let rho = state.unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-10);
    }
}
