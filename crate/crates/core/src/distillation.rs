//! Nested DEJMPS purification with gate noise, memory decoherence and timing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densmat::{
    bell_fidelity, gates, werner_state, BellState, DensityMatrix, NoiseParams,
};
use crate::error::{check_range, MnqcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistillationConfig {
    pub rounds: usize,
    /// Average time to generate one raw pair, `1/R` (s).
    pub raw_pair_time: f64,
    pub noise: NoiseParams,
    /// Suppress decoherence while pairs wait and during purification steps.
    pub ideal_memory: bool,
    pub target: BellState,
}

impl DistillationConfig {
    pub fn new(rounds: usize, raw_pair_time: f64, noise: NoiseParams) -> Self {
        Self {
            rounds,
            raw_pair_time,
            noise,
            ideal_memory: false,
            target: BellState::PsiPlus,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.raw_pair_time > 0.0 && self.raw_pair_time.is_finite()) {
            return Err(MnqcError::Domain(format!(
                "raw pair time must be > 0, got {}",
                self.raw_pair_time
            )));
        }
        self.noise.validate()
    }
}

/// State after `k` rounds, with its cumulative time and success probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistillationStep {
    pub rounds: usize,
    pub fidelity: f64,
    pub infidelity: f64,
    pub t_n_seconds: f64,
    #[serde(rename = "P_n")]
    pub p_n: f64,
}

#[derive(Debug, Clone)]
pub struct DistillationResult {
    pub state: DensityMatrix,
    pub total_time: f64,
    pub success_prob: f64,
    pub per_round_p: Vec<f64>,
    /// Entries for 0..=rounds.
    pub trajectory: Vec<DistillationStep>,
}

impl DistillationResult {
    pub fn fidelity(&self) -> f64 {
        self.trajectory.last().map_or(0.0, |s| s.fidelity)
    }
}

/// One-round fidelity map for Werner inputs.
pub fn bbpssw_update(f: f64) -> Result<f64> {
    check_range("fidelity", f, 0.0, 1.0, "[0, 1]")?;
    let g = 1.0 - f;
    let num = f * f + g * g / 9.0;
    let den = f * f + 2.0 * f * g / 3.0 + 5.0 * g * g / 9.0;
    Ok(num / den)
}

/// `prod_j p_j^(2^(j-1))`.
pub fn single_shot_success(per_round_p: &[f64]) -> Result<f64> {
    let mut total = 1.0;
    for (j, &p) in per_round_p.iter().enumerate() {
        if !(p > 0.0 && p <= 1.0) {
            return Err(MnqcError::OutOfRange {
                name: "round success probability",
                value: p,
                range: "(0, 1]",
            });
        }
        total *= p.powf(2f64.powi(j as i32));
    }
    Ok(total)
}

fn check_pair(rho: &DensityMatrix) -> Result<()> {
    if rho.layout().dims() != [2, 2] {
        return Err(MnqcError::InvalidState(format!(
            "expected a two-qubit pair, got layout {:?}",
            rho.layout().dims()
        )));
    }
    Ok(())
}

/// Maps `target` onto `Phi+` by a local Pauli on Bob's qubit (self-inverse).
fn frame_pauli(target: BellState) -> Option<nalgebra::DMatrix<num_complex::Complex64>> {
    match target {
        BellState::PhiPlus => None,
        BellState::PsiPlus => Some(gates::x()),
        BellState::PhiMinus => Some(gates::z()),
        BellState::PsiMinus => Some(gates::x() * gates::z()),
    }
}

/// One DEJMPS round. Qubit order is (A1, B1) for the kept pair and
/// (A2, B2) for the sacrificial pair. Returns the renormalized kept pair and
/// the probability of coincident outcomes on the sacrificial pair.
///
/// `t_p` decoherence on the kept pair follows the circuit unless
/// `ideal_memory` is set.
pub fn dejmps_round(
    pair1: &DensityMatrix,
    pair2: &DensityMatrix,
    noise: &NoiseParams,
    ideal_memory: bool,
    target: BellState,
) -> Result<(DensityMatrix, f64)> {
    check_pair(pair1)?;
    check_pair(pair2)?;
    noise.validate()?;
    let mut joint = pair1.tensor(pair2);
    let frame = frame_pauli(target);
    if let Some(u) = &frame {
        joint.apply_unitary_mut(u, &[1])?;
        joint.apply_unitary_mut(u, &[3])?;
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    for (q, theta) in [(0, half_pi), (2, half_pi), (1, -half_pi), (3, -half_pi)] {
        joint.apply_unitary_mut(&gates::rx(theta), &[q])?;
    }
    for (c, t) in [(0, 2), (1, 3)] {
        joint.apply_unitary_mut(&gates::cx(), &[c, t])?;
        joint.depolarize_mut(noise.depolarizing_prob, &[c, t]);
    }
    let kept = joint
        .project(&[2, 3], 0)?
        .add(&joint.project(&[2, 3], 3)?)?
        .partial_trace(&[0, 1])?;
    let p_success = kept.trace();
    if !(p_success > 0.0) {
        return Err(MnqcError::NoHeraldEvent);
    }
    let mut out = kept.normalized()?;
    if let Some(u) = &frame {
        out.apply_unitary_mut(u, &[1])?;
    }
    if !ideal_memory {
        idle(&mut out, noise, noise.purification_step_time)?;
    }
    Ok((out, p_success.min(1.0)))
}

fn idle(pair: &mut DensityMatrix, noise: &NoiseParams, t: f64) -> Result<()> {
    if noise.is_decoherence_free() || t == 0.0 {
        return Ok(());
    }
    let ch = noise.idle_channel(t)?;
    pair.apply_channel_mut(&ch, &[0])?;
    pair.apply_channel_mut(&ch, &[1])
}

/// `n` nested rounds. Round `j` purifies two copies of the round-`(j-1)`
/// state; the copy produced first idles for `2^(j-1) tau` meanwhile.
pub fn nested_distillation(
    rho_raw: &DensityMatrix,
    config: &DistillationConfig,
) -> Result<DistillationResult> {
    check_pair(rho_raw)?;
    config.validate()?;
    let tau = config.raw_pair_time;
    let t_p = config.noise.purification_step_time;
    let step = |rounds, rho: &DensityMatrix, t, p| -> Result<DistillationStep> {
        let f = bell_fidelity(rho, config.target)?;
        Ok(DistillationStep {
            rounds,
            fidelity: f,
            infidelity: 1.0 - f,
            t_n_seconds: t,
            p_n: p,
        })
    };

    let mut rho = rho_raw.clone();
    let mut t = tau;
    let mut per_round_p = Vec::with_capacity(config.rounds);
    let mut trajectory = vec![step(0, &rho, t, 1.0)?];
    for n in 1..=config.rounds {
        let wait = 2f64.powi(n as i32 - 1) * tau;
        let mut waiting = rho.clone();
        if !config.ideal_memory {
            idle(&mut waiting, &config.noise, wait)?;
        }
        let (next, p) =
            dejmps_round(&waiting, &rho, &config.noise, config.ideal_memory, config.target)?;
        rho = next;
        t = wait + t + t_p;
        per_round_p.push(p);
        let p_n = single_shot_success(&per_round_p)?;
        trajectory.push(step(n, &rho, t, p_n)?);
    }
    Ok(DistillationResult {
        state: rho,
        total_time: t,
        success_prob: single_shot_success(&per_round_p)?,
        per_round_p,
        trajectory,
    })
}

/// `t_n` in closed form: `t_0 + sum_{j=1}^{n} 2^(j-1) tau + n t_p`, `t_0 = tau`.
pub fn nested_time(rounds: usize, tau: f64, t_p: f64) -> f64 {
    tau + (2f64.powi(rounds as i32) - 1.0) * tau + rounds as f64 * t_p
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityGainRow {
    pub f0: f64,
    /// CNOT depolarizing probability; zero is the ideal reference.
    pub p_cnot: f64,
    pub delta_f: f64,
    pub p_success: f64,
}

/// One-round fidelity gain `F_new - F0` for Werner inputs. The ideal
/// reference (`p_cnot = 0`) is always included first for every `F0`.
pub fn fidelity_gain_study(
    f0_grid: &[f64],
    p_cnot: &[f64],
    noise: &NoiseParams,
    ideal_memory: bool,
) -> Result<Vec<FidelityGainRow>> {
    for &f in f0_grid {
        check_range("F0", f, 0.5, 1.0, "[0.5, 1]")?;
    }
    let mut settings = vec![0.0];
    settings.extend(p_cnot.iter().copied().filter(|&p| p != 0.0));
    let jobs: Vec<(f64, f64)> = f0_grid
        .iter()
        .flat_map(|&f| settings.iter().map(move |&p| (f, p)))
        .collect();
    jobs.par_iter()
        .map(|&(f0, p)| {
            let noise = NoiseParams {
                depolarizing_prob: p,
                ..*noise
            };
            let w = werner_state(f0, BellState::PsiPlus)?;
            let (out, ps) = dejmps_round(&w, &w, &noise, ideal_memory, BellState::PsiPlus)?;
            Ok(FidelityGainRow {
                f0,
                p_cnot: p,
                delta_f: bell_fidelity(&out, BellState::PsiPlus)? - f0,
                p_success: ps,
            })
        })
        .collect()
}
