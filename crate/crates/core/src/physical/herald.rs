use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_converter_params, DerivedConverterParams, M2OConverterPreset};
use crate::densmat::bosonic::ln_factorial;
use crate::densmat::{
    beamsplitter_amplitude, beamsplitter_unitary, bell_fidelity, thermal_levels_for_tail,
    BellState, DensityMatrix, HilbertLayout, TraceFlag, Tolerances,
};
use crate::error::{check_range, MnqcError, Result};

/// How a dark count on detector A contributes to the heralded state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DarkCountRule {
    /// With probability `rate * t2` a dark click heralds the no-photon branch.
    #[default]
    VacuumBranch,
    Ignore,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationOptions {
    /// First Fock cutoff tried for the converted mode.
    pub d_f_start: usize,
    /// Largest cutoff tried before giving up.
    pub d_f_max: usize,
    /// Accepted shift of herald probability and fidelity under doubling.
    pub tolerance: f64,
    /// Untruncated thermal-bath mass allowed to be dropped.
    pub thermal_tail: f64,
    pub dark_rule: DarkCountRule,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            d_f_start: 4,
            d_f_max: 4096,
            tolerance: Tolerances::default().truncation,
            thermal_tail: 1e-12,
            dark_rule: DarkCountRule::VacuumBranch,
        }
    }
}

/// Transmissions and noise seen by one node's photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkModel {
    pub t_e: f64,
    pub t_in: f64,
    pub t_o: f64,
    /// Thermal photons injected at the microwave loss.
    pub n_add: f64,
    /// Probability of a dark click within one detection window.
    pub dark_prob: f64,
    /// Attempt duration (s).
    pub cycle_time: f64,
}

impl LinkModel {
    pub fn lossless(cycle_time: f64) -> Self {
        Self {
            t_e: 1.0,
            t_in: 1.0,
            t_o: 1.0,
            n_add: 0.0,
            dark_prob: 0.0,
            cycle_time,
        }
    }

    pub fn from_preset(preset: &M2OConverterPreset, params: &DerivedConverterParams) -> Self {
        Self {
            t_e: params.t_e,
            t_in: params.t_in,
            t_o: params.t_o,
            n_add: preset.k_add * params.pump_power,
            dark_prob: preset.dark_count_rate / params.bandwidth,
            cycle_time: params.t_tot,
        }
    }

    fn validate(&self) -> Result<()> {
        check_range("T_e", self.t_e, 0.0, 1.0, "[0, 1]")?;
        check_range("T_in", self.t_in, 0.0, 1.0, "[0, 1]")?;
        check_range("T_o", self.t_o, 0.0, 1.0, "[0, 1]")?;
        check_range("n_add", self.n_add, 0.0, f64::MAX, "[0, inf)")?;
        check_range("dark-count probability", self.dark_prob, 0.0, 1.0, "[0, 1]")?;
        if !(self.cycle_time > 0.0) {
            return Err(MnqcError::Domain(format!(
                "cycle time must be > 0, got {}",
                self.cycle_time
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HeraldedEPResult {
    pub preset: String,
    pub pump_power: f64,
    pub pe: f64,
    pub cooperativity: f64,
    pub herald_prob: f64,
    /// Heralding rate (Hz).
    pub rate: f64,
    /// Normalized conditional qubit pair; `None` when nothing can herald.
    pub conditional_state: Option<DensityMatrix>,
    /// Fidelity to `Psi+`; zero when there is no conditional state.
    pub fidelity: f64,
    pub infidelity: f64,
    pub cycle_time: f64,
    /// Accepted Fock cutoff.
    pub d_f: usize,
}

/// CSV row for pump-power and excitation sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct M2OSweepRow {
    pub preset: String,
    #[serde(rename = "P_watts")]
    pub p_watts: f64,
    #[serde(rename = "Pe")]
    pub pe: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub herald_prob: f64,
    pub rate_hz: f64,
    pub fidelity: f64,
    pub infidelity: f64,
}

impl From<&HeraldedEPResult> for M2OSweepRow {
    fn from(r: &HeraldedEPResult) -> Self {
        Self {
            preset: r.preset.clone(),
            p_watts: r.pump_power,
            pe: r.pe,
            c: r.cooperativity,
            herald_prob: r.herald_prob,
            rate_hz: r.rate,
            fidelity: r.fidelity,
            infidelity: r.infidelity,
        }
    }
}

fn node_layout(d: usize) -> HilbertLayout {
    HilbertLayout::new(vec![2, d]).expect("positive dims")
}

fn check_node(rho: &DensityMatrix) -> Result<(usize, usize)> {
    match rho.layout().dims() {
        &[s, d] => Ok((s, d)),
        _ => Err(MnqcError::InvalidState(format!(
            "expected (spectator, mode) layout, got {:?}",
            rho.layout().dims()
        ))),
    }
}

/// Beamsplitter of transmission `t` against a thermal bath with mean `n_th`,
/// tracing out the bath port. `rho` lives on (spectator, mode); the output
/// mode keeps `d_out` levels. The bath is summed until its dropped mass is
/// below `tail`.
pub fn thermal_attenuator(
    rho: &DensityMatrix,
    t: f64,
    n_th: f64,
    d_out: usize,
    tail: f64,
) -> Result<DensityMatrix> {
    check_range("transmission", t, 0.0, 1.0, "[0, 1]")?;
    check_range("thermal occupation", n_th, 0.0, f64::MAX, "[0, inf)")?;
    let (s, d_in) = check_node(rho)?;
    let levels = thermal_levels_for_tail(n_th, tail);
    let ratio = n_th / (1.0 + n_th);
    let data = rho.data();

    // amp[n][m] = <m, n + k - m| U |n, k> for the current bath level k
    let mut out = DMatrix::<Complex64>::zeros(s * d_out, s * d_out);
    let mut amp = vec![vec![0.0; d_out]; d_in];
    let mut weight = 1.0 / (1.0 + n_th);
    for k in 0..levels {
        for (n, row) in amp.iter_mut().enumerate() {
            for (m, a) in row.iter_mut().enumerate() {
                *a = if m <= n + k {
                    beamsplitter_amplitude(t, n, k, m, n + k - m)
                } else {
                    0.0
                };
            }
        }
        for q in 0..s {
            for n in 0..d_in {
                for q2 in 0..s {
                    for n2 in 0..d_in {
                        let x = data[(q * d_in + n, q2 * d_in + n2)];
                        if x == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        let x = x * weight;
                        // bath photon count e = n + k - m is shared by both sides
                        for m in 0..d_out.min(n + k + 1) {
                            let Some(m2) = (m + n2).checked_sub(n) else {
                                continue;
                            };
                            if m2 >= d_out {
                                continue;
                            }
                            let a = amp[n][m] * amp[n2][m2];
                            if a != 0.0 {
                                out[(q * d_out + m, q2 * d_out + m2)] += x * a;
                            }
                        }
                    }
                }
            }
        }
        weight *= ratio;
    }
    DensityMatrix::from_parts(node_layout_with(s, d_out), out, TraceFlag::Subnormalized)
}

fn node_layout_with(s: usize, d: usize) -> HilbertLayout {
    HilbertLayout::new(vec![s, d]).expect("positive dims")
}

/// Zero-temperature loss of transmission `eta` on the mode of a
/// (spectator, mode) state, keeping `d_out` output levels. Consecutive pure
/// losses compose multiplicatively in `eta`.
pub fn pure_loss(rho: &DensityMatrix, eta: f64, d_out: usize) -> Result<DensityMatrix> {
    check_range("transmission", eta, 0.0, 1.0, "[0, 1]")?;
    let (s, d_in) = check_node(rho)?;
    let data = rho.data();
    let ln_eta = eta.ln();
    let ln_loss = (1.0 - eta).ln();
    // <m - l| K_l |m> = sqrt(C(m, l)) eta^((m - l)/2) (1 - eta)^(l/2)
    let kraus_elem = |m: usize, l: usize| -> f64 {
        let out = m - l;
        let mut lg = 0.5 * (ln_factorial(m) - ln_factorial(l) - ln_factorial(out));
        if out > 0 {
            lg += 0.5 * out as f64 * ln_eta;
        }
        if l > 0 {
            lg += 0.5 * l as f64 * ln_loss;
        }
        lg.exp()
    };
    let mut out = DMatrix::<Complex64>::zeros(s * d_out, s * d_out);
    for q in 0..s {
        for q2 in 0..s {
            for a in 0..d_out.min(d_in) {
                for b in 0..d_out.min(d_in) {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for l in 0..d_in - a.max(b) {
                        let x = data[(q * d_in + a + l, q2 * d_in + b + l)];
                        if x != Complex64::new(0.0, 0.0) {
                            acc += x * (kraus_elem(a + l, l) * kraus_elem(b + l, l));
                        }
                    }
                    out[(q * d_out + a, q2 * d_out + b)] = acc;
                }
            }
        }
    }
    DensityMatrix::from_parts(node_layout_with(s, d_out), out, TraceFlag::Subnormalized)
}

struct Truncated {
    herald_prob: f64,
    unnormalized: DensityMatrix,
    fidelity: f64,
}

fn herald_at_cutoff(
    model: &LinkModel,
    pe: f64,
    d_f: usize,
    opts: &SimulationOptions,
) -> Result<Truncated> {
    let amp = |x: f64| Complex64::new(x.sqrt(), 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // |g,0> = index 0, |e,1> = index 3
    let psi = [amp(1.0 - pe), zero, zero, amp(pe)];
    let node = DensityMatrix::from_pure(node_layout(2), &psi)?;
    let node = thermal_attenuator(&node, model.t_e, model.n_add, d_f, opts.thermal_tail)?;
    // Only the 0/1-photon sector can reach a (1,0) or (0,0) detector pattern:
    // the 50:50 beamsplitter conserves photon number.
    let node = pure_loss(&node, model.t_in * model.t_o, 2)?;

    // (qA, mA, qB, mB) -> (qA, qB, mA, mB)
    let joint = node.tensor(&node).permute(&[0, 2, 1, 3])?;
    let joint = joint.apply_unitary(&beamsplitter_unitary(0.5, 2)?, &[2, 3])?;
    let click_a = joint.project(&[2, 3], 2)?.partial_trace(&[0, 1])?;
    let mut heralded = click_a;
    if opts.dark_rule == DarkCountRule::VacuumBranch && model.dark_prob > 0.0 {
        let vacuum = joint.project(&[2, 3], 0)?.partial_trace(&[0, 1])?;
        heralded = heralded.add(&vacuum.scaled(model.dark_prob))?;
    }
    let herald_prob = heralded.trace().clamp(0.0, 1.0);
    let fidelity = if herald_prob > 0.0 {
        bell_fidelity(&heralded.normalized()?, BellState::PsiPlus)?
    } else {
        0.0
    };
    Ok(Truncated {
        herald_prob,
        unnormalized: heralded,
        fidelity,
    })
}

/// One heralding attempt with an explicit link model; the Fock cutoff is
/// doubled until herald probability and fidelity settle.
pub fn simulate_link(
    model: &LinkModel,
    pe: f64,
    opts: &SimulationOptions,
) -> Result<(Option<DensityMatrix>, f64, f64, usize)> {
    model.validate()?;
    check_range("excitation probability", pe, 0.0, 0.5, "[0, 0.5]")?;
    let mut d_f = opts.d_f_start.max(2);
    let mut prev = herald_at_cutoff(model, pe, d_f, opts)?;
    loop {
        let next_d = d_f * 2;
        let next = herald_at_cutoff(model, pe, next_d, opts)?;
        let dp = (next.herald_prob - prev.herald_prob).abs();
        let dfid = (next.fidelity - prev.fidelity).abs();
        if dp < opts.tolerance && dfid < opts.tolerance {
            let state = if next.herald_prob > 0.0 {
                Some(next.unnormalized.normalized()?)
            } else {
                None
            };
            return Ok((state, next.herald_prob, next.fidelity, next_d));
        }
        if next_d * 2 > opts.d_f_max {
            return Err(MnqcError::TruncationNotConverged {
                d_f: next_d,
                herald_shift: dp,
                fidelity_shift: dfid,
                limit: opts.tolerance,
            });
        }
        d_f = next_d;
        prev = next;
    }
}

pub fn simulate_heralded_cycle(
    preset: &M2OConverterPreset,
    pump_power: f64,
    pe: f64,
    opts: &SimulationOptions,
) -> Result<HeraldedEPResult> {
    let params = derive_converter_params(preset, pump_power)?;
    let model = LinkModel::from_preset(preset, &params);
    let (state, herald_prob, fidelity, d_f) = simulate_link(&model, pe, opts)?;
    Ok(HeraldedEPResult {
        preset: preset.name.clone(),
        pump_power,
        pe,
        cooperativity: params.cooperativity,
        herald_prob,
        rate: herald_prob / params.t_tot,
        conditional_state: state,
        fidelity,
        infidelity: 1.0 - fidelity,
        cycle_time: params.t_tot,
        d_f,
    })
}

fn check_sorted(name: &str, grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(MnqcError::Domain(format!("{name} grid must be sorted ascending")));
    }
    Ok(())
}

pub fn sweep_pump_power(
    preset: &M2OConverterPreset,
    powers: &[f64],
    pe: f64,
    opts: &SimulationOptions,
) -> Result<Vec<HeraldedEPResult>> {
    check_sorted("pump power", powers)?;
    powers
        .par_iter()
        .map(|&p| simulate_heralded_cycle(preset, p, pe, opts))
        .collect()
}

/// Excitation sweep at the unit-cooperativity pump power. The `Pe = 0`
/// point gives the false-heralding rate.
pub fn sweep_excitation_probability(
    preset: &M2OConverterPreset,
    pes: &[f64],
    opts: &SimulationOptions,
) -> Result<Vec<HeraldedEPResult>> {
    check_sorted("excitation probability", pes)?;
    let power = preset.unit_cooperativity_power();
    pes.par_iter()
        .map(|&pe| simulate_heralded_cycle(preset, power, pe, opts))
        .collect()
}
