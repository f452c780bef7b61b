use std::path::Path;

use mnqc::densmat::NoiseParams;
use mnqc::physical::M2OConverterPreset;
use mnqc::roofline::{CcrFormula, ShiftMode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Pump power: watts, or `"auto-C1"` for unit cooperativity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Pump {
    Watts(f64),
    Auto(String),
}

impl Default for Pump {
    fn default() -> Self {
        Pump::Auto(AUTO_PUMP.into())
    }
}

const AUTO_PUMP: &str = "auto-C1";

impl Pump {
    pub fn watts(&self, preset: &M2OConverterPreset) -> f64 {
        match self {
            Pump::Watts(w) => *w,
            Pump::Auto(_) => preset.unit_cooperativity_power(),
        }
    }
}

/// Log-spaced axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct M2oSection {
    /// Excitation sweep at C = 1 when `powers` is empty.
    pub pes: Vec<f64>,
    /// Pump-power sweep at the top-level `pe`.
    pub powers: Vec<f64>,
}

impl Default for M2oSection {
    fn default() -> Self {
        Self {
            pes: vec![0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5],
            powers: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapSection {
    pub benchmark: String,
    pub times: Axis,
    pub infidelities: Axis,
    pub threshold: f64,
    /// Excitation probabilities for the link frontier; empty skips it.
    pub frontier_pes: Vec<f64>,
    pub frontier_rounds: usize,
}

impl Default for GapSection {
    fn default() -> Self {
        Self {
            benchmark: "ghz".into(),
            times: Axis { lo: 1e-8, hi: 1e-4, n: 9 },
            infidelities: Axis { lo: 1e-4, hi: 0.3, n: 8 },
            threshold: mnqc::bench::SUCCESS_THRESHOLD,
            frontier_pes: vec![0.1, 0.3, 0.5],
            frontier_rounds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QvSection {
    pub trials: usize,
    pub max_width: usize,
    /// Route across the pipeline link (otherwise an isolated node pair).
    pub use_link: bool,
}

impl Default for QvSection {
    fn default() -> Self {
        Self { trials: 100, max_width: 10, use_link: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    /// Reference gate counts.
    Reference,
    /// Counts from this crate's router.
    Compiled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RooflineSection {
    pub benchmarks: Vec<String>,
    pub source: ProfileSource,
    pub formula: CcrFormula,
    pub t_local: f64,
    pub t_link: f64,
    pub shift_rounds: usize,
    pub shift: ShiftMode,
    pub ccr_axis: Axis,
}

impl Default for RooflineSection {
    fn default() -> Self {
        Self {
            benchmarks: ["ghz", "bv", "qft", "adder"].map(String::from).to_vec(),
            source: ProfileSource::Reference,
            formula: CcrFormula::default(),
            t_local: 100e-9,
            t_link: 1.041e-6,
            shift_rounds: 2,
            shift: ShiftMode::Stepwise,
            ccr_axis: Axis { lo: 0.1, hi: 100.0, n: 31 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QcpaSection {
    pub k: u64,
    pub pec_fidelities: Vec<f64>,
    pub t_ll: f64,
    pub f_ll: f64,
    pub n_q: usize,
}

impl Default for QcpaSection {
    fn default() -> Self {
        Self {
            k: mnqc::qcpa::QFT_LINK_GATES_TEXT,
            pec_fidelities: vec![0.9, 0.975],
            t_ll: 1.041e-6,
            f_ll: 0.9,
            n_q: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DqpeSection {
    pub phase: f64,
    pub ancillas: Vec<usize>,
    pub epsilon: f64,
    pub delta: f64,
    pub eps_theta: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub e_gap: f64,
    pub polylog_power: f64,
    /// Channel uses `m` for the per-use error budget.
    pub channel_uses: f64,
    /// Noisy ten-qubit sweep; slow, so off by default.
    pub curve: bool,
    pub curve_t1: Vec<f64>,
    pub curve_link_times: Vec<f64>,
}

impl Default for DqpeSection {
    fn default() -> Self {
        Self {
            phase: mnqc::dqpe::BENCH_PHASE,
            ancillas: vec![4, 9],
            epsilon: 1e-2,
            delta: 0.1,
            eps_theta: 1e-3,
            gamma: 1.0,
            alpha: 1.0,
            e_gap: 1.0,
            polylog_power: 2.0,
            channel_uses: 10.0,
            curve: false,
            curve_t1: vec![1e-4, 1e-3],
            curve_link_times: vec![1e-7, 1e-6, 1e-5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Roofline,
    Qcpa,
    Gap,
    Qv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub preset: String,
    pub pump: Pump,
    pub pe: f64,
    pub rounds: usize,
    pub seed: u64,
    /// Analysis run after the link layers by `pipeline`.
    pub analysis: Analysis,
    pub noise: NoiseParams,
    pub m2o: M2oSection,
    pub gap: GapSection,
    pub qv: QvSection,
    pub roofline: RooflineSection,
    pub qcpa: QcpaSection,
    pub dqpe: DqpeSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: "no1".into(),
            pump: Pump::default(),
            pe: 0.5,
            rounds: 0,
            seed: 0,
            analysis: Analysis::Roofline,
            noise: NoiseParams::default(),
            m2o: M2oSection::default(),
            gap: GapSection::default(),
            qv: QvSection::default(),
            roofline: RooflineSection::default(),
            qcpa: QcpaSection::default(),
            dqpe: DqpeSection::default(),
        }
    }
}

impl RunConfig {
    pub fn preset(&self) -> Result<M2OConverterPreset, CliError> {
        M2OConverterPreset::by_name(&self.preset).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.preset()?;
        if let Pump::Auto(s) = &self.pump {
            if s != AUTO_PUMP {
                return Err(CliError::Config(format!(
                    "pump must be a power in watts or \"{AUTO_PUMP}\", got \"{s}\""
                )));
            }
        }
        self.noise
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let axes = [
            ("gap.times", self.gap.times),
            ("gap.infidelities", self.gap.infidelities),
            ("roofline.ccr_axis", self.roofline.ccr_axis),
        ];
        for (name, a) in axes {
            if a.n == 0 || !(a.lo > 0.0 && a.lo <= a.hi) {
                return Err(CliError::Config(format!(
                    "{name} needs 0 < lo <= hi and n >= 1"
                )));
            }
        }
        let grids: [(&str, usize); 3] = [
            ("m2o.pes", self.m2o.pes.len() + self.m2o.powers.len()),
            ("roofline.benchmarks", self.roofline.benchmarks.len()),
            ("dqpe.ancillas", self.dqpe.ancillas.len()),
        ];
        for (name, len) in grids {
            if len == 0 {
                return Err(CliError::Config(format!("{name} must not be empty")));
            }
        }
        Ok(())
    }
}

/// Reads TOML, or JSON when the file ends in `.json`. Missing keys take
/// defaults; parse errors carry the line number.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!("{}: line {}: {e}", path.display(), e.line()))
        })?
    } else {
        toml::from_str(&text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0);
            CliError::Config(format!("{}: line {line}: {}", path.display(), e.message()))
        })?
    };
    cfg.validate()?;
    Ok(cfg)
}
