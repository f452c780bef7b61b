//! Heralded entanglement generation across two M2O converters.
//!
//! Each node prepares `sqrt(1-Pe)|g,0> + sqrt(Pe)|e,1>` on (transmon, microwave
//! mode). The photon is converted and sent through a chain of beamsplitter
//! losses, the two optical modes interfere on a 50:50 beamsplitter, and a
//! single click on detector A heralds a `Psi+` pair.

mod herald;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, MnqcError, Result};

pub use herald::{
    pure_loss, simulate_heralded_cycle, simulate_link, sweep_excitation_probability,
    sweep_pump_power, thermal_attenuator, DarkCountRule, HeraldedEPResult, LinkModel,
    M2OSweepRow, SimulationOptions,
};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Time to prepare the transmon/microwave state before each attempt (s).
pub const PREPARATION_TIME: f64 = 50e-9;

/// Converter parameters. Rates are given as `value / 2pi` in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct M2OConverterPreset {
    pub name: String,
    pub g0_over_2pi: f64,
    pub gamma_ext_o_over_2pi: f64,
    pub gamma_int_o_over_2pi: f64,
    pub gamma_ext_e_over_2pi: f64,
    pub gamma_int_e_over_2pi: f64,
    /// Added thermal microwave photons per watt of optical pump.
    #[serde(default = "default_k_add")]
    pub k_add: f64,
    /// Optical detector dark-count rate (Hz).
    #[serde(default = "default_dark_count_rate")]
    pub dark_count_rate: f64,
    #[serde(default = "default_pump_frequency")]
    pub pump_frequency_over_2pi: f64,
    /// Extra optical transmission (fiber, coupling); folded into `T_o`.
    #[serde(default = "default_one")]
    pub extra_optical_transmission: f64,
}

fn default_k_add() -> f64 {
    1e3
}
fn default_dark_count_rate() -> f64 {
    50.0
}
fn default_pump_frequency() -> f64 {
    193.4e12
}
fn default_one() -> f64 {
    1.0
}

pub const PRESET_NAMES: [&str; 4] = ["no1", "no2", "no3", "future"];

impl M2OConverterPreset {
    fn table(name: &str, g0: f64, eo: f64, io: f64, ee: f64, ie: f64) -> Self {
        Self {
            name: name.to_string(),
            g0_over_2pi: g0,
            gamma_ext_o_over_2pi: eo,
            gamma_int_o_over_2pi: io,
            gamma_ext_e_over_2pi: ee,
            gamma_int_e_over_2pi: ie,
            k_add: default_k_add(),
            dark_count_rate: default_dark_count_rate(),
            pump_frequency_over_2pi: default_pump_frequency(),
            extra_optical_transmission: 1.0,
        }
    }

    /// Looks up one of [`PRESET_NAMES`].
    pub fn by_name(name: &str) -> Result<Self> {
        let p = match name {
            "no1" => Self::table("no1", 60.0, 2.1e6, 1.1e5, 1.4e6, 2.6e5),
            "no2" => Self::table("no2", 37.0, 1.5e7, 2.2e6, 5.6e6, 1.6e6),
            "no3" => Self::table("no3", 750.0, 3.3e7, 2.8e7, 3.2e6, 1.2e6),
            "future" => Self::table("future", 1e3, 1e7, 2e5, 1e7, 2e5),
            _ => {
                return Err(MnqcError::UnknownPreset {
                    name: name.to_string(),
                    valid: PRESET_NAMES.join(", "),
                })
            }
        };
        Ok(p)
    }

    pub fn all() -> Vec<Self> {
        PRESET_NAMES
            .iter()
            .map(|n| Self::by_name(n).expect("registered preset"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g0", self.g0_over_2pi),
            ("external optical decay rate", self.gamma_ext_o_over_2pi),
            ("intrinsic optical decay rate", self.gamma_int_o_over_2pi),
            ("external microwave decay rate", self.gamma_ext_e_over_2pi),
            ("intrinsic microwave decay rate", self.gamma_int_e_over_2pi),
            ("pump frequency", self.pump_frequency_over_2pi),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MnqcError::OutOfRange {
                    name,
                    value: v,
                    range: "(0, inf)",
                });
            }
        }
        check_range("k_add", self.k_add, 0.0, f64::MAX, "[0, inf)")?;
        check_range("dark count rate", self.dark_count_rate, 0.0, f64::MAX, "[0, inf)")?;
        check_range(
            "extra optical transmission",
            self.extra_optical_transmission,
            0.0,
            1.0,
            "[0, 1]",
        )
    }

    fn angular(&self) -> Angular {
        let w = |x: f64| 2.0 * std::f64::consts::PI * x;
        Angular {
            g0: w(self.g0_over_2pi),
            ext_o: w(self.gamma_ext_o_over_2pi),
            tot_o: w(self.gamma_ext_o_over_2pi + self.gamma_int_o_over_2pi),
            ext_e: w(self.gamma_ext_e_over_2pi),
            tot_e: w(self.gamma_ext_e_over_2pi + self.gamma_int_e_over_2pi),
            omega: w(self.pump_frequency_over_2pi),
        }
    }

    /// Pump power (W) at which the cooperativity equals one.
    pub fn unit_cooperativity_power(&self) -> f64 {
        let a = self.angular();
        let n_p = a.tot_e * a.tot_o / (4.0 * a.g0 * a.g0);
        n_p * HBAR * a.omega * a.tot_o * a.tot_o / (4.0 * a.ext_o)
    }
}

struct Angular {
    g0: f64,
    ext_o: f64,
    tot_o: f64,
    ext_e: f64,
    tot_e: f64,
    omega: f64,
}

/// Quantities derived from a preset at a given pump power. Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConverterParams {
    pub pump_power: f64,
    /// Intracavity pump photon number.
    pub n_p: f64,
    /// Pump-enhanced coupling `g0 sqrt(n_p)` (rad/s).
    pub g: f64,
    pub cooperativity: f64,
    pub t_e: f64,
    pub t_in: f64,
    pub t_o: f64,
    /// Microwave linewidth `gamma_tot,e` (rad/s).
    pub bandwidth: f64,
    /// Duration of one heralding attempt (s).
    pub t_tot: f64,
}

pub fn derive_converter_params(
    preset: &M2OConverterPreset,
    pump_power: f64,
) -> Result<DerivedConverterParams> {
    preset.validate()?;
    check_range("pump power", pump_power, 0.0, f64::MAX, "[0, inf)")?;
    let a = preset.angular();
    let n_p = 4.0 * a.ext_o * pump_power / (HBAR * a.omega * a.tot_o * a.tot_o);
    let g = a.g0 * n_p.sqrt();
    let c = 4.0 * g * g / (a.tot_e * a.tot_o);
    Ok(DerivedConverterParams {
        pump_power,
        n_p,
        g,
        cooperativity: c,
        t_e: a.ext_e / a.tot_e,
        t_in: (4.0 * c / ((c + 1.0) * (c + 1.0))).min(1.0),
        t_o: a.ext_o / a.tot_o * preset.extra_optical_transmission,
        bandwidth: a.tot_e,
        t_tot: PREPARATION_TIME + 2.0 / a.tot_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_preset_lists_valid_names() {
        let err = M2OConverterPreset::by_name("no4").unwrap_err();
        let msg = err.to_string();
        for n in PRESET_NAMES {
            assert!(msg.contains(n));
        }
    }

    #[test]
    fn closed_form_power_gives_unit_cooperativity() {
        for p in M2OConverterPreset::all() {
            let pw = p.unit_cooperativity_power();
            let d = derive_converter_params(&p, pw).unwrap();
            assert!((d.cooperativity - 1.0).abs() < 1e-12);
            assert!((d.t_in - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cooperativity_linear_in_power() {
        let p = M2OConverterPreset::by_name("no2").unwrap();
        let a = derive_converter_params(&p, 1e-3).unwrap();
        let b = derive_converter_params(&p, 3e-3).unwrap();
        assert!((b.cooperativity / a.cooperativity - 3.0).abs() < 1e-12);
        assert_eq!(derive_converter_params(&p, 0.0).unwrap().t_in, 0.0);
        assert!(derive_converter_params(&p, -1.0).is_err());
    }
}
