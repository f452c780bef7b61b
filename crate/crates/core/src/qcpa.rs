//! Sampling-overhead comparison: error mitigation of a noisy quantum link
//! versus replacing the link by circuit knitting. Everything is kept in log
//! space so overheads like `4^128` never overflow.

use serde::{Deserialize, Serialize};

use crate::error::{MnqcError, Result};

fn check_dim(d: usize) -> Result<()> {
    if d != 2 && d != 4 {
        return Err(MnqcError::Domain(format!("gate dimension must be 2 or 4, got {d}")));
    }
    Ok(())
}

/// `ln gamma` for a depolarizing-equivalent gate of process fidelity `f`.
pub fn ln_gamma_pec(d: usize, f: f64) -> Result<f64> {
    check_dim(d)?;
    let d2 = (d * d) as f64;
    if !(f > 1.0 / d2 && f <= 1.0) {
        return Err(MnqcError::Domain(format!(
            "process fidelity {f} must lie in (1/{d2}, 1] for a finite overhead"
        )));
    }
    let base = (d2 * f - 1.0) / (d2 - 1.0);
    Ok(-4.0 * (d2 - 1.0) / d2 * base.ln())
}

/// `((d^2 F - 1) / (d^2 - 1))^(-4 (d^2 - 1) / d^2)`.
pub fn gamma_pec(d: usize, f: f64) -> Result<f64> {
    ln_gamma_pec(d, f).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcpaQuery {
    pub f_ll: f64,
    pub t_ll: f64,
    pub t_star: f64,
    /// Spectator qubits decohering during the link gate.
    pub n_q: usize,
}

/// `ln` of the per-internode-gate overhead: link error times spectator
/// decoherence, each spectator treated as a one-qubit gate of process
/// fidelity `exp(-T_LL / T*)`.
pub fn ln_pec_link_gamma(q: &QcpaQuery) -> Result<f64> {
    if !(q.t_star > 0.0 && q.t_ll >= 0.0) {
        return Err(MnqcError::Domain("need T* > 0 and T_LL >= 0".into()));
    }
    let link = ln_gamma_pec(4, q.f_ll)?;
    if q.n_q == 0 {
        return Ok(link);
    }
    let spectator = ln_gamma_pec(2, (-q.t_ll / q.t_star).exp())?;
    Ok(link + q.n_q as f64 * spectator)
}

pub fn pec_link_gamma(q: &QcpaQuery) -> Result<f64> {
    ln_pec_link_gamma(q).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnittingBound {
    /// Generic wire/gate cut, `gamma = 9`.
    Upper,
    /// Best known reduction, `gamma = 4`.
    Lower,
}

pub fn knitting_gamma(bound: KnittingBound) -> f64 {
    match bound {
        KnittingBound::Upper => 9.0,
        KnittingBound::Lower => 4.0,
    }
}

/// `log10(gamma^k)`.
pub fn sampling_overhead(gamma: f64, k: u64) -> Result<f64> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(MnqcError::Domain(format!("gamma must be >= 1, got {gamma}")));
    }
    Ok(k as f64 * gamma.log10())
}

/// Link infidelity at which the mitigated link costs as much as knitting,
/// found by bisection to `1e-6`.
pub fn crossover_infidelity(bound: KnittingBound, t_ll: f64, t_star: f64, n_q: usize) -> Result<f64> {
    let target = knitting_gamma(bound).ln();
    let f = |inf: f64| {
        ln_pec_link_gamma(&QcpaQuery {
            f_ll: 1.0 - inf,
            t_ll,
            t_star,
            n_q,
        })
    };
    // gamma diverges as F -> 1/16
    let (mut lo, mut hi) = (0.0, 15.0 / 16.0 - 1e-12);
    if f(lo)? >= target {
        return Err(MnqcError::NoCrossover(format!(
            "spectator decoherence alone exceeds gamma = {}",
            knitting_gamma(bound)
        )));
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One row of the overhead table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadRow {
    pub method: String,
    pub k: u64,
    pub gamma: f64,
    pub log10_circuits: f64,
}

/// Internode gates in the QFT example as quoted in the text; the compiled
/// profile lists 164.
pub const QFT_LINK_GATES_TEXT: u64 = 128;
pub const QFT_LINK_GATES_PROFILE: u64 = 164;

/// Knitting bounds and PEC at the given link fidelities for `k` gates.
pub fn overhead_table(k: u64, pec_fidelities: &[f64]) -> Result<Vec<OverheadRow>> {
    let mut rows = Vec::new();
    for (name, b) in [("knit_upper", KnittingBound::Upper), ("knit_lower", KnittingBound::Lower)] {
        let g = knitting_gamma(b);
        rows.push(OverheadRow {
            method: name.into(),
            k,
            gamma: g,
            log10_circuits: sampling_overhead(g, k)?,
        });
    }
    for &f in pec_fidelities {
        let ln_g = ln_gamma_pec(4, f)?;
        rows.push(OverheadRow {
            method: format!("pec_F{f}"),
            k,
            gamma: ln_g.exp(),
            log10_circuits: k as f64 * ln_g / std::f64::consts::LN_10,
        });
    }
    Ok(rows)
}
