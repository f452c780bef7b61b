use thiserror::Error;

/// Errors raised by the simulation and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MnqcError {
    #[error("subsystem index {index} out of range for layout with {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("subsystem index {0} listed more than once")]
    DuplicateSubsystem(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error(
        "Fock truncation did not converge: d_f = {d_f}, herald shift {herald_shift:.3e}, \
         fidelity shift {fidelity_shift:.3e} (limit {limit:.1e})"
    )]
    TruncationNotConverged {
        d_f: usize,
        herald_shift: f64,
        fidelity_shift: f64,
        limit: f64,
    },

    #[error("herald probability is zero; no conditional state exists")]
    NoHeraldEvent,

    #[error("unknown preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },

    #[error("unknown benchmark `{name}`; valid benchmarks: {valid}")]
    UnknownBenchmark { name: String, valid: String },

    #[error("cannot route gate on qubits ({0}, {1})")]
    Unroutable(usize, usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no crossover in (0, 1): {0}")]
    NoCrossover(String),
}

pub type Result<T> = std::result::Result<T, MnqcError>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(MnqcError::OutOfRange { name, value, range })
    }
}
