use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector length {len} is not a power of two (at least 2)")]
    Dimension { len: usize },

    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },

    #[error("{n} qubits exceeds the configured cap of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("basis index {j} out of range for {n} qubits")]
    IndexOutOfRange { j: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state norm {norm} deviates from 1 beyond tolerance")]
    Normalization { norm: f64 },

    #[error("noiseless expectation value {value:e} vanishes; sensitivities are undefined")]
    UndefinedSensitivity { value: f64 },

    #[error("physical error rate {p} is not below threshold {p_th}")]
    AboveThreshold { p: f64, p_th: f64 },

    #[error("infeasible: {reason}{}", binding_note(binding_qubit))]
    Infeasible {
        reason: String,
        /// Qubit whose requirement cannot be met within the distance cap.
        binding_qubit: Option<usize>,
    },

    #[error("decay fit needs at least 3 positive sensitivities, found {positive}")]
    Fit { positive: usize },

    #[error("density-matrix oracle limited to {max} qubits, requested {n}")]
    Resource { n: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

fn binding_note(q: &Option<usize>) -> String {
    q.map(|q| format!(" (binding qubit {q})"))
        .unwrap_or_default()
}
