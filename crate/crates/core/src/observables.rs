//! Diagonal observables, their Pauli-Z decomposition, and digitized powers of
//! the field operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{ExpectationVector, RealWavefunction};
use crate::walsh::{self, check_qubits, BasisIndex};

/// An observable diagonal in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalObservable {
    diag: Vec<f64>,
    label: String,
    n: usize,
}

impl DiagonalObservable {
    pub fn new(diag: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let n = walsh::qubit_count(diag.len())?;
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidParameter("non-finite diagonal entry".into()));
        }
        Ok(Self {
            diag,
            label: label.into(),
            n,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Self::new(vec![1.0; 1 << n], "I")
    }

    /// `(start + (end - start) ℓ / (2^n - 1))^power` on `ℓ = 0..2^n`: the
    /// `power`-th moment of a field sampled uniformly over `[start, end]`.
    pub fn linspace_power(n: usize, start: f64, end: f64, power: u32) -> Result<Self> {
        check_qubits(n)?;
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::InvalidParameter(
                "field window must be finite".into(),
            ));
        }
        let last = ((1usize << n) - 1) as f64;
        let diag = (0..1usize << n)
            .map(|l| (start + (end - start) * l as f64 / last).powi(power as i32))
            .collect();
        Self::new(diag, format!("linspace({start}, {end})^{power}"))
    }

    /// `φ^p` with the field symmetrized about the origin: `φ_ℓ = (2^n-1-2ℓ)/(2^n-1)`,
    /// running from `+1` at `ℓ = 0` to `-1` at `ℓ = 2^n-1`.
    pub fn phi_power(n: usize, power: u32) -> Result<Self> {
        if power == 0 {
            return Err(Error::InvalidParameter("power must be at least 1".into()));
        }
        check_qubits(n)?;
        let last = ((1usize << n) - 1) as f64;
        let diag = (0..1usize << n)
            .map(|l| ((last - 2.0 * l as f64) / last).powi(power as i32))
            .collect();
        Self::new(diag, format!("phi^{power}"))
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Σ_ℓ diag_ℓ |ψ_ℓ|²`, computed directly in the computational basis.
    pub fn expectation(&self, state: &RealWavefunction) -> Result<f64> {
        if state.qubits() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: state.qubits(),
            });
        }
        Ok(self
            .diag
            .iter()
            .zip(state.amplitudes())
            .map(|(d, a)| d * a * a)
            .sum())
    }

    /// `β = 2^{-n} H diag`.
    pub fn decompose(&self) -> PauliDecomposition {
        let mut beta = walsh::fwht(&self.diag).expect("length validated at construction");
        let scale = (self.diag.len() as f64).recip();
        beta.iter_mut().for_each(|b| *b *= scale);
        PauliDecomposition { beta, n: self.n }
    }
}

/// Coefficients `β_j` of `O = Σ_j β_j O_j`, stored densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PauliDecomposition {
    beta: Vec<f64>,
    n: usize,
}

impl PauliDecomposition {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        let n = walsh::qubit_count(beta.len())?;
        Ok(Self { beta, n })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn get(&self, j: usize) -> f64 {
        self.beta[j]
    }

    /// `diag = H β`.
    pub fn recompose(&self, label: impl Into<String>) -> DiagonalObservable {
        let diag = walsh::fwht(&self.beta).expect("length validated at construction");
        DiagonalObservable {
            diag,
            label: label.into(),
            n: self.n,
        }
    }

    /// `Σ_j β_j ⟨O_j⟩`.
    pub fn expectation(&self, e: &ExpectationVector) -> Result<f64> {
        self.check(e)?;
        Ok(self.beta.iter().zip(e.as_slice()).map(|(b, v)| b * v).sum())
    }

    /// Non-zero entries `(j, β_j)` with `|β_j| > tol`, in binary order.
    pub fn nonzero(&self, tol: f64) -> Vec<(usize, f64)> {
        self.beta
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, b)| b.abs() > tol)
            .collect()
    }

    pub(crate) fn check(&self, e: &ExpectationVector) -> Result<()> {
        if e.qubits() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: e.qubits(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for PauliDecomposition {
    type Error = Error;

    fn try_from(beta: Vec<f64>) -> Result<Self> {
        Self::new(beta)
    }
}

impl From<PauliDecomposition> for Vec<f64> {
    fn from(d: PauliDecomposition) -> Self {
        d.beta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequencyRow {
    pub j: usize,
    pub pauli: String,
    pub sequency: usize,
    /// Most-UV qubit generating this band; `None` for the identity.
    pub q_s: Option<usize>,
    pub beta: f64,
}

/// Rows `(j, s, q_s, β_j)` sorted by sequency. With `suppress_below = Some(tol)`
/// rows with `|β_j| <= tol` are dropped.
pub fn sequency_report(b: &PauliDecomposition, suppress_below: Option<f64>) -> Vec<SequencyRow> {
    let mut rows: Vec<SequencyRow> = BasisIndex::all(b.n)
        .expect("validated at construction")
        .filter(|idx| suppress_below.is_none_or(|tol| b.beta[idx.value()].abs() > tol))
        .map(|idx| SequencyRow {
            j: idx.value(),
            pauli: idx.pauli_string(),
            sequency: idx.sequency(),
            q_s: idx.most_uv_qubit(),
            beta: b.beta[idx.value()],
        })
        .collect();
    rows.sort_by_key(|r| r.sequency);
    rows
}
