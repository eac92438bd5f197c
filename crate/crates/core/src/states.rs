//! Digitized real wavefunctions and their Walsh-basis expectation vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walsh::{self, check_qubits};

/// Allowed deviation of `Σ ψ²` from one for an already-normalized state.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// States loaded from files are renormalized if their squared norm is within
/// this fraction of one, and rejected otherwise.
pub const LOAD_NORM_TOLERANCE: f64 = 0.01;

/// Real amplitudes over the `2^n` computational basis states, unit norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealWavefunction {
    amplitudes: Vec<f64>,
    n: usize,
}

impl RealWavefunction {
    /// Wraps amplitudes that must already be normalized to [`NORM_TOLERANCE`].
    pub fn new(amplitudes: Vec<f64>) -> Result<Self> {
        let n = walsh::qubit_count(amplitudes.len())?;
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        let norm = squared_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Normalization { norm });
        }
        Ok(Self { amplitudes, n })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(mut amplitudes: Vec<f64>) -> Result<Self> {
        walsh::qubit_count(amplitudes.len())?;
        let norm = squared_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Normalization { norm });
        }
        let scale = norm.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
        Self::new(amplitudes)
    }

    /// Accepts amplitudes whose squared norm is within [`LOAD_NORM_TOLERANCE`]
    /// of one and renormalizes them.
    pub fn from_loaded(amplitudes: Vec<f64>) -> Result<Self> {
        walsh::qubit_count(amplitudes.len())?;
        let norm = squared_norm(&amplitudes);
        if !norm.is_finite() || (norm - 1.0).abs() > LOAD_NORM_TOLERANCE {
            return Err(Error::Normalization { norm });
        }
        Self::normalized(amplitudes)
    }

    /// `ψ_ℓ = N exp[-(ℓ-μ)²/(4σ²)]` sampled on the integer grid `ℓ = 0..2^n`.
    pub fn gaussian(n: usize, mu: f64, sigma: f64) -> Result<Self> {
        check_qubits(n)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mu must be finite, got {mu}"
            )));
        }
        let amplitudes = (0..1usize << n)
            .map(|l| {
                let x = (l as f64 - mu) / sigma;
                (-0.25 * x * x).exp()
            })
            .collect();
        Self::normalized(amplitudes)
    }

    /// Reproducible pseudo-random state: i.i.d. uniform `[0, 1)` amplitudes
    /// from a seeded ChaCha8 stream, then normalized.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        check_qubits(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amplitudes: Vec<f64> = (0..1usize << n).map(|_| rng.gen::<f64>()).collect();
        // An all-zero draw is not realistically reachable; guard anyway.
        if amplitudes.iter().all(|&a| a == 0.0) {
            amplitudes[0] = 1.0;
        }
        Self::normalized(amplitudes)
    }

    /// Computational basis state `|ℓ⟩`.
    pub fn basis_state(n: usize, l: usize) -> Result<Self> {
        check_qubits(n)?;
        if l >> n != 0 {
            return Err(Error::IndexOutOfRange { j: l, n });
        }
        let mut amplitudes = vec![0.0; 1 << n];
        amplitudes[l] = 1.0;
        Self::new(amplitudes)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> ProbabilityVector {
        ProbabilityVector(self.amplitudes.iter().map(|a| a * a).collect())
    }

    /// `⟨O_j⟩ = [H · ψ²]_j` for every basis operator.
    pub fn expectations(&self) -> ExpectationVector {
        let mut values = self.probabilities().0;
        walsh::fwht_in_place(&mut values).expect("length validated at construction");
        ExpectationVector { values, n: self.n }
    }
}

impl TryFrom<Vec<f64>> for RealWavefunction {
    type Error = Error;

    fn try_from(amplitudes: Vec<f64>) -> Result<Self> {
        Self::new(amplitudes)
    }
}

impl From<RealWavefunction> for Vec<f64> {
    fn from(w: RealWavefunction) -> Self {
        w.amplitudes
    }
}

/// `|ψ_ℓ|²` for each basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Expectation values `⟨O_j⟩` indexed by [`BasisIndex`](crate::walsh::BasisIndex) value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationVector {
    values: Vec<f64>,
    n: usize,
}

impl ExpectationVector {
    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn squared_norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    fn reference_gaussian() -> RealWavefunction {
        RealWavefunction::gaussian(4, 7.5, 8.0 / 3.0).unwrap()
    }

    #[test]
    fn gaussian_appendix_expectations() {
        let e = reference_gaussian().expectations();
        let expected = [
            (3, -0.001),
            (5, 0.059),
            (6, 0.144),
            (9, -0.151),
            (10, -0.318),
            (12, -0.742),
            (15, 0.055),
        ];
        for (j, v) in expected {
            assert!((e.get(j) - v).abs() <= 1e-3, "j={j}: {}", e.get(j));
        }
        assert!((e.get(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_state_kills_odd_rows() {
        let e = reference_gaussian().expectations();
        for j in 0..16usize {
            if j.count_ones() % 2 == 1 {
                assert!(e.get(j).abs() < 1e-12, "j={j}");
            }
        }
    }

    #[test]
    fn flat_limit() {
        let w = RealWavefunction::gaussian(5, 3.0, 1e9).unwrap();
        let flat = (32f64).sqrt().recip();
        assert!(w.amplitudes().iter().all(|a| (a - flat).abs() < 1e-6));
    }

    #[test]
    fn sigma_must_be_positive() {
        assert!(matches!(
            RealWavefunction::gaussian(4, 7.5, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(RealWavefunction::gaussian(4, 7.5, -1.0).is_err());
    }

    #[test]
    fn random_state_is_reproducible() {
        let a = RealWavefunction::random(6, 42).unwrap();
        let b = RealWavefunction::random(6, 42).unwrap();
        let c = RealWavefunction::random(6, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((squared_norm(a.amplitudes()) - 1.0).abs() < 1e-12);
        assert!(a.amplitudes().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn ground_state_expectations_are_one() {
        let e = RealWavefunction::basis_state(4, 0).unwrap().expectations();
        assert!(e.as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn expectations_match_direct_sum() {
        let w = RealWavefunction::random(6, 7).unwrap();
        let p = w.probabilities();
        let e = w.expectations();
        for j in 0..64usize {
            let direct: f64 = p
                .as_slice()
                .iter()
                .enumerate()
                .map(|(l, pl)| {
                    if (j & l).count_ones() % 2 == 0 {
                        *pl
                    } else {
                        -pl
                    }
                })
                .sum();
            assert!((direct - e.get(j)).abs() < 1e-13);
        }
    }

    #[test]
    fn normalization_checks() {
        assert!(matches!(
            RealWavefunction::new(vec![1.0, 1.0]),
            Err(Error::Normalization { .. })
        ));
        let w = RealWavefunction::from_loaded(vec![0.999, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(w.amplitudes()[0], 1.0);
        assert!(RealWavefunction::from_loaded(vec![0.9, 0.0, 0.0, 0.0]).is_err());
        assert!(matches!(
            RealWavefunction::new(vec![1.0, 0.0, 0.0]),
            Err(Error::Dimension { len: 3 })
        ));
    }
}
