//! Independent single-qubit depolarizing noise acting on diagonal observables.
//!
//! Under the channel `E(ρ) = (1-η) ρ + (η/3)(XρX + YρY + ZρZ)` on qubit `q`,
//! the basis operator `O_j` picks up a factor `1 - 4η/3` when `j_q = 1` and is
//! unchanged otherwise, so for independent noise on every qubit
//!
//! ```text
//! ⟨O⟩(η) = Σ_j β_j ⟨O_j⟩ Π_{q: j_q = 1} (1 - 4η_q/3).
//! ```
//!
//! [`kraus_oracle`] evaluates the same quantity by brute force on a dense
//! density matrix and is kept independent of the product formula.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{DiagonalObservable, PauliDecomposition};
use crate::states::{ExpectationVector, RealWavefunction};
use crate::walsh::BasisIndex;

/// Noiseless expectations with magnitude at or below this are treated as zero.
pub const VANISHING_EXPECTATION: f64 = 1e-12;

/// Largest register the dense density-matrix oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 12;

/// Per-qubit depolarizing probabilities `η_q ∈ [0, 1]`, indexed UV-first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct NoiseVector(Vec<f64>);

impl NoiseVector {
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::InvalidParameter("noise vector is empty".into()));
        }
        if let Some((q, e)) = eta
            .iter()
            .enumerate()
            .find(|(_, e)| !(0.0..=1.0).contains(*e))
        {
            return Err(Error::InvalidParameter(format!(
                "eta[{q}] = {e} outside [0, 1]"
            )));
        }
        Ok(Self(eta))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn uniform(n: usize, eta: f64) -> Result<Self> {
        Self::new(vec![eta; n])
    }

    /// `η` on qubit `q` only.
    pub fn single(n: usize, q: usize, eta: f64) -> Result<Self> {
        if q >= n {
            return Err(Error::InvalidParameter(format!(
                "qubit {q} out of range for {n} qubits"
            )));
        }
        let mut v = vec![0.0; n];
        v[q] = eta;
        Self::new(v)
    }

    pub fn qubits(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for NoiseVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<NoiseVector> for Vec<f64> {
    fn from(v: NoiseVector) -> Self {
        v.0
    }
}

#[inline]
fn damping(eta: f64) -> f64 {
    1.0 - 4.0 * eta / 3.0
}

fn check_noise(b: &PauliDecomposition, e: &ExpectationVector, eta: &NoiseVector) -> Result<()> {
    b.check(e)?;
    if eta.qubits() != b.qubits() {
        return Err(Error::QubitMismatch {
            expected: b.qubits(),
            found: eta.qubits(),
        });
    }
    Ok(())
}

/// `⟨O⟩(η)` from the product formula.
pub fn noisy_expectation(
    b: &PauliDecomposition,
    e: &ExpectationVector,
    eta: &NoiseVector,
) -> Result<f64> {
    check_noise(b, e, eta)?;
    let per_qubit: Vec<f64> = eta.as_slice().iter().map(|&x| damping(x)).collect();
    let dim = b.beta().len();
    // factor[j] = Π_{q ∈ j} d_q, built by peeling the lowest set bit.
    let mut factor = vec![1.0; dim];
    let mut total = b.get(0) * e.get(0);
    for j in 1..dim {
        factor[j] = factor[j & (j - 1)] * per_qubit[j.trailing_zeros() as usize];
        total += b.get(j) * e.get(j) * factor[j];
    }
    Ok(total)
}

/// Multilinear expansion of `⟨O_j⟩ Π_{q ∈ j} (1 - 4η_q/3)`.
///
/// Terms are keyed by the subset of noisy qubits (a submask of `j`) and
/// ordered by ascending mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePolynomial {
    pub j: usize,
    pub qubits: usize,
    pub terms: Vec<PolynomialTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialTerm {
    /// Bit `q` set means the monomial contains `η_q`.
    pub mask: usize,
    pub coefficient: f64,
}

impl NoisePolynomial {
    pub fn constant(&self) -> f64 {
        self.coefficient(0)
    }

    /// Coefficient of `Π_{q ∈ mask} η_q`; zero when `mask` is not a submask of `j`.
    pub fn coefficient(&self, mask: usize) -> f64 {
        self.terms
            .iter()
            .find(|t| t.mask == mask)
            .map_or(0.0, |t| t.coefficient)
    }

    pub fn evaluate(&self, eta: &NoiseVector) -> Result<f64> {
        if eta.qubits() != self.qubits {
            return Err(Error::QubitMismatch {
                expected: self.qubits,
                found: eta.qubits(),
            });
        }
        let eta = eta.as_slice();
        Ok(self
            .terms
            .iter()
            .map(|t| {
                (0..self.qubits)
                    .filter(|q| (t.mask >> q) & 1 == 1)
                    .fold(t.coefficient, |acc, q| acc * eta[q])
            })
            .sum())
    }
}

impl fmt::Display for NoisePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            let c = t.coefficient;
            match (i, c < 0.0) {
                (0, _) => write!(f, "{c:.3}")?,
                (_, true) => write!(f, " - {:.3}", -c)?,
                (_, false) => write!(f, " + {c:.3}")?,
            }
            for q in (0..self.qubits).filter(|q| (t.mask >> q) & 1 == 1) {
                write!(f, " η{q}")?;
            }
        }
        Ok(())
    }
}

pub fn noise_polynomial(j: BasisIndex, e: &ExpectationVector) -> Result<NoisePolynomial> {
    if j.qubits() != e.qubits() {
        return Err(Error::QubitMismatch {
            expected: e.qubits(),
            found: j.qubits(),
        });
    }
    let jv = j.value();
    let base = e.get(jv);
    let mut masks = Vec::with_capacity(1 << j.weight());
    // Enumerate submasks of j.
    let mut s = jv;
    loop {
        masks.push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & jv;
    }
    masks.sort_unstable();
    let terms = masks
        .into_iter()
        .map(|mask| PolynomialTerm {
            mask,
            coefficient: base * (-4.0f64 / 3.0).powi(mask.count_ones() as i32),
        })
        .collect();
    Ok(NoisePolynomial {
        j: jv,
        qubits: j.qubits(),
        terms,
    })
}

/// Linear noise response `γ_q`, defined by
/// `⟨O⟩(η) = ⟨O⟩(0) [1 + Σ_q γ_q η_q + O(η²)]`. Stored UV-first (index `q`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityProfile {
    gamma: Vec<f64>,
}

impl SensitivityProfile {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::InvalidParameter(
                "sensitivity profile is empty".into(),
            ));
        }
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sensitivity".into()));
        }
        Ok(Self { gamma })
    }

    /// Builds a profile from values listed IR-first (qubit `n-1` first).
    pub fn from_ir_first(mut gamma: Vec<f64>) -> Result<Self> {
        gamma.reverse();
        Self::new(gamma)
    }

    pub fn qubits(&self) -> usize {
        self.gamma.len()
    }

    pub fn get(&self, q: usize) -> f64 {
        self.gamma[q]
    }

    pub fn uv_first(&self) -> &[f64] {
        &self.gamma
    }

    pub fn ir_first(&self) -> Vec<f64> {
        self.gamma.iter().rev().copied().collect()
    }

    pub fn abs_sum(&self) -> f64 {
        self.gamma.iter().map(|g| g.abs()).sum()
    }
}

/// Exact derivative of [`noisy_expectation`] at `η = 0`, normalized by `⟨O⟩(0)`.
pub fn sensitivities(b: &PauliDecomposition, e: &ExpectationVector) -> Result<SensitivityProfile> {
    let noiseless = b.expectation(e)?;
    if noiseless.abs() <= VANISHING_EXPECTATION {
        return Err(Error::UndefinedSensitivity { value: noiseless });
    }
    let n = b.qubits();
    let terms: Vec<f64> = b
        .beta()
        .iter()
        .zip(e.as_slice())
        .map(|(x, y)| x * y)
        .collect();
    let mut active = vec![0.0; n];
    for (j, t) in terms.iter().enumerate().skip(1) {
        let mut bits = j;
        while bits != 0 {
            active[bits.trailing_zeros() as usize] += t;
            bits &= bits - 1;
        }
    }
    let gamma = active
        .into_iter()
        .map(|s| -4.0 / 3.0 * s / noiseless)
        .collect();
    SensitivityProfile::new(gamma)
}

/// Least-squares fit of `ln γ` against position in IR-first order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Slope `ξ` per qubit step toward the UV; negative for UV suppression.
    pub xi: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `γ ∼ A e^{ξ k}` over the strictly positive entries, where `k = n-1-q`
/// counts steps from the IR qubit.
pub fn decay_fit(g: &SensitivityProfile) -> Result<DecayFit> {
    let points: Vec<(f64, f64)> = g
        .ir_first()
        .into_iter()
        .enumerate()
        .filter(|(_, y)| *y > 0.0)
        .map(|(k, y)| (k as f64, y.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::Fit {
            positive: points.len(),
        });
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let xi = sxy / sxx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (mean_y + xi * (p.0 - mean_x))).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(DecayFit {
        xi,
        r_squared,
        points: points.len(),
    })
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[one, o], [o, one]],
            Pauli::X => [[o, one], [one, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[one, o], [o, -one]],
        }
    }
}

/// Dense `2^n x 2^n` density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &RealWavefunction) -> Result<Self> {
        let n = state.qubits();
        if n > ORACLE_MAX_QUBITS {
            return Err(Error::Resource {
                n,
                max: ORACLE_MAX_QUBITS,
            });
        }
        let psi = state.amplitudes();
        let data = psi
            .iter()
            .flat_map(|&r| psi.iter().map(move |&c| Complex64::new(r * c, 0.0)))
            .collect();
        Ok(Self { n, data })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// `ρ <- Σ_k w_k K_k ρ K_k†` with each `K_k` acting on qubit `q`.
    ///
    /// The map acts independently on every 2x2 block that differs only in
    /// bit `q` of the row and column index, so it is applied block by block.
    pub fn apply_channel(&mut self, q: usize, ops: &[(f64, [[Complex64; 2]; 2])]) {
        assert!(q < self.n, "qubit {q} out of range");
        let dim = self.dim();
        let bit = 1usize << q;
        for r0 in (0..dim).filter(|r| r & bit == 0) {
            let r1 = r0 | bit;
            for c0 in (0..dim).filter(|c| c & bit == 0) {
                let c1 = c0 | bit;
                let block = [
                    [self.data[r0 * dim + c0], self.data[r0 * dim + c1]],
                    [self.data[r1 * dim + c0], self.data[r1 * dim + c1]],
                ];
                let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
                for (w, k) in ops {
                    let kb = mul(k, &block);
                    let kbk = mul(&kb, &dagger(k));
                    for a in 0..2 {
                        for b in 0..2 {
                            out[a][b] += kbk[a][b] * *w;
                        }
                    }
                }
                self.data[r0 * dim + c0] = out[0][0];
                self.data[r0 * dim + c1] = out[0][1];
                self.data[r1 * dim + c0] = out[1][0];
                self.data[r1 * dim + c1] = out[1][1];
            }
        }
    }

    /// Conjugates by a single Pauli on qubit `q` (one Kraus component, unit weight).
    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        self.apply_channel(q, &[(1.0, p.matrix())]);
    }

    /// Depolarizing channel with Kraus operators `√(1-η) I`, `√(η/3) {X, Y, Z}`.
    pub fn apply_depolarizing(&mut self, q: usize, eta: f64) {
        let ops = [
            (1.0 - eta, Pauli::I.matrix()),
            (eta / 3.0, Pauli::X.matrix()),
            (eta / 3.0, Pauli::Y.matrix()),
            (eta / 3.0, Pauli::Z.matrix()),
        ];
        self.apply_channel(q, &ops);
    }

    /// `Re Tr[ρ O]` for a diagonal `O`.
    pub fn expectation(&self, o: &DiagonalObservable) -> Result<f64> {
        if o.qubits() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: o.qubits(),
            });
        }
        Ok(o.diag()
            .iter()
            .enumerate()
            .map(|(i, d)| d * self.entry(i, i).re)
            .sum())
    }
}

fn mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn dagger(a: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// `Tr[E(ρ) O]` with `E` the tensor product of per-qubit depolarizing channels,
/// computed on the full density matrix.
pub fn kraus_oracle(
    w: &RealWavefunction,
    o: &DiagonalObservable,
    eta: &NoiseVector,
) -> Result<f64> {
    let n = w.qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::Resource {
            n,
            max: ORACLE_MAX_QUBITS,
        });
    }
    for found in [o.qubits(), eta.qubits()] {
        if found != n {
            return Err(Error::QubitMismatch { expected: n, found });
        }
    }
    let mut rho = DensityMatrix::pure(w)?;
    for (q, &e) in eta.as_slice().iter().enumerate() {
        rho.apply_depolarizing(q, e);
    }
    rho.expectation(o)
}
