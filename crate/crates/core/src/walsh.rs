//! Natural-ordered Walsh-Hadamard transform and the bitmask <-> Pauli-Z
//! string correspondence.
//!
//! Row `j` of the unnormalized transform matrix has entry `(-1)^popcount(j & l)`
//! in column `l`, which is exactly the diagonal of the tensor product
//! `O_j = ⊗_b Z^{j_b}`. Qubit 0 is the least significant bit (the most-UV
//! qubit under a binary field map); qubit `n-1` is the IR qubit.

use std::fmt;

use crate::error::{Error, Result};

/// Hard upper bound on the register size accepted anywhere in the crate.
pub const MAX_QUBITS: usize = 30;

/// Working cap used when the caller does not configure one.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Number of qubits `n` for a vector of length `2^n`, `n >= 1`.
pub fn qubit_count(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Dimension { len });
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    Ok(n)
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "qubit count must be at least 1".into(),
        ));
    }
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    Ok(())
}

/// In-place unnormalized transform: `v <- H v` with `H` the ±1 matrix.
pub fn fwht_in_place(v: &mut [f64]) -> Result<()> {
    qubit_count(v.len())?;
    let len = v.len();
    let mut half = 1;
    while half < len {
        for block in v.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
    Ok(())
}

/// Unnormalized natural-ordered transform. `fwht(fwht(v)) == 2^n v`.
pub fn fwht(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

/// Sign of entry `(row, col)` of the natural-ordered transform matrix.
#[inline]
pub fn walsh_sign(row: usize, col: usize) -> i8 {
    if (row & col).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Dense `2^n x 2^n` transform matrix with integer entries. Intended for
/// small `n` (reporting and tests).
pub fn walsh_matrix(n: usize) -> Result<Vec<Vec<i8>>> {
    check_qubits(n)?;
    let dim = 1usize << n;
    Ok((0..dim)
        .map(|row| (0..dim).map(|col| walsh_sign(row, col)).collect())
        .collect())
}

/// Index `j` of a Pauli-Z basis operator on an `n`-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    j: usize,
    n: usize,
}

impl BasisIndex {
    pub fn new(j: usize, n: usize) -> Result<Self> {
        check_qubits(n)?;
        if j >> n != 0 {
            return Err(Error::IndexOutOfRange { j, n });
        }
        Ok(Self { j, n })
    }

    /// All indices `0..2^n` in binary order.
    pub fn all(n: usize) -> Result<impl Iterator<Item = BasisIndex>> {
        check_qubits(n)?;
        Ok((0..1usize << n).map(move |j| BasisIndex { j, n }))
    }

    pub fn value(self) -> usize {
        self.j
    }

    pub fn qubits(self) -> usize {
        self.n
    }

    /// Whether `O_j` carries a `Z` on qubit `q`.
    pub fn acts_on(self, q: usize) -> bool {
        q < self.n && (self.j >> q) & 1 == 1
    }

    /// Number of `Z` factors.
    pub fn weight(self) -> u32 {
        self.j.count_ones()
    }

    /// Number of sign changes along row `j` of the natural-ordered transform.
    ///
    /// Computed as the inverse Gray code of the `n`-bit reversal of `j`.
    pub fn sequency(self) -> usize {
        let reversed = reverse_bits(self.j, self.n);
        inverse_gray(reversed)
    }

    /// Least-significant set bit: the most-UV qubit that generates this
    /// sequency band. `None` for the identity.
    pub fn most_uv_qubit(self) -> Option<usize> {
        if self.j == 0 {
            None
        } else {
            Some(self.j.trailing_zeros() as usize)
        }
    }

    /// `I`/`Z` label with qubit `n-1` leftmost, e.g. `j=9, n=4 -> "ZIIZ"`.
    pub fn pauli_string(self) -> String {
        (0..self.n)
            .rev()
            .map(|b| if self.acts_on(b) { 'Z' } else { 'I' })
            .collect()
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pauli_string())
    }
}

fn reverse_bits(x: usize, n: usize) -> usize {
    x.reverse_bits() >> (usize::BITS as usize - n)
}

fn inverse_gray(mut g: usize) -> usize {
    let mut b = g;
    while g > 1 {
        g >>= 1;
        b ^= g;
    }
    b
}
