//! Diagonal cost Hamiltonians: weighted sums of Z-type Pauli strings.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::{Bitstring, Counts};
use crate::error::{Error, Result};
use crate::MAX_QUBITS;

/// Normalization slack accepted by [`DiagonalHamiltonian::expectation_exact`].
pub const NORM_TOLERANCE: f64 = 1e-10;

/// `coeff * prod_{q in qubits} Z_q`. An empty support is an identity term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub qubits: Vec<usize>,
}

impl PauliTerm {
    pub fn new(coeff: f64, mut qubits: Vec<usize>) -> Result<Self> {
        if !coeff.is_finite() {
            return Err(Error::InvalidTerm(alloc::format!(
                "coefficient {coeff} is not finite"
            )));
        }
        qubits.sort_unstable();
        if qubits.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTerm("repeated qubit in support".into()));
        }
        Ok(PauliTerm { coeff, qubits })
    }

    pub fn identity(coeff: f64) -> Result<Self> {
        Self::new(coeff, Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.qubits.is_empty()
    }

    /// Number of qubits the term acts on nontrivially.
    pub fn locality(&self) -> usize {
        self.qubits.len()
    }

    pub(crate) fn mask(&self) -> usize {
        self.qubits.iter().fold(0, |m, &q| m | (1 << q))
    }

    /// Eigenvalue of the term on basis state `index`.
    pub fn value(&self, index: usize) -> f64 {
        parity_sign(index & self.mask()) * self.coeff
    }
}

#[inline]
fn parity_sign(bits: usize) -> f64 {
    if bits.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `offset + sum_i terms[i]`, diagonal in the computational basis.
///
/// Term order is significant: partition schedules address terms by index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHamiltonian")]
pub struct DiagonalHamiltonian {
    n_qubits: usize,
    offset: f64,
    terms: Vec<PauliTerm>,
    #[serde(skip)]
    masks: Vec<usize>,
}

#[derive(Deserialize)]
struct RawHamiltonian {
    n_qubits: usize,
    #[serde(default)]
    offset: f64,
    terms: Vec<PauliTerm>,
}

impl TryFrom<RawHamiltonian> for DiagonalHamiltonian {
    type Error = Error;

    fn try_from(raw: RawHamiltonian) -> Result<Self> {
        let terms = raw
            .terms
            .into_iter()
            .map(|t| PauliTerm::new(t.coeff, t.qubits))
            .collect::<Result<Vec<_>>>()?;
        DiagonalHamiltonian::new(raw.n_qubits, raw.offset, terms)
    }
}

impl DiagonalHamiltonian {
    pub fn new(n_qubits: usize, offset: f64, terms: Vec<PauliTerm>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        if !offset.is_finite() {
            return Err(Error::InvalidTerm("offset is not finite".into()));
        }
        for t in &terms {
            if let Some(&q) = t.qubits.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
        }
        let masks = terms.iter().map(PauliTerm::mask).collect();
        Ok(DiagonalHamiltonian {
            n_qubits,
            offset,
            terms,
            masks,
        })
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 0.0, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// True when no term acts on any qubit, so every state has the same energy.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(PauliTerm::is_identity)
    }

    /// Largest term support.
    pub fn max_locality(&self) -> usize {
        self.terms.iter().map(PauliTerm::locality).max().unwrap_or(0)
    }

    /// Every coefficient and the offset multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                coeff: t.coeff * factor,
                qubits: t.qubits.clone(),
            })
            .collect();
        DiagonalHamiltonian {
            n_qubits: self.n_qubits,
            offset: self.offset * factor,
            terms,
            masks: self.masks.clone(),
        }
    }

    /// Energy of the basis state with index `index` (qubit 0 = LSB).
    #[inline]
    pub fn energy_of_index(&self, index: usize) -> f64 {
        self.terms
            .iter()
            .zip(&self.masks)
            .fold(self.offset, |acc, (t, &m)| acc + parity_sign(index & m) * t.coeff)
    }

    pub fn energy_of_basis_state(&self, bits: &Bitstring) -> Result<f64> {
        if bits.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                actual: bits.len(),
            });
        }
        Ok(self.energy_of_index(bits.index()))
    }

    /// The full diagonal, one energy per basis state.
    pub fn energies(&self) -> Vec<f64> {
        (0..1usize << self.n_qubits)
            .map(|i| self.energy_of_index(i))
            .collect()
    }

    /// `<phi|H|phi>` for a normalized amplitude vector.
    pub fn expectation_exact(&self, amplitudes: &[Complex64]) -> Result<f64> {
        let dim = 1usize << self.n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if libm::fabs(norm_sqr - 1.0) > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * self.energy_of_index(i))
            .sum())
    }

    /// Shot-frequency-weighted mean energy.
    pub fn expectation_from_counts(&self, counts: &Counts) -> Result<f64> {
        if counts.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                actual: counts.n_qubits(),
            });
        }
        let total = counts.total();
        if total == 0 {
            return Err(Error::EmptyCounts);
        }
        let weighted: f64 = counts
            .iter()
            .map(|(i, c)| c as f64 * self.energy_of_index(i))
            .sum();
        Ok(weighted / total as f64)
    }

    /// Restriction to the terms in `indices` (original order kept, duplicates
    /// ignored). The constant offset is carried over unchanged, so the full
    /// index set reproduces `self` exactly.
    pub fn partial_hamiltonian(&self, indices: &[usize]) -> Result<Self> {
        let mut keep = alloc::vec![false; self.terms.len()];
        for &i in indices {
            if i >= self.terms.len() {
                return Err(Error::TermIndexOutOfRange {
                    index: i,
                    n_terms: self.terms.len(),
                });
            }
            keep[i] = true;
        }
        let (terms, masks) = self
            .terms
            .iter()
            .zip(&self.masks)
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|((t, &m), _)| (t.clone(), m))
            .unzip();
        Ok(DiagonalHamiltonian {
            n_qubits: self.n_qubits,
            offset: self.offset,
            terms,
            masks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn single_edge() -> DiagonalHamiltonian {
        DiagonalHamiltonian::new(
            2,
            0.0,
            vec![
                PauliTerm::identity(2.0).unwrap(),
                PauliTerm::new(2.0, vec![0, 1]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn bits(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    #[test]
    fn basis_energies_of_single_edge_coloring() {
        let h = single_edge();
        assert_eq!(h.energy_of_basis_state(&bits("00")).unwrap(), 4.0);
        assert_eq!(h.energy_of_basis_state(&bits("01")).unwrap(), 0.0);
        assert_eq!(h.energy_of_basis_state(&bits("10")).unwrap(), 0.0);
        assert_eq!(h.energy_of_basis_state(&bits("11")).unwrap(), 4.0);
        assert!(matches!(
            h.energy_of_basis_state(&bits("011")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn empty_hamiltonian_is_zero() {
        let h = DiagonalHamiltonian::zero(3).unwrap();
        for i in 0..8 {
            assert_eq!(h.energy_of_index(i), 0.0);
        }
        assert!(h.is_constant());
    }

    #[test]
    fn exact_expectations() {
        let z0 = DiagonalHamiltonian::new(1, 0.0, vec![PauliTerm::new(1.0, vec![0]).unwrap()]).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let s = libm::sqrt(0.5);
        assert_eq!(z0.expectation_exact(&[one, zero]).unwrap(), 1.0);
        let plus = [Complex64::new(s, 0.0), Complex64::new(s, 0.0)];
        assert!(libm::fabs(z0.expectation_exact(&plus).unwrap()) < 1e-15);

        // (|00> + |01>)/sqrt2, "01" is index 2
        let h = single_edge();
        let amps = [
            Complex64::new(s, 0.0),
            zero,
            Complex64::new(s, 0.0),
            zero,
        ];
        assert!(libm::fabs(h.expectation_exact(&amps).unwrap() - 2.0) < 1e-12);

        assert!(matches!(
            z0.expectation_exact(&[one, one]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            z0.expectation_exact(&[one]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn count_expectations() {
        let z0 = DiagonalHamiltonian::new(1, 0.0, vec![PauliTerm::new(1.0, vec![0]).unwrap()]).unwrap();
        let c = Counts::from_pairs(1, [("0", 200)]).unwrap();
        assert_eq!(z0.expectation_from_counts(&c).unwrap(), 1.0);
        let c = Counts::from_pairs(1, [("0", 100), ("1", 100)]).unwrap();
        assert_eq!(z0.expectation_from_counts(&c).unwrap(), 0.0);
        let c = Counts::from_pairs(2, [("00", 50), ("01", 150)]).unwrap();
        assert_eq!(single_edge().expectation_from_counts(&c).unwrap(), 1.0);
        assert_eq!(
            z0.expectation_from_counts(&Counts::new(1)),
            Err(Error::EmptyCounts)
        );
    }

    #[test]
    fn partial_restrictions() {
        let h = DiagonalHamiltonian::new(
            3,
            0.0,
            vec![
                PauliTerm::new(1.5, vec![0]).unwrap(),
                PauliTerm::new(-2.0, vec![1, 2]).unwrap(),
                PauliTerm::new(0.5, vec![0, 2]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(h.partial_hamiltonian(&[0, 1, 2]).unwrap(), h);
        let empty = h.partial_hamiltonian(&[]).unwrap();
        assert_eq!(empty.n_terms(), 0);
        let p = h.partial_hamiltonian(&[2, 0]).unwrap();
        assert_eq!(p.n_terms(), 2);
        for i in 0..8 {
            let direct = h.terms()[0].value(i) + h.terms()[2].value(i);
            assert_eq!(p.energy_of_index(i), direct);
        }
        assert!(matches!(
            h.partial_hamiltonian(&[3]),
            Err(Error::TermIndexOutOfRange { index: 3, n_terms: 3 })
        ));
    }

    #[test]
    fn term_validation() {
        assert!(PauliTerm::new(f64::NAN, vec![0]).is_err());
        assert!(PauliTerm::new(1.0, vec![1, 1]).is_err());
        assert!(matches!(
            DiagonalHamiltonian::new(2, 0.0, vec![PauliTerm::new(1.0, vec![2]).unwrap()]),
            Err(Error::QubitOutOfRange { qubit: 2, .. })
        ));
    }
}
