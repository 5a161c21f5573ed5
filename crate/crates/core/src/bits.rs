//! Computational-basis bitstrings and shot histograms.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::MAX_QUBITS;

/// A computational basis state of a fixed-width register.
///
/// Stored as the basis index (qubit 0 is the least significant bit) but
/// displayed and ordered as a string with qubit 0 first.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bitstring {
    len: usize,
    index: usize,
}

impl Bitstring {
    pub fn from_index(len: usize, index: usize) -> Result<Self> {
        if len > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: len,
                max: MAX_QUBITS,
            });
        }
        if index >> len != 0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "basis index {index} does not fit in {len} bits"
            )));
        }
        Ok(Bitstring { len, index })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let index = bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (q, &b)| acc | ((b as usize) << q));
        Self::from_index(bits.len(), index)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Value of qubit `q`.
    pub fn bit(&self, q: usize) -> bool {
        q < self.len && (self.index >> q) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |q| self.bit(q))
    }
}

impl Ord for Bitstring {
    // Lexicographic on the printed form (qubit 0 first).
    fn cmp(&self, other: &Self) -> Ordering {
        for q in 0..self.len.min(other.len) {
            match self.bit(q).cmp(&other.bit(q)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for Bitstring {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = alloc::vec::Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::parse(s, "bitstrings contain only 0 and 1")),
            }
        }
        Self::from_bits(&bits)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shot histogram over the basis states of an `n_qubits` register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts {
    n_qubits: usize,
    map: BTreeMap<usize, u64>,
}

impl Counts {
    pub fn new(n_qubits: usize) -> Self {
        Counts {
            n_qubits,
            map: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add(&mut self, index: usize, count: u64) -> Result<()> {
        if index >> self.n_qubits != 0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "basis index {index} does not fit in {} bits",
                self.n_qubits
            )));
        }
        if count > 0 {
            *self.map.entry(index).or_insert(0) += count;
        }
        Ok(())
    }

    /// Builds a histogram from `(bitstring, count)` pairs.
    pub fn from_pairs<'a>(
        n_qubits: usize,
        pairs: impl IntoIterator<Item = (&'a str, u64)>,
    ) -> Result<Self> {
        let mut counts = Counts::new(n_qubits);
        for (s, c) in pairs {
            let b: Bitstring = s.parse()?;
            if b.len() != n_qubits {
                return Err(Error::LengthMismatch {
                    expected: n_qubits,
                    actual: b.len(),
                });
            }
            counts.add(b.index(), c)?;
        }
        Ok(counts)
    }

    pub fn total(&self) -> u64 {
        self.map.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, index: usize) -> u64 {
        self.map.get(&index).copied().unwrap_or(0)
    }

    /// `(basis index, count)` pairs in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.map.iter().map(|(&i, &c)| (i, c))
    }

    /// Modal bitstring; ties go to the lexicographically smallest string.
    pub fn most_likely(&self) -> Option<Bitstring> {
        let mut best: Option<(u64, Bitstring)> = None;
        for (index, count) in self.iter() {
            let b = Bitstring {
                len: self.n_qubits,
                index,
            };
            best = match best {
                Some((bc, bb)) if bc > count || (bc == count && bb < b) => Some((bc, bb)),
                _ => Some((count, b)),
            };
        }
        best.map(|(_, b)| b)
    }
}
