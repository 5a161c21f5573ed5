//! Problem encoders (graph coloring, Max-Cut) and brute-force ground truth.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hamiltonian::{DiagonalHamiltonian, PauliTerm};
use crate::MAX_QUBITS;

/// Written `coloring:<k>` or `maxcut`, also in serialized form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// Satisfiability version of k-coloring, `k` a power of two.
    Coloring { colors: usize },
    MaxCut,
}

impl ProblemKind {
    pub fn is_maxcut(&self) -> bool {
        matches!(self, ProblemKind::MaxCut)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::Coloring { colors } => write!(f, "coloring:{colors}"),
            ProblemKind::MaxCut => f.write_str("maxcut"),
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "maxcut" {
            return Ok(ProblemKind::MaxCut);
        }
        match s.strip_prefix("coloring:").map(str::parse::<usize>) {
            Some(Ok(colors)) => Ok(ProblemKind::Coloring { colors }),
            _ => Err(Error::parse(s, "expected `maxcut` or `coloring:<k>`")),
        }
    }
}

impl Serialize for ProblemKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProblemKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A graph problem together with its cost Hamiltonian.
///
/// Every Hamiltonian term stems from exactly one edge; `term_edges[i]` is the
/// index (into `graph.edges()`) of the edge that produced term `i`. Identity
/// terms are kept as ordinary terms of their edge so that any partial sum is
/// an exact restriction of the full cost.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub id: String,
    graph: Graph,
    kind: ProblemKind,
    hamiltonian: DiagonalHamiltonian,
    objective: DiagonalHamiltonian,
    qubit_layout: Vec<Vec<usize>>,
    term_edges: Vec<usize>,
}

impl ProblemInstance {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    /// The problem Hamiltonian: for coloring, `4^m` per monochromatic edge;
    /// for Max-Cut, twice the cut size.
    pub fn hamiltonian(&self) -> &DiagonalHamiltonian {
        &self.hamiltonian
    }

    /// The Hamiltonian that training minimizes. Equal to
    /// [`hamiltonian`](Self::hamiltonian) for coloring and to its negation
    /// for Max-Cut. Term indices coincide.
    pub fn objective(&self) -> &DiagonalHamiltonian {
        &self.objective
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn n_terms(&self) -> usize {
        self.hamiltonian.n_terms()
    }

    /// Qubits owned by each node.
    pub fn qubit_layout(&self) -> &[Vec<usize>] {
        &self.qubit_layout
    }

    pub fn term_edges(&self) -> &[usize] {
        &self.term_edges
    }

    /// Edge `(u, v)` that produced term `term`.
    pub fn term_edge(&self, term: usize) -> (usize, usize) {
        self.graph.edges()[self.term_edges[term]]
    }

    /// Indices of the terms whose edge touches any node in `nodes`.
    pub fn terms_touching(&self, nodes: &[usize]) -> Vec<usize> {
        (0..self.n_terms())
            .filter(|&t| {
                let (u, v) = self.term_edge(t);
                nodes.contains(&u) || nodes.contains(&v)
            })
            .collect()
    }

    /// Bits per node: `log2 k` for coloring, 1 for Max-Cut.
    pub fn bits_per_node(&self) -> usize {
        match self.kind {
            ProblemKind::Coloring { colors } => colors.trailing_zeros() as usize,
            ProblemKind::MaxCut => 1,
        }
    }

    /// Cut size of a basis state (Max-Cut layout: node `v` is qubit `v`).
    pub fn cut_of_index(&self, index: usize) -> usize {
        self.graph.cut_size(|v| (index >> v) & 1 == 1)
    }

    pub fn build(graph: &Graph, kind: ProblemKind) -> Result<Self> {
        match kind {
            ProblemKind::Coloring { colors } => coloring_hamiltonian(graph, colors),
            ProblemKind::MaxCut => maxcut_hamiltonian(graph),
        }
    }
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Binary-encoded k-coloring penalty.
///
/// Node `v` owns qubits `v*m .. v*m + m` (`k = 2^m`). Per edge `(v, w)` the
/// penalty `sum_a prod_l (1 + (-1)^{a_l} Z_{v,l})(1 + (-1)^{a_l} Z_{w,l})`
/// collapses to `2^m prod_l (1 + Z_{v,l} Z_{w,l})`, which expands into `k`
/// terms `2^m prod_{l in T} Z_{v,l} Z_{w,l}` over subsets `T` of the bit
/// positions (the empty subset is the edge's identity term). Its value is
/// `4^m` when both endpoints decode to the same color and 0 otherwise.
pub fn coloring_hamiltonian(graph: &Graph, colors: usize) -> Result<ProblemInstance> {
    if colors < 2 || !colors.is_power_of_two() {
        return Err(Error::ColorCountNotPowerOfTwo(colors));
    }
    let m = colors.trailing_zeros() as usize;
    let n_qubits = graph.n_nodes() * m;
    check_register(n_qubits)?;
    let coeff = colors as f64;
    let mut terms = Vec::with_capacity(graph.n_edges() * colors);
    let mut term_edges = Vec::with_capacity(graph.n_edges() * colors);
    for (e, &(v, w)) in graph.edges().iter().enumerate() {
        for subset in 0..colors {
            let mut qubits = Vec::with_capacity(2 * m);
            for l in (0..m).filter(|l| subset >> l & 1 == 1) {
                qubits.push(v * m + l);
                qubits.push(w * m + l);
            }
            terms.push(PauliTerm::new(coeff, qubits)?);
            term_edges.push(e);
        }
    }
    let hamiltonian = DiagonalHamiltonian::new(n_qubits, 0.0, terms)?;
    let qubit_layout = (0..graph.n_nodes())
        .map(|v| (v * m..v * m + m).collect())
        .collect();
    Ok(ProblemInstance {
        id: String::new(),
        graph: graph.clone(),
        kind: ProblemKind::Coloring { colors },
        objective: hamiltonian.clone(),
        hamiltonian,
        qubit_layout,
        term_edges,
    })
}

/// `sum_{(v,w)} (1 - Z_v Z_w)`, two terms per edge, energy `2 * cut`.
pub fn maxcut_hamiltonian(graph: &Graph) -> Result<ProblemInstance> {
    let n_qubits = graph.n_nodes();
    check_register(n_qubits)?;
    let mut terms = Vec::with_capacity(2 * graph.n_edges());
    let mut term_edges = Vec::with_capacity(2 * graph.n_edges());
    for (e, &(v, w)) in graph.edges().iter().enumerate() {
        terms.push(PauliTerm::identity(1.0)?);
        terms.push(PauliTerm::new(-1.0, alloc::vec![v, w])?);
        term_edges.extend([e, e]);
    }
    let hamiltonian = DiagonalHamiltonian::new(n_qubits, 0.0, terms)?;
    Ok(ProblemInstance {
        id: String::new(),
        graph: graph.clone(),
        kind: ProblemKind::MaxCut,
        objective: hamiltonian.scaled(-1.0),
        hamiltonian,
        qubit_layout: (0..n_qubits).map(|v| alloc::vec![v]).collect(),
        term_edges,
    })
}

/// Exhaustive ground truth for an instance.
///
/// For coloring, `valid_count` counts zero-energy (proper) colorings and
/// `optimizer_args` holds the minimum-energy states. For Max-Cut,
/// `optimizer_args` holds the maximum-cut states and `valid_count` their
/// number. In both cases `valid_ratio = valid_count / 2^n_qubits`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawOracle")]
pub struct OracleReport {
    pub kind: ProblemKind,
    pub n_qubits: usize,
    pub valid_count: u64,
    pub valid_ratio: f64,
    pub optimum_energy: f64,
    /// Sorted by basis index.
    pub optimizer_args: Vec<Bitstring>,
}

#[derive(Deserialize)]
struct RawOracle {
    kind: ProblemKind,
    n_qubits: usize,
    valid_count: u64,
    valid_ratio: f64,
    optimum_energy: f64,
    optimizer_args: Vec<Bitstring>,
}

impl From<RawOracle> for OracleReport {
    fn from(raw: RawOracle) -> Self {
        let mut optimizer_args = raw.optimizer_args;
        optimizer_args.sort_by_key(Bitstring::index);
        OracleReport {
            kind: raw.kind,
            n_qubits: raw.n_qubits,
            valid_count: raw.valid_count,
            valid_ratio: raw.valid_ratio,
            optimum_energy: raw.optimum_energy,
            optimizer_args,
        }
    }
}

impl OracleReport {
    /// Whether basis state `index` counts as a solution: a proper coloring,
    /// or a maximum cut.
    pub fn is_solution(&self, index: usize) -> bool {
        if let ProblemKind::Coloring { .. } = self.kind {
            if self.optimum_energy != 0.0 {
                return false;
            }
        }
        self.optimizer_args
            .binary_search_by_key(&index, Bitstring::index)
            .is_ok()
    }

    /// Maximum cut size, for Max-Cut reports.
    pub fn optimum_cut(&self) -> Option<usize> {
        match self.kind {
            ProblemKind::MaxCut => Some(libm::round(self.optimum_energy / 2.0) as usize),
            ProblemKind::Coloring { .. } => None,
        }
    }
}

pub fn brute_force_oracle(instance: &ProblemInstance) -> Result<OracleReport> {
    let n = instance.n_qubits();
    check_register(n)?;
    let h = instance.hamiltonian();
    let energies = h.energies();
    let (optimum_energy, valid_count, optimizer_args) = match instance.kind() {
        ProblemKind::Coloring { .. } => {
            let best = energies.iter().copied().fold(f64::INFINITY, f64::min);
            let args = arg_equal(&energies, best, n)?;
            let valid = if best == 0.0 { args.len() as u64 } else { 0 };
            (best, valid, args)
        }
        ProblemKind::MaxCut => {
            let best = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let args = arg_equal(&energies, best, n)?;
            (best, args.len() as u64, args)
        }
    };
    Ok(OracleReport {
        kind: instance.kind(),
        n_qubits: n,
        valid_count,
        valid_ratio: valid_count as f64 / (1u64 << n) as f64,
        optimum_energy,
        optimizer_args,
    })
}

fn arg_equal(energies: &[f64], target: f64, n: usize) -> Result<Vec<Bitstring>> {
    energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == target)
        .map(|(i, _)| Bitstring::from_index(n, i))
        .collect()
}

/// Node colors from a coloring bitstring. Node `v`'s color is its `m`-bit
/// block read with the first printed bit as the most significant one.
pub fn decode_coloring(bits: &Bitstring, m: usize) -> Result<Vec<usize>> {
    if m == 0 || bits.len() % m != 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "bitstring of length {} does not split into {m}-bit blocks",
            bits.len()
        )));
    }
    Ok((0..bits.len() / m)
        .map(|v| (0..m).fold(0, |c, l| (c << 1) | bits.bit(v * m + l) as usize))
        .collect())
}

/// Inverse of [`decode_coloring`].
pub fn encode_coloring(colors: &[usize], m: usize) -> Result<Bitstring> {
    let mut bits = Vec::with_capacity(colors.len() * m);
    for &c in colors {
        if m == 0 || c >> m != 0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "color {c} does not fit in {m} bits"
            )));
        }
        bits.extend((0..m).map(|l| (c >> (m - 1 - l)) & 1 == 1));
    }
    Bitstring::from_bits(&bits)
}
