//! Layered hardware-efficient templates and the QAOA circuit.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalHamiltonian;
use crate::simulator::{Gate, GateKind, ParamCircuit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn gate_kind(self) -> GateKind {
        match self {
            Axis::X => GateKind::RX,
            Axis::Y => GateKind::RY,
            Axis::Z => GateKind::RZ,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    None,
    /// `(0,1), (1,2), ..., (n-2,n-1)`
    Ladder,
    /// Ladder closed by `(n-1, 0)` when `n > 2`.
    Ring,
    /// Every pair `(i, j)`, `i < j`.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntanglerGate {
    Cnot,
    Cz,
}

/// A layer recipe.
///
/// `rotation_axes` holds one per-qubit rotation pattern per layer, cycled
/// with the layer index; all patterns have the same length.
///
/// When `identity_at_zero` is set a layer is `E . R(theta) . E^-1`, with `E`
/// the entangling block, so the layer collapses to the identity at
/// `theta = 0`. Otherwise a layer is `R(theta)` followed by `E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzTemplate {
    pub id: String,
    pub rotation_axes: Vec<Vec<Axis>>,
    pub topology: Topology,
    pub entangler: EntanglerGate,
    pub identity_at_zero: bool,
}

impl AnsatzTemplate {
    fn new(
        id: &str,
        rotation_axes: Vec<Vec<Axis>>,
        topology: Topology,
        entangler: EntanglerGate,
        identity_at_zero: bool,
    ) -> Self {
        AnsatzTemplate {
            id: id.into(),
            rotation_axes,
            topology,
            entangler,
            identity_at_zero,
        }
    }

    /// The shipped catalog. Every template except `ryrz_cz` is identity at
    /// zero.
    pub fn catalog() -> Vec<AnsatzTemplate> {
        use Axis::*;
        use EntanglerGate::*;
        alloc::vec![
            Self::new("rxrz", alloc::vec![alloc::vec![X, Z]], Topology::None, Cnot, true),
            Self::new("ry_ladder_cnot", alloc::vec![alloc::vec![Y]], Topology::Ladder, Cnot, true),
            Self::new("ry_ring_cz", alloc::vec![alloc::vec![Y]], Topology::Ring, Cz, true),
            Self::new(
                "rx_rz_alt_ring_cnot",
                alloc::vec![alloc::vec![X], alloc::vec![Z]],
                Topology::Ring,
                Cnot,
                true
            ),
            Self::new("ry_full_cz", alloc::vec![alloc::vec![Y]], Topology::Full, Cz, true),
            Self::new("ryrz_ladder_cnot", alloc::vec![alloc::vec![Y, Z]], Topology::Ladder, Cnot, true),
            Self::new("ryrz_cz", alloc::vec![alloc::vec![Y, Z]], Topology::Ladder, Cz, false),
        ]
    }

    pub fn ids() -> Vec<String> {
        Self::catalog().into_iter().map(|t| t.id).collect()
    }

    pub fn rotations_per_qubit(&self) -> usize {
        self.rotation_axes.first().map_or(0, Vec::len)
    }

    pub fn params_per_layer(&self, n_qubits: usize) -> usize {
        n_qubits * self.rotations_per_qubit()
    }

    fn entangler_pairs(&self, n: usize) -> Vec<(usize, usize)> {
        match self.topology {
            Topology::None => Vec::new(),
            Topology::Ladder => (1..n).map(|q| (q - 1, q)).collect(),
            Topology::Ring => {
                let mut pairs: Vec<_> = (1..n).map(|q| (q - 1, q)).collect();
                if n > 2 {
                    pairs.push((n - 1, 0));
                }
                pairs
            }
            Topology::Full => (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .collect(),
        }
    }

    fn entangler_gate(&self, (a, b): (usize, usize)) -> Gate {
        match self.entangler {
            EntanglerGate::Cnot => Gate::cnot(a, b),
            EntanglerGate::Cz => Gate::cz(a, b),
        }
    }
}

impl FromStr for AnsatzTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::catalog()
            .into_iter()
            .find(|t| t.id == s)
            .ok_or_else(|| Error::parse(s, "unknown ansatz template"))
    }
}

impl fmt::Display for AnsatzTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// `layers` repetitions of the template. Layer `l` owns the contiguous
/// parameter block `l * params_per_layer ..`.
pub fn build_ansatz(t: &AnsatzTemplate, n_qubits: usize, layers: usize) -> Result<ParamCircuit> {
    if layers == 0 {
        return Err(Error::InvalidArgument("an ansatz needs at least one layer".into()));
    }
    if t.rotation_axes.is_empty()
        || t.rotation_axes.iter().any(|p| p.len() != t.rotations_per_qubit())
    {
        return Err(Error::InvalidArgument(alloc::format!(
            "template `{}` has inconsistent rotation patterns",
            t.id
        )));
    }
    let pairs = t.entangler_pairs(n_qubits);
    let mut gates = Vec::new();
    let mut boundaries = Vec::with_capacity(layers);
    let mut next_param = 0;
    for layer in 0..layers {
        boundaries.push(gates.len());
        let pattern = &t.rotation_axes[layer % t.rotation_axes.len()];
        let mut rotations = Vec::with_capacity(n_qubits * pattern.len());
        for q in 0..n_qubits {
            for axis in pattern {
                rotations.push(Gate::rotation(axis.gate_kind(), q, next_param));
                next_param += 1;
            }
        }
        if t.identity_at_zero {
            gates.extend(pairs.iter().map(|&p| t.entangler_gate(p)));
            gates.extend(rotations);
            gates.extend(pairs.iter().rev().map(|&p| t.entangler_gate(p)));
        } else {
            gates.extend(rotations);
            gates.extend(pairs.iter().map(|&p| t.entangler_gate(p)));
        }
    }
    if gates.is_empty() {
        boundaries.truncate(1);
    }
    ParamCircuit::new(n_qubits, gates, next_param, boundaries)
}

/// Prepends one `RY` per qubit as a new first layer. The new parameters take
/// slots `0..n_qubits`; existing slots shift up by `n_qubits`.
pub fn prepend_ry_layer(c: &ParamCircuit) -> Result<ParamCircuit> {
    let n = c.n_qubits();
    let mut gates: Vec<Gate> = (0..n).map(|q| Gate::ry(q, q)).collect();
    gates.extend(c.gates().iter().map(|g| {
        let mut g = g.clone();
        if let Some(p) = g.param.as_mut() {
            *p += n;
        }
        g
    }));
    let mut boundaries = alloc::vec![0];
    boundaries.extend(c.layer_boundaries().iter().map(|&b| b + n));
    if n == 0 {
        boundaries.truncate(1);
    }
    ParamCircuit::new(n, gates, c.n_params() + n, boundaries)
}

/// Depth-`p` QAOA for a diagonal cost Hamiltonian:
/// `U_M(beta_p) U_C(gamma_p) ... U_M(beta_1) U_C(gamma_1) H^n`.
///
/// Parameters are ordered `(gamma_1, beta_1, ..., gamma_p, beta_p)`.
/// `U_C(gamma) = exp(-i gamma H)` is built term by term: a Z-string on
/// qubits `q_1 < ... < q_r` becomes a CNOT chain onto `q_r`, `RZ(2 c gamma)`
/// and the reversed chain; identity terms only add a global phase and are
/// skipped. `U_M(beta) = prod_q RX(2 beta)`.
pub fn qaoa_circuit(h: &DiagonalHamiltonian, p: usize) -> Result<ParamCircuit> {
    if p == 0 {
        return Err(Error::InvalidArgument("QAOA depth must be at least 1".into()));
    }
    let layers: Vec<&DiagonalHamiltonian> = core::iter::repeat(h).take(p).collect();
    qaoa_circuit_layers(&layers)
}

/// QAOA whose `l`-th cost block uses `costs[l]`. All costs must act on the
/// same register.
pub fn qaoa_circuit_layers(costs: &[&DiagonalHamiltonian]) -> Result<ParamCircuit> {
    let n = match costs.first() {
        Some(h) => h.n_qubits(),
        None => return Err(Error::InvalidArgument("QAOA depth must be at least 1".into())),
    };
    if costs.iter().any(|h| h.n_qubits() != n) {
        return Err(Error::InvalidArgument("QAOA cost layers act on different registers".into()));
    }
    let mut gates: Vec<Gate> = (0..n).map(Gate::h).collect();
    let mut boundaries = Vec::with_capacity(costs.len());
    for (layer, h) in costs.iter().enumerate() {
        boundaries.push(if layer == 0 { 0 } else { gates.len() });
        let gamma = 2 * layer;
        let beta = gamma + 1;
        let before = gates.len();
        for term in h.terms().iter().filter(|t| !t.is_identity()) {
            let q = &term.qubits;
            let last = q[q.len() - 1];
            for w in q.windows(2) {
                gates.push(Gate::cnot(w[0], w[1]));
            }
            gates.push(Gate::rz(last, gamma).with_scale(2.0 * term.coeff));
            for w in q.windows(2).rev() {
                gates.push(Gate::cnot(w[0], w[1]));
            }
        }
        if gates.len() == before && n > 0 {
            // Constant cost: keep gamma as a (no-op) slot so the layout is
            // the same for every Hamiltonian.
            gates.push(Gate::rz(0, gamma).with_scale(0.0));
        }
        for q in 0..n {
            gates.push(Gate::rx(q, beta).with_scale(2.0));
        }
    }
    ParamCircuit::new(n, gates, 2 * costs.len(), boundaries)
}

/// Linear-ramp start: `gamma_i = i / p`, `beta_i = 1 - i / p`, interleaved
/// as `(gamma_1, beta_1, ..., gamma_p, beta_p)`.
pub fn qaoa_initial_params(p: usize) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(Error::InvalidArgument("QAOA depth must be at least 1".into()));
    }
    let pf = p as f64;
    Ok((1..=p)
        .flat_map(|i| {
            [i as f64 / pf, (p - i) as f64 / pf]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::PauliTerm;
    use crate::simulator::{run_circuit, Statevector};
    use alloc::vec;

    #[test]
    fn parameter_counts() {
        let t: AnsatzTemplate = "ry_ring_cz".parse().unwrap();
        let c = build_ansatz(&t, 4, 3).unwrap();
        assert_eq!(c.n_params(), 12);
        assert_eq!(c.n_layers(), 3);
        for t in AnsatzTemplate::catalog() {
            let c = build_ansatz(&t, 5, 1).unwrap();
            assert_eq!(c.layer_boundaries(), &[0]);
            assert_eq!(c.n_params(), t.params_per_layer(5));
        }
        assert!(build_ansatz(&t, 4, 0).is_err());
        assert!("nope".parse::<AnsatzTemplate>().is_err());
    }

    #[test]
    fn catalog_has_one_non_identity_template() {
        let cat = AnsatzTemplate::catalog();
        assert_eq!(cat.len(), 7);
        assert_eq!(cat.iter().filter(|t| !t.identity_at_zero).count(), 1);
    }

    #[test]
    fn layer_params_are_contiguous_blocks() {
        let t: AnsatzTemplate = "ryrz_ladder_cnot".parse().unwrap();
        let c = build_ansatz(&t, 3, 3).unwrap();
        for l in 0..3 {
            assert_eq!(c.layer_params(l), (l * 6..l * 6 + 6).collect::<Vec<_>>());
        }
    }

    #[test]
    fn prepend_shifts_parameters() {
        let t: AnsatzTemplate = "ry_ring_cz".parse().unwrap();
        let c = build_ansatz(&t, 4, 3).unwrap();
        let p = prepend_ry_layer(&c).unwrap();
        assert_eq!(p.n_params(), 16);
        assert_eq!(p.n_layers(), 4);
        assert_eq!(p.layer_params(0), vec![0, 1, 2, 3]);
        assert_eq!(p.layer_params(1), vec![4, 5, 6, 7]);
    }

    #[test]
    fn qaoa_shape_and_ramp() {
        let h = DiagonalHamiltonian::new(2, 0.0, vec![PauliTerm::new(1.0, vec![0, 1]).unwrap()]).unwrap();
        assert_eq!(qaoa_circuit(&h, 3).unwrap().n_params(), 6);
        let p3 = qaoa_initial_params(3).unwrap();
        assert_eq!(p3, vec![1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0]);
        assert_eq!(qaoa_initial_params(1).unwrap(), vec![1.0, 0.0]);
        assert_eq!(qaoa_initial_params(2).unwrap(), vec![0.5, 0.5, 1.0, 0.0]);
        assert!(qaoa_initial_params(0).is_err());

        let c = qaoa_circuit(&h, 1).unwrap();
        let out = run_circuit(&c, &[0.0, 0.0], None).unwrap();
        assert!((out.fidelity(&Statevector::plus(2).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qaoa_constant_cost_keeps_gamma_slot() {
        let h = DiagonalHamiltonian::new(2, 0.0, vec![PauliTerm::identity(3.0).unwrap()]).unwrap();
        let c = qaoa_circuit(&h, 2).unwrap();
        assert_eq!(c.n_params(), 4);
    }
}
