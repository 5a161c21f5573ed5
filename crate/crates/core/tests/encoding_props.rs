use num_complex::Complex64;
use proptest::prelude::*;
use sha_core::ansatz::qaoa_circuit_layers;
use sha_core::bits::Bitstring;
use sha_core::graph::Graph;
use sha_core::hamiltonian::{DiagonalHamiltonian, PauliTerm};
use sha_core::instances::{
    brute_force_oracle, coloring_hamiltonian, decode_coloring, encode_coloring, maxcut_hamiltonian,
};
use sha_core::simulator::{run_circuit, Statevector};

fn graph(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let k = pairs.len();
        prop::collection::vec(any::<bool>(), k).prop_map(move |keep| {
            let edges = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e);
            Graph::new(n, edges).unwrap()
        })
    })
}

fn monochromatic(g: &Graph, colors: &[usize]) -> usize {
    g.edges().iter().filter(|&&(u, v)| colors[u] == colors[v]).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn coloring_energy_counts_conflicts(g in graph(6), k in prop::sample::select(vec![2usize, 4])) {
        let m = k.trailing_zeros() as usize;
        let inst = coloring_hamiltonian(&g, k).unwrap();
        let h = inst.hamiltonian();
        let unit = 4f64.powi(m as i32);
        for (idx, e) in h.energies().into_iter().enumerate() {
            let bits = Bitstring::from_index(h.n_qubits(), idx).unwrap();
            let colors = decode_coloring(&bits, m).unwrap();
            prop_assert_eq!(e, unit * monochromatic(&g, &colors) as f64);
            prop_assert_eq!(encode_coloring(&colors, m).unwrap(), bits);
        }
        prop_assert_eq!(inst.n_terms(), k * g.n_edges());
    }

    #[test]
    fn maxcut_energy_is_twice_the_cut(g in graph(10)) {
        let inst = maxcut_hamiltonian(&g).unwrap();
        let h = inst.hamiltonian();
        for (idx, e) in h.energies().into_iter().enumerate() {
            let cut = g.edges().iter().filter(|&&(u, v)| (idx >> u) & 1 != (idx >> v) & 1).count();
            prop_assert_eq!(e, 2.0 * cut as f64);
            prop_assert_eq!(inst.objective().energy_of_index(idx), -e);
        }
    }

    #[test]
    fn partial_hamiltonians_add_up(g in graph(5), split in any::<prop::sample::Index>()) {
        let inst = coloring_hamiltonian(&g, 2).unwrap();
        let h = inst.hamiltonian();
        let n = h.n_terms();
        let cut = if n == 0 { 0 } else { split.index(n + 1) };
        let a: Vec<usize> = (0..cut).collect();
        let b: Vec<usize> = (cut..n).collect();
        let ha = h.partial_hamiltonian(&a).unwrap();
        let hb = h.partial_hamiltonian(&b).unwrap();
        let full = h.partial_hamiltonian(&(0..n).collect::<Vec<_>>()).unwrap();
        for idx in 0..1usize << h.n_qubits() {
            let sum = ha.energy_of_index(idx) + hb.energy_of_index(idx) - h.offset();
            prop_assert!((sum - h.energy_of_index(idx)).abs() < 1e-9);
            prop_assert_eq!(full.energy_of_index(idx), h.energy_of_index(idx));
        }
    }

    #[test]
    fn qaoa_cost_block_applies_phases(g in graph(6), gamma in -2.0f64..2.0) {
        // One layer with beta = 0 leaves exp(-i gamma H)|+...+>, up to a global phase.
        let inst = maxcut_hamiltonian(&g).unwrap();
        let h = inst.hamiltonian();
        let c = qaoa_circuit_layers(&[h]).unwrap();
        let out = run_circuit(&c, &[gamma, 0.0], None).unwrap();
        let n = h.n_qubits();
        let amp = 1.0 / ((1usize << n) as f64).sqrt();
        let expected: Vec<Complex64> = h
            .energies()
            .iter()
            .map(|&e| Complex64::from_polar(amp, -gamma * e))
            .collect();
        let expected = Statevector::from_amplitudes(expected).unwrap();
        prop_assert!((out.fidelity(&expected) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn triangle_four_colorings() {
    let inst = coloring_hamiltonian(&Graph::complete(3), 4).unwrap();
    let o = brute_force_oracle(&inst).unwrap();
    assert_eq!(o.valid_count, 24);
    assert_eq!(o.valid_ratio, 24.0 / 64.0);
    assert_eq!(o.optimum_energy, 0.0);
}

#[test]
fn uniform_state_accuracy_matches_valid_ratio() {
    let inst = coloring_hamiltonian(&Graph::complete(3), 4).unwrap();
    let o = brute_force_oracle(&inst).unwrap();
    let state = Statevector::plus(6).unwrap();
    let counts = sha_core::simulator::sample(&state, 100_000, 5);
    let acc = sha_core::metrics::overall_accuracy(&counts, &o, inst.kind()).unwrap();
    let p = 24.0 / 64.0;
    let sigma = (p * (1.0 - p) / 100_000.0f64).sqrt();
    assert!((acc - p).abs() < 3.0 * sigma, "{acc}");
}

#[test]
fn hamiltonian_json_round_trip() {
    let h = DiagonalHamiltonian::new(
        3,
        0.5,
        vec![PauliTerm::new(-1.25, vec![0, 2]).unwrap(), PauliTerm::identity(2.0).unwrap()],
    )
    .unwrap();
    let s = serde_json::to_string(&h).unwrap();
    let back: DiagonalHamiltonian = serde_json::from_str(&s).unwrap();
    assert_eq!(back, h);
    assert_eq!(back.energies(), h.energies());
}
