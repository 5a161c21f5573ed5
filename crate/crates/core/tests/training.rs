use sha_core::ansatz::{build_ansatz, qaoa_initial_params, AnsatzTemplate};
use sha_core::graph::Graph;
use sha_core::instances::{brute_force_oracle, coloring_hamiltonian, maxcut_hamiltonian};
use sha_core::partition::{nodewise_partition, sequential_partition};
use sha_core::simulator::run_circuit;
use sha_core::training::{
    train, train_layer_vqe, train_layerwise, train_qaoa, train_sha, train_sha_hybrid, train_vqe,
    HybridBase, Method, TrainConfig,
};

fn template(id: &str) -> AnsatzTemplate {
    id.parse().unwrap()
}

fn edge() -> Graph {
    Graph::new(2, [(0, 1)]).unwrap()
}

#[test]
fn vqe_solves_single_edge_coloring() {
    let inst = coloring_hamiltonian(&edge(), 2).unwrap();
    let c = build_ansatz(&template("ry_ring_cz"), 2, 2).unwrap();
    let rec = train_vqe(&inst, &c, 3, &TrainConfig::default()).unwrap();
    assert!(rec.final_expectation < 0.5, "{}", rec.final_expectation);
    assert!(!rec.loss_trace.is_empty());
    assert!(rec.total_iterations <= 4000);
    assert_eq!(rec.total_iterations, rec.loss_trace.len());
    assert_eq!(rec.snapshots.len(), rec.loss_trace.len());
}

#[test]
fn vqe_initial_loss_is_zero_state_energy() {
    // |00> colors both nodes alike: energy 4, sampled exactly.
    let inst = coloring_hamiltonian(&edge(), 2).unwrap();
    let c = build_ansatz(&template("ry_ladder_cnot"), 2, 1).unwrap();
    let rec = train_vqe(&inst, &c, 0, &TrainConfig::default()).unwrap();
    assert_eq!(rec.loss_trace[0], (0, 4.0));
}

#[test]
fn qaoa_single_edge_maxcut() {
    let inst = maxcut_hamiltonian(&edge()).unwrap();
    for seed in 0..5 {
        let rec = train_qaoa(&inst, 1, seed, &TrainConfig::default()).unwrap();
        let cut = rec.final_expected_cut().unwrap();
        assert!(cut >= 0.9, "seed {seed}: expected cut {cut}");
        assert_eq!(rec.final_params.len(), 2);
    }
}

#[test]
fn qaoa_starts_from_ramp_and_is_reproducible() {
    let inst = maxcut_hamiltonian(&Graph::path(3)).unwrap();
    let a = train_qaoa(&inst, 3, 11, &TrainConfig::default()).unwrap();
    let b = train_qaoa(&inst, 3, 11, &TrainConfig::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.stages[0].params_in, qaoa_initial_params(3).unwrap());
    assert_eq!(a.final_params.len(), 6);
}

#[test]
fn sha_chains_stage_parameters() {
    let g = Graph::path(4);
    let inst = coloring_hamiltonian(&g, 2).unwrap();
    let c = build_ansatz(&template("ry_ring_cz"), 4, 2).unwrap();
    let sched = nodewise_partition(&inst, 3).unwrap();
    let rec = train_sha(&inst, &c, &sched, 5, &TrainConfig::default()).unwrap();
    assert_eq!(rec.stages.len(), sched.n_stages());
    assert!(rec.stages[0].params_in.iter().all(|&p| p == 0.0));
    for w in rec.stages.windows(2) {
        assert_eq!(w[0].params_out, w[1].params_in);
    }
    let last = rec.stages.last().unwrap();
    assert_eq!(last.n_terms, inst.n_terms());
    assert_eq!(last.progress_threshold, 1e-6);
    assert!(rec.stages[..rec.stages.len() - 1].iter().all(|s| s.progress_threshold == 0.8));
    assert_eq!(rec.total_iterations, rec.stages.iter().map(|s| s.iterations).sum::<usize>());
    assert_eq!(rec.final_params, last.params_out);
}

#[test]
fn sha_budgets_respect_global_cap() {
    let inst = coloring_hamiltonian(&Graph::path(4), 2).unwrap();
    let c = build_ansatz(&template("ry_full_cz"), 4, 2).unwrap();
    let sched = sequential_partition(inst.n_terms(), 3).unwrap();
    let mut cfg = TrainConfig::default();
    cfg.optimizer.max_iterations = 90;
    let rec = train_sha(&inst, &c, &sched, 0, &cfg).unwrap();
    let budgets: Vec<_> = rec.stages.iter().map(|s| s.budget).collect();
    assert_eq!(budgets, vec![30, 30, 30]);
    assert!(rec.total_iterations <= 90);
    assert!(rec.stages.iter().all(|s| s.iterations <= s.budget));
}

#[test]
fn single_stage_sha_matches_vqe_objective() {
    let inst = coloring_hamiltonian(&edge(), 2).unwrap();
    let c = build_ansatz(&template("ry_ring_cz"), 2, 1).unwrap();
    let sched = sequential_partition(inst.n_terms(), 1).unwrap();
    let sha = train_sha(&inst, &c, &sched, 9, &TrainConfig::default()).unwrap();
    let vqe = train_vqe(&inst, &c, 9, &TrainConfig::default()).unwrap();
    // Same objective, same threshold, same shot streams.
    assert_eq!(sha.loss_trace, vqe.loss_trace);
    assert_eq!(sha.final_params, vqe.final_params);
}

#[test]
fn layerwise_freezes_older_layers() {
    let inst = coloring_hamiltonian(&Graph::path(3), 2).unwrap();
    let t = template("ry_ladder_cnot");
    let rec = train_layerwise(&inst, &t, 3, 1, &TrainConfig::default()).unwrap();
    assert_eq!(rec.stages.len(), 4);
    let per = t.params_per_layer(3);
    for (l, st) in rec.stages[..3].iter().enumerate() {
        assert_eq!(st.trainable, per);
        assert_eq!(st.params_in.len(), (l + 1) * per);
        // Older layers pass through untouched.
        assert_eq!(st.params_in[..l * per], st.params_out[..l * per]);
        // The new layer enters at zero.
        assert!(st.params_in[l * per..].iter().all(|&p| p == 0.0));
    }
    assert_eq!(rec.stages[3].trainable, 3 * per);
    assert_eq!(rec.ansatz.as_deref(), Some("ry_ladder_cnot"));
}

#[test]
fn added_layer_keeps_the_state() {
    let inst = coloring_hamiltonian(&Graph::path(3), 2).unwrap();
    let t = template("rx_rz_alt_ring_cnot");
    let rec = train_layerwise(&inst, &t, 2, 4, &TrainConfig::default()).unwrap();
    let n = inst.n_qubits();
    let before = run_circuit(&build_ansatz(&t, n, 1).unwrap(), &rec.stages[0].params_out, None).unwrap();
    let after = run_circuit(&build_ansatz(&t, n, 2).unwrap(), &rec.stages[1].params_in, None).unwrap();
    assert!((before.fidelity(&after) - 1.0).abs() < 1e-10);
}

#[test]
fn layer_vqe_parameter_growth() {
    let inst = coloring_hamiltonian(&edge(), 2).unwrap();
    let t = template("ry_ring_cz");
    let rec = train_layer_vqe(&inst, &t, 3, 2, &TrainConfig::default()).unwrap();
    assert_eq!(rec.stages.len(), 3);
    assert_eq!(rec.final_params.len(), 2 + 3 * t.params_per_layer(2));
    for (l, st) in rec.stages.iter().enumerate() {
        assert_eq!(st.trainable, 2 + (l + 1) * t.params_per_layer(2));
    }
}

#[test]
fn layer_vqe_solves_single_edge() {
    let inst = coloring_hamiltonian(&edge(), 2).unwrap();
    let t = template("ry_ladder_cnot");
    for seed in 0..5 {
        let rec = train_layer_vqe(&inst, &t, 2, seed, &TrainConfig::default()).unwrap();
        assert!(rec.final_expectation < 0.5, "seed {seed}: {}", rec.final_expectation);
    }
}

#[test]
fn hybrid_stage_counts() {
    let inst = coloring_hamiltonian(&Graph::path(3), 2).unwrap();
    let t = template("ry_ring_cz");
    let sched = sequential_partition(inst.n_terms(), 2).unwrap();
    let cfg = TrainConfig::default();
    let ll = train_sha_hybrid(HybridBase::Layerwise { template: &t, layers: 2 }, &inst, &sched, 0, &cfg).unwrap();
    assert_eq!(ll.stages.len(), 2 * 2 + 1);
    let lv = train_sha_hybrid(HybridBase::LayerVqe { template: &t, layers: 2 }, &inst, &sched, 0, &cfg).unwrap();
    assert_eq!(lv.stages.len(), 2 * 2);
    let labels: Vec<_> = lv.stages.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(labels, ["L1/S1", "L1/S2", "L2/S1", "L2/S2"]);
}

#[test]
fn sha_qaoa_aligns_layers_with_stages() {
    let inst = maxcut_hamiltonian(&Graph::path(7)).unwrap();
    let sched = sequential_partition(inst.n_terms(), 6).unwrap();
    let rec = train_sha_hybrid(HybridBase::Qaoa { p: 3 }, &inst, &sched, 0, &TrainConfig::default()).unwrap();
    let labels: Vec<_> = rec.stages.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(labels, ["p1/S2", "p2/S4", "p3/S6"]);
    let terms: Vec<_> = rec.stages.iter().map(|s| s.n_terms).collect();
    assert_eq!(terms, [sched.cumulative()[1].len(), sched.cumulative()[3].len(), inst.n_terms()]);
    assert_eq!(rec.final_params.len(), 6);
    assert!(rec.total_iterations <= 4000);
}

#[test]
fn dispatcher_labels_records() {
    let inst = maxcut_hamiltonian(&Graph::path(3)).unwrap().with_id("p3");
    let t = template("ry_ring_cz");
    let cfg = TrainConfig::default();
    for m in ["vqe", "sha:nw:2", "ll", "lvqe", "qaoa:2", "sha+ll:sq:2", "sha+lvqe:rd:2", "sha+qaoa:cl:2:2"] {
        let method: Method = m.parse().unwrap();
        let rec = train(&method, &inst, Some(&t), 2, 0, &cfg).unwrap();
        assert_eq!(rec.method, m);
        assert_eq!(rec.instance, "p3");
        assert_eq!(rec.ansatz.is_some(), method.uses_ansatz());
        assert!(rec.total_iterations <= 4000, "{m}");
        assert!((0.0..=1.0).contains(&rec.final_accuracy));
    }
    assert!(train(&"vqe".parse().unwrap(), &inst, None, 2, 0, &cfg).is_err());
}

#[test]
fn final_accuracy_matches_oracle_mass() {
    let inst = maxcut_hamiltonian(&Graph::complete(3)).unwrap();
    let rec = train_qaoa(&inst, 1, 0, &TrainConfig::default()).unwrap();
    let oracle = brute_force_oracle(&inst).unwrap();
    let circuit = sha_core::ansatz::qaoa_circuit(inst.objective(), 1).unwrap();
    let probs = run_circuit(&circuit, &rec.final_params, None).unwrap().probabilities();
    let mass: f64 = oracle.optimizer_args.iter().map(|b| probs[b.index()]).sum();
    assert!((mass - rec.final_accuracy).abs() < 1e-12);
}

#[test]
fn qubit_mismatch_is_rejected() {
    let inst = coloring_hamiltonian(&edge(), 2).unwrap();
    let c = build_ansatz(&template("ry_ring_cz"), 3, 1).unwrap();
    assert!(train_vqe(&inst, &c, 0, &TrainConfig::default()).is_err());
}

#[test]
#[ignore = "directional comparison; both methods saturate near 0.99 on this instance"]
fn nodewise_sha_on_triangle_keeps_up_with_vqe() {
    let inst = coloring_hamiltonian(&Graph::complete(3), 4).unwrap();
    let t = template("ry_ring_cz");
    let cfg = TrainConfig::default();
    let (mut sha, mut vqe) = (0.0, 0.0);
    for seed in 0..5 {
        sha += train(&"sha:nw:3".parse().unwrap(), &inst, Some(&t), 3, seed, &cfg).unwrap().final_accuracy;
        vqe += train(&Method::Vqe, &inst, Some(&t), 3, seed, &cfg).unwrap().final_accuracy;
    }
    eprintln!("sha {} vqe {}", sha / 5.0, vqe / 5.0);
    assert!(sha >= vqe, "sha {} < vqe {}", sha / 5.0, vqe / 5.0);
}
