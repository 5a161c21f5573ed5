use proptest::prelude::*;
use sha_core::graph::gnp_random_graph;
use sha_core::instances::{coloring_hamiltonian, maxcut_hamiltonian, ProblemInstance};
use sha_core::partition::{random_partition, sequential_partition, PartitionSchedule, Strategy as Assembly};

fn check_schedule(s: &PartitionSchedule, n_terms: usize) -> Result<(), TestCaseError> {
    let cum = s.cumulative();
    prop_assert_eq!(cum.len(), s.n_stages());
    prop_assert_eq!(cum.last().unwrap(), &(0..n_terms).collect::<Vec<_>>());
    for w in cum.windows(2) {
        prop_assert!(w[0].iter().all(|t| w[1].contains(t)));
        prop_assert!(w[0].len() <= w[1].len());
    }
    for (k, part) in s.partitions().iter().enumerate() {
        prop_assert!(!part.is_empty());
        prop_assert!(part.iter().all(|t| cum[k].contains(t)));
    }
    Ok(())
}

fn instance() -> impl Strategy<Value = ProblemInstance> {
    (2usize..=8, 0u64..1000, any::<bool>()).prop_map(|(n, seed, cut)| {
        let mut s = seed;
        loop {
            let g = gnp_random_graph(n, 0.6, s).unwrap();
            if g.n_edges() > 0 {
                return if cut {
                    maxcut_hamiltonian(&g).unwrap()
                } else {
                    coloring_hamiltonian(&g, 2).unwrap()
                };
            }
            s += 1000;
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn block_schedules_are_disjoint_covers(n in 1usize..60, m in 1usize..12, seed in any::<u64>()) {
        prop_assume!(m <= n);
        for s in [sequential_partition(n, m).unwrap(), random_partition(n, m, seed).unwrap()] {
            check_schedule(&s, n)?;
            prop_assert!(s.is_disjoint());
            prop_assert_eq!(s.n_stages(), m);
            let sizes: Vec<usize> = s.partitions().iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
        prop_assert_eq!(random_partition(n, m, seed).unwrap(), random_partition(n, m, seed).unwrap());
    }

    #[test]
    fn graph_schedules_cover(inst in instance(), j in 2usize..8, seed in any::<u64>()) {
        let n_nodes = inst.graph().n_nodes();
        prop_assume!(j <= n_nodes);
        for strat in [Assembly::Cluster(j), Assembly::Nodewise(j)] {
            let s = strat.schedule(&inst, seed).unwrap();
            check_schedule(&s, inst.n_terms())?;
            prop_assert_eq!(&s, &strat.schedule(&inst, seed).unwrap());
            prop_assert!(s.n_stages() <= j);
        }
    }

    #[test]
    fn final_stage_objective_is_the_full_objective(inst in instance(), j in 2usize..8) {
        prop_assume!(j <= inst.graph().n_nodes());
        let s = Assembly::Nodewise(j).schedule(&inst, 0).unwrap();
        let last = inst.objective().partial_hamiltonian(s.cumulative().last().unwrap()).unwrap();
        prop_assert_eq!(last.energies(), inst.objective().energies());
    }
}

#[test]
fn schedule_json_round_trip() {
    let s = random_partition(9, 4, 3).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    let back: PartitionSchedule = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    assert!(serde_json::from_str::<PartitionSchedule>(r#"{"n_terms":3,"partitions":[[0,1]]}"#).is_err());
}
