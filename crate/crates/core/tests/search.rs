mod common;

use common::{all_stores, append_sequences, dtree, dump};
use dtree::baseline::CchmStore;
use dtree::models::{CountersModel, DynAllocModel, ProcessTreeModel, ProcessTreeRecursiveModel};
use dtree::search::{run, RunOptions};
use dtree::{Model, StateStore};

#[test]
fn counters_on_every_store_and_thread_count() {
    for threads in [1, 2, 4, 8] {
        for (name, store) in all_stores(4) {
            let stats = run(
                &CountersModel::default(),
                store.as_ref(),
                &RunOptions::threads(threads),
            )
            .unwrap();
            assert_eq!(stats.visited_roots, 10_000, "{name} x{threads}");
            assert_eq!(stats.transitions, 40_000, "{name} x{threads}");
            assert_eq!(stats.storage.root_occupancy, 10_000, "{name} x{threads}");
            assert_eq!(stats.histogram.lengths(true), [4]);
        }
    }
}

#[test]
fn process_models_visit_the_same_states() {
    for (name, store) in all_stores(9) {
        let flat = dump(&ProcessTreeModel::default(), store.as_ref(), 4);
        let fresh = all_stores(9).into_iter().find(|s| s.0 == name).unwrap().1;
        let rec = dump(&ProcessTreeRecursiveModel::default(), fresh.as_ref(), 4);
        assert_eq!(flat.len(), 10_000, "{name}");
        assert_eq!(flat, rec, "{name}");
    }
}

#[test]
fn process_states_biject_with_counters() {
    let counters = dump(&CountersModel::default(), &dtree(16), 2);
    let procs = dump(&ProcessTreeModel::default(), &dtree(16), 2);
    let projected: Vec<Vec<u32>> = procs
        .iter()
        .map(|v| {
            assert_eq!(v[0], 4);
            v[1..]
                .chunks(2)
                .map(|p| {
                    assert_eq!(p[0], 1);
                    p[1]
                })
                .collect()
        })
        .collect();
    assert_eq!(projected, counters);
}

#[test]
fn dyn_alloc_matches_sequence_enumeration() {
    for p in 1..=3 {
        for k in 1..=3 {
            let model = DynAllocModel {
                processes: p,
                max_appends: k,
            };
            for store in [&dtree(14) as &dyn StateStore, &CchmStore::new()] {
                let stats = run(&model, store, &RunOptions::threads(3)).unwrap();
                assert_eq!(stats.visited_roots, append_sequences(p, k), "P={p} K={k}");
                let heap_lengths = stats.histogram.lengths(false);
                assert_eq!(heap_lengths, (1..=p * k + 1).collect::<Vec<_>>());
            }
        }
    }
    assert_eq!(append_sequences(2, 2), 19);
    assert_eq!(append_sequences(1, 3), 4);
}

#[test]
fn visited_equals_root_occupancy() {
    let models: [&dyn Model; 3] = [
        &ProcessTreeModel::default(),
        &DynAllocModel {
            processes: 3,
            max_appends: 2,
        },
        &CountersModel {
            counters: 5,
            modulus: 4,
        },
    ];
    for model in models {
        for (name, store) in all_stores(11) {
            let stats = run(model, store.as_ref(), &RunOptions::threads(2)).unwrap();
            assert_eq!(stats.visited_roots, stats.storage.root_occupancy, "{name}");
        }
    }
}
