//! Finite-volume results against values frozen from an independent exact
//! enumeration (`fixtures/brute_force.py`, rational arithmetic).

use hctree::oracle::{fixture_entry, FixtureFile, FIXTURE_SCHEMA};
use hctree::{ActivityGraph, FiniteVolume};

fn load() -> FixtureFile {
    let text = include_str!("fixtures/oracle.json");
    serde_json::from_str(text).expect("fixture parses")
}

#[test]
fn fixture_schema() {
    let f = load();
    assert_eq!(f.schema, FIXTURE_SCHEMA);
    assert!(f.entries.len() >= 6);
}

#[test]
fn matches_frozen_enumeration() {
    for want in load().entries {
        let graph = ActivityGraph::from_name(&want.graph).unwrap();
        let volume = FiniteVolume::new(want.k, want.n, want.root).unwrap();
        let got = fixture_entry(&graph, &volume, want.lambda, want.field).unwrap();
        let tag = format!("{} k={} n={} {:?}", want.graph, want.k, want.n, want.root);
        assert_eq!(got.admissible_count, want.admissible_count, "{tag}");
        assert!(
            (got.partition - want.partition).abs() <= 1e-12 * want.partition,
            "{tag}: Z {} vs {}",
            got.partition,
            want.partition
        );
        assert_eq!(got.marginals.len(), want.marginals.len(), "{tag}");
        for (v, (a, b)) in got.marginals.iter().zip(&want.marginals).enumerate() {
            for s in 0..3 {
                assert!(
                    (a[s] - b[s]).abs() <= 1e-13,
                    "{tag} vertex {v} spin {s}: {} vs {}",
                    a[s],
                    b[s]
                );
            }
        }
    }
}
