mod common;

use common::*;

#[test]
fn fixtures_normalize_in_one_pass() {
    assert!(round_trip_fixtures().unwrap() >= 7);
}

#[test]
fn random_instances_of_every_contract() {
    for seed in 0..200u64 {
        round_trip_random(seed).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
}

#[test]
fn parse_errors_carry_a_location() {
    let text = std::fs::read_to_string(fixtures_dir().join("malformed.json")).unwrap();
    let e = dualgraph::json::parse_graph(&text).unwrap_err().to_string();
    assert!(e.contains("line 3"), "{e}");
}
