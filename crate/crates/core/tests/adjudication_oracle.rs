mod common;

use common::oracle::{sweep, sweep_boards, Sweep};

#[test]
fn engine_matches_brute_force_on_small_boards() {
    let mut total = Sweep::default();
    for (label, map, state) in sweep_boards() {
        let (s, first) = sweep(&map, &state);
        assert_eq!(s.mismatches, 0, "{label}: first mismatch {}", first.unwrap_or_default());
        total.cases += s.cases;
    }
    assert!(total.cases > 100_000, "only {} cases", total.cases);
}
