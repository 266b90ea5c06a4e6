use relstate_core::{run_all, run_criterion, CRITERIA};

#[test]
fn all_checks_pass_for_several_seeds() {
    for seed in [0, 1, 20241016] {
        for r in run_all(seed) {
            assert!(r.passed, "seed {seed}: {r}");
        }
    }
}

#[test]
fn checks_are_deterministic() {
    for &(id, _) in CRITERIA.iter() {
        assert_eq!(run_criterion(id, 7), run_criterion(id, 7));
    }
}
