use gid_core::generators::{generate, suite, Family, GenSpec, Order, SuiteName, Variant};
use gid_core::oracle::oracle_run;
use gid_core::Status;

#[test]
fn variants_end_in_the_promised_state() {
    for (spec, trace) in suite(SuiteName::Basic).filter(|(s, _)| s.n <= 100) {
        trace.validate().unwrap();
        let run = oracle_run(&trace);
        let count = |st: Status| run.statuses.values().filter(|&&s| s == st).count();
        match spec.variant {
            Variant::Dead => {
                assert_eq!(count(Status::Open) + count(Status::Unknown), 0, "{spec}");
            }
            Variant::Unknown => {
                assert_eq!(count(Status::Open), 1, "{spec}");
                assert_eq!(count(Status::Dead), 0, "{spec}");
            }
        }
    }
}

#[test]
fn random_traces_validate_and_are_reproducible() {
    for spec in [GenSpec::sparse(300, 10, 4), GenSpec::dense(300, 0.03, 9)] {
        let a = generate(&spec).unwrap();
        a.validate().unwrap();
        assert_eq!(a, generate(&spec).unwrap());
    }
}

#[test]
fn basic_sizes_respect_caps() {
    let specs = gid_core::generators::suite_specs(SuiteName::Basic);
    assert!(specs.iter().all(|s| s.n <= s.family.cap()));
    assert!(specs.iter().any(|s| s.family == Family::Line && s.n == 100_000));
    assert!(specs
        .iter()
        .any(|s| s.family == Family::Bipartite && s.n == 1000 && s.order == Order::Bwd));
}
