use descent_cli::runner::{run, RunOptions};
use descent_cli::scenario::{resolve, Overrides, Scenario};

fn once(jobs: usize, ts: u64) -> String {
    let s = Scenario::new(
        "determinism",
        &["causality.lemmas", "site.localization-oracle", "site.precostack", "kg.properties", "kg.negative-control"],
    );
    let r = resolve(s, &Overrides { seed: Some(9), ..Default::default() }).unwrap();
    run(&r, &RunOptions { jobs, fail_fast: false, timestamp: Some(ts) }).canonical()
}

#[test]
fn reports_are_identical_modulo_timestamp() {
    let a = once(1, 100);
    let b = once(3, 200);
    assert_eq!(a, b);
}

#[test]
fn seed_changes_the_report() {
    let s = Scenario::new("seeded", &["site.localization-oracle"]);
    let a = run(&resolve(s.clone(), &Overrides { seed: Some(1), ..Default::default() }).unwrap(), &RunOptions::default());
    let b = run(&resolve(s, &Overrides { seed: Some(2), ..Default::default() }).unwrap(), &RunOptions::default());
    assert_ne!(a.records[0].digest, b.records[0].digest);
}
