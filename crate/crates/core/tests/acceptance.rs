use kdist::acceptance::{run_all, DEFAULT_SEED};

#[test]
fn acceptance_criteria() {
    let summary = run_all(DEFAULT_SEED);
    for o in &summary.outcomes {
        println!("{} criterion {}: {} ({:.2}s) {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.title, o.seconds, o.detail);
    }
    assert_eq!(summary.outcomes.len(), 10);
    let failed: Vec<u8> = summary.outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
