use heatutm::acceptance::{run_criterion, CRITERIA};
use std::io::Write;

/// One line per criterion, written past the harness capture so it shows in
/// plain `cargo test` output.
#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    writeln!(err).unwrap();
    for id in 1..=CRITERIA as u32 {
        let r = run_criterion(id).expect("registered criterion");
        writeln!(err, "{}", r.line()).unwrap();
        if !r.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
