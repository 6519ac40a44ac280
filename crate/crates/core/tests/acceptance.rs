//! Runs all thirteen acceptance criteria against the depth-6, seed-42 fixture
//! and prints one line per criterion.

use cantorhull::verify::{Verifier, VerifyConfig};
use cantorhull::CantorState;

const FIXTURE: &str = include_str!("fixtures/depth6_seed42.json");

/// Check that fails for a mathematical reason: a closed loop around a single
/// block encloses both of its endpoints, so the square root returns to its
/// starting sheet.
const KNOWN_FAILURE: (u8, &str) = (9, "single-block loops flip parity");

#[test]
fn acceptance() {
    let state = CantorState::from_json(FIXTURE.trim_end()).expect("fixture parses");
    assert_eq!(state.depth(), 6);
    let mut verifier = Verifier::new(&state, VerifyConfig::default());
    let results = verifier.run_selected();
    assert_eq!(results.len(), 13);

    for r in &results {
        println!(
            "criterion {:>2}: {} {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name
        );
    }
    println!();
    for r in &results {
        println!("{r}");
    }

    let mut unexpected = Vec::new();
    for r in &results {
        for c in r.failed_checks() {
            if (r.id, c.name.as_str()) != KNOWN_FAILURE {
                unexpected.push(format!("criterion {} / {}: {}", r.id, c.name, c.detail));
            }
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures:\n{}", unexpected.join("\n"));

    let nine = &results[8];
    assert!(
        nine.checks.iter().any(|c| c.name == KNOWN_FAILURE.1 && !c.passed),
        "the single-block parity clause was expected to fail: {nine}"
    );
}
