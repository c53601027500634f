//! Shared helpers for the benchmark targets.

use cusped::Triangulation;

/// Load a fixture triangulation from the workspace `fixtures/` directory.
pub fn fixture(name: &str) -> Triangulation {
    let path = format!("{}/../../fixtures/{name}.atri", env!("CARGO_MANIFEST_DIR"));
    Triangulation::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}
