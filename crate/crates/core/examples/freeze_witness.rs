//! Runs the quartic counterexample search and prints the first witness as
//! JSON. Used to regenerate `tests/fixtures/quartic_witness.json`.

use relent_core::lab::{counterexample_search, SearchOptions};
use relent_core::PhiSpec;

fn main() -> relent_core::Result<()> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(2024), |s| s.parse()).expect("seed must be an integer");
    let spec = PhiSpec::quartic()?;
    let r = counterexample_search(&spec, 100_000, seed, &SearchOptions::default())?;
    eprintln!("trials run: {}, inconclusive: {}", r.report.trials, r.inconclusive);
    if let Some(w) = r.witness {
        println!("{}", serde_json::to_string_pretty(&w).expect("witness serializes"));
    }
    Ok(())
}
