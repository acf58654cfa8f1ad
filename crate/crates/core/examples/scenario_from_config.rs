//! Load a scenario file, run it, and write the trace.
//!
//! ```text
//! cargo run --example scenario_from_config -- crates/core/scenarios/irradiance_drop.toml out.csv
//! ```

use std::path::PathBuf;

use solar_ehs::harness::trace::write_trace_files;
use solar_ehs::{run_scenario, validate_scenario, ScenarioConfig};

fn main() -> solar_ehs::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(path) => ScenarioConfig::load(PathBuf::from(path).as_path())?,
        None => ScenarioConfig::default(),
    };
    let report = validate_scenario(&cfg);
    if !report.is_valid() {
        eprintln!("{report}");
        std::process::exit(2);
    }

    let (trace, summary) = run_scenario(&cfg)?;
    println!("{summary:#?}");
    if let Some(out) = args.next() {
        write_trace_files(PathBuf::from(&out).as_path(), &trace, &summary, &cfg)?;
        println!("wrote {} rows to {out}", trace.len());
    }
    Ok(())
}
