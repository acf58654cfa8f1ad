//! Age and temperature sweeps for each oscillator variant.

use solar_ehs::harness::{run_sweep, SweepAxis, SweepSpec};
use solar_ehs::oscillator::RoVariant;
use solar_ehs::ScenarioConfig;

fn main() -> solar_ehs::Result<()> {
    for variant in RoVariant::ALL {
        let mut scenario = ScenarioConfig::default();
        scenario.oscillator.variant = variant;
        let spec = SweepSpec {
            axis: SweepAxis::AgeYears,
            values: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            scenario,
        };
        println!("# {}", variant.name());
        run_sweep(&spec)?.write_csv(std::io::stdout().lock())?;
        println!();
    }

    let mut scenario = ScenarioConfig::default();
    scenario.oscillator.age = solar_ehs::Year(10.0);
    for variant in [RoVariant::Conventional, RoVariant::ReducedSupply] {
        scenario.oscillator.variant = variant;
        let report = run_sweep(&SweepSpec {
            axis: SweepAxis::TemperatureC,
            values: vec![27.0, 40.0, 80.0],
            scenario: scenario.clone(),
        })?;
        let ripple: Vec<String> = report
            .rows
            .iter()
            .map(|r| format!("{:.2}", r.ripple_max_mv.unwrap_or(f64::NAN)))
            .collect();
        println!(
            "{:<14} ripple at 27/40/80 °C (mV): {}",
            variant.name(),
            ripple.join(" / ")
        );
    }
    Ok(())
}
