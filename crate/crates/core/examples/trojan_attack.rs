//! Trigger-capacitor charging, the attacker's rate choice, and detection in a full run.

use solar_ehs::harness::run_scenario;
use solar_ehs::trojan::{attack_feasibility, TrojanConfig};
use solar_ehs::{Hertz, ScenarioConfig, Second};

fn main() -> solar_ehs::Result<()> {
    let cfg = TrojanConfig::default();
    let window = Second(512.0 / 150e3);

    println!("toggle rate    fires   after");
    for rate in [1e3, 5e3, 20e3, 150e3, 1e6] {
        let r = attack_feasibility(&cfg, window, Hertz(rate));
        match r.time_to_fire {
            Some(t) => println!("{rate:>9} Hz   yes     {:.1} µs", t.micros()),
            None => println!(
                "{rate:>9} Hz   no      (peak {:.0} mV)",
                r.peak_v_cap.0 * 1e3
            ),
        }
    }

    let scenario = ScenarioConfig {
        trojan: Some(cfg),
        ..ScenarioConfig::default()
    };
    let (trace, summary) = run_scenario(&scenario)?;
    println!();
    for r in trace
        .iter()
        .filter(|r| r.control_signals.i)
        .take(60)
        .step_by(3)
    {
        println!(
            "clk {:>3}  {:<9} code {:>2}  v_cap {:>6.1} mV  counter-reset {}  flag {}",
            r.clock_index,
            r.fsm_state.name(),
            r.thermometer_code.count(),
            r.trojan_cap_v.0 * 1e3,
            u8::from(r.rst),
            u8::from(r.trojan_flag)
        );
    }
    println!(
        "\nRST at {:?} µs, first flag at clock {:?}, MPP reached: {}",
        summary.rst_fired_at.map(|t| t.micros()),
        summary.first_flag_clock,
        summary.complete
    );
    Ok(())
}
