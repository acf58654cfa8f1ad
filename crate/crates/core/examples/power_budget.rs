//! Controller power budget, with a config override.

use solar_ehs::harness::{power_budget, Block};
use solar_ehs::{ScenarioConfig, Watt};

fn main() {
    let cfg = ScenarioConfig::default();
    let b = power_budget(&cfg);
    println!("{b}");
    println!(
        "RO + current sensor: {:.1} %",
        100.0 * b.share(&[Block::Ro, Block::CurrentSensor])
    );

    let mut low_power = cfg.clone();
    low_power.budget.ro = Watt(6e-6);
    let b = power_budget(&low_power);
    println!("\nwith a 6 µW oscillator: total {:.1} µW", b.total.0 * 1e6);
}
