//! Frequency of the three ring-oscillator variants over 20 years, and under heat.

use solar_ehs::oscillator::{degradation_percent, frequency_at, OscillatorConfig, RoVariant};

fn main() {
    print!("{:<14}", "years");
    for v in RoVariant::ALL {
        print!("{:>14}", v.name());
    }
    println!();
    for age in [0.0, 2.5, 5.0, 7.5, 10.0, 15.0, 20.0] {
        print!("{age:<14}");
        for v in RoVariant::ALL {
            let f = frequency_at(&OscillatorConfig::new(v).with_age(age));
            print!("{:>10.2} kHz", f.0 / 1e3);
        }
        println!();
    }

    println!("\n20-year degradation:");
    for v in RoVariant::ALL {
        let d = degradation_percent(&OscillatorConfig::new(v).with_age(20.0));
        println!("  {:<14} {d:.2} %", v.name());
    }

    // an attacker heating the die for 5 years
    println!("\n5 years at temperature:");
    for temp in [27.0, 40.0, 80.0] {
        print!("  {temp:>4} °C");
        for v in RoVariant::ALL {
            let cfg = OscillatorConfig::new(v)
                .with_age(5.0)
                .with_temperature(temp);
            print!("{:>12.2} kHz", frequency_at(&cfg).0 / 1e3);
        }
        println!();
    }
}
