//! Ripple waveform over a half period and the closed-form peak.

use solar_ehs::ripple::{ripple_max, ripple_waveform, t_max, RippleParams};
use solar_ehs::Hertz;

fn main() -> solar_ehs::Result<()> {
    let p = RippleParams::default();
    let period = Hertz(150e3).period();
    println!(
        "R_on {}  τ = R·C_p = {}",
        p.resistance()?,
        p.time_constant()?
    );

    let tm = t_max(&p, period)?;
    println!(
        "peak at {:.1} ns, {:.3} mV",
        tm.0 * 1e9,
        ripple_max(&p, period)?.0 * 1e3
    );

    let steps = 20;
    for k in 0..=steps {
        let t = period * (0.5 * f64::from(k) / f64::from(steps));
        let v = ripple_waveform(&p, period, t)?;
        let bar = "#".repeat((v.0 * 5e3).max(0.0) as usize);
        println!("{:>8.3} µs {:>7.3} mV {bar}", t.micros(), v.0 * 1e3);
    }

    println!("\nslower clocks ripple more:");
    for khz in [150.0, 138.0, 110.0] {
        let v = ripple_max(&p, Hertz(khz * 1e3).period())?;
        println!("  {khz:>5} kHz  {:.3} mV", v.0 * 1e3);
    }
    Ok(())
}
