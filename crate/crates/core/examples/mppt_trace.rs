//! One tracking attempt, clock by clock, on the calibrated PV/converter pair.

use solar_ehs::converter::{ConverterParams, PvParams};
use solar_ehs::mppt::{run_mppt, MpptConfig};

fn main() -> solar_ehs::Result<()> {
    let r = run_mppt(
        &PvParams::default(),
        &ConverterParams::default(),
        &MpptConfig::default(),
    )?;

    println!("clk  phase      code  S1 S2 Ssen S3 S4 S5  P (µW)");
    for c in &r.trace {
        let s = c.signals;
        let b = |x: bool| u8::from(x);
        println!(
            "{:>3}  {:<9} {:>5}   {}  {}   {}   {}  {}  {}  {:.5}",
            c.clock,
            c.phase.name(),
            c.code.count(),
            b(s.s1),
            b(s.s2),
            b(s.ssen),
            b(s.s3),
            b(s.s4),
            b(s.s5),
            c.power.0 * 1e6
        );
    }

    println!();
    for (n, cycle) in r.cycles.iter().enumerate() {
        println!(
            "cycle {n}: code {:>2}  P_n {:.5} µW  P_n+1 {:.5} µW",
            cycle.code.count(),
            cycle.p_n.0 * 1e6,
            cycle.p_n1.0 * 1e6
        );
    }
    println!(
        "locked at code {} after {} cycles",
        r.locked_code.count(),
        r.cycles_used
    );
    Ok(())
}
