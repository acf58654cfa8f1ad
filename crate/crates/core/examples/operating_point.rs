//! PV curve and the coupled PV/converter operating point at every bank code.

use solar_ehs::converter::{operating_point, pv_current, ConverterParams, PvParams};
use solar_ehs::mppt::sense_power;
use solar_ehs::{Ohm, Volt};

fn main() -> solar_ehs::Result<()> {
    let pv = PvParams::default();
    let conv = ConverterParams::default();
    let (v_mpp, p_mpp) = pv.maximum_power_point();
    println!(
        "V_oc {:.3} V, MPP {:.3} V at {:.3} µW",
        pv.open_circuit_voltage().0,
        v_mpp.0,
        p_mpp.0 * 1e6
    );

    println!("\n  V      I (µA)");
    for mv in (0..=1450).step_by(150) {
        let v = Volt(f64::from(mv) / 1e3);
        println!("{:.2}  {:>7.4}", v.0, pv_current(&pv, v).0 * 1e6);
    }

    println!("\ncode  v_solar  v_out   PCE    P_sense (µW)");
    for code in (1..=16u8).rev() {
        let cs = operating_point(&pv, &conv, code)?;
        println!(
            "{code:>4}  {:.4}  {:.4}  {:.2}  {:.4}",
            cs.v_solar.0,
            cs.v_out.0,
            cs.pce,
            sense_power(&cs, Ohm(10e3)).0 * 1e6
        );
    }
    Ok(())
}
