//! Closed-form tripler equations at the design point.

use solar_ehs::converter::{impedance, match_capacitance, output_voltage, pce, ConverterParams};
use solar_ehs::Volt;

fn main() -> solar_ehs::Result<()> {
    let p = ConverterParams::default();
    let vs = Volt(1.22);

    println!("f_s = {}, C_u = {}, R_L = {}", p.f_s, p.c_u_full, p.r_l);
    for code in [16u8, 14, 12, 8, 4] {
        let vo = output_voltage(&p, code, vs)?;
        let z = impedance(&p, code, vs, vo)?;
        println!(
            "code {code:>2}: v_out {:.4} V  Z {:>9.1} kΩ  PCE {:.2} %",
            vo.0,
            z.0 / 1e3,
            pce(vs, vo, p.cr)
        );
    }

    let c = match_capacitance(&p, vs, Volt(3.55))?;
    println!(
        "α·C_u to sit at 1.22 V while delivering 3.55 V: {:.2} pF",
        c.0 * 1e12
    );
    Ok(())
}
