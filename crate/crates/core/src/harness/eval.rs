//! Direct evaluation of the closed-form model equations by number.
//!
//! | eq | value | parameters |
//! |---|---|---|
//! | 1 | tripler impedance (Ω) | `f_s c_u alpha v_solar v_out` |
//! | 2 | output voltage (V) | `f_s c_u alpha r_l v_solar` |
//! | 3 | matched `α C_u` (F) | `f_s r_l v_mpp v_out` |
//! | 4 | PCE (%) | `v_out v_solar cr` |
//! | 5 | switch on-resistance (Ω) | `mobility_term v_gs v_t` |
//! | 6 | ripple at `t` (V) | `r c c0 i0 f_s t` |
//! | 7 | time of peak ripple (s) | `r c c0 f_s` |
//! | 8 | closed-form peak ripple (V), unclamped | `r c c0 i0 f_s` |
//!
//! Omitted parameters take the scenario defaults (`r` the derived on-resistance,
//! `t` the peak time).

use std::collections::BTreeMap;

use crate::converter::{self, ConverterParams};
use crate::quantities::{Ampere, Farad, Hertz, Ohm, Second, Volt};
use crate::ripple::{self, RippleParams};
use crate::{Error, Result};

pub type Params = BTreeMap<String, f64>;

/// Parses `k=v,k=v`.
pub fn parse_params(text: &str) -> Result<Params> {
    let mut out = Params::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{part}`")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("`{}` is not a number", v.trim())))?;
        out.insert(k.trim().to_string(), value);
    }
    Ok(out)
}

const KEYS: [&[&str]; 8] = [
    &["f_s", "c_u", "alpha", "v_solar", "v_out"],
    &["f_s", "c_u", "alpha", "r_l", "v_solar"],
    &["f_s", "r_l", "v_mpp", "v_out"],
    &["v_out", "v_solar", "cr"],
    &["mobility_term", "v_gs", "v_t"],
    &["r", "c", "c0", "i0", "f_s", "t"],
    &["r", "c", "c0", "f_s"],
    &["r", "c", "c0", "i0", "f_s"],
];

struct Lookup<'a>(&'a Params);

impl Lookup<'_> {
    fn or(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }
}

fn converter_params(p: &Lookup) -> ConverterParams {
    let d = ConverterParams::default();
    ConverterParams {
        f_s: Hertz(p.or("f_s", d.f_s.0)),
        c_u_full: Farad(p.or("c_u", d.c_u_full.0)),
        alpha: p.or("alpha", d.alpha),
        r_l: Ohm(p.or("r_l", d.r_l.0)),
        ..d
    }
}

fn ripple_params(p: &Lookup) -> RippleParams {
    let d = RippleParams::default();
    RippleParams {
        r_on: p.0.get("r").map(|&r| Ohm(r)),
        c: Farad(p.or("c", d.c.0)),
        c0: Farad(p.or("c0", d.c0.0)),
        i0: Ampere(p.or("i0", d.i0.0)),
        mobility_term: p.or("mobility_term", d.mobility_term),
        v_gs: Volt(p.or("v_gs", d.v_gs.0)),
        v_t: Volt(p.or("v_t", d.v_t.0)),
    }
}

/// Value of equation `eq` (1..=8) in SI units.
pub fn evaluate(eq: u8, params: &Params) -> Result<f64> {
    let keys = KEYS
        .get(usize::from(eq).wrapping_sub(1))
        .ok_or_else(|| Error::Config(format!("no equation {eq}; expected 1..=8")))?;
    if let Some(unknown) = params.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(Error::Config(format!(
            "equation {eq} takes no parameter `{unknown}`"
        )));
    }
    let p = Lookup(params);
    let full = ConverterParams::default().n_code_max;
    let period = Hertz(p.or("f_s", ConverterParams::default().f_s.0)).period();
    match eq {
        1 => {
            let c = converter_params(&p);
            let vs = Volt(p.or("v_solar", 1.22));
            let vo = Volt(p.or("v_out", 3.55));
            Ok(converter::impedance(&c, full, vs, vo)?.0)
        }
        2 => {
            let c = converter_params(&p);
            Ok(converter::output_voltage(&c, full, Volt(p.or("v_solar", 1.22)))?.0)
        }
        3 => {
            let c = converter_params(&p);
            Ok(converter::match_capacitance(
                &c,
                Volt(p.or("v_mpp", 1.22)),
                Volt(p.or("v_out", 3.55)),
            )?
            .0)
        }
        4 => Ok(converter::pce(
            Volt(p.or("v_solar", 1.22)),
            Volt(p.or("v_out", 3.55)),
            p.or("cr", 3.0),
        )),
        5 => Ok(ripple::on_resistance(&ripple_params(&p))?.0),
        6 => {
            let rp = ripple_params(&p);
            let t = match params.get("t") {
                Some(&t) => Second(t),
                None => ripple::t_max(&rp, period)?,
            };
            Ok(ripple::ripple_waveform(&rp, period, t)?.0)
        }
        7 => Ok(ripple::t_max(&ripple_params(&p), period)?.0),
        8 => Ok(ripple::ripple_max_unclamped(&ripple_params(&p), period)?.0),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs() {
        let p = parse_params("v_out=3.55, v_solar=1.22,cr=3").unwrap();
        assert_eq!(p["v_out"], 3.55);
        assert_eq!(p.len(), 3);
        assert!(parse_params("v_out").is_err());
        assert!(parse_params("v_out=abc").is_err());
    }

    #[test]
    fn pce_example() {
        let p = parse_params("v_out=3.55,v_solar=1.22,cr=3").unwrap();
        let v = evaluate(4, &p).unwrap();
        assert!((v - 96.994_535_519_125_68).abs() < 1e-12);
    }

    #[test]
    fn impedance_example() {
        let p = parse_params("f_s=150e3,c_u=100e-12,alpha=1,v_solar=1.22,v_out=3.0").unwrap();
        let z = evaluate(1, &p).unwrap();
        assert!((z - 123_232.323_232_323).abs() < 1e-6, "{z}");
    }

    #[test]
    fn rejects_unknown_equation_and_keys() {
        assert!(evaluate(9, &Params::new()).is_err());
        assert!(evaluate(0, &Params::new()).is_err());
        let p = parse_params("bogus=1").unwrap();
        assert!(evaluate(4, &p).is_err());
    }

    #[test]
    fn ripple_defaults() {
        let v = evaluate(8, &Params::new()).unwrap();
        assert!((v - 9.423_866_704_451_963e-3).abs() < 1e-15);
    }
}
