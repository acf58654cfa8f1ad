//! Independent re-derivations of the model equations, and random scenario generators.
//!
//! The oracles are written from the equations with plain `exp`/`ln`, without
//! sharing any code with the library.

#![allow(dead_code)]

use rand::Rng;
use solar_ehs::oscillator::RoVariant;
use solar_ehs::quantities::IrradianceStep;
use solar_ehs::trojan::TrojanConfig;
use solar_ehs::{Ohm, ScenarioConfig, Second};

pub fn impedance(f_s: f64, c_u: f64, alpha: f64, v_solar: f64, v_out: f64) -> f64 {
    (1.0 / (2.0 * f_s * c_u)) * ((1.0 + alpha) / ((3.0 - v_out / v_solar) * alpha))
}

pub fn output_voltage(f_s: f64, c_u: f64, alpha: f64, r_l: f64, v_solar: f64) -> f64 {
    let t = 1.0 / f_s;
    3.0 * v_solar / (1.0 + t / (2.0 * r_l * alpha * c_u))
}

pub fn match_capacitance(f_s: f64, r_l: f64, v_mpp: f64, v_out: f64) -> f64 {
    let t = 1.0 / f_s;
    (t / (2.0 * r_l)) / (3.0 * v_mpp / v_out - 1.0)
}

pub fn pce(v_out: f64, v_solar: f64, cr: f64) -> f64 {
    v_out / (v_solar * cr) * 100.0
}

pub fn on_resistance(mobility_term: f64, v_gs: f64, v_t: f64) -> f64 {
    1.0 / (mobility_term * (v_gs - v_t))
}

fn tau(r: f64, c: f64, c0: f64) -> f64 {
    r * (c * c0 / (c + c0))
}

pub fn ripple_at(r: f64, c: f64, c0: f64, i0: f64, f_s: f64, t: f64) -> f64 {
    let half = 0.5 / f_s;
    let tau = tau(r, c, c0);
    let lift = half * i0 / (c + c0) / (1.0 - (-half / tau).exp());
    lift * (1.0 - (-t / tau).exp()) - i0 * t / (c + c0)
}

pub fn t_max(r: f64, c: f64, c0: f64, f_s: f64) -> f64 {
    let half = 0.5 / f_s;
    let tau = tau(r, c, c0);
    tau * (half / (tau * (1.0 - (-half / tau).exp()))).ln()
}

pub fn ripple_max(r: f64, c: f64, c0: f64, i0: f64, f_s: f64) -> f64 {
    let t = 1.0 / f_s;
    let cs = c + c0;
    t * i0 / (2.0 * cs) - r * i0 * c * c0 / (cs * cs) * (1.0 + (t / (2.0 * tau(r, c, c0))).ln())
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// A healthy scenario with no Trojan and a random operating environment.
pub fn benign_scenario(rng: &mut impl Rng) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.oscillator.variant = RoVariant::ALL[rng.random_range(0..3)];
    cfg.oscillator.age = solar_ehs::Year(rng.random_range(0.0..25.0));
    cfg.oscillator.temperature = solar_ehs::Celsius(rng.random_range(-20.0..85.0));
    cfg.pv.irradiance_scale = rng.random_range(0.6..1.4);
    cfg.converter.r_l = Ohm(rng.random_range(0.5e6..2.0e6));
    cfg.mppt.sense_noise = if rng.random_bool(0.5) {
        rng.random_range(0.0..0.02)
    } else {
        0.0
    };
    cfg.sim.seed = rng.random();
    cfg.sim.duration = Second(rng.random_range(1.0e-3..4.0e-3));
    if rng.random_bool(0.25) {
        cfg.sim.irradiance_step = Some(IrradianceStep {
            at: Second(rng.random_range(0.2e-3..3.0e-3)),
            scale: rng.random_range(0.3..1.4),
        });
    }
    cfg.trojan = if rng.random_bool(0.5) {
        Some(TrojanConfig {
            enabled: false,
            ..TrojanConfig::default()
        })
    } else {
        None
    };
    cfg
}
