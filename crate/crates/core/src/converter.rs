//! Steady-state model of the charge-pump voltage tripler and its PV source.
//!
//! The pump capacitance is `C_u(code) = C_u_full * code / 16`. With a resistive load
//! the small-signal balance fixes `v_out / v_solar = 3 / (1 + k)` where
//! `k = T / (2 R_L α C_u)`, and the input impedance follows from that ratio.

use serde::{Deserialize, Serialize};

use crate::quantities::{
    positive, Ampere, Farad, Hertz, Ohm, Second, ValidationReport, Volt, Watt,
};
use crate::{Error, Result};

/// Tolerance on the input voltage for the operating-point iteration.
pub const OPERATING_POINT_TOL: f64 = 1e-9;
pub const OPERATING_POINT_MAX_ITER: usize = 1000;
const DAMPING: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConverterParams {
    /// Switching frequency. Scenario runs overwrite it with the oscillator's aged frequency.
    pub f_s: Hertz,
    /// Pump capacitance with all 16 bank cells enabled.
    pub c_u_full: Farad,
    /// Inter-stage capacitor ratio.
    pub alpha: f64,
    /// Conversion ratio; the tripler topology fixes it at 3.
    pub cr: f64,
    pub r_l: Ohm,
    pub n_code_max: u8,
    /// Bottom-plate parasitic as a fraction of the enabled bank capacitance.
    /// Each switching cycle dissipates `ratio * C_u * v_solar^2` of it.
    pub bottom_plate_ratio: f64,
}

impl Default for ConverterParams {
    fn default() -> Self {
        Self {
            f_s: Hertz(150e3),
            c_u_full: Farad(100e-12),
            alpha: 1.0,
            cr: 3.0,
            r_l: Ohm(1e6),
            n_code_max: 16,
            bottom_plate_ratio: 0.025,
        }
    }
}

impl ConverterParams {
    pub fn period(&self) -> Second {
        self.f_s.period()
    }

    /// Enabled pump capacitance for a thermometer count.
    pub fn c_u(&self, code: u8) -> Farad {
        self.c_u_full * (f64::from(code) / f64::from(self.n_code_max))
    }

    /// Output droop term `T / (2 R_L α C_u)`.
    pub fn droop(&self, code: u8) -> Result<f64> {
        self.check_code(code)?;
        Ok(self.period().0 / (2.0 * self.r_l.0 * self.alpha * self.c_u(code).0))
    }

    fn check_code(&self, code: u8) -> Result<()> {
        if code == 0 || code > self.n_code_max {
            Err(Error::CodeOutOfRange(u32::from(code)))
        } else {
            Ok(())
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        r.check(
            positive(self.f_s.0),
            "converter.f_s",
            "oscillator frequency must be positive",
        );
        r.check(
            positive(self.c_u_full.0),
            "converter.c_u_full",
            "pump capacitance must be positive",
        );
        r.check(
            positive(self.alpha),
            "converter.alpha",
            "capacitor ratio must be positive",
        );
        r.check(
            self.cr == 3.0,
            "converter.cr",
            "conversion ratio of the tripler must be 3",
        );
        r.check(
            positive(self.r_l.0),
            "converter.r_l",
            "load resistance must be positive",
        );
        r.check(
            self.n_code_max == 16,
            "converter.n_code_max",
            "capacitor bank has 16 cells",
        );
        r.check(
            self.bottom_plate_ratio.is_finite() && self.bottom_plate_ratio >= 0.0,
            "converter.bottom_plate_ratio",
            "bottom-plate ratio must be non-negative",
        );
        r
    }
}

/// Single-diode PV cell without series or shunt resistance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PvParams {
    /// Photocurrent at reference irradiance.
    pub i_ph: Ampere,
    pub i_sat: Ampere,
    /// Thermal voltage times ideality factor.
    pub n_vt: Volt,
    pub irradiance_scale: f64,
}

impl Default for PvParams {
    // Calibrated so the power maximum sits at 1.22 V and the code-16 load line
    // crosses the curve there.
    fn default() -> Self {
        Self {
            i_ph: Ampere(1.9155e-6),
            i_sat: Ampere(7.3e-13),
            n_vt: Volt(0.1),
            irradiance_scale: 1.0,
        }
    }
}

impl PvParams {
    pub fn photocurrent(&self) -> Ampere {
        self.i_ph * self.irradiance_scale
    }

    pub fn open_circuit_voltage(&self) -> Volt {
        let iph = self.photocurrent().0;
        if iph <= 0.0 {
            return Volt(0.0);
        }
        Volt(self.n_vt.0 * (iph / self.i_sat.0).ln_1p())
    }

    /// `dI/dV` of the diode law.
    pub fn current_slope(&self, v: Volt) -> f64 {
        -self.i_sat.0 / self.n_vt.0 * (v.0 / self.n_vt.0).exp()
    }

    /// Maximum power point by golden-section search on `v * I(v)` over `[0, V_oc]`.
    pub fn maximum_power_point(&self) -> (Volt, Watt) {
        let voc = self.open_circuit_voltage().0;
        let power = |v: f64| v * pv_current(self, Volt(v)).0;
        let v = golden_max(power, 0.0, voc, 1e-12);
        (Volt(v), Watt(power(v)))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        r.check(
            positive(self.i_ph.0),
            "pv.i_ph",
            "photocurrent must be positive",
        );
        r.check(
            positive(self.i_sat.0),
            "pv.i_sat",
            "saturation current must be positive",
        );
        r.check(
            positive(self.n_vt.0),
            "pv.n_vt",
            "thermal voltage must be positive",
        );
        r.check(
            positive(self.irradiance_scale) && self.irradiance_scale <= 1.5,
            "pv.irradiance_scale",
            "irradiance scale must lie in (0, 1.5]",
        );
        if r.is_valid() {
            let reference = PvParams {
                irradiance_scale: 1.0,
                ..self.clone()
            };
            let (v_mpp, _) = reference.maximum_power_point();
            r.check(
                (1.0..=1.5).contains(&v_mpp.0),
                "pv",
                "maximum power point at reference irradiance must lie in [1.0, 1.5] V",
            );
        }
        r
    }
}

pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

/// Solved electrical state of PV + converter at one capacitor code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverterState {
    pub v_solar: Volt,
    pub i_in: Ampere,
    pub v_out: Volt,
    /// Net current the converter delivers into the output node.
    pub i_out: Ampere,
    pub z_cp: Ohm,
    /// Power-conversion efficiency in percent.
    pub pce: f64,
}

/// Tripler input impedance for a given input/output voltage pair.
pub fn impedance(p: &ConverterParams, code: u8, v_solar: Volt, v_out: Volt) -> Result<Ohm> {
    p.check_code(code)?;
    if v_out.0 >= p.cr * v_solar.0 {
        return Err(Error::Singularity { v_solar, v_out });
    }
    Ok(impedance_at_ratio(p, code, v_out.0 / v_solar.0))
}

fn impedance_at_ratio(p: &ConverterParams, code: u8, ratio: f64) -> Ohm {
    let base = 1.0 / (2.0 * p.f_s.0 * p.c_u(code).0);
    Ohm(base * (1.0 + p.alpha) / ((3.0 - ratio) * p.alpha))
}

/// Output voltage from the small-signal charge balance with a resistive load.
pub fn output_voltage(p: &ConverterParams, code: u8, v_solar: Volt) -> Result<Volt> {
    let k = p.droop(code)?;
    Ok(Volt(3.0 * v_solar.0 / (1.0 + k)))
}

/// `α C_u` that places the input at `v_mpp` while delivering `v_out_target`.
pub fn match_capacitance(p: &ConverterParams, v_mpp: Volt, v_out_target: Volt) -> Result<Farad> {
    let gain = 3.0 * v_mpp.0 / v_out_target.0;
    if gain <= 1.0 {
        return Err(Error::Infeasible {
            v_mpp,
            v_out: v_out_target,
        });
    }
    Ok(Farad(p.period().0 / (2.0 * p.r_l.0) / (gain - 1.0)))
}

/// Power-conversion efficiency in percent.
pub fn pce(v_solar: Volt, v_out: Volt, cr: f64) -> f64 {
    v_out.0 / (v_solar.0 * cr) * 100.0
}

pub fn pv_current(pv: &PvParams, v: Volt) -> Ampere {
    Ampere(pv.photocurrent().0 - pv.i_sat.0 * (v.0 / pv.n_vt.0).exp_m1())
}

/// Bottom-plate switching loss of the enabled bank cells.
pub fn switching_loss(p: &ConverterParams, code: u8, v_solar: Volt) -> Watt {
    Watt(p.bottom_plate_ratio * p.c_u(code).0 * p.f_s.0 * v_solar.0 * v_solar.0)
}

/// Converter state with the input pinned to `v_solar` (ideal source).
pub fn driven_state(p: &ConverterParams, code: u8, v_solar: Volt) -> Result<ConverterState> {
    if code == 0 {
        return Ok(open_circuit(v_solar));
    }
    let v_out = output_voltage(p, code, v_solar)?;
    let z_cp = impedance_at_ratio(p, code, v_out.0 / v_solar.0);
    Ok(assemble(p, code, v_solar, v_out, z_cp))
}

fn open_circuit(v_solar: Volt) -> ConverterState {
    ConverterState {
        v_solar,
        i_in: Ampere(0.0),
        v_out: Volt(0.0),
        i_out: Ampere(0.0),
        z_cp: Ohm(f64::INFINITY),
        pce: 0.0,
    }
}

fn assemble(
    p: &ConverterParams,
    code: u8,
    v_solar: Volt,
    v_out: Volt,
    z_cp: Ohm,
) -> ConverterState {
    let i_in = if v_solar.0 > 0.0 {
        v_solar / z_cp
    } else {
        Ampere(0.0)
    };
    let i_out = if v_out.0 > 0.0 {
        let loss = switching_loss(p, code, v_solar).0 / v_out.0;
        Ampere((v_out.0 / p.r_l.0 - loss).max(0.0))
    } else {
        Ampere(0.0)
    };
    let pce = if v_solar.0 > 0.0 {
        pce(v_solar, v_out, p.cr)
    } else {
        0.0
    };
    ConverterState {
        v_solar,
        i_in,
        v_out,
        i_out,
        z_cp,
        pce,
    }
}

/// Intersection of the PV curve with the converter's input load line.
pub fn operating_point(pv: &PvParams, p: &ConverterParams, code: u8) -> Result<ConverterState> {
    let (v_mpp, _) = pv.maximum_power_point();
    operating_point_from(pv, p, code, v_mpp)
}

/// As [`operating_point`], starting the iteration at `v_start`.
///
/// Damped fixed-point `V <- V + λ Z (I_pv(V) - V/Z)` with `λ = 0.5`, shortened to the
/// locally stable step `1 / (1 - Z dI/dV)` on the steep side of the curve.
pub fn operating_point_from(
    pv: &PvParams,
    p: &ConverterParams,
    code: u8,
    v_start: Volt,
) -> Result<ConverterState> {
    if code > p.n_code_max {
        return Err(Error::CodeOutOfRange(u32::from(code)));
    }
    let voc = pv.open_circuit_voltage().0;
    if code == 0 {
        return Ok(open_circuit(Volt(voc)));
    }
    let k = p.droop(code)?;
    let z = impedance_at_ratio(p, code, 3.0 / (1.0 + k));

    let mut v = v_start.0.clamp(0.0, voc);
    let mut residual = 0.0;
    for _ in 0..OPERATING_POINT_MAX_ITER {
        residual = pv_current(pv, Volt(v)).0 - v / z.0;
        let slope = pv.current_slope(Volt(v));
        let lambda = DAMPING.min(1.0 / (1.0 - z.0 * slope));
        let step = lambda * z.0 * residual;
        v = (v + step).max(0.0);
        if step.abs() < OPERATING_POINT_TOL {
            let v_solar = Volt(v);
            let v_out = Volt(3.0 * v / (1.0 + k));
            return Ok(assemble(p, code, v_solar, v_out, z));
        }
    }
    Err(Error::NonConvergence {
        iterations: OPERATING_POINT_MAX_ITER,
        residual: Ampere(residual),
    })
}
