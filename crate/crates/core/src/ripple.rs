//! Output-stage ripple of the charge pump.
//!
//! During each half period the pump capacitor `C` shares charge with the output
//! capacitor `C0` through the switch on-resistance `R`, while the load draws `I0`.
//! The ripple rises from zero to a peak at `t_max` and returns to zero at `T/2`.

use serde::{Deserialize, Serialize};

use crate::quantities::{positive, Ampere, Farad, Ohm, Second, ValidationReport, Volt};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RippleParams {
    /// Switch on-resistance. When absent it is derived from the device terms below.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_on: Option<Ohm>,
    pub c: Farad,
    pub c0: Farad,
    pub i0: Ampere,
    /// `µn·Cox·W/L` in A/V².
    pub mobility_term: f64,
    pub v_gs: Volt,
    pub v_t: Volt,
}

impl Default for RippleParams {
    fn default() -> Self {
        Self {
            r_on: None,
            c: Farad(1e-9),
            c0: Farad(1e-9),
            i0: Ampere(10e-6),
            mobility_term: 1e-3,
            v_gs: Volt(1.4),
            v_t: Volt(0.4),
        }
    }
}

impl RippleParams {
    pub fn resistance(&self) -> Result<Ohm> {
        match self.r_on {
            Some(r) => Ok(r),
            None => on_resistance(self),
        }
    }

    /// Series combination of `C` and `C0` seen during charge transfer.
    pub fn c_p(&self) -> Farad {
        Farad(self.c.0 * self.c0.0 / (self.c.0 + self.c0.0))
    }

    pub fn time_constant(&self) -> Result<Second> {
        Ok(Second(self.resistance()?.0 * self.c_p().0))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if let Some(ron) = self.r_on {
            r.check(
                positive(ron.0),
                "ripple.r_on",
                "on-resistance must be positive",
            );
        } else {
            r.check(
                positive(self.mobility_term),
                "ripple.mobility_term",
                "mobility term must be positive",
            );
            r.check(
                self.v_gs.0 > self.v_t.0,
                "ripple.v_gs",
                "gate drive must exceed the threshold voltage",
            );
        }
        r.check(
            positive(self.c.0),
            "ripple.c",
            "pump capacitance must be positive",
        );
        r.check(
            positive(self.c0.0),
            "ripple.c0",
            "output capacitance must be positive",
        );
        r.check(
            self.i0.0.is_finite() && self.i0.0 >= 0.0,
            "ripple.i0",
            "load current must be non-negative",
        );
        r
    }
}

/// Linear-region switch resistance `1 / (µn Cox W/L (V_GS - V_T))`.
pub fn on_resistance(p: &RippleParams) -> Result<Ohm> {
    let overdrive = p.v_gs.0 - p.v_t.0;
    if overdrive <= 0.0 {
        return Err(Error::Subthreshold {
            v_gs: p.v_gs,
            v_t: p.v_t,
        });
    }
    Ok(Ohm(1.0 / (p.mobility_term * overdrive)))
}

/// Ripple voltage at `t` within the half period `[0, T/2]`.
///
/// The charging amplitude is normalised over the half period so the waveform returns
/// to exactly zero at `T/2`; its stationary point is [`t_max`].
pub fn ripple_waveform(p: &RippleParams, period: Second, t: Second) -> Result<Volt> {
    let tau = p.time_constant()?.0;
    let c_sum = p.c.0 + p.c0.0;
    let half = 0.5 * period.0;
    let amplitude = half * p.i0.0 / c_sum / -(-half / tau).exp_m1();
    Ok(Volt(
        amplitude * -(-t.0 / tau).exp_m1() - p.i0.0 * t.0 / c_sum,
    ))
}

/// Time of the ripple peak.
pub fn t_max(p: &RippleParams, period: Second) -> Result<Second> {
    let tau = p.time_constant()?.0;
    let half = 0.5 * period.0;
    Ok(Second(tau * (half / (tau * -(-half / tau).exp_m1())).ln()))
}

/// Closed-form peak ripple, without the `exp(-T / 2RC_p)` corrections.
pub fn ripple_max_unclamped(p: &RippleParams, period: Second) -> Result<Volt> {
    let r = p.resistance()?.0;
    let (c, c0) = (p.c.0, p.c0.0);
    let c_sum = c + c0;
    let tau = r * p.c_p().0;
    let first = period.0 * p.i0.0 / (2.0 * c_sum);
    let second = r * p.i0.0 * c * c0 / (c_sum * c_sum) * (1.0 + (0.5 * period.0 / tau).ln());
    Ok(Volt(first - second))
}

/// Peak ripple, clamped at zero.
pub fn ripple_max(p: &RippleParams, period: Second) -> Result<Volt> {
    let v = ripple_max_unclamped(p, period)?;
    if v.0 < 0.0 {
        log::warn!("closed-form ripple is negative ({v}); reporting 0 V");
        return Ok(Volt(0.0));
    }
    Ok(v)
}
