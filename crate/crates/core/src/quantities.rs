//! Physical-quantity newtypes, scenario configuration and trace records.
//!
//! Every quantity is an SI `f64` wrapped in a transparent newtype, so configuration
//! files stay plain numbers while function signatures keep their units apart.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::converter::{ConverterParams, PvParams};
use crate::harness::budget::BudgetConfig;
use crate::mppt::{MpptConfig, MpptPhase};
use crate::oscillator::OscillatorConfig;
use crate::ripple::RippleParams;
use crate::trojan::TrojanConfig;
use crate::Error;

macro_rules! quantity {
    ($(#[$meta:meta])* $name:ident, $unit:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub f64);

        impl $name {
            pub const ZERO: Self = Self(0.0);

            #[inline]
            pub const fn new(value: f64) -> Self {
                Self(value)
            }

            #[inline]
            pub const fn value(self) -> f64 {
                self.0
            }

            #[inline]
            pub fn is_finite(self) -> bool {
                self.0.is_finite()
            }

            #[inline]
            pub fn abs(self) -> Self {
                Self(self.0.abs())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)?;
                f.write_str(concat!(" ", $unit))
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self(self.0 + rhs.0)
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self(self.0 - rhs.0)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self(-self.0)
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, rhs: f64) -> Self {
                Self(self.0 * rhs)
            }
        }

        impl Div<f64> for $name {
            type Output = Self;
            fn div(self, rhs: f64) -> Self {
                Self(self.0 / rhs)
            }
        }

        impl Div for $name {
            type Output = f64;
            fn div(self, rhs: Self) -> f64 {
                self.0 / rhs.0
            }
        }

        impl std::iter::Sum for $name {
            fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
                Self(iter.map(|q| q.0).sum())
            }
        }
    };
}

quantity!(Volt, "V");
quantity!(Ampere, "A");
quantity!(Ohm, "Ω");
quantity!(Farad, "F");
quantity!(Hertz, "Hz");
quantity!(Second, "s");
quantity!(Watt, "W");
quantity!(Celsius, "°C");
quantity!(Year, "y");

impl Hertz {
    /// Period of one cycle.
    pub fn period(self) -> Second {
        Second(1.0 / self.0)
    }
}

impl Second {
    pub fn frequency(self) -> Hertz {
        Hertz(1.0 / self.0)
    }

    pub fn micros(self) -> f64 {
        self.0 * 1e6
    }
}

impl Mul<Ampere> for Volt {
    type Output = Watt;
    fn mul(self, rhs: Ampere) -> Watt {
        Watt(self.0 * rhs.0)
    }
}

impl Mul<Ohm> for Ampere {
    type Output = Volt;
    fn mul(self, rhs: Ohm) -> Volt {
        Volt(self.0 * rhs.0)
    }
}

impl Div<Ohm> for Volt {
    type Output = Ampere;
    fn div(self, rhs: Ohm) -> Ampere {
        Ampere(self.0 / rhs.0)
    }
}

impl Div<Ampere> for Volt {
    type Output = Ohm;
    fn div(self, rhs: Ampere) -> Ohm {
        Ohm(self.0 / rhs.0)
    }
}

/// Number of set cells in the 16-bit capacitor-bank thermometer code.
///
/// Stored as a count so that only valid patterns (a run of ones starting at `b0`)
/// can be represented. Decrementing clears the highest set bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThermometerCode(u8);

impl ThermometerCode {
    pub const MAX: u8 = 16;
    pub const FULL: Self = Self(Self::MAX);
    pub const EMPTY: Self = Self(0);

    pub fn new(count: u8) -> Result<Self, Error> {
        if count > Self::MAX {
            return Err(Error::CodeOutOfRange(u32::from(count)));
        }
        Ok(Self(count))
    }

    pub fn count(self) -> u8 {
        self.0
    }

    /// `b0..b(count-1)` set.
    pub fn mask(self) -> u16 {
        if self.0 == 16 {
            u16::MAX
        } else {
            (1u16 << self.0) - 1
        }
    }

    pub fn from_mask(mask: u16) -> Option<Self> {
        let ones = mask.trailing_ones();
        (mask.count_ones() == ones).then_some(Self(ones as u8))
    }

    pub fn bit(self, index: u8) -> bool {
        index < self.0
    }

    pub fn decremented(self) -> Self {
        Self(self.0.saturating_sub(1))
    }

    pub fn incremented(self) -> Self {
        Self((self.0 + 1).min(Self::MAX))
    }
}

impl Default for ThermometerCode {
    fn default() -> Self {
        Self::FULL
    }
}

impl fmt::Display for ThermometerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/16", self.0)
    }
}

/// An irradiance change applied part-way through a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrradianceStep {
    pub at: Second,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimControl {
    pub duration: Second,
    pub seed: u64,
    /// Record every n-th clock.
    pub trace_decimation: u32,
    /// Drive the converter from an ideal source at this voltage instead of the PV cell.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forced_v_solar: Option<Volt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irradiance_step: Option<IrradianceStep>,
}

impl Default for SimControl {
    fn default() -> Self {
        Self {
            duration: Second(4e-3),
            seed: 0,
            trace_decimation: 1,
            forced_v_solar: None,
            irradiance_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub pv: PvParams,
    pub converter: ConverterParams,
    pub ripple: RippleParams,
    pub oscillator: OscillatorConfig,
    pub mppt: MpptConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trojan: Option<TrojanConfig>,
    pub sim: SimControl,
    pub budget: BudgetConfig,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String, Error> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.into(),
            message: message.into(),
        });
    }

    /// Records a violation unless `ok` holds.
    pub fn check(&mut self, ok: bool, field: &str, message: &str) {
        if !ok {
            self.push(field, message);
        }
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn into_result(self) -> Result<(), Error> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub(crate) fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Collects every violation across the nested configs. Never mutates its input.
pub fn validate_scenario(cfg: &ScenarioConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    report.merge(cfg.pv.validate());
    report.merge(cfg.converter.validate());
    report.merge(cfg.ripple.validate());
    report.merge(cfg.oscillator.validate());
    report.merge(cfg.mppt.validate());
    if let Some(trojan) = &cfg.trojan {
        report.merge(trojan.validate());
    }
    report.merge(cfg.budget.validate());

    let sim = &cfg.sim;
    report.check(
        sim.duration.0.is_finite() && sim.duration.0 >= 0.0,
        "sim.duration",
        "duration must be non-negative",
    );
    report.check(
        sim.trace_decimation >= 1,
        "sim.trace_decimation",
        "decimation must be at least 1",
    );
    if let Some(v) = sim.forced_v_solar {
        report.check(
            positive(v.0),
            "sim.forced_v_solar",
            "forced input voltage must be positive",
        );
    }
    if let Some(step) = sim.irradiance_step {
        report.check(
            step.at.0.is_finite() && step.at.0 >= 0.0,
            "sim.irradiance_step.at",
            "step time must be non-negative",
        );
        report.check(
            step.scale.is_finite() && step.scale > 0.0 && step.scale <= 1.5,
            "sim.irradiance_step.scale",
            "irradiance scale must lie in (0, 1.5]",
        );
    }
    report
}

/// Named control-signal vector of the MPPT controller plus the detection enable `i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ControlSignals {
    pub s: bool,
    pub s1: bool,
    pub s2: bool,
    pub ssen: bool,
    pub s3: bool,
    pub s4: bool,
    pub s5: bool,
    pub i: bool,
}

impl ControlSignals {
    pub fn ssenbar(&self) -> bool {
        !self.ssen
    }
}

/// One sampled clock of a scenario run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub time: Second,
    pub clock_index: u64,
    pub fsm_state: MpptPhase,
    pub thermometer_code: ThermometerCode,
    pub v_solar: Volt,
    pub v_out: Volt,
    pub p_sense: Watt,
    pub control_signals: ControlSignals,
    pub trojan_cap_v: Volt,
    pub rst: bool,
    pub trojan_flag: bool,
}
