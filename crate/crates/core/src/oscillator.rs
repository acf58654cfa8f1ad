//! Ring-oscillator frequency under aging and temperature.
//!
//! Aging follows the measured degradation anchors at 0/5/10/15/20 years, linearly
//! interpolated. Temperature acts twice: above the reference it accelerates aging
//! (irreversible), and it shifts the frequency linearly (reversible, stateless).

use serde::{Deserialize, Serialize};

use crate::quantities::{positive, Celsius, Hertz, ValidationReport, Year};

pub const ANCHOR_YEARS: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];
pub const MAX_AGE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoVariant {
    /// Plain CMOS ring oscillator.
    Conventional,
    /// Aging-tolerant RO with reduced negative bias.
    #[serde(rename = "ARO")]
    Aro,
    /// Aging-tolerant RO with its supply removed when idle.
    ReducedSupply,
}

impl RoVariant {
    pub const ALL: [RoVariant; 3] = [
        RoVariant::Conventional,
        RoVariant::Aro,
        RoVariant::ReducedSupply,
    ];

    /// Frequency anchors in kHz at [`ANCHOR_YEARS`].
    pub fn anchors_khz(self) -> [f64; 5] {
        match self {
            RoVariant::Conventional => [150.0, 130.0, 115.5, 111.0, 110.0],
            RoVariant::Aro => [150.0, 139.9, 138.7, 138.5, 138.0],
            RoVariant::ReducedSupply => [150.0, 148.2, 147.6, 147.3, 147.0],
        }
    }

    /// Reversible temperature coefficient used when the config leaves it unset.
    pub fn default_temp_sensitivity(self) -> f64 {
        match self {
            RoVariant::Conventional => -30.0,
            RoVariant::Aro => -20.0,
            RoVariant::ReducedSupply => -10.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RoVariant::Conventional => "Conventional",
            RoVariant::Aro => "ARO",
            RoVariant::ReducedSupply => "ReducedSupply",
        }
    }
}

impl std::str::FromStr for RoVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "conventional" | "cmos" => Ok(RoVariant::Conventional),
            "aro" => Ok(RoVariant::Aro),
            "reducedsupply" | "reduced-supply" | "reduced_supply" => Ok(RoVariant::ReducedSupply),
            other => Err(format!("unknown oscillator variant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscillatorConfig {
    pub variant: RoVariant,
    pub f_nominal: Hertz,
    pub age: Year,
    pub temperature: Celsius,
    /// Reversible shift in Hz/°C; the variant's default when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temp_sensitivity: Option<f64>,
    pub accel_ref_temp: Celsius,
    /// Effective-age multiplier per 40 °C above the reference temperature.
    pub accel_factor_per_40c: f64,
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        Self {
            variant: RoVariant::ReducedSupply,
            f_nominal: Hertz(150e3),
            age: Year(0.0),
            temperature: Celsius(27.0),
            temp_sensitivity: None,
            accel_ref_temp: Celsius(27.0),
            accel_factor_per_40c: 1.5,
        }
    }
}

impl OscillatorConfig {
    pub fn new(variant: RoVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn with_age(mut self, years: f64) -> Self {
        self.age = Year(years);
        self
    }

    pub fn with_temperature(mut self, celsius: f64) -> Self {
        self.temperature = Celsius(celsius);
        self
    }

    pub fn temp_sensitivity(&self) -> f64 {
        self.temp_sensitivity
            .unwrap_or_else(|| self.variant.default_temp_sensitivity())
    }

    /// Age after temperature acceleration, before clamping.
    pub fn effective_age(&self) -> f64 {
        let excess = self.temperature.0 - self.accel_ref_temp.0;
        if excess > 0.0 {
            self.age.0 * self.accel_factor_per_40c.powf(excess / 40.0)
        } else {
            self.age.0
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        r.check(
            positive(self.f_nominal.0),
            "oscillator.f_nominal",
            "oscillator frequency must be positive",
        );
        r.check(
            self.age.0.is_finite() && self.age.0 >= 0.0,
            "oscillator.age",
            "age must be non-negative",
        );
        r.check(
            self.temperature.0.is_finite(),
            "oscillator.temperature",
            "temperature must be finite",
        );
        r.check(
            self.accel_factor_per_40c.is_finite() && self.accel_factor_per_40c >= 1.0,
            "oscillator.accel_factor_per_40c",
            "aging acceleration factor must be at least 1",
        );
        if let Some(s) = self.temp_sensitivity {
            r.check(
                s.is_finite(),
                "oscillator.temp_sensitivity",
                "temperature sensitivity must be finite",
            );
        }
        if r.is_valid() {
            r.check(
                frequency(self).0 > 0.0,
                "oscillator",
                "computed oscillator frequency must be positive",
            );
        }
        r
    }
}

fn interpolate(anchors: &[f64; 5], age: f64) -> f64 {
    let age = age.clamp(0.0, MAX_AGE);
    let seg = ((age / 5.0).floor() as usize).min(3);
    let frac = (age - ANCHOR_YEARS[seg]) / 5.0;
    anchors[seg] * (1.0 - frac) + anchors[seg + 1] * frac
}

/// Oscillation frequency for the configured age and temperature.
pub fn frequency_at(cfg: &OscillatorConfig) -> Hertz {
    let age = cfg.effective_age();
    if age > MAX_AGE {
        log::warn!(
            "effective age {age:.2} y is beyond the 20-year data; using the 20-year frequency"
        );
    }
    frequency(cfg)
}

fn frequency(cfg: &OscillatorConfig) -> Hertz {
    let age = cfg.effective_age();
    let anchors = cfg.variant.anchors_khz();
    let aged_hz = interpolate(&anchors, age) * 1e3 * (cfg.f_nominal.0 / (anchors[0] * 1e3));
    let shift = cfg.temp_sensitivity() * (cfg.temperature.0 - cfg.accel_ref_temp.0);
    Hertz(aged_hz + shift)
}

/// Frequency loss relative to nominal, in percent.
pub fn degradation_percent(cfg: &OscillatorConfig) -> f64 {
    100.0 * (cfg.f_nominal.0 - frequency_at(cfg).0) / cfg.f_nominal.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn khz(variant: RoVariant, age: f64) -> f64 {
        frequency_at(&OscillatorConfig::new(variant).with_age(age)).0 / 1e3
    }

    #[test]
    fn anchor_values() {
        assert_eq!(khz(RoVariant::Conventional, 0.0), 150.0);
        assert_eq!(khz(RoVariant::Conventional, 5.0), 130.0);
        assert_eq!(khz(RoVariant::Conventional, 20.0), 110.0);
        assert_eq!(khz(RoVariant::Aro, 10.0), 138.7);
        assert_eq!(khz(RoVariant::ReducedSupply, 15.0), 147.3);
    }

    #[test]
    fn interpolates_between_anchors() {
        assert!((khz(RoVariant::Conventional, 7.5) - 122.75).abs() < 1e-9);
    }

    #[test]
    fn clamps_beyond_twenty_years() {
        assert_eq!(khz(RoVariant::Conventional, 35.0), 110.0);
    }

    #[test]
    fn degradation_from_anchors() {
        let d =
            degradation_percent(&OscillatorConfig::new(RoVariant::ReducedSupply).with_age(20.0));
        assert!((d - 2.0).abs() < 1e-9);
        let d = degradation_percent(&OscillatorConfig::new(RoVariant::Conventional).with_age(20.0));
        assert!((d - 26.666_666_666_666_668).abs() < 1e-9);
        for v in RoVariant::ALL {
            assert_eq!(degradation_percent(&OscillatorConfig::new(v)), 0.0);
        }
    }

    #[test]
    fn variant_ordering_for_aged_devices() {
        for tenths in 1..=200 {
            let age = f64::from(tenths) / 10.0;
            let c = khz(RoVariant::Conventional, age);
            let a = khz(RoVariant::Aro, age);
            let r = khz(RoVariant::ReducedSupply, age);
            assert!(r > a && a > c, "age {age}: {r} {a} {c}");
        }
    }

    #[test]
    fn heat_accelerates_and_shifts() {
        let base = OscillatorConfig::new(RoVariant::Conventional).with_age(5.0);
        let hot = base.clone().with_temperature(67.0);
        assert!((hot.effective_age() - 7.5).abs() < 1e-12);
        // 122.75 kHz aged, then -30 Hz/°C over 40 °C
        assert!((frequency_at(&hot).0 - (122_750.0 - 1_200.0)).abs() < 1e-6);
        let back = hot.with_temperature(27.0);
        assert_eq!(frequency_at(&back), frequency_at(&base));
    }

    #[test]
    fn cold_does_not_accelerate() {
        let cold = OscillatorConfig::new(RoVariant::Aro)
            .with_age(10.0)
            .with_temperature(0.0);
        assert_eq!(cold.effective_age(), 10.0);
    }

    #[test]
    fn variant_names_parse() {
        for v in RoVariant::ALL {
            assert_eq!(v.name().parse::<RoVariant>().unwrap(), v);
        }
        assert!("ring".parse::<RoVariant>().is_err());
    }
}
