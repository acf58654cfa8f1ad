//! One-axis parameter sweeps over a base scenario.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_scenario, Summary};
use crate::quantities::{Celsius, Hertz, ScenarioConfig, ValidationReport, Volt, Year};
use crate::trojan::ToggleSource;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    AgeYears,
    TemperatureC,
    SolarVoltage,
    ToggleRate,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::AgeYears => "AgeYears",
            SweepAxis::TemperatureC => "TemperatureC",
            SweepAxis::SolarVoltage => "SolarVoltage",
            SweepAxis::ToggleRate => "ToggleRate",
        }
    }

    /// Applies one axis value to a copy of `base`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut cfg = base.clone();
        match self {
            SweepAxis::AgeYears => cfg.oscillator.age = Year(value),
            SweepAxis::TemperatureC => cfg.oscillator.temperature = Celsius(value),
            SweepAxis::SolarVoltage => cfg.sim.forced_v_solar = Some(Volt(value)),
            SweepAxis::ToggleRate => {
                let mut t = cfg.trojan.take().unwrap_or_default();
                t.enabled = true;
                t.toggle_source = ToggleSource::ExternalRate(Hertz(value));
                cfg.trojan = Some(t);
            }
        }
        cfg
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "age" | "ageyears" => Ok(SweepAxis::AgeYears),
            "temperature" | "temperaturec" | "temp" => Ok(SweepAxis::TemperatureC),
            "solarvoltage" | "vsolar" => Ok(SweepAxis::SolarVoltage),
            "togglerate" | "rate" => Ok(SweepAxis::ToggleRate),
            _ => Err(format!(
                "unknown sweep axis `{s}`; expected AgeYears, TemperatureC, SolarVoltage or ToggleRate"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub scenario: ScenarioConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        r.check(
            !self.values.is_empty(),
            "sweep.values",
            "sweep needs at least one value",
        );
        r.check(
            self.values.iter().all(|v| v.is_finite()),
            "sweep.values",
            "sweep values must be finite",
        );
        r.check(
            self.values.windows(2).all(|w| w[0] < w[1]),
            "sweep.values",
            "sweep values must be strictly increasing",
        );
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub f_osc_hz: Option<f64>,
    pub ripple_max_mv: Option<f64>,
    pub v_out: Option<f64>,
    pub pce: Option<f64>,
    pub locked_code: Option<u8>,
    pub lock_cycles: Option<u32>,
    pub trojan_flag: Option<bool>,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_summary(value: f64, s: &Summary) -> Self {
        Self {
            value,
            f_osc_hz: Some(s.f_osc.0),
            ripple_max_mv: Some(s.ripple_max.0 * 1e3),
            v_out: Some(s.final_v_out.0),
            pce: Some(s.final_pce),
            locked_code: s.locked_code.map(|c| c.count()),
            lock_cycles: s.lock_cycles,
            trojan_flag: Some(s.first_flag_clock.is_some()),
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            self.axis.name(),
            "f_osc_hz",
            "ripple_max_mv",
            "v_out",
            "pce",
            "locked_code",
            "lock_cycles",
            "trojan_flag",
            "error",
        ])?;
        let num = |x: Option<f64>| x.map(super::trace::sig9).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                super::trace::sig9(r.value),
                num(r.f_osc_hz),
                num(r.ripple_max_mv),
                num(r.v_out),
                num(r.pce),
                r.locked_code.map(|c| c.to_string()).unwrap_or_default(),
                r.lock_cycles.map(|c| c.to_string()).unwrap_or_default(),
                r.trojan_flag
                    .map(|f| u8::from(f).to_string())
                    .unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs every point, in parallel; a failing point is recorded and the sweep goes on.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate().into_result()?;
    let rows = spec
        .values
        .par_iter()
        .map(|&value| {
            let cfg = spec.axis.apply(&spec.scenario, value);
            match run_scenario(&cfg) {
                Ok((_, s)) => SweepRow::from_summary(value, &s),
                Err(e) => SweepRow {
                    value,
                    f_osc_hz: None,
                    ripple_max_mv: None,
                    v_out: None,
                    pce: None,
                    locked_code: None,
                    lock_cycles: None,
                    trojan_flag: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepReport {
        axis: spec.axis,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::RoVariant;

    fn spec(axis: SweepAxis, values: &[f64], variant: RoVariant) -> SweepSpec {
        let mut scenario = ScenarioConfig::default();
        scenario.oscillator.variant = variant;
        SweepSpec {
            axis,
            values: values.to_vec(),
            scenario,
        }
    }

    #[test]
    fn age_sweep_reproduces_anchor_row() {
        let r = run_sweep(&spec(
            SweepAxis::AgeYears,
            &[0.0, 5.0, 10.0, 15.0, 20.0],
            RoVariant::Conventional,
        ))
        .unwrap();
        let f: Vec<f64> = r
            .rows
            .iter()
            .map(|row| row.f_osc_hz.unwrap() / 1e3)
            .collect();
        assert_eq!(f, [150.0, 130.0, 115.5, 111.0, 110.0]);
    }

    #[test]
    fn reduced_supply_ripple_is_steadier_with_heat() {
        let spread = |variant| {
            let mut s = spec(SweepAxis::TemperatureC, &[27.0, 40.0, 80.0], variant);
            s.scenario.oscillator.age = Year(10.0);
            let r = run_sweep(&s).unwrap();
            let v: Vec<f64> = r
                .rows
                .iter()
                .map(|row| row.ripple_max_mv.unwrap())
                .collect();
            v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
        };
        assert!(spread(RoVariant::ReducedSupply) < spread(RoVariant::Conventional));
    }

    #[test]
    fn single_point_matches_run() {
        let s = spec(SweepAxis::AgeYears, &[7.5], RoVariant::Aro);
        let r = run_sweep(&s).unwrap();
        let (_, summary) = run_scenario(&SweepAxis::AgeYears.apply(&s.scenario, 7.5)).unwrap();
        assert_eq!(r.rows[0], SweepRow::from_summary(7.5, &summary));
    }

    #[test]
    fn rejects_unordered_values() {
        assert!(run_sweep(&spec(SweepAxis::AgeYears, &[5.0, 5.0], RoVariant::Aro)).is_err());
        assert!(run_sweep(&spec(SweepAxis::AgeYears, &[], RoVariant::Aro)).is_err());
    }

    #[test]
    fn failing_point_does_not_stop_the_sweep() {
        let r = run_sweep(&spec(
            SweepAxis::SolarVoltage,
            &[-1.0, 1.22],
            RoVariant::Aro,
        ))
        .unwrap();
        assert!(r.rows[0].error.is_some());
        assert!(r.rows[1].error.is_none());
    }

    #[test]
    fn parses_axis_names() {
        assert_eq!(
            "AgeYears".parse::<SweepAxis>().unwrap(),
            SweepAxis::AgeYears
        );
        assert_eq!(
            "toggle-rate".parse::<SweepAxis>().unwrap(),
            SweepAxis::ToggleRate
        );
        assert!("pressure".parse::<SweepAxis>().is_err());
    }
}
