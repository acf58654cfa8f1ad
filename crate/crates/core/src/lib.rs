//! Behavioral simulator of an on-chip solar energy-harvesting system.
//!
//! The model chain runs from a single-diode PV cell through a switched-capacitor
//! voltage tripler whose pump capacitance is set by a 16-cell thermometer-coded
//! bank. A clock-accurate Perturb & Observe controller walks that code down one
//! cell per 32-clock cycle until the sensed output power drops. The switching
//! clock comes from a ring oscillator whose frequency degrades with age and
//! temperature, which in turn sets the output ripple. An analog (A2) Trojan can
//! charge a trigger capacitor from a toggling wire and reset the controller's
//! counter; a comparator and counter-zero detector flag it.
//!
//! | module | contents |
//! |---|---|
//! | [`quantities`] | unit newtypes, [`ScenarioConfig`], [`TraceRecord`], validation |
//! | [`converter`] | impedance, output voltage, MPP matching, PCE, PV operating point |
//! | [`ripple`] | on-resistance, ripple waveform, `t_max`, maximum ripple |
//! | [`oscillator`] | aged/temperature-shifted ring-oscillator frequency |
//! | [`mppt`] | the P&O finite state machine and its control-signal schedule |
//! | [`trojan`] | trigger-capacitor accumulation and the detection logic |
//! | [`harness`] | scenario runner, sweeps, power budget, CSV traces, formula evaluator |
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` lists them.

pub mod converter;
pub mod harness;
pub mod mppt;
pub mod oscillator;
pub mod quantities;
pub mod ripple;
pub mod trojan;

pub use harness::{run_scenario, run_sweep, Summary};
pub use quantities::{
    validate_scenario, Ampere, Celsius, ControlSignals, Farad, Hertz, Ohm, ScenarioConfig, Second,
    ThermometerCode, TraceRecord, ValidationReport, Volt, Watt, Year,
};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Validation(ValidationReport),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("capacitor code {0} outside 0..=16")]
    CodeOutOfRange(u32),
    #[error("tripler impedance unbounded: v_out {v_out} >= 3 x v_solar {v_solar}")]
    Singularity { v_solar: Volt, v_out: Volt },
    #[error("MPP target infeasible: v_out target {v_out} >= 3 x v_mpp {v_mpp}")]
    Infeasible { v_mpp: Volt, v_out: Volt },
    #[error("switch below threshold: v_gs {v_gs} <= v_t {v_t}")]
    Subthreshold { v_gs: Volt, v_t: Volt },
    #[error(
        "operating point did not converge after {iterations} iterations (residual {residual})"
    )]
    NonConvergence { iterations: usize, residual: Ampere },
    #[error("schedule violation: {0}")]
    ScheduleViolation(&'static str),
    #[error("at t = {time}: {source}")]
    AtTime {
        time: Second,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical models, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singularity { .. }
            | Error::Infeasible { .. }
            | Error::Subthreshold { .. }
            | Error::NonConvergence { .. }
            | Error::ScheduleViolation(_) => true,
            Error::AtTime { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_errors_are_classified() {
        let sub = Error::Subthreshold {
            v_gs: Volt(0.3),
            v_t: Volt(0.4),
        };
        assert!(sub.is_numerical());
        let wrapped = Error::AtTime {
            time: Second(1e-6),
            source: Box::new(sub),
        };
        assert!(wrapped.is_numerical());
        assert!(wrapped.to_string().starts_with("at t = 0.000001 s"));
        assert!(!Error::Config("x".into()).is_numerical());
        assert!(!Error::Validation(ValidationReport::default()).is_numerical());
    }
}
