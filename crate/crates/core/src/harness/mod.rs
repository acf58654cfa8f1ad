//! Scenario runner tying the models together clock by clock.
//!
//! Each clock: apply any irradiance step, let the environment sensor raise S,
//! honour a pending Trojan RST, sense power at the applied code, step the
//! controller, charge the trigger capacitor and evaluate the detector.

pub mod budget;
pub mod eval;
pub mod sweep;
pub mod trace;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::converter::{
    driven_state, operating_point_from, ConverterParams, ConverterState, PvParams,
};
use crate::mppt::{self, MpptState, SenseSample};
use crate::oscillator::frequency_at;
use crate::quantities::{
    validate_scenario, ControlSignals, Hertz, ScenarioConfig, Second, ThermometerCode, TraceRecord,
    Volt,
};
use crate::ripple::ripple_max;
use crate::trojan::{accumulate, detect_stages, ToggleSource, TrojanConfig, TrojanState};
use crate::{Error, Result};

pub use budget::{power_budget, Block, BudgetConfig, PowerBudget};
pub use sweep::{run_sweep, SweepAxis, SweepReport, SweepRow, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// The controller locked at least once.
    pub complete: bool,
    pub clocks: u64,
    pub f_osc: Hertz,
    pub ripple_max: Volt,
    pub locked_code: Option<ThermometerCode>,
    pub lock_cycles: Option<u32>,
    /// From S rising to the lock edge.
    pub lock_latency: Option<Second>,
    pub retriggers: u32,
    pub final_v_solar: Volt,
    pub final_v_out: Volt,
    pub final_pce: f64,
    pub rst_fired_at: Option<Second>,
    pub first_flag_clock: Option<u64>,
    pub flagged_clocks: u64,
}

/// Switching frequency after aging: the converter's design frequency scaled by the oscillator.
pub fn effective_converter(cfg: &ScenarioConfig) -> (ConverterParams, Hertz) {
    let f_osc = frequency_at(&cfg.oscillator);
    let mut conv = cfg.converter.clone();
    conv.f_s = Hertz(conv.f_s.0 * (f_osc / cfg.oscillator.f_nominal));
    (conv, f_osc)
}

fn at(time: Second) -> impl Fn(Error) -> Error {
    move |e| Error::AtTime {
        time,
        source: Box::new(e),
    }
}

struct Plant {
    pv: PvParams,
    conv: ConverterParams,
    forced: Option<Volt>,
    cache: [Option<ConverterState>; 17],
}

impl Plant {
    fn state(&mut self, code: ThermometerCode) -> Result<ConverterState> {
        let slot = usize::from(code.count());
        if let Some(cs) = self.cache[slot] {
            return Ok(cs);
        }
        let cs = match self.forced {
            Some(v) => driven_state(&self.conv, code.count(), v)?,
            None => {
                let (v_mpp, _) = self.pv.maximum_power_point();
                operating_point_from(&self.pv, &self.conv, code.count(), v_mpp)?
            }
        };
        self.cache[slot] = Some(cs);
        Ok(cs)
    }

    fn set_irradiance(&mut self, scale: f64) {
        self.pv.irradiance_scale = scale;
        self.cache = [None; 17];
    }
}

fn clock_count(duration: Second, period: Second) -> u64 {
    let n = duration.0 / period.0;
    // guard against 600.0000000001 clocks in 4 ms
    let rounded = n.round();
    if (n - rounded).abs() < 1e-9 * n.max(1.0) {
        rounded as u64
    } else {
        n.ceil() as u64
    }
}

/// Runs a scenario and returns the (decimated) trace and its summary.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<(Vec<TraceRecord>, Summary)> {
    validate_scenario(cfg).into_result()?;
    let (conv, f_osc) = effective_converter(cfg);
    let period = conv.period();
    let ripple = ripple_max(&cfg.ripple, period).map_err(at(Second(0.0)))?;
    let clocks = clock_count(cfg.sim.duration, period);

    let mut plant = Plant {
        pv: cfg.pv.clone(),
        conv,
        forced: cfg.sim.forced_v_solar,
        cache: [None; 17],
    };
    let attack: Option<&TrojanConfig> = cfg.trojan.as_ref().filter(|t| t.enabled);
    let detector = cfg.trojan.clone().unwrap_or_default();
    let window_clocks = cfg.mppt.window_clocks();
    let decimation = u64::from(cfg.sim.trace_decimation);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sim.seed);
    let noise = if cfg.mppt.sense_noise > 0.0 {
        Some(Normal::new(0.0, cfg.mppt.sense_noise).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };

    let mut summary = Summary {
        complete: false,
        clocks,
        f_osc,
        ripple_max: ripple,
        locked_code: None,
        lock_cycles: None,
        lock_latency: None,
        retriggers: 0,
        final_v_solar: Volt(0.0),
        final_v_out: Volt(0.0),
        final_pce: 0.0,
        rst_fired_at: None,
        first_flag_clock: None,
        flagged_clocks: 0,
    };
    let mut trace = Vec::with_capacity((clocks / decimation + 1) as usize);
    let mut fsm = MpptState::default();
    let mut trojan = TrojanState::default();
    let mut triggered = false;
    let mut trigger_time = Second(0.0);
    let mut window: u32 = 0;
    let mut prev_v_solar: Option<Volt> = None;
    let mut step_applied = false;
    let mut ext_phase = 0.0;

    for n in 0..clocks {
        let t = Second(n as f64 * period.0);
        let ctx = at(t);
        if let Some(step) = cfg.sim.irradiance_step {
            if !step_applied && t.0 >= step.at.0 {
                plant.set_irradiance(step.scale);
                step_applied = true;
            }
        }

        let now = plant.state(fsm.code).map_err(&ctx)?;
        let falling = prev_v_solar.is_some_and(|p| p >= cfg.mppt.v_solar_threshold)
            && now.v_solar < cfg.mppt.v_solar_threshold;
        if !triggered && t.0 >= cfg.mppt.normal_operation_time.0 {
            fsm = mppt::trigger(&fsm);
            triggered = true;
            trigger_time = t;
            window = 0;
        } else if fsm.is_locked() && falling {
            fsm = mppt::trigger(&fsm);
            summary.retriggers += 1;
            trigger_time = t;
            window = 0;
        }
        if triggered {
            window = window.saturating_add(1);
        }
        let armed = triggered && window <= window_clocks;

        let applied = plant.state(fsm.code).map_err(&ctx)?;
        let mut sample: SenseSample = mppt::sense(&applied, cfg.mppt.r_sen);
        if let Some(dist) = &noise {
            let factor = 1.0 + dist.sample(&mut rng);
            sample.power = sample.power * factor.max(0.0);
        }

        let was_locked = fsm.is_locked();
        if trojan.rst && triggered {
            fsm = mppt::hold_reset(&fsm);
        } else if fsm.is_active() {
            fsm = mppt::step_clock(&fsm, &cfg.mppt, sample).map_err(&ctx)?;
        }
        if fsm.is_locked() && !was_locked {
            summary.complete = true;
            summary.locked_code = Some(fsm.code);
            summary.lock_cycles = Some(fsm.cycle_index + 1);
            summary.lock_latency = Some(t - trigger_time);
        }

        if let Some(tc) = attack {
            let toggles = match tc.toggle_source {
                ToggleSource::MpptClock => u32::from(fsm.is_active()),
                ToggleSource::ExternalRate(f) => {
                    ext_phase += f.0 * period.0;
                    let whole = ext_phase.floor();
                    ext_phase -= whole;
                    whole as u32
                }
            };
            trojan = accumulate(&trojan, tc, toggles, period);
            if trojan.rst && summary.rst_fired_at.is_none() {
                summary.rst_fired_at = Some(t);
            }
        }
        let d = detect_stages(&trojan, &detector, fsm.counter, armed);
        trojan.detection_window_i = armed;
        trojan.v_outc = d.v_outc;
        trojan.counter_zero_seen |= armed && fsm.counter == 0;
        trojan.trojan_flag = d.flag;
        if d.flag {
            summary.flagged_clocks += 1;
            summary.first_flag_clock.get_or_insert(n);
        }

        let cs = plant.state(fsm.code).map_err(&ctx)?;
        prev_v_solar = Some(cs.v_solar);
        summary.final_v_solar = cs.v_solar;
        summary.final_v_out = cs.v_out;
        summary.final_pce = cs.pce;

        if n % decimation == 0 {
            trace.push(TraceRecord {
                time: t,
                clock_index: n,
                fsm_state: fsm.phase,
                thermometer_code: fsm.code,
                v_solar: cs.v_solar,
                v_out: cs.v_out,
                p_sense: sample.power,
                control_signals: ControlSignals {
                    i: armed,
                    ..fsm.signals
                },
                trojan_cap_v: trojan.v_cap,
                rst: trojan.rst,
                trojan_flag: d.flag,
            });
        }
    }
    Ok((trace, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mppt::MpptPhase;
    use crate::quantities::IrradianceStep;

    #[test]
    fn default_scenario_locks_benignly() {
        let (trace, s) = run_scenario(&ScenarioConfig::default()).unwrap();
        assert_eq!(trace.len(), 600);
        assert!(s.complete);
        assert_eq!(s.locked_code.map(|c| c.count()), Some(14));
        assert_eq!(s.lock_cycles, Some(3));
        assert!((s.lock_latency.unwrap().micros() - 640.0).abs() < 1e-6);
        assert!((3.0..=3.55).contains(&s.final_v_out.0), "{}", s.final_v_out);
        assert_eq!(s.first_flag_clock, None);
        assert!(trace.iter().all(|r| !r.trojan_flag));
    }

    #[test]
    fn trigger_waits_for_normal_operation() {
        let (trace, _) = run_scenario(&ScenarioConfig::default()).unwrap();
        let first = trace.iter().position(|r| r.control_signals.s).unwrap();
        assert_eq!(first, 23);
        assert_eq!(trace[first].fsm_state, MpptPhase::SensePn);
        assert!(trace[..first]
            .iter()
            .all(|r| r.fsm_state == MpptPhase::Idle));
    }

    #[test]
    fn zero_duration_is_empty_and_incomplete() {
        let mut cfg = ScenarioConfig::default();
        cfg.sim.duration = Second(0.0);
        let (trace, s) = run_scenario(&cfg).unwrap();
        assert!(trace.is_empty());
        assert!(!s.complete);
    }

    #[test]
    fn default_attack_is_detected() {
        let cfg = ScenarioConfig {
            trojan: Some(TrojanConfig::default()),
            ..ScenarioConfig::default()
        };
        let (trace, s) = run_scenario(&cfg).unwrap();
        let fired = s.rst_fired_at.expect("rst fires");
        let fire_clock = trace.iter().position(|r| r.rst).unwrap();
        assert!(trace[fire_clock].trojan_flag || trace[fire_clock + 1].trojan_flag);
        let trigger = trace.iter().position(|r| r.control_signals.s).unwrap();
        assert!(fire_clock - trigger < 16 * 32);
        assert!(fired.0 > 0.0);
        assert!(!s.complete);
    }

    #[test]
    fn irradiance_drop_retriggers() {
        let mut cfg = ScenarioConfig::default();
        cfg.sim.irradiance_step = Some(IrradianceStep {
            at: Second(1.5e-3),
            scale: 0.5,
        });
        let (_, s) = run_scenario(&cfg).unwrap();
        assert_eq!(s.retriggers, 1);
        assert!(s.complete);
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let mut cfg = ScenarioConfig::default();
        cfg.mppt.sense_noise = 0.01;
        cfg.sim.seed = 7;
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = ScenarioConfig::default();
        cfg.converter.r_l = crate::Ohm(-1.0);
        assert!(matches!(run_scenario(&cfg), Err(Error::Validation(_))));
    }
}
