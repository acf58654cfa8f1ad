//! Clock-accurate Perturb & Observe controller with capacitor-value modulation.
//!
//! One MPPT cycle is 32 clocks:
//!
//! | clocks | phase | signals |
//! |---|---|---|
//! | 1–14 | `SenseP_n` | S1, Ssen; average sensed power into `p_n` |
//! | 15 | `Cvm` | code decremented, Ssen low |
//! | 16–29 | `SenseP_n1` | S2, Ssen; average into `p_n1` |
//! | 30–31 | `Compare` | S3; S4 on 31 latches the comparator |
//! | 32 | `Decide` | S5; the decision is taken at the clock edge that follows |
//!
//! The controller stops at the first cycle whose perturbed power is lower, and
//! moves the code back one step.

use serde::{Deserialize, Serialize};

use crate::converter::{operating_point_from, ConverterParams, ConverterState, PvParams};
use crate::quantities::{
    positive, ControlSignals, Ohm, Second, ThermometerCode, ValidationReport, Volt, Watt,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MpptConfig {
    pub clocks_per_cycle: u32,
    pub max_cycles: u32,
    pub sense_clocks: u32,
    pub r_sen: Ohm,
    /// Quiet time after power-up before the environment sensor raises S.
    pub normal_operation_time: Second,
    /// A falling crossing below this level restarts tracking after lock.
    pub v_solar_threshold: Volt,
    /// Relative standard deviation of current-sensor noise; 0 disables it.
    pub sense_noise: f64,
}

impl Default for MpptConfig {
    fn default() -> Self {
        Self {
            clocks_per_cycle: 32,
            max_cycles: 16,
            sense_clocks: 14,
            r_sen: Ohm(10e3),
            normal_operation_time: Second(150e-6),
            v_solar_threshold: Volt(1.0),
            sense_noise: 0.0,
        }
    }
}

impl MpptConfig {
    /// Clocks in one full tracking attempt, which is also the detection window.
    pub fn window_clocks(&self) -> u32 {
        self.clocks_per_cycle * self.max_cycles
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        r.check(
            self.clocks_per_cycle == 32,
            "mppt.clocks_per_cycle",
            "an MPPT cycle is 32 clocks",
        );
        r.check(
            self.max_cycles == 16,
            "mppt.max_cycles",
            "the capacitor bank allows 16 cycles",
        );
        r.check(
            self.sense_clocks == 14,
            "mppt.sense_clocks",
            "each sensing window is 14 clocks",
        );
        r.check(
            positive(self.r_sen.0),
            "mppt.r_sen",
            "sense resistor must be positive",
        );
        r.check(
            self.normal_operation_time.0.is_finite() && self.normal_operation_time.0 >= 0.0,
            "mppt.normal_operation_time",
            "normal operation time must be non-negative",
        );
        r.check(
            self.v_solar_threshold.0.is_finite() && self.v_solar_threshold.0 >= 0.0,
            "mppt.v_solar_threshold",
            "threshold must be non-negative",
        );
        r.check(
            self.sense_noise.is_finite() && (0.0..=0.5).contains(&self.sense_noise),
            "mppt.sense_noise",
            "sense noise must lie in [0, 0.5]",
        );
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MpptPhase {
    Idle,
    #[serde(rename = "SenseP_n")]
    SensePn,
    Cvm,
    #[serde(rename = "SenseP_n1")]
    SensePn1,
    Compare,
    Decide,
    Locked,
}

impl MpptPhase {
    pub fn name(self) -> &'static str {
        match self {
            MpptPhase::Idle => "Idle",
            MpptPhase::SensePn => "SenseP_n",
            MpptPhase::Cvm => "Cvm",
            MpptPhase::SensePn1 => "SenseP_n1",
            MpptPhase::Compare => "Compare",
            MpptPhase::Decide => "Decide",
            MpptPhase::Locked => "Locked",
        }
    }
}

/// One clock's current-sensor reading.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SenseSample {
    pub power: Watt,
    /// Voltage across the sense resistor.
    pub v_sens: Volt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpptState {
    pub phase: MpptPhase,
    /// Zero-based MPPT cycle.
    pub cycle_index: u32,
    /// 1..=32 once running, 0 before the first clock.
    pub clock_in_cycle: u32,
    pub code: ThermometerCode,
    pub p_n: Watt,
    pub p_n1: Watt,
    pub signals: ControlSignals,
    pub v_out_comp: bool,
    pub xnor_out: bool,
    /// Held sense voltages of the two windows.
    pub v_out1: Volt,
    pub v_out2: Volt,
    /// Clocks since S rose; frozen at lock, cleared by reset.
    pub counter: u16,
    acc_power: f64,
    acc_sens: f64,
    acc_n: u32,
}

impl Default for MpptState {
    fn default() -> Self {
        Self {
            phase: MpptPhase::Idle,
            cycle_index: 0,
            clock_in_cycle: 0,
            code: ThermometerCode::FULL,
            p_n: Watt(0.0),
            p_n1: Watt(0.0),
            signals: ControlSignals::default(),
            v_out_comp: true,
            xnor_out: true,
            v_out1: Volt(0.0),
            v_out2: Volt(0.0),
            counter: 0,
            acc_power: 0.0,
            acc_sens: 0.0,
            acc_n: 0,
        }
    }
}

impl MpptState {
    /// Triggered and not yet locked.
    pub fn is_active(&self) -> bool {
        self.signals.s && self.phase != MpptPhase::Locked
    }

    pub fn is_locked(&self) -> bool {
        self.phase == MpptPhase::Locked
    }

    fn take_mean(&mut self) -> (Watt, Volt) {
        let n = f64::from(self.acc_n.max(1));
        let out = (Watt(self.acc_power / n), Volt(self.acc_sens / n));
        self.acc_power = 0.0;
        self.acc_sens = 0.0;
        self.acc_n = 0;
        out
    }

    fn accumulate(&mut self, sample: SenseSample) {
        self.acc_power += sample.power.0;
        self.acc_sens += sample.v_sens.0;
        self.acc_n += 1;
    }
}

/// S rises: restart from the full bank, ready for clock 1.
pub fn trigger(_state: &MpptState) -> MpptState {
    let mut next = MpptState::default();
    next.signals.s = true;
    next
}

/// Holds the controller in reset for one clock, as the RST input does.
pub fn hold_reset(state: &MpptState) -> MpptState {
    let mut next = MpptState::default();
    next.signals.s = state.signals.s;
    next
}

/// Advances the controller by one clock.
///
/// `sample` is the sensor reading taken with the code that was applied during the clock.
pub fn step_clock(state: &MpptState, cfg: &MpptConfig, sample: SenseSample) -> Result<MpptState> {
    match state.phase {
        MpptPhase::Locked => {
            return Err(Error::ScheduleViolation(
                "step_clock called on a locked controller",
            ))
        }
        MpptPhase::Idle if !state.signals.s => return Ok(state.clone()),
        _ => {}
    }
    if sample.power.0.is_nan() || sample.power.0 < 0.0 {
        return Err(Error::ScheduleViolation(
            "sensed power must be non-negative",
        ));
    }

    let mut next = if state.phase == MpptPhase::Decide {
        let decided = compare_and_decide(state, cfg);
        if decided.is_locked() {
            return Ok(decided);
        }
        decided
    } else {
        state.clone()
    };

    next.clock_in_cycle += 1;
    next.counter = next.counter.saturating_add(1);
    let clock = next.clock_in_cycle;
    let sense = cfg.sense_clocks;
    let s = next.signals.s;
    next.signals = ControlSignals {
        s,
        ..ControlSignals::default()
    };

    if clock <= sense {
        next.phase = MpptPhase::SensePn;
        next.signals.s1 = true;
        next.signals.ssen = true;
        next.accumulate(sample);
        if clock == sense {
            let (p, v) = next.take_mean();
            next.p_n = p;
            next.v_out1 = v;
        }
    } else if clock == sense + 1 {
        next.phase = MpptPhase::Cvm;
        next.code = next.code.decremented();
    } else if clock <= 2 * sense + 1 {
        next.phase = MpptPhase::SensePn1;
        next.signals.s2 = true;
        next.signals.ssen = true;
        next.accumulate(sample);
        if clock == 2 * sense + 1 {
            let (p, v) = next.take_mean();
            next.p_n1 = p;
            next.v_out2 = v;
        }
    } else if clock < cfg.clocks_per_cycle {
        next.phase = MpptPhase::Compare;
        next.signals.s3 = true;
        if clock == cfg.clocks_per_cycle - 1 {
            next.signals.s4 = true;
            let previous = next.v_out_comp;
            next.v_out_comp = next.p_n.0 <= next.p_n1.0;
            next.xnor_out = next.v_out_comp == previous;
        }
    } else {
        next.phase = MpptPhase::Decide;
        next.signals.s5 = true;
    }
    Ok(next)
}

/// Applies the end-of-cycle decision.
pub fn compare_and_decide(state: &MpptState, cfg: &MpptConfig) -> MpptState {
    debug_assert!(matches!(
        state.phase,
        MpptPhase::Compare | MpptPhase::Decide
    ));
    let mut next = state.clone();
    if state.p_n.0 > state.p_n1.0 {
        next.v_out_comp = false;
        next.xnor_out = !state.v_out_comp;
        next.code = state.code.incremented();
        lock(&mut next);
    } else if state.cycle_index + 1 >= cfg.max_cycles {
        lock(&mut next);
    } else {
        next.cycle_index += 1;
        next.clock_in_cycle = 0;
        next.p_n = state.p_n1;
        next.phase = MpptPhase::SensePn;
    }
    next
}

fn lock(state: &mut MpptState) {
    state.phase = MpptPhase::Locked;
    state.signals = ControlSignals::default();
}

pub fn sense_power(cs: &ConverterState, _r_sen: Ohm) -> Watt {
    cs.v_out * cs.i_out
}

pub fn sense(cs: &ConverterState, r_sen: Ohm) -> SenseSample {
    SenseSample {
        power: sense_power(cs, r_sen),
        v_sens: cs.i_out * r_sen,
    }
}

/// Per-cycle record of a tracking run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleRecord {
    /// Code during the first sensing window.
    pub code: ThermometerCode,
    pub p_n: Watt,
    pub p_n1: Watt,
}

/// One clock of a standalone tracking run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClockRecord {
    pub clock: u32,
    pub phase: MpptPhase,
    pub code: ThermometerCode,
    pub signals: ControlSignals,
    pub power: Watt,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MpptResult {
    pub locked_code: ThermometerCode,
    pub cycles_used: u32,
    /// Locked without ever seeing a decrease.
    pub exhausted: bool,
    pub cycles: Vec<CycleRecord>,
    pub trace: Vec<ClockRecord>,
}

/// Runs one tracking attempt against an arbitrary power-vs-code source.
pub fn run_mppt_with(
    cfg: &MpptConfig,
    mut source: impl FnMut(ThermometerCode) -> Result<SenseSample>,
) -> Result<MpptResult> {
    let mut state = trigger(&MpptState::default());
    let mut cycles = Vec::new();
    let mut trace = Vec::new();
    let limit = cfg.window_clocks() + 1;
    for clock in 1..=limit {
        let applied = state.code;
        let sample = source(applied)?;
        let cycle_start = state.code;
        state = step_clock(&state, cfg, sample)?;
        if state.phase == MpptPhase::Decide {
            cycles.push(CycleRecord {
                code: ThermometerCode::new(cycle_start.count() + 1)
                    .unwrap_or(ThermometerCode::FULL),
                p_n: state.p_n,
                p_n1: state.p_n1,
            });
        }
        trace.push(ClockRecord {
            clock,
            phase: state.phase,
            code: state.code,
            signals: state.signals,
            power: sample.power,
        });
        if state.is_locked() {
            let exhausted = state.v_out_comp;
            return Ok(MpptResult {
                locked_code: state.code,
                cycles_used: state.cycle_index + 1,
                exhausted,
                cycles,
                trace,
            });
        }
    }
    Err(Error::ScheduleViolation(
        "controller did not lock within its window",
    ))
}

/// Tracks the PV operating point through the converter at every code.
pub fn run_mppt(pv: &PvParams, conv: &ConverterParams, cfg: &MpptConfig) -> Result<MpptResult> {
    let (v_mpp, _) = pv.maximum_power_point();
    let mut cache: [Option<SenseSample>; 17] = [None; 17];
    run_mppt_with(cfg, |code| {
        let slot = &mut cache[usize::from(code.count())];
        if let Some(s) = slot {
            return Ok(*s);
        }
        let cs = operating_point_from(pv, conv, code.count(), v_mpp)?;
        let s = sense(&cs, cfg.r_sen);
        *slot = Some(s);
        Ok(s)
    })
}
