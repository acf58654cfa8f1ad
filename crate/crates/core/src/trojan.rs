//! A2-style analog Trojan and the detector that watches for it.
//!
//! The payload is a trigger capacitor next to a toggling wire. Each toggle shares
//! a fraction `eta` of the remaining headroom to `v_dd`; between toggles it leaks
//! with `tau_leak`. Once it crosses `v_trig` it asserts RST on the MPPT counter.
//!
//! The detector is armed while the window signal `i` is high. It flags a Trojan when
//! the wire node exceeds `v_ref`, or when the counter reads zero inside the window.

use serde::{Deserialize, Serialize};

use crate::quantities::{positive, Hertz, Second, ValidationReport, Volt};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ToggleSource {
    /// One toggle per clock while the controller is running.
    MpptClock,
    /// A free-running toggle rate chosen by the attacker.
    ExternalRate(Hertz),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrojanConfig {
    pub enabled: bool,
    /// Charge-share fraction per toggle.
    pub eta: f64,
    /// Leakage time constant; `inf` for none.
    pub tau_leak: Second,
    pub v_trig: Volt,
    pub v_dd: Volt,
    pub toggle_source: ToggleSource,
    /// Detector comparator reference.
    pub v_ref: Volt,
}

impl Default for TrojanConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            eta: 0.05,
            tau_leak: Second(5e-3),
            v_trig: Volt(0.96),
            v_dd: Volt(1.2),
            toggle_source: ToggleSource::MpptClock,
            v_ref: Volt(0.48),
        }
    }
}

impl TrojanConfig {
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        r.check(
            self.eta > 0.0 && self.eta < 1.0,
            "trojan.eta",
            "eta must lie in (0, 1)",
        );
        r.check(
            !self.tau_leak.0.is_nan() && self.tau_leak.0 > 0.0,
            "trojan.tau_leak",
            "leakage time constant must be positive",
        );
        r.check(
            positive(self.v_dd.0),
            "trojan.v_dd",
            "v_dd must be positive",
        );
        r.check(
            self.v_trig.0 > 0.0 && self.v_trig.0 < self.v_dd.0,
            "trojan.v_trig",
            "trigger threshold must lie in (0, v_dd)",
        );
        r.check(
            self.v_ref.0 > 0.0 && self.v_ref.0 < self.v_trig.0,
            "trojan.v_ref",
            "detector reference must lie in (0, v_trig)",
        );
        if let ToggleSource::ExternalRate(f) = self.toggle_source {
            r.check(
                f.0.is_finite() && f.0 >= 0.0,
                "trojan.toggle_source",
                "toggle rate must be non-negative",
            );
        }
        r
    }

    /// Steady-state capacitor voltage under toggles spaced `dt` apart.
    pub fn fixed_point(&self, dt: Second) -> Volt {
        let kept = (-dt.0 / self.tau_leak.0).exp();
        Volt(self.v_dd.0 * self.eta / (self.eta + (1.0 - self.eta) * (1.0 - kept)))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TrojanState {
    pub v_cap: Volt,
    /// RST is asserted now.
    pub rst: bool,
    /// RST has been asserted at some point.
    pub rst_fired: bool,
    pub detection_window_i: bool,
    /// Comparator output, low when the wire node is above `v_ref`.
    pub v_outc: bool,
    pub counter_zero_seen: bool,
    pub trojan_flag: bool,
}

/// Leaks over `dt`, then applies `toggles` charge-sharing events.
pub fn accumulate(
    state: &TrojanState,
    cfg: &TrojanConfig,
    toggles: u32,
    dt: Second,
) -> TrojanState {
    let mut next = *state;
    let mut v = state.v_cap.0 * (-dt.0 / cfg.tau_leak.0).exp();
    for _ in 0..toggles {
        v += cfg.eta * (cfg.v_dd.0 - v);
    }
    next.v_cap = Volt(v.clamp(0.0, cfg.v_dd.0));
    next.rst = next.v_cap.0 >= cfg.v_trig.0;
    next.rst_fired |= next.rst;
    next
}

/// Stage outputs of the detector for one clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detection {
    pub v_outc: bool,
    /// Counter-nonzero when armed, forced high otherwise.
    pub mux_out: bool,
    pub flag: bool,
}

pub fn detect_stages(
    state: &TrojanState,
    cfg: &TrojanConfig,
    counter_bits: u16,
    i: bool,
) -> Detection {
    let v_outc = !(i && state.v_cap.0 > cfg.v_ref.0);
    let mux_out = if i { counter_bits != 0 } else { true };
    Detection {
        v_outc,
        mux_out,
        flag: i && (!v_outc || !mux_out),
    }
}

/// True when a Trojan is detected.
pub fn detect(state: &TrojanState, cfg: &TrojanConfig, counter_bits: u16, i: bool) -> bool {
    detect_stages(state, cfg, counter_bits, i).flag
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub fires: bool,
    pub time_to_fire: Option<Second>,
    pub toggles_to_fire: Option<u64>,
    /// Highest capacitor voltage reached within the window.
    pub peak_v_cap: Volt,
}

/// Toggles the wire at `toggle_rate` over `window` and reports when RST fires.
pub fn attack_feasibility(
    cfg: &TrojanConfig,
    window: Second,
    toggle_rate: Hertz,
) -> FeasibilityReport {
    let mut report = FeasibilityReport {
        fires: false,
        time_to_fire: None,
        toggles_to_fire: None,
        peak_v_cap: Volt(0.0),
    };
    if toggle_rate.0.is_nan() || toggle_rate.0 <= 0.0 || window.0.is_nan() || window.0 <= 0.0 {
        return report;
    }
    let dt = toggle_rate.period();
    let total = (window.0 * toggle_rate.0).floor() as u64;
    let mut state = TrojanState::default();
    for n in 1..=total {
        let before = state.v_cap.0;
        state = accumulate(&state, cfg, 1, dt);
        report.peak_v_cap = Volt(report.peak_v_cap.0.max(state.v_cap.0));
        if state.rst {
            report.fires = true;
            report.time_to_fire = Some(Second(n as f64 * dt.0));
            report.toggles_to_fire = Some(n);
            break;
        }
        // settled below the threshold
        if (state.v_cap.0 - before).abs() <= 1e-15 * cfg.v_dd.0 {
            break;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lossless(eta: f64) -> TrojanConfig {
        TrojanConfig {
            eta,
            tau_leak: Second(f64::INFINITY),
            ..TrojanConfig::default()
        }
    }

    #[test]
    fn one_toggle_hand_value() {
        let s = accumulate(&TrojanState::default(), &lossless(0.1), 1, Second(1e-6));
        assert!((s.v_cap.0 - 0.12).abs() < 1e-15);
        assert!(!s.rst);
    }

    #[test]
    fn pure_leakage_drains() {
        let cfg = TrojanConfig::default();
        let s = TrojanState {
            v_cap: Volt(1.0),
            ..TrojanState::default()
        };
        let s = accumulate(&s, &cfg, 0, Second(1.0));
        assert!(s.v_cap.0 < 1e-80);
    }

    #[test]
    fn lossless_closed_form() {
        let cfg = lossless(0.1);
        let mut s = TrojanState::default();
        for n in 1..=40 {
            s = accumulate(&s, &cfg, 1, Second(1e-6));
            let closed = 1.2 * (1.0 - 0.9f64.powi(n));
            assert!((s.v_cap.0 - closed).abs() < 1e-12, "n {n}");
            assert!(s.v_cap.0 <= cfg.v_dd.0);
        }
    }

    #[test]
    fn fires_at_sixteenth_toggle() {
        let cfg = lossless(0.1);
        let r = attack_feasibility(&cfg, Second(16e-6), Hertz(1e6));
        assert!(r.fires);
        assert_eq!(r.toggles_to_fire, Some(16));
        assert!((r.time_to_fire.unwrap().0 - 16e-6).abs() < 1e-15);
        let short = attack_feasibility(&cfg, Second(15e-6), Hertz(1e6));
        assert!(!short.fires);
    }

    #[test]
    fn fast_leak_never_fires() {
        let cfg = TrojanConfig {
            tau_leak: Second(1e-9),
            ..TrojanConfig::default()
        };
        let r = attack_feasibility(&cfg, Second(3.4e-3), Hertz(1e3));
        assert!(!r.fires);
        assert!(r.peak_v_cap.0 <= cfg.fixed_point(Hertz(1e3).period()).0 + 1e-12);
        assert!(!attack_feasibility(&TrojanConfig::default(), Second(1.0), Hertz(0.0)).fires);
    }

    #[test]
    fn fixed_point_bounds_the_trajectory() {
        let cfg = TrojanConfig::default();
        let dt = Second(1e-4);
        let bound = cfg.fixed_point(dt).0;
        let mut s = TrojanState::default();
        for _ in 0..2000 {
            s = accumulate(&s, &cfg, 1, dt);
            assert!(s.v_cap.0 <= bound + 1e-12);
        }
        assert!((s.v_cap.0 - bound).abs() < 1e-9);
    }

    #[test]
    fn truth_table() {
        let cfg = TrojanConfig::default();
        let high = TrojanState {
            v_cap: Volt(0.7),
            ..TrojanState::default()
        };
        let low = TrojanState::default();
        let rows = [
            (false, false, false, false),
            (false, false, true, false),
            (false, true, false, false),
            (false, true, true, false),
            (true, false, false, false),
            (true, false, true, true),
            (true, true, false, true),
            (true, true, true, true),
        ];
        for (i, above, zero, expected) in rows {
            let s = if above { high } else { low };
            let counter = if zero { 0 } else { 0x0123 };
            assert_eq!(
                detect(&s, &cfg, counter, i),
                expected,
                "i {i} above {above} zero {zero}"
            );
        }
    }

    #[test]
    fn validation() {
        assert!(TrojanConfig::default().validate().is_valid());
        let bad = TrojanConfig {
            eta: 1.0,
            v_ref: Volt(1.0),
            ..TrojanConfig::default()
        };
        let fields: Vec<_> = bad
            .validate()
            .violations
            .into_iter()
            .map(|v| v.field)
            .collect();
        assert_eq!(fields, ["trojan.eta", "trojan.v_ref"]);
    }
}
