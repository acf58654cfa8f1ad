use solar_ehs::{run_scenario, validate_scenario, ScenarioConfig};

fn load(name: &str) -> ScenarioConfig {
    let path = format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"));
    ScenarioConfig::load(std::path::Path::new(&path)).unwrap()
}

#[test]
fn shipped_scenarios_are_valid() {
    let dir = format!("{}/scenarios", env!("CARGO_MANIFEST_DIR"));
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ScenarioConfig::load(&path).unwrap();
        assert!(validate_scenario(&cfg).is_valid(), "{}", path.display());
        n += 1;
    }
    assert!(n >= 5);
}

#[test]
fn default_file_matches_built_in_defaults() {
    assert_eq!(load("default.toml"), ScenarioConfig::default());
}

#[test]
fn attack_scenario_interrupts_tracking() {
    let (_, s) = run_scenario(&load("trojan_attack.toml")).unwrap();
    assert!(s.rst_fired_at.is_some());
    assert!(s.first_flag_clock.is_some());
    assert!(!s.complete);
}

#[test]
fn leaky_attack_is_flagged_without_firing() {
    let (_, s) = run_scenario(&load("fast_toggle_attack.toml")).unwrap();
    assert!(s.rst_fired_at.is_none());
    assert!(s.first_flag_clock.is_some());
    assert!(s.complete);
}

#[test]
fn irradiance_drop_restarts_tracking() {
    let (trace, s) = run_scenario(&load("irradiance_drop.toml")).unwrap();
    assert_eq!(s.retriggers, 1);
    // the code is back at 16 right after the restart
    let restart = trace
        .windows(2)
        .find(|w| w[0].fsm_state == solar_ehs::mppt::MpptPhase::Locked && w[1].control_signals.s)
        .unwrap();
    assert_eq!(restart[1].thermometer_code.count(), 16);
}

#[test]
fn aged_conventional_output_stays_in_band() {
    let (_, s) = run_scenario(&load("aged_conventional.toml")).unwrap();
    assert!(s.complete);
    assert!((3.0..=3.55).contains(&s.final_v_out.0));
    assert!(s.ripple_max.0 > 14e-3);
}

#[test]
fn subthreshold_gate_fails_validation() {
    let mut cfg = ScenarioConfig::default();
    cfg.ripple.r_on = None;
    cfg.ripple.v_gs = solar_ehs::Volt(0.3);
    assert!(!validate_scenario(&cfg).is_valid());
    assert!(matches!(
        run_scenario(&cfg),
        Err(solar_ehs::Error::Validation(_))
    ));
}
