//! Brute-force peak search on the ripple waveform against `t_max` and the closed form.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solar_ehs::ripple::{ripple_max_unclamped, ripple_waveform, t_max, RippleParams};
use solar_ehs::{Ampere, Farad, Hertz, Ohm, Second};

/// 10^4-point grid over the half period, refined by golden section around the best sample.
fn grid_peak(p: &RippleParams, period: Second) -> (f64, f64) {
    let half = 0.5 * period.0;
    let n = 10_000;
    let f = |t: f64| ripple_waveform(p, period, Second(t)).unwrap().0;
    let best = (0..=n)
        .map(|k| half * f64::from(k) / f64::from(n))
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap();
    let step = half / f64::from(n);
    let (mut lo, mut hi) = ((best - step).max(0.0), (best + step).min(half));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

fn random_params(rng: &mut impl Rng, period: Second, max_fraction: f64) -> RippleParams {
    let c = rng.random_range(0.2e-9..4e-9);
    let c0 = rng.random_range(0.2e-9..4e-9);
    let cp = c * c0 / (c + c0);
    let tau = rng.random_range(0.002..max_fraction) * period.0;
    RippleParams {
        r_on: Some(Ohm(tau / cp)),
        c: Farad(c),
        c0: Farad(c0),
        i0: Ampere(rng.random_range(1e-6..40e-6)),
        ..RippleParams::default()
    }
}

#[test]
fn grid_peak_is_the_stationary_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let period = Hertz(rng.random_range(100e3..200e3)).period();
        let p = random_params(&mut rng, period, 1.0 / 20.0);
        let (t_grid, v_grid) = grid_peak(&p, period);
        let tm = t_max(&p, period).unwrap();
        let v_tm = ripple_waveform(&p, period, tm).unwrap().0;
        assert!(common::rel(v_grid, v_tm) < 1e-12, "{v_grid} vs {v_tm}");
        assert!(v_grid <= v_tm * (1.0 + 1e-14));
        assert!(
            (t_grid - tm.0).abs() < 1e-4 * period.0,
            "{t_grid} vs {}",
            tm.0
        );
    }
}

#[test]
fn closed_form_matches_for_fast_switches() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let period = Hertz(rng.random_range(100e3..200e3)).period();
        let p = random_params(&mut rng, period, 1.0 / 50.0);
        let (_, v_grid) = grid_peak(&p, period);
        let closed = ripple_max_unclamped(&p, period).unwrap().0;
        assert!(common::rel(v_grid, closed) < 1e-9, "{v_grid} vs {closed}");
    }
}

#[test]
fn closed_form_gap_is_the_dropped_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let period = Hertz(rng.random_range(100e3..200e3)).period();
        let p = random_params(&mut rng, period, 1.0 / 20.0);
        let tau = p.time_constant().unwrap().0;
        let scale = p.i0.0 * tau / (p.c.0 + p.c0.0);
        let x = 0.5 * period.0 / tau;
        let e = (-x).exp();
        let gap = scale * (x * e / (1.0 - e) + (-e).ln_1p());
        let (_, v_grid) = grid_peak(&p, period);
        let closed = ripple_max_unclamped(&p, period).unwrap().0;
        assert!(gap >= 0.0);
        assert!(((v_grid - closed) - gap).abs() < 1e-12 * v_grid, "x {x}");
    }
}
