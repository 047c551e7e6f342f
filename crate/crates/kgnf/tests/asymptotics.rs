use std::f64::consts::PI;

use kgnf::asymptotics::*;
use kgnf::kg_solver::{EnergyLedger, LedgerRow, NonlinearityParams, Solver};
use kgnf::spectral_core::RealField;
use kgnf::{Grid, C64};
use proptest::prelude::*;

/// Samples of `z = v - i v_dot` with phase `rho + c ln rho + extra(rho)` plus a third harmonic.
fn synthetic(c: f64, extra: impl Fn(f64) -> f64, rho1: f64, rho2: f64) -> Vec<PhaseSample> {
    let d = 2.0 * PI / 628.0;
    let n = ((rho2 - rho1) / d) as usize;
    (0..=n)
        .map(|k| {
            let rho = rho1 + k as f64 * d;
            let z = C64::from_polar(0.8, rho + c * rho.ln() + 0.4 + extra(rho))
                + C64::from_polar(0.04, 3.0 * rho);
            PhaseSample {
                rho,
                v: z.re,
                v_dot: -z.im,
            }
        })
        .collect()
}

#[test]
fn log_phase_fit_recovers_known_slope() {
    for c in [-0.3, 0.05, 0.5] {
        let s = synthetic(c, |_| 0.0, 20.0, 400.0);
        let f = fit_log_phase(&s, None, 20.0, 400.0).unwrap();
        println!("c={c}: slope {:.6} ci {:?}", f.slope, f.ci95);
        assert!((f.slope - c).abs() < 0.01 * c.abs());
        assert!((f.amplitude_sq - 0.64).abs() < 0.01);
        assert!((f.normalized - c / 0.64).abs() < 0.02 * c.abs() / 0.64);
        assert!(!f.unwrap_flagged);
    }
}

#[test]
fn reference_phase_is_subtracted() {
    let drift = |r: f64| 2.0 / r + 0.1 * r.ln();
    let s = synthetic(0.25, drift, 20.0, 400.0);
    let r = synthetic(0.0, drift, 20.0, 400.0);
    let f = fit_log_phase(&s, Some(&r), 20.0, 400.0).unwrap();
    assert!((f.slope - 0.25).abs() < 0.0025, "{}", f.slope);
    let plain = fit_log_phase(&s, None, 20.0, 400.0).unwrap();
    assert!((plain.slope - 0.35).abs() < 0.0035, "{}", plain.slope);
}

#[test]
fn log_phase_fit_rejects_bad_input() {
    let s = synthetic(0.1, |_| 0.0, 20.0, 400.0);
    assert!(fit_log_phase(&s, None, 20.0, 100.0).is_err());
    assert!(fit_log_phase(&s[..5], None, 20.0, 400.0).is_err());
    let shifted: Vec<PhaseSample> = s
        .iter()
        .map(|p| PhaseSample {
            rho: p.rho + 0.5,
            ..*p
        })
        .collect();
    assert!(fit_log_phase(&s, Some(&shifted), 20.0, 400.0).is_err());
    assert!(fit_log_phase(&s, Some(&s[..100]), 20.0, 400.0).is_err());
}

#[test]
fn vanishing_samples_are_flagged() {
    let mut s = synthetic(0.1, |_| 0.0, 20.0, 400.0);
    s[5000].v = 0.0;
    s[5000].v_dot = 1e-6;
    let f = fit_log_phase(&s, None, 20.0, 400.0).unwrap();
    assert!(f.unwrap_flagged);
    assert!((f.slope - 0.1).abs() < 0.001);
}

#[test]
fn delort_coefficient_values() {
    assert_eq!(delort_phase_coefficient(0.0, 0.0), 0.0);
    assert!((delort_phase_coefficient(0.0, 1.0) - 0.375).abs() < 1e-15);
    assert!((delort_phase_coefficient(2.0, 0.0) - 5.0 / 3.0).abs() < 1e-15);
    assert!((stationary_phase_constant().norm() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
}

#[test]
fn free_profile_predicts_linear_evolution() {
    let g = Grid::new(256.0, 4096).unwrap();
    let u0 = RealField::from_fn(g, 0.0, |x| 0.3 * (-x * x).exp());
    let u1 = RealField::from_fn(g, 0.0, |x| 0.2 * x * (-x * x / 2.0).exp());
    let t = 200.0;
    let mut s = Solver::cartesian(&u0, &u1, 0.0, 0.1, NonlinearityParams::default()).unwrap();
    s.advance_to(t).unwrap();
    let xs: Vec<f64> = (0..81).map(|k| -160.0 + 4.0 * k as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|x| (x / t).atanh()).collect();
    let prof = free_profile_from_data(&u0, &u1, &ys).unwrap();
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for (k, &x) in xs.iter().enumerate() {
        let rho = (t * t - x * x).sqrt();
        let single = AsymptoticProfile {
            y: vec![ys[k]],
            amplitude: vec![prof.amplitude[k]],
            ..prof.clone()
        };
        let (px, pu) = single.predict_u(rho)[0];
        assert!((px - x).abs() < 1e-9);
        let (u, _, _) = s.interpolate(x);
        err = err.max((u - pu).abs());
        scale = scale.max(u.abs());
    }
    println!("max error {err:.3e} of sup {scale:.3e}");
    assert!(err < 0.02 * scale);
}

#[test]
fn plus_transform_of_gaussian() {
    let g = Grid::new(16.0, 512).unwrap();
    let u0 = RealField::from_fn(g, 0.0, |x| (-x * x / 2.0).exp());
    let u1 = RealField::zeros(g, 0.0);
    for xi in [0.0f64, 0.7, -1.3] {
        let want = (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp() / 2.0;
        assert!((plus_transform(&u0, &u1, xi) - C64::new(want, 0.0)).norm() < 1e-12);
    }
}

fn ledger(rhos: &[f64], sup: impl Fn(f64) -> f64) -> EnergyLedger {
    EnergyLedger {
        rows: rhos
            .iter()
            .map(|&rho| LedgerRow {
                rho,
                e0: 0.0,
                h1_triple: 0.0,
                linf_pair: 0.0,
                b_norm: 0.0,
                sup_v: sup(rho),
            })
            .collect(),
    }
}

#[test]
fn decay_report_fits_power_law() {
    let rhos: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
    let rep = decay_rate_report(&ledger(&rhos, |r| 0.3 * r.powf(-0.25))).unwrap();
    assert!((rep.exponent_v.unwrap().exponent + 0.25).abs() < 1e-12);
    assert!(rep.exponent_u.unwrap().exponent < -0.25);
    assert!((rep.tail_ratio - 8f64.powf(0.25)).abs() < 1e-12);
    assert!((rep.growth_ratio(10.0) - 1.0).abs() < 1e-15);

    let flat = decay_rate_report(&ledger(&rhos, |_| 0.0)).unwrap();
    assert!(flat.exponent_v.is_none());
    assert_eq!(flat.tail_ratio, 0.0);

    assert!(decay_rate_report(&ledger(&rhos[..2], |_| 1.0)).is_err());
    assert!(decay_rate_report(&ledger(&[1.0, 4.0, 50.0], |_| 1.0)).is_err());
    assert!(decay_rate_report(&ledger(&[1.0, 1.0, 200.0], |_| 1.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn predicted_v_has_amplitude_bound(re in -2.0f64..2.0, im in -2.0f64..2.0, rho in 1.0f64..1e4) {
        let p = AsymptoticProfile {
            y: vec![0.0],
            amplitude: vec![C64::new(re, im)],
            c_phase: 0.0,
            source: ProfileSource::Fitted,
        };
        let v = p.predict_v(rho)[0];
        prop_assert!(v.abs() <= 2.0 * C64::new(re, im).norm() / (2.0 * PI).sqrt() + 1e-12);
    }

    #[test]
    fn log_phase_fit_is_amplitude_invariant(a in 0.1f64..10.0) {
        let s = synthetic(0.2, |_| 0.0, 20.0, 220.0);
        let scaled: Vec<PhaseSample> = s.iter().map(|p| PhaseSample { rho: p.rho, v: a * p.v, v_dot: a * p.v_dot }).collect();
        let f = fit_log_phase(&s, None, 20.0, 220.0).unwrap();
        let g = fit_log_phase(&scaled, None, 20.0, 220.0).unwrap();
        prop_assert!((f.slope - g.slope).abs() < 1e-9);
        prop_assert!((g.normalized * a * a - f.normalized).abs() < 1e-9 * f.normalized.abs());
    }
}
