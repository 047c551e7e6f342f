use std::collections::BTreeMap;

use kgnf::beta::SQRT8;
use kgnf::cubic_normal_form::*;
use kgnf::spectral_core::*;
use kgnf::{BetaProfile, Error, Grid, Window};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Polynomial in `(v, v_dot)` with integer coefficients, keyed by exponents.
type Poly = BTreeMap<(u32, u32), i64>;

fn monomial(i: u32) -> Poly {
    Poly::from([((3 - i, i), 1)])
}

/// `d/d rho` by the product rule, then `v_ddot -> -v`.
fn derive(p: &Poly) -> Poly {
    let mut out = Poly::new();
    for (&(a, b), &c) in p {
        if a > 0 {
            *out.entry((a - 1, b + 1)).or_default() += c * a as i64;
        }
        if b > 0 {
            *out.entry((a + 1, b - 1)).or_default() -= c * b as i64;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn eval(p: &Poly, v: f64, vd: f64) -> f64 {
    p.iter()
        .map(|(&(a, b), &c)| c as f64 * v.powi(a as i32) * vd.powi(b as i32))
        .sum()
}

#[test]
fn shell_derivatives_match_substitution_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..4 {
        let f = monomial(i);
        let d1 = derive(&f);
        let d2 = derive(&d1);
        for _ in 0..200 {
            let v = rng.gen_range(-9i32..=9) as f64;
            let vd = rng.gen_range(-9i32..=9) as f64;
            assert_eq!(f_point(i as i32, v, vd), eval(&f, v, vd));
            assert_eq!(f1_point(i as i32, v, vd), eval(&d1, v, vd));
            assert_eq!(f2_point(i as i32, v, vd), eval(&d2, v, vd));
        }
    }
}

#[test]
fn shell_derivatives_follow_harmonic_orbits() {
    // Along v = A cos rho + B sin rho the chain rule must reproduce F^1 and F^2.
    let (a, b) = (0.8, -0.3);
    let orbit = |r: f64| (a * r.cos() + b * r.sin(), -a * r.sin() + b * r.cos());
    let h = 1e-3;
    for i in 0..4 {
        for &r in &[0.1, 1.3, 2.9] {
            let f = |r: f64| {
                let (v, vd) = orbit(r);
                f_point(i, v, vd)
            };
            let (v, vd) = orbit(r);
            let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
            let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
            assert!((d1 - f1_point(i, v, vd)).abs() < 1e-6);
            assert!((d2 - f2_point(i, v, vd)).abs() < 1e-5);
        }
    }
}

fn candidates() -> Vec<BetaProfile> {
    let gdd = BetaProfile::gaussian_dd();
    vec![
        BetaProfile::gaussian(),
        gdd.clone(),
        BetaProfile::fourier_bump(0.5, 2.5).unwrap(),
        BetaProfile::fourier_bump(3.2, 5.0).unwrap(),
        BetaProfile::sech_pow(2).unwrap(),
        BetaProfile::sech_pow(4).unwrap(),
        gdd.windowed(Window::LowPass { radius: 0.15 }),
        gdd.windowed(Window::Far { r0: 0.15, r8: 0.15 }),
        gdd.windowed(Window::Shell {
            center: SQRT8,
            radius: 0.15,
        }),
        BetaProfile::gaussian().windowed(Window::Far { r0: 0.2, r8: 0.2 }),
    ]
}

#[test]
fn classification_of_presets() {
    let label = |b: &BetaProfile| classify_resonance(b, RESONANCE_TOL).unwrap().classification;
    assert_eq!(label(&BetaProfile::gaussian()), Classification::Both);
    assert_eq!(
        label(&BetaProfile::gaussian_dd()),
        Classification::ResonantAtSqrt8
    );
    assert_eq!(
        label(&BetaProfile::fourier_bump(0.5, 2.5).unwrap()),
        Classification::NonResonant
    );
    assert_eq!(
        label(&BetaProfile::fourier_bump(2.0, 3.5).unwrap()),
        Classification::ResonantAtSqrt8
    );
    assert_eq!(
        label(&BetaProfile::sech_pow(2).unwrap()),
        Classification::Both
    );
    assert_eq!(
        label(&BetaProfile::gaussian_dd().windowed(Window::LowPass { radius: 0.15 })),
        Classification::NonResonant
    );
}

#[test]
fn g_system_exact_for_non_resonant_profiles() {
    let grid = Grid::new(64.0, 1024).unwrap();
    let mut solved = 0;
    for b in candidates() {
        let rep = classify_resonance(&b, RESONANCE_TOL).unwrap();
        let res = solve_g_system(&b, &grid);
        if rep.classification == Classification::NonResonant {
            let c = res.unwrap();
            let (r0, r2) = c.ode_residuals();
            println!("{}: residuals {r0:.2e} {r2:.2e}", b.tag());
            assert!(r0 < 1e-10 && r2 < 1e-10, "{}", b.tag());
            solved += 1;
        } else {
            assert!(matches!(res, Err(Error::Resonance(_))), "{}", b.tag());
        }
    }
    assert!(solved >= 4);
}

#[test]
fn resonance_guard_triggers_on_gaussian() {
    let grid = Grid::new(32.0, 1024).unwrap();
    let err = solve_g_system(&BetaProfile::gaussian(), &grid).unwrap_err();
    assert!(matches!(err, Error::Resonance(_)));
    assert!(solve_g_system(&BetaProfile::gaussian_dd(), &grid).is_err());
}

#[test]
fn zero_profile_gives_zero_coefficients() {
    let grid = Grid::new(16.0, 256).unwrap();
    let c = solve_g_system(&BetaProfile::zero(), &grid).unwrap();
    assert!(linf_norm(&c.f0) == 0.0 && linf_norm(&c.f2) == 0.0);
}

#[test]
fn g_and_f_are_inverse() {
    let grid = Grid::new(16.0, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let a = random_band_limited(grid, 40, &mut rng);
    let b = random_band_limited(grid, 40, &mut rng);
    let (f0, f2) = f_from_g(&a, &b).unwrap();
    let (g0, g2) = g_from_f(&f0, &f2).unwrap();
    for j in 0..grid.len() {
        assert!((g0.values[j] - a.values[j]).abs() < 1e-15);
        assert!((g2.values[j] - b.values[j]).abs() < 1e-15);
    }
}

#[test]
fn coefficient_identity_on_random_samples() {
    let grid = Grid::new(64.0, 1024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for b in [
        BetaProfile::fourier_bump(0.5, 2.5).unwrap(),
        BetaProfile::gaussian_dd().windowed(Window::LowPass { radius: 0.15 }),
        BetaProfile::gaussian_dd().windowed(Window::Far { r0: 0.15, r8: 0.15 }),
    ] {
        let c = solve_g_system(&b, &grid).unwrap();
        let v: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let vd: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = coefficient_identity_residual(&c, &v, &vd).unwrap();
        println!("{}: identity residual {r:.2e}", b.tag());
        assert!(r < 1e-9, "{}: {r:e}", b.tag());
    }
}

#[test]
fn dyadic_bands_reconstruct_beta() {
    let b = BetaProfile::gaussian_dd();
    for rho in [4.0, 64.0, 1000.0] {
        let split = dyadic_beta_bands(&b, rho).unwrap();
        assert_eq!(split.bands.len() as i32, band_count(rho));
        assert!(split.reconstruction_error(&b, 20.0, 4000) < 1e-13);
    }
}

#[test]
fn w2_vanishes_for_zero_data() {
    let grid = Grid::new(8.0, 256).unwrap();
    let z = RealField::zeros(grid, 20.0);
    let b = BetaProfile::gaussian_dd().windowed(Window::LowPass { radius: 0.15 });
    let w2 = build_w2_zero_resonance(&z, &z, &b, 20.0).unwrap();
    assert_eq!(linf_norm(&w2.field), 0.0);
}

#[test]
fn w2_is_cubic_in_data() {
    let grid = Grid::new(8.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let w = random_band_limited(grid, 20, &mut rng);
    let wd = random_band_limited(grid, 20, &mut rng);
    let b = BetaProfile::gaussian_dd().windowed(Window::LowPass { radius: 0.15 });
    let one = build_w2_zero_resonance(&w, &wd, &b, 30.0).unwrap();
    let two = build_w2_zero_resonance(&w.map(|x| 2.0 * x), &wd.map(|x| 2.0 * x), &b, 30.0).unwrap();
    let s = linf_norm(&one.field);
    assert!(s > 0.0);
    for (a, c) in one.field.values.iter().zip(&two.field.values) {
        assert!((8.0 * a - c).abs() < 1e-12 * s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn shell_identities_hold(i in 0i32..4, v in -3.0f64..3.0, vd in -3.0f64..3.0) {
        // F^2 = d/d rho F^1 computed from the F^1 formula itself.
        let expect: f64 = (0..4)
            .map(|k| {
                let c = match k - i {
                    1 => 3.0 - i as f64,
                    -1 => -(i as f64),
                    _ => 0.0,
                };
                c * f1_point(k, v, vd)
            })
            .sum();
        prop_assert!((f2_point(i, v, vd) - expect).abs() < 1e-11);
    }

    #[test]
    fn resonance_classification_is_scale_invariant(a in 0.1f64..10.0) {
        let b = BetaProfile::fourier_bump(0.5, 2.5).unwrap();
        let c = classify_resonance(&b.scaled(a), RESONANCE_TOL).unwrap();
        prop_assert_eq!(c.classification, Classification::NonResonant);
        let g = classify_resonance(&BetaProfile::gaussian().scaled(a), RESONANCE_TOL).unwrap();
        prop_assert_eq!(g.classification, Classification::Both);
    }
}
