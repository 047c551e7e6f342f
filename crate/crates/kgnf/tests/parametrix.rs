use kgnf::beta::SQRT8;
use kgnf::resonant_parametrix::*;
use kgnf::{BetaProfile, Grid, Window, C64};
use proptest::prelude::*;

fn de(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::integrate(f, a, b, 1e-13).integral
}

#[test]
fn phase_matches_quadrature() {
    for &(rho, s, xi) in &[(10.0, 3.0, 2.0), (100.0, 30.0, -45.0), (50.0, 12.5, 0.3)] {
        let q = de(|z: f64| (xi * xi / (z * z) + 1.0).sqrt(), s, rho);
        assert!((phase_psi(rho, s, xi) - q).abs() < 1e-10 * q.abs());
    }
}

#[test]
fn kernel_matches_quadrature() {
    let beta = BetaProfile::gaussian();
    let grid = Grid::new(4.0, 256).unwrap();
    let rho = 24.0;
    for n in [1u32, 3] {
        let k = build_k(n, &beta, &grid, rho).unwrap();
        let scale = k.k_hat.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for i in [0usize, 5, 17, 40, 90, 200] {
            let xi = grid.wavenumber(i);
            let part = |s: f64| -> C64 {
                C64::from_polar(1.0, n as f64 * s) * kernel_u(rho, s, xi) * beta.transform(xi / s)
                    / s
                    * chi1(s / rho)
            };
            let re = |s: f64| part(s).re;
            let im = |s: f64| part(s).im;
            let (a, m, b) = (rho / 4.0, rho / 2.0, rho);
            let oracle = C64::new(de(re, a, m) + de(re, m, b), de(im, a, m) + de(im, m, b));
            let err = (k.k_hat[i] - oracle).norm();
            assert!(
                err < 1e-7 * scale,
                "n={n} i={i}: {} vs {oracle}",
                k.k_hat[i]
            );
        }
    }
}

#[test]
fn zero_beta_gives_zero_kernel() {
    let grid = Grid::new(4.0, 128).unwrap();
    let k = build_k(3, &BetaProfile::zero(), &grid, 30.0).unwrap();
    assert_eq!(k.windowed_sup(), 0.0);
    assert_eq!(k.residual_windowed_sup(), 0.0);
    assert!(build_k(2, &BetaProfile::gaussian(), &grid, 30.0).is_err());
    assert!(build_k(1, &BetaProfile::gaussian(), &grid, 0.5).is_err());
}

#[test]
fn kernel_is_linear_in_beta() {
    let grid = Grid::new(4.0, 256).unwrap();
    let b = BetaProfile::gaussian_dd();
    let k1 = build_k(3, &b, &grid, 40.0).unwrap();
    let k2 = build_k(3, &b.scaled(-2.5), &grid, 40.0).unwrap();
    let s = k1.windowed_sup();
    for (x, y) in k1.k.values.iter().zip(&k2.k.values) {
        assert!((x * -2.5 - y).norm() < 1e-9 * s);
    }
}

#[test]
fn resonant_kernel_dominates() {
    // The integrand of K_3 is stationary at |xi|/s = sqrt 8; K_1 has no stationary point.
    let grid = Grid::new(4.0, 1024).unwrap();
    let b = BetaProfile::gaussian_dd().windowed(Window::Shell {
        center: SQRT8,
        radius: 0.5,
    });
    for rho in [40.0, 120.0] {
        let k1 = build_k(1, &b, &grid, rho).unwrap();
        let k3 = build_k(3, &b, &grid, rho).unwrap();
        println!(
            "rho={rho}: |chi K1| {:.3e} |chi K3| {:.3e}",
            k1.windowed_sup(),
            k3.windowed_sup()
        );
        assert!(k1.windowed_sup() < k3.windowed_sup());
    }
}

#[test]
fn argmax_lies_in_resonant_window() {
    let grid = Grid::new(4.0, 2048).unwrap();
    let b = BetaProfile::gaussian_dd().windowed(Window::HighRest);
    for rho in [50.0, 100.0, 200.0] {
        let k3 = build_k(3, &b, &grid, rho).unwrap();
        let a = k3.k_hat_argmax();
        println!("rho={rho}: argmax |K3^|/rho at xi/rho = {a:.3}");
        assert!((SQRT8 / 4.0..=SQRT8).contains(&a));
    }
}

#[test]
fn finite_difference_residual_matches_integral_form() {
    let grid = Grid::new(4.0, 1024).unwrap();
    let b = BetaProfile::gaussian_dd().windowed(Window::HighRest);
    for rho in [30.0, 90.0] {
        let r = parametrix_residual(3, &b, &grid, rho, 0.02).unwrap();
        println!(
            "rho={rho}: fd {:.4e} analytic {:.4e}",
            r.windowed_sup, r.analytic_sup
        );
        assert!(!r.fd_dominated);
        assert!((r.windowed_sup - r.analytic_sup).abs() < 1e-3 * r.analytic_sup);
    }
    assert!(parametrix_residual(3, &b, &grid, 1.01, 0.02).is_err());
}

#[test]
fn windowed_b_norm_finite() {
    let grid = Grid::new(4.0, 512).unwrap();
    let b = BetaProfile::gaussian_dd().windowed(Window::HighRest);
    let k = build_k(3, &b, &grid, 60.0).unwrap();
    let n = k.windowed_b_norm().unwrap();
    assert!(n.is_finite() && n >= k.windowed_sup());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn phase_is_additive(s in 1.0f64..50.0, t in 1.0f64..50.0, r in 1.0f64..50.0, xi in -80.0f64..80.0) {
        let lhs = phase_psi(r, s, xi);
        let rhs = phase_psi(r, t, xi) + phase_psi(t, s, xi);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn phase_dominates_length(s in 1.0f64..50.0, d in 0.0f64..50.0, xi in -80.0f64..80.0) {
        let p = phase_psi(s + d, s, xi);
        prop_assert!(p >= d - 1e-9);
        prop_assert!(kernel_u(s + d, s, xi).abs() <= 1.0);
    }

    #[test]
    fn chi1_bounds(z in -10.0f64..10.0) {
        let c = chi1(z);
        prop_assert!((0.0..=1.0).contains(&c));
        if z.abs() <= 0.25 || z.abs() >= 4.0 {
            prop_assert_eq!(c, 0.0);
        }
        if (0.5..=2.0).contains(&z.abs()) {
            prop_assert_eq!(c, 1.0);
        }
    }
}
