use kgnf::quadratic_normal_form::*;
use kgnf::spectral_core::*;
use kgnf::{Grid, Real, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Empirical constant for the three operator estimates.
const PDO_C: f64 = 4.0;

/// `B(u, v)(y_j)` summed term by term in physical space from directly computed coefficients.
// The mode index drives both the grid wavenumber and the coefficient arrays.
#[allow(clippy::needless_range_loop)]
fn brute_force(b: &BilinearSymbol, u: &Real, v: &Real, rho: f64) -> Vec<C64> {
    let g = u.grid;
    let n = g.len();
    let h = g.spacing();
    let coef = |f: &Real| -> Vec<C64> {
        (0..n)
            .map(|i| {
                let xi = g.wavenumber(i);
                (0..n)
                    .map(|j| C64::from_polar(h * f.values[j], -xi * g.point(j)))
                    .sum()
            })
            .collect()
    };
    let (uh, vh) = (coef(u), coef(v));
    let s = 1.0 / (2.0 * g.half_width());
    let cut = (n / 3) as i64;
    (0..n)
        .map(|j| {
            let y = g.point(j);
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    if (g.mode(k) + g.mode(l)).abs() > cut {
                        continue;
                    }
                    let (xk, xl) = (g.wavenumber(k), g.wavenumber(l));
                    acc += b.eval(xk / rho, xl / rho)
                        * uh[k]
                        * vh[l]
                        * C64::from_polar(s * s, (xk + xl) * y);
                }
            }
            acc
        })
        .collect()
}

#[test]
fn matches_brute_force_oracle() {
    let g = Grid::new(4.0, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let complex_symbol = BilinearSymbol::new("mixed", |x, y| {
        C64::new(1.0 / (1.0 + x * x + y * y), x - 0.5 * y)
    });
    for b in [symbol_b1(1.0), symbol_b2(-0.7), complex_symbol] {
        for rho in [1.0, 4.0, 64.0] {
            let u = random_band_limited(g, 31, &mut rng);
            let v = random_band_limited(g, 31, &mut rng);
            let fast = apply_bilinear_pdo(&b, &u, &v, rho).unwrap().field;
            let slow = brute_force(&b, &u, &v, rho);
            let scale = slow.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let err = fast
                .values
                .iter()
                .zip(&slow)
                .fold(0.0f64, |m, (a, c)| m.max((a - c).norm()));
            assert!(
                err < 1e-10 * scale.max(1.0),
                "{} rho={rho} err={err:e}",
                b.name()
            );
        }
    }
}

#[test]
fn constant_symbol_is_pointwise_product() {
    let g = Grid::new(8.0, 128).unwrap();
    let u = RealField::from_fn(g, 1.0, |y| (-y * y).exp());
    let v = RealField::from_fn(g, 1.0, |y| (-(y - 0.5).powi(2)).exp());
    let out = apply_bilinear_pdo(&BilinearSymbol::constant(1.0), &u, &v, 10.0).unwrap();
    assert!(!out.overflowed());
    for j in 0..g.len() {
        let exact = u.values[j] * v.values[j];
        assert!((out.field.values[j] - exact).norm() < 1e-13);
    }
}

#[test]
fn single_modes_give_symbol_value() {
    let l = std::f64::consts::PI;
    let g = Grid::new(l, 64).unwrap();
    let rho = 5.0;
    let (k, m) = (3.0, -7.0);
    let u = ComplexField::from_fn(g, rho, |y| C64::from_polar(1.0, k * y));
    let v = ComplexField::from_fn(g, rho, |y| C64::from_polar(1.0, m * y));
    let b = symbol_b1(1.0);
    let out = apply_bilinear_pdo(&b, &u, &v, rho).unwrap().field;
    let want = b.eval(k / rho, m / rho);
    for (j, y) in g.points().into_iter().enumerate() {
        let exact = want * C64::from_polar(1.0, (k + m) * y);
        assert!((out.values[j] - exact).norm() < 1e-12);
    }
}

#[test]
fn real_even_symbols_preserve_realness() {
    let g = Grid::new(8.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let u = random_band_limited(g, 80, &mut rng);
    let v = random_band_limited(g, 80, &mut rng);
    assert!(realness_ratio(&symbol_b1(1.0), &u, &v, 8.0).unwrap() < 1e-13);
    assert!(realness_ratio(&symbol_b2(1.0), &u, &v, 8.0).unwrap() < 1e-13);
}

#[test]
fn symbol_system_solved_on_grid() {
    let mut worst = 0.0f64;
    for i in 0..200 {
        for j in 0..200 {
            let xi = -10.0 + 20.0 * i as f64 / 199.0;
            let eta = -10.0 + 20.0 * j as f64 / 199.0;
            let (r1, r2) = symbol_system_residual(1.3, xi, eta);
            worst = worst.max(r1.abs()).max(r2.abs());
        }
    }
    assert!(worst < 1e-12, "{worst:e}");
}

#[test]
fn determinant_is_the_system_determinant() {
    for &(xi, eta) in &[(0.0, 0.0), (1.0, 1.0), (-2.0, 0.5), (3.0, -4.0)] {
        let c: f64 = -1.0 + 2.0 * xi * eta;
        let a: f64 = 2.0 * (xi * xi + 1.0) * (eta * eta + 1.0);
        // Matrix [[c, a], [2, c]] acting on (b1, b2).
        let det = c * c - 2.0 * a;
        assert!((determinant_polynomial(xi, eta) - det).abs() < 1e-12);
        assert!(determinant_polynomial(xi, eta) <= -2.0);
    }
    assert_eq!(determinant_polynomial(0.0, 0.0), -3.0);
}

#[test]
fn cancellation_identities_on_random_fields() {
    let g = Grid::new(8.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = (0.0f64, 0.0f64);
    for rho in [2.0, 10.0, 100.0] {
        for _ in 0..5 {
            let u = random_band_limited(g, 85, &mut rng);
            let v = random_band_limited(g, 85, &mut rng);
            let (r1, r2) = cancellation_residual(1.0, &u, &v, rho).unwrap();
            worst = (worst.0.max(r1), worst.1.max(r2));
        }
    }
    assert!(worst.0 < 1e-9 && worst.1 < 1e-9, "{worst:?}");
}

#[test]
fn calculus_identities() {
    let g = Grid::new(8.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let f0 = random_band_limited(g, 60, &mut rng);
    let f1 = random_band_limited(g, 60, &mut rng);
    let pair = move |r: f64| {
        (
            f0.zip_with(&f1, |a, b| r.cos() * a + b / r),
            f1.zip_with(&f0, |a, b| (0.5 * r).sin() * a + b * r.sqrt()),
        )
    };
    let b = symbol_b1(1.0);
    let coarse = pdo_calculus_check(&b, &pair, 12.0, 1e-2).unwrap();
    let fine = pdo_calculus_check(&b, &pair, 12.0, 5e-3).unwrap();
    assert!(coarse.leib1 < 1e-10 && fine.leib1 < 1e-10);
    // The centered difference converges at second order.
    let order = (coarse.leib2 / fine.leib2).log2();
    assert!(order > 1.7, "leib2 {:e} -> {:e}", coarse.leib2, fine.leib2);
    let c = pdo_calculus_check(&BilinearSymbol::constant(2.0), &pair, 12.0, 5e-3).unwrap();
    assert!(c.leib1 < 1e-10 && c.leib2 < 1e-4);
}

#[test]
fn operator_estimates_bounded() {
    let g = Grid::new(8.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for b in [symbol_b1(1.0), symbol_b2(1.0)] {
        for rho in [4.0, 16.0, 64.0, 256.0] {
            let r = pdo_operator_bound_check(&b, &g, rho, 100, 85, &mut rng).unwrap();
            println!(
                "{} rho={rho}: est1 {:.3} est3 {:.3} est5 {:.3}",
                b.name(),
                r.est1,
                r.est3,
                r.est5
            );
            assert_eq!(r.trials, 100);
            assert!(r.est1 < PDO_C && r.est3 < PDO_C && r.est5 < PDO_C);
        }
    }
}

#[test]
fn low_frequency_output_is_small() {
    let g = Grid::new(8.0, 512).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    // Vanishes to second order at the origin.
    let b = BilinearSymbol::real("xi eta", |x, y| x * y / (1.0 + x * x + y * y));
    let (pts, fit) =
        low_frequency_exponent(&b, &g, &[4.0, 16.0, 64.0, 256.0], 100, 0.5, &mut rng).unwrap();
    println!("low-frequency ratios {pts:?} exponent {:.3}", fit.exponent);
    assert!(fit.exponent <= -0.8 * 0.5);
}

#[test]
fn w1_vanishes_on_zero_data() {
    let g = Grid::new(8.0, 128).unwrap();
    let z = RealField::zeros(g, 5.0);
    let w = build_w1(&z, &z, 5.0, 1.0).unwrap();
    assert_eq!(w.norm, 0.0);
}

#[test]
fn quad_residual_vanishes_on_zero_data() {
    let g = Grid::new(8.0, 128).unwrap();
    let z = RealField::zeros(g, 5.0);
    let slices = vec![(z.clone(), z.clone()); 5];
    let r = quad_error_residual(&slices, 5.0, 0.01, 1.0).unwrap();
    assert_eq!(r.e_h1, 0.0);
    assert!(quad_error_residual(&slices[..3], 5.0, 0.01, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn symbol_system_holds_everywhere(a in -5.0f64..5.0, xi in -50.0f64..50.0, eta in -50.0f64..50.0) {
        let (r1, r2) = symbol_system_residual(a, xi, eta);
        let scale = 1.0 + a.abs();
        prop_assert!(r1.abs() < 1e-12 * scale && r2.abs() < 1e-12 * scale);
    }

    #[test]
    fn pdo_is_bilinear(
        a in prop::collection::vec(-1.0f64..1.0, 64),
        b in prop::collection::vec(-1.0f64..1.0, 64),
        c in -2.0f64..2.0,
        rho in 1.0f64..50.0,
    ) {
        let g = Grid::new(4.0, 64).unwrap();
        let u = RealField::new(g, a, 1.0).unwrap();
        let v = RealField::new(g, b, 1.0).unwrap();
        let s = symbol_b1(1.0);
        let uc = u.zip_with(&v, |x, y| x + c * y);
        let lhs = apply_bilinear_pdo(&s, &uc, &v, rho).unwrap().field;
        let p = apply_bilinear_pdo(&s, &u, &v, rho).unwrap().field;
        let q = apply_bilinear_pdo(&s, &v, &v, rho).unwrap().field;
        for j in 0..64 {
            prop_assert!((lhs.values[j] - p.values[j] - q.values[j] * c).norm() < 1e-12);
        }
    }
}
