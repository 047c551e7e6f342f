use approx::assert_relative_eq;
use kgnf::spectral_core::*;
use kgnf::{Grid, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `f^(xi_k) = h sum_j f(y_j) e^{-i xi_k y_j}` by direct summation.
fn direct_dft(g: &Grid, values: &[C64]) -> Vec<C64> {
    let h = g.spacing();
    (0..g.len())
        .map(|i| {
            let xi = g.wavenumber(i);
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(h, -xi * g.point(j)))
                .sum()
        })
        .collect()
}

#[test]
fn forward_matches_direct_sum() {
    let g = Grid::new(5.0, 64).unwrap();
    let f = ComplexField::from_fn(g, 1.0, |y| {
        C64::new((-y * y).exp(), y.sin() / (1.0 + y * y))
    });
    let s = dft_forward(&f);
    let oracle = direct_dft(&g, &f.values);
    for (a, b) in s.coeffs.iter().zip(&oracle) {
        assert!((a - b).norm() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn gaussian_transform_matches_continuous() {
    let g = Grid::new(12.0, 256).unwrap();
    let f = RealField::from_fn(g, 1.0, |y| (-y * y / 2.0).exp());
    let s = dft_forward(&f);
    for i in 0..g.len() {
        let xi = g.wavenumber(i);
        let exact = (2.0 * std::f64::consts::PI).sqrt() * (-xi * xi / 2.0).exp();
        assert!((s.coeffs[i].re - exact).abs() < 1e-12);
        assert!(s.coeffs[i].im.abs() < 1e-12);
    }
}

#[test]
fn derivative_of_gaussian() {
    let g = Grid::new(10.0, 256).unwrap();
    let f = RealField::from_fn(g, 1.0, |y| (-y * y).exp());
    let d1 = derivative_y(&f, 1);
    let d2 = derivative_y(&f, 2);
    for (j, y) in g.points().into_iter().enumerate() {
        let e = (-y * y).exp();
        assert!((d1.values[j] + 2.0 * y * e).abs() < 1e-11);
        assert!((d2.values[j] - (4.0 * y * y - 2.0) * e).abs() < 1e-10);
    }
}

#[test]
fn semiclassical_derivative_scales_plane_wave() {
    let g = Grid::new(std::f64::consts::PI, 64).unwrap();
    let rho = 4.0;
    let f = RealField::from_fn(g, rho, |y| (5.0 * y).cos());
    let d = semiclassical_derivative(&f, rho, 2).unwrap();
    for (a, b) in d.values.iter().zip(&f.values) {
        assert!((a.re - 25.0 / 16.0 * b).abs() < 1e-12);
        assert!(a.im.abs() < 1e-12);
    }
    assert!(semiclassical_derivative(&f, 0.5, 1).is_err());
}

#[test]
fn semiclassical_coefficients_are_scaled() {
    let g = Grid::new(4.0, 32).unwrap();
    let f = RealField::from_fn(g, 3.0, |y| (-y * y).exp());
    let s = dft_forward(&f);
    let t = semiclassical_forward(&f, 3.0).unwrap();
    for i in 0..g.len() {
        assert_relative_eq!(t.coeffs[i].re, 3.0 * s.coeffs[i].re, epsilon = 1e-13);
        assert_relative_eq!(t.frequency(i), g.wavenumber(i) / 3.0);
    }
    assert_relative_eq!(t.parseval_norm(), l2_norm(&f), epsilon = 1e-13);
}

#[test]
fn dealias_removes_top_third() {
    let g = Grid::new(std::f64::consts::PI, 48).unwrap();
    let f = RealField::from_fn(g, 1.0, |y| (15.0 * y).cos() + (17.0 * y).cos());
    let d = dealias(&f);
    for (j, y) in g.points().into_iter().enumerate() {
        assert!((d.values[j] - (15.0 * y).cos()).abs() < 1e-12);
    }
}

#[test]
fn interpolation_reproduces_band_limited_field() {
    let g = Grid::new(3.0, 64).unwrap();
    let f = RealField::from_fn(g, 1.0, |y| (2.0 * std::f64::consts::PI * y / 3.0).sin());
    let s = dft_forward(&f);
    for &y in &[0.123, -1.7, 2.95] {
        let exact = (2.0 * std::f64::consts::PI * y / 3.0).sin();
        assert!((s.interpolate(y).re - exact).abs() < 1e-12);
    }
}

#[test]
fn single_precision_transform() {
    let g = GridSpec::<f32>::new(6.0, 128).unwrap();
    let f = RealField::from_fn(g, 1.0, |y| (-y * y / 2.0).exp());
    let s = dft_forward(&f);
    let exact = (2.0 * std::f32::consts::PI).sqrt();
    assert!((s.coeffs[0].re - exact).abs() < 1e-5);
    let d = derivative_y(&f, 1);
    let y = g.point(70);
    assert!((d.values[70] + y * (-y * y / 2.0).exp()).abs() < 1e-4);
    assert!((l2_norm(&f) - s.parseval_norm()).abs() < 1e-5);
}

#[test]
fn random_fields_are_normalized_and_band_limited() {
    let g = Grid::new(8.0, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = random_band_limited(g, 10, &mut rng);
    assert_relative_eq!(l2_norm(&f), 1.0, epsilon = 1e-12);
    let s = dft_forward(&f);
    for i in 0..g.len() {
        if g.mode(i).abs() > 10 {
            assert!(s.coeffs[i].norm() < 1e-12);
        }
    }
}

fn field_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn roundtrip_is_identity(vals in field_strategy(), l in 0.5f64..20.0) {
        let g = Grid::new(l, 64).unwrap();
        let f = ComplexField::new(g, vals.iter().map(|&(a, b)| C64::new(a, b)).collect(), 1.0).unwrap();
        let back = dft_forward(&f).inverse();
        for (a, b) in f.values.iter().zip(&back.values) {
            prop_assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn parseval_holds(vals in field_strategy(), l in 0.5f64..20.0) {
        let g = Grid::new(l, 64).unwrap();
        let f = ComplexField::new(g, vals.iter().map(|&(a, b)| C64::new(a, b)).collect(), 1.0).unwrap();
        let n = l2_norm(&f);
        prop_assert!((dft_forward(&f).parseval_norm() - n).abs() <= 1e-12 * n.max(1.0));
    }

    #[test]
    fn transform_is_linear(a in field_strategy(), b in field_strategy(), c in -3.0f64..3.0) {
        let g = Grid::new(2.0, 64).unwrap();
        let fa = ComplexField::new(g, a.iter().map(|&(x, y)| C64::new(x, y)).collect(), 1.0).unwrap();
        let fb = ComplexField::new(g, b.iter().map(|&(x, y)| C64::new(x, y)).collect(), 1.0).unwrap();
        let sum = ComplexField::new(g, fa.values.iter().zip(&fb.values).map(|(x, y)| x + y * c).collect(), 1.0).unwrap();
        let (sa, sb, ss) = (dft_forward(&fa), dft_forward(&fb), dft_forward(&sum));
        for i in 0..64 {
            prop_assert!((ss.coeffs[i] - sa.coeffs[i] - sb.coeffs[i] * c).norm() < 1e-12);
        }
    }

    #[test]
    fn real_fields_have_hermitian_spectra(vals in prop::collection::vec(-1.0f64..1.0, 64)) {
        let g = Grid::new(3.0, 64).unwrap();
        let f = RealField::new(g, vals, 1.0).unwrap();
        let s = dft_forward(&f);
        for k in 1..32i64 {
            prop_assert!((s.at_mode(k) - s.at_mode(-k).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_commutes_with_multiplier(vals in prop::collection::vec(-1.0f64..1.0, 64)) {
        let g = Grid::new(3.0, 64).unwrap();
        let f = RealField::new(g, vals, 1.0).unwrap();
        let a = derivative_y(&apply_real_multiplier(&f, |xi| 1.0 / (1.0 + xi * xi)), 2);
        let b = apply_real_multiplier(&derivative_y(&f, 2), |xi| 1.0 / (1.0 + xi * xi));
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}
