//! Cubic normal form `w2 = rho^{-1} sum_i f_i(rho y) F_i(w, w_dot)` with
//! `F_i(v, v_dot) = v^{3-i} v_dot^i`, resonance classification of `beta`,
//! the coefficient systems and the measured cubic residual.

use num_complex::Complex;

use crate::beta::SQRT8;
use crate::littlewood_paley::{b_infinity_norm, theta, ProjectionKey};
use crate::quadratic_normal_form::second_difference;
use crate::resonant_parametrix::ParametrixKernel;
use crate::spectral_core::{
    apply_real_multiplier, dealias, derivative_y, forward_in_place, h1_norm, inverse_in_place,
    linf_norm, semiclassical_derivative, RealField,
};
use crate::{invalid, BetaProfile, Error, Grid, Real, Result, Window, C64};

pub use crate::beta::Preset;

/// Relative resonance tolerance against `||beta^||_inf`.
pub const RESONANCE_TOL: f64 = 1e-6;

/// Index `i` of the monomial `F_i = v^{3-i} v_dot^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonomialIndex(u8);

impl MonomialIndex {
    pub fn new(i: u8) -> Result<Self> {
        if i > 3 {
            return invalid(format!("monomial index {i} outside 0..=3"));
        }
        Ok(Self(i))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

fn monomial(i: i32, v: f64, vd: f64) -> f64 {
    if !(0..=3).contains(&i) {
        return 0.0;
    }
    v.powi(3 - i) * vd.powi(i)
}

/// `F_i` at a point; zero for `i` outside `0..=3`.
pub fn f_point(i: i32, v: f64, vd: f64) -> f64 {
    monomial(i, v, vd)
}

/// `F_i^1 = (3-i) F_{i+1} - i F_{i-1}`, the derivative of `F_i` when `v_ddot = -v`.
pub fn f1_point(i: i32, v: f64, vd: f64) -> f64 {
    let fi = i as f64;
    (3.0 - fi) * monomial(i + 1, v, vd) - fi * monomial(i - 1, v, vd)
}

/// `F_i^2 = (3-i)(2-i) F_{i+2} + i(i-1) F_{i-2} - ((3-i)(i+1) + (4-i) i) F_i`.
pub fn f2_point(i: i32, v: f64, vd: f64) -> f64 {
    let fi = i as f64;
    (3.0 - fi) * (2.0 - fi) * monomial(i + 2, v, vd) + fi * (fi - 1.0) * monomial(i - 2, v, vd)
        - ((3.0 - fi) * (fi + 1.0) + (4.0 - fi) * fi) * monomial(i, v, vd)
}

fn pointwise(v: &Real, vd: &Real, f: impl Fn(f64, f64) -> f64) -> Result<Real> {
    v.grid.check_same(&vd.grid)?;
    Ok(v.zip_with(vd, f))
}

pub fn eval_f(i: i32, v: &Real, v_dot: &Real) -> Result<Real> {
    pointwise(v, v_dot, |a, b| f_point(i, a, b))
}

pub fn eval_f1(i: i32, v: &Real, v_dot: &Real) -> Result<Real> {
    pointwise(v, v_dot, |a, b| f1_point(i, a, b))
}

pub fn eval_f2(i: i32, v: &Real, v_dot: &Real) -> Result<Real> {
    pointwise(v, v_dot, |a, b| f2_point(i, a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    NonResonant,
    ResonantAt0,
    ResonantAtSqrt8,
    Both,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::NonResonant => "non_resonant",
            Classification::ResonantAt0 => "resonant_at_0",
            Classification::ResonantAtSqrt8 => "resonant_at_sqrt8",
            Classification::Both => "resonant_at_0_and_sqrt8",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub hat_at_0: C64,
    pub hat_slope_at_0: C64,
    pub hat_at_sqrt8: C64,
    pub hat_at_minus_sqrt8: C64,
    pub hat_sup: f64,
    pub double_zero_at_0: bool,
    pub zero_at_sqrt8: bool,
    pub classification: Classification,
}

pub fn classify_resonance(beta: &BetaProfile, tol: f64) -> Result<ResonanceReport> {
    let h = 1e-4;
    let b0 = beta.transform(0.0);
    let d0 = (beta.transform(h) - beta.transform(-h)) / (2.0 * h);
    let bp = beta.transform(SQRT8);
    let bm = beta.transform(-SQRT8);
    let sup = beta.hat_sup();
    if [b0, d0, bp, bm]
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
        || !sup.is_finite()
    {
        return Err(Error::UnderResolved(
            "non-finite transform near 0 or sqrt 8".into(),
        ));
    }
    let small = |z: C64| z.norm() <= tol * sup;
    let double_zero_at_0 = small(b0) && small(d0);
    let zero_at_sqrt8 = small(bp) && small(bm);
    let classification = match (double_zero_at_0, zero_at_sqrt8) {
        (true, true) => Classification::NonResonant,
        (false, true) => Classification::ResonantAt0,
        (true, false) => Classification::ResonantAtSqrt8,
        (false, false) => Classification::Both,
    };
    Ok(ResonanceReport {
        hat_at_0: b0,
        hat_slope_at_0: d0,
        hat_at_sqrt8: bp,
        hat_at_minus_sqrt8: bm,
        hat_sup: sup,
        double_zero_at_0,
        zero_at_sqrt8,
        classification,
    })
}

/// Solutions of `g0'' = -3 beta`, `g2'' + 8 g2 = -beta` on a `z`-grid, with
/// `f0 = (g0 + g2)/4`, `f2 = (g0 - 3 g2)/4`. The mean of `g0` is fixed to zero.
#[derive(Debug, Clone)]
pub struct NfCoefficients {
    pub grid: Grid,
    /// `beta` synthesized from its transform samples on the grid.
    pub beta: Real,
    pub g0: Real,
    pub g2: Real,
    pub f0: Real,
    pub f2: Real,
}

impl NfCoefficients {
    /// `||g0'' + 3 beta|| / ||beta||` and `||g2'' + 8 g2 + beta|| / ||beta||`.
    pub fn ode_residuals(&self) -> (f64, f64) {
        let b = crate::spectral_core::l2_norm(&self.beta);
        if b == 0.0 {
            return (0.0, 0.0);
        }
        let g0dd = derivative_y(&self.g0, 2);
        let g2dd = derivative_y(&self.g2, 2);
        let r0 = g0dd.zip_with(&self.beta, |a, c| a + 3.0 * c);
        let r2 = RealField {
            values: (0..self.beta.values.len())
                .map(|j| g2dd.values[j] + 8.0 * self.g2.values[j] + self.beta.values[j])
                .collect(),
            ..self.beta.clone()
        };
        (
            crate::spectral_core::l2_norm(&r0) / b,
            crate::spectral_core::l2_norm(&r2) / b,
        )
    }
}

/// Division guard and the transforms `(g0^, g2^)` at `zeta` given `beta^(zeta)`.
fn g_hats(b: C64, zeta: f64, dz: f64, floor: f64) -> Result<(C64, C64)> {
    let near0 = zeta.abs() < 0.51 * dz;
    let near8 = (zeta.abs() - SQRT8).abs() < 0.51 * dz;
    if (near0 || near8) && b.norm() > floor {
        return Err(Error::Resonance(format!(
            "beta^({zeta:.6}) = {:.3e} at a resonant frequency",
            b.norm()
        )));
    }
    let g0 = if near0 {
        C64::new(0.0, 0.0)
    } else {
        b * (3.0 / (zeta * zeta))
    };
    let g2 = if near8 {
        C64::new(0.0, 0.0)
    } else {
        b / (zeta * zeta - 8.0)
    };
    Ok((g0, g2))
}

fn real_from_coeffs(grid: &Grid, mut c: Vec<C64>, rho: f64) -> Real {
    let ny = grid.len() / 2;
    c[ny] = Complex::new(c[ny].re, 0.0);
    inverse_in_place(grid, &mut c);
    RealField {
        grid: *grid,
        values: c.into_iter().map(|z| z.re).collect(),
        rho,
    }
}

pub fn solve_g_system(beta: &BetaProfile, grid: &Grid) -> Result<NfCoefficients> {
    let n = grid.len();
    let dz = std::f64::consts::PI / grid.half_width();
    let floor = RESONANCE_TOL * beta.hat_sup();
    let mut bh = Vec::with_capacity(n);
    let mut g0 = Vec::with_capacity(n);
    let mut g2 = Vec::with_capacity(n);
    for i in 0..n {
        let zeta = grid.wavenumber(i);
        let b = beta.transform(zeta);
        let (a, c) = g_hats(b, zeta, dz, floor)?;
        bh.push(b);
        g0.push(a);
        g2.push(c);
    }
    let beta_f = real_from_coeffs(grid, bh, 1.0);
    let g0 = real_from_coeffs(grid, g0, 1.0);
    let g2 = real_from_coeffs(grid, g2, 1.0);
    let (f0, f2) = f_from_g(&g0, &g2)?;
    Ok(NfCoefficients {
        grid: *grid,
        beta: beta_f,
        g0,
        g2,
        f0,
        f2,
    })
}

/// `f0 = (g0 + g2)/4`, `f2 = (g0 - 3 g2)/4`.
pub fn f_from_g(g0: &Real, g2: &Real) -> Result<(Real, Real)> {
    g0.grid.check_same(&g2.grid)?;
    Ok((
        g0.zip_with(g2, |a, b| (a + b) / 4.0),
        g0.zip_with(g2, |a, b| (a - 3.0 * b) / 4.0),
    ))
}

/// `g0 = 3 f0 + f2`, `g2 = f0 - f2`.
pub fn g_from_f(f0: &Real, f2: &Real) -> Result<(Real, Real)> {
    f0.grid.check_same(&f2.grid)?;
    Ok((
        f0.zip_with(f2, |a, b| 3.0 * a + b),
        f0.zip_with(f2, |a, b| a - b),
    ))
}

/// Max over the samples of `|sum_{i=0,2} (f_i - f_i'') F_i + f_i F_i^2 - beta F_0|`,
/// relative to `||beta||_inf max(|v|, |v_dot|)^3`.
pub fn coefficient_identity_residual(c: &NfCoefficients, v: &[f64], v_dot: &[f64]) -> Result<f64> {
    let n = c.grid.len();
    if v.len() != n || v_dot.len() != n {
        return invalid("one (v, v_dot) sample per grid point required");
    }
    let f0dd = derivative_y(&c.f0, 2);
    let f2dd = derivative_y(&c.f2, 2);
    let bsup = linf_norm(&c.beta);
    let mut worst = 0.0f64;
    for j in 0..n {
        let (a, b) = (v[j], v_dot[j]);
        let lhs = (c.f0.values[j] - f0dd.values[j]) * f_point(0, a, b)
            + c.f0.values[j] * f2_point(0, a, b)
            + (c.f2.values[j] - f2dd.values[j]) * f_point(2, a, b)
            + c.f2.values[j] * f2_point(2, a, b);
        let scale = bsup * a.abs().max(b.abs()).powi(3);
        if scale > 0.0 {
            worst = worst.max((lhs - c.beta.values[j] * f_point(0, a, b)).abs() / scale);
        }
    }
    Ok(worst)
}

/// Largest `j` with `2^j <= 2 rho^{1/2}`.
pub fn band_count(rho: f64) -> i32 {
    (2.0 * rho.sqrt()).log2().floor() as i32
}

/// Cutoff weight `theta(2^j / rho^{1/2})` of band `j`.
pub fn band_weight(j: i32, rho: f64) -> f64 {
    theta(2f64.powi(j) / rho.sqrt())
}

#[derive(Debug, Clone)]
pub struct BetaBands {
    pub rho: f64,
    /// `(j, beta_j)` for `j = 1..=J`.
    pub bands: Vec<(i32, BetaProfile)>,
    /// Frequencies below the last band.
    pub low: BetaProfile,
    /// Frequencies `|zeta| >= 1`.
    pub high: BetaProfile,
}

impl BetaBands {
    /// `max_zeta |sum of piece transforms - beta^|` on `samples` points in `[0, r]`.
    pub fn reconstruction_error(&self, beta: &BetaProfile, r: f64, samples: usize) -> f64 {
        (0..=samples)
            .map(|i| {
                let z = r * i as f64 / samples as f64;
                let s: C64 = self.bands.iter().map(|(_, b)| b.transform(z)).sum::<C64>()
                    + self.low.transform(z)
                    + self.high.transform(z);
                (s - beta.transform(z)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `beta_j` has transform `chi_1(2^j zeta) beta^(zeta)` with `chi_1` the dyadic band symbol.
pub fn dyadic_beta_bands(beta: &BetaProfile, rho: f64) -> Result<BetaBands> {
    if !(rho >= 1.0) {
        return invalid("band split requires rho >= 1");
    }
    let jmax = band_count(rho);
    let bands = (1..=jmax)
        .map(|j| (j, beta.windowed(Window::Band { j })))
        .collect();
    Ok(BetaBands {
        rho,
        bands,
        low: beta.windowed(Window::LowRest { j: jmax.max(0) }),
        high: beta.windowed(Window::HighRest),
    })
}

/// `f_0[beta](rho y)` and `f_2[beta](rho y)` synthesized on the `y`-grid from
/// `g^(xi / rho) / rho`.
pub fn scaled_coefficients(beta: &BetaProfile, grid: &Grid, rho: f64) -> Result<(Real, Real)> {
    let n = grid.len();
    let dz = std::f64::consts::PI / (grid.half_width() * rho);
    let floor = RESONANCE_TOL * beta.hat_sup();
    let mut f0 = Vec::with_capacity(n);
    let mut f2 = Vec::with_capacity(n);
    for i in 0..n {
        let zeta = grid.wavenumber(i) / rho;
        let (g0, g2) = g_hats(beta.transform(zeta), zeta, dz, floor)?;
        f0.push((g0 + g2) / (4.0 * rho));
        f2.push((g0 - 3.0 * g2) / (4.0 * rho));
    }
    Ok((
        real_from_coeffs(grid, f0, rho),
        real_from_coeffs(grid, f2, rho),
    ))
}

#[derive(Debug, Clone)]
pub struct W2 {
    pub rho: f64,
    pub field: Real,
    /// `(j, weight, w_{2,j})`.
    pub bands: Vec<(i32, f64, Real)>,
    /// `sum_j c_j beta_j(rho y) (w_j)^3 / rho`, the source matched by the bands.
    pub matched_source: Real,
}

fn low_pass(f: &Real, cut: f64) -> Real {
    apply_real_multiplier(f, |xi| theta(xi.abs() / cut))
}

/// `w2 = sum_j theta(2^j / rho^{1/2}) rho^{-1} sum_{i=0,2} f_i[beta_j](rho y) F_i(w_j, w_dot_j)`
/// with `w_j = P_{<= rho/2^j} w`.
pub fn build_w2_zero_resonance(w: &Real, w_dot: &Real, beta: &BetaProfile, rho: f64) -> Result<W2> {
    w.grid.check_same(&w_dot.grid)?;
    let grid = w.grid;
    let split = dyadic_beta_bands(beta, rho)?;
    let mut total = vec![0.0; grid.len()];
    let mut matched = vec![0.0; grid.len()];
    let mut bands = Vec::new();
    for (j, bj) in &split.bands {
        let c = band_weight(*j, rho);
        if c == 0.0 || bj.hat_sup() == 0.0 {
            continue;
        }
        let (f0, f2) = scaled_coefficients(bj, &grid, rho)?;
        let cut = rho / 2f64.powi(*j);
        let wj = low_pass(w, cut);
        let wdj = low_pass(w_dot, cut);
        let bfield = bj.synthesize_scaled(&grid, rho);
        let vals: Vec<f64> = (0..grid.len())
            .map(|k| {
                (f0.values[k] * f_point(0, wj.values[k], wdj.values[k])
                    + f2.values[k] * f_point(2, wj.values[k], wdj.values[k]))
                    / rho
            })
            .collect();
        let piece = dealias(&RealField {
            grid,
            values: vals,
            rho,
        });
        for k in 0..grid.len() {
            total[k] += c * piece.values[k];
            matched[k] += c * bfield.values[k] * wj.values[k].powi(3) / rho;
        }
        bands.push((*j, c, piece));
    }
    Ok(W2 {
        rho,
        field: RealField {
            grid,
            values: total,
            rho,
        },
        bands,
        matched_source: dealias(&RealField {
            grid,
            values: matched,
            rho,
        }),
    })
}

#[derive(Debug, Clone)]
pub struct CubicResidual {
    pub rho: f64,
    pub e_cubic: Real,
    pub e_h1: f64,
    /// `||rho^{-1} beta(rho y) (P_{<=rho} w)^3||_{H^1}`.
    pub source_h1: f64,
    /// `||rho^{-1} beta(rho y) (w^3 - (P_{<=rho} w)^3)||_{H^1}`.
    pub high_leftover_h1: f64,
    /// `||(w2, w2_dot, D_y w2)||_{H^1}`.
    pub w2_norm: f64,
    /// `rho^{1/4} ||(w2, w2_dot, D_y w2)||_{H^1} / (||(w, w_dot)||_inf^2 ||(w, w_dot)||_{H^1})`.
    pub scaled_size: f64,
    /// `rho ||E_cubic||_{H^1} / (||(w, w_dot)||_B^2 ||(w, w_dot)||_{H^1})`.
    pub scaled_residual: f64,
    pub fd_dominated: bool,
}

/// `E_cubic = (d_rho^2 - rho^{-2} d_y^2 + 1) w2 - rho^{-1} beta(rho y) (P_{<=rho} w)^3`
/// from five slices `(w, w_dot)` at `rho + k h`, `k = -2..=2`.
pub fn cubic_error_residual(
    slices: &[(Real, Real)],
    beta: &BetaProfile,
    rho: f64,
    h: f64,
) -> Result<CubicResidual> {
    if slices.len() != 5 {
        return invalid("cubic residual needs five slices");
    }
    let w2s: Vec<Real> = slices
        .iter()
        .enumerate()
        .map(|(k, (w, wd))| {
            build_w2_zero_resonance(w, wd, beta, rho + (k as f64 - 2.0) * h).map(|r| r.field)
        })
        .collect::<Result<_>>()?;
    let refs: Vec<&Real> = w2s.iter().collect();
    let d5 = second_difference(&refs, h)?;
    let d3 = second_difference(&refs[1..4], h)?;
    let w2 = &w2s[2];
    let lin = apply_real_multiplier(w2, |xi| 1.0 + (xi / rho).powi(2));
    let (w, wd) = &slices[2];
    let grid = w.grid;
    let b = beta.synthesize_scaled(&grid, rho);
    let wl = crate::littlewood_paley::project(w, ProjectionKey::Low(rho))?;
    let src = dealias(&RealField {
        grid,
        values: (0..grid.len())
            .map(|k| b.values[k] * wl.values[k].powi(3) / rho)
            .collect(),
        rho,
    });
    let full = dealias(&RealField {
        grid,
        values: (0..grid.len())
            .map(|k| b.values[k] * w.values[k].powi(3) / rho)
            .collect(),
        rho,
    });
    let e = RealField {
        grid,
        values: (0..grid.len())
            .map(|k| d5.values[k] + lin.values[k] - src.values[k])
            .collect(),
        rho,
    };
    let diff = d5.zip_with(&d3, |a, c| a - c);
    let e_h1 = h1_norm(&e);
    let w2_dot = RealField {
        grid,
        values: (0..grid.len())
            .map(|k| {
                (w2s[0].values[k] - 8.0 * w2s[1].values[k] + 8.0 * w2s[3].values[k]
                    - w2s[4].values[k])
                    / (12.0 * h)
            })
            .collect(),
        rho,
    };
    let dyw2 = semiclassical_derivative(w2, rho, 1)?;
    let w2_norm = h1_norm(w2) + h1_norm(&w2_dot) + h1_norm(&dyw2);
    let sup = linf_norm(w) + linf_norm(wd);
    let h1 = h1_norm(w) + h1_norm(wd);
    let bn = b_infinity_norm(w, rho)? + b_infinity_norm(wd, rho)?;
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    Ok(CubicResidual {
        rho,
        e_h1,
        source_h1: h1_norm(&src),
        high_leftover_h1: h1_norm(&full.zip_with(&src, |a, c| a - c)),
        w2_norm,
        scaled_size: ratio(rho.powf(0.25) * w2_norm, sup * sup * h1),
        scaled_residual: ratio(rho * e_h1, bn * bn * h1),
        fd_dominated: h1_norm(&diff) > 0.1 * e_h1,
        e_cubic: e,
    })
}

/// The four coefficient fields `f_0..f_3` recovered from `K_1`, `K_3` at the same `rho`:
/// `g0 + i g1 = 3 K_1 e^{-i rho}`, `g2 + i g3 = K_3 e^{-3 i rho}`, then
/// `f0 = (g0 + g2)/4`, `f2 = (g0 - 3 g2)/4`, `f1 = (g1 + 3 g3)/4`, `f3 = (g1 - g3)/4`.
pub fn sqrt8_coefficients_from_parametrix(
    k1: &ParametrixKernel,
    k3: &ParametrixKernel,
) -> Result<[Real; 4]> {
    if k1.n != 1 || k3.n != 3 {
        return invalid("expected K_1 and K_3");
    }
    if (k1.rho - k3.rho).abs() > 1e-12 * k1.rho {
        return invalid("K_1 and K_3 at different rho");
    }
    k1.k.grid.check_same(&k3.k.grid)?;
    Ok(coefficients_from_k(
        &k1.k.values,
        &k3.k.values,
        &k1.k.grid,
        k1.rho,
    ))
}

pub(crate) fn coefficients_from_k(k1: &[C64], k3: &[C64], grid: &Grid, rho: f64) -> [Real; 4] {
    let e1 = C64::from_polar(1.0, -rho);
    let e3 = C64::from_polar(1.0, -3.0 * rho);
    let n = grid.len();
    let mut f: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(n));
    for j in 0..n {
        let a = 3.0 * k1[j] * e1;
        let b = k3[j] * e3;
        let (g0, g1, g2, g3) = (a.re, a.im, b.re, b.im);
        f[0].push((g0 + g2) / 4.0);
        f[1].push((g1 + 3.0 * g3) / 4.0);
        f[2].push((g0 - 3.0 * g2) / 4.0);
        f[3].push((g1 - g3) / 4.0);
    }
    f.map(|values| RealField {
        grid: *grid,
        values,
        rho,
    })
}

/// Residuals of the four-equation system
/// `box f0 - 2 f0 - 2 f1' + 2 f2 = beta(rho y)`,
/// `box f1 - 6 f1 + 6 f0' - 4 f2' + 6 f3 = 0`,
/// `box f2 - 6 f2 + 6 f0 + 4 f1' - 6 f3' = 0`,
/// `box f3 - 2 f3 + 2 f1 + 2 f2' = 0`,
/// with `box = d_rho^2 - rho^{-2} d_y^2` and `'` = `d_rho`, from five slices at `rho + k h`.
pub fn f_system_residual(
    slices: &[[Real; 4]],
    beta: &BetaProfile,
    rho: f64,
    h: f64,
) -> Result<[Real; 4]> {
    if slices.len() != 5 {
        return invalid("f-system residual needs five slices");
    }
    let grid = slices[2][0].grid;
    let n = grid.len();
    let dd: Vec<Real> = (0..4)
        .map(|i| second_difference(&slices.iter().map(|s| &s[i]).collect::<Vec<_>>(), h))
        .collect::<Result<_>>()?;
    let d1: Vec<Vec<f64>> = (0..4)
        .map(|i| {
            (0..n)
                .map(|k| {
                    (slices[0][i].values[k] - 8.0 * slices[1][i].values[k]
                        + 8.0 * slices[3][i].values[k]
                        - slices[4][i].values[k])
                        / (12.0 * h)
                })
                .collect()
        })
        .collect();
    let c = &slices[2];
    let bx: Vec<Real> = (0..4)
        .map(|i| {
            let yy = derivative_y(&c[i], 2);
            dd[i].zip_with(&yy, |a, b| a - b / (rho * rho))
        })
        .collect();
    let b = beta.synthesize_scaled(&grid, rho);
    let mk = |f: &dyn Fn(usize) -> f64| RealField {
        grid,
        values: (0..n).map(f).collect(),
        rho,
    };
    let v = |i: usize, k: usize| c[i].values[k];
    Ok([
        mk(&|k| bx[0].values[k] - 2.0 * v(0, k) - 2.0 * d1[1][k] + 2.0 * v(2, k) - b.values[k]),
        mk(&|k| bx[1].values[k] - 6.0 * v(1, k) + 6.0 * d1[0][k] - 4.0 * d1[2][k] + 6.0 * v(3, k)),
        mk(&|k| bx[2].values[k] - 6.0 * v(2, k) + 6.0 * v(0, k) + 4.0 * d1[1][k] - 6.0 * d1[3][k]),
        mk(&|k| bx[3].values[k] - 2.0 * v(3, k) + 2.0 * v(1, k) + 2.0 * d1[2][k]),
    ])
}

/// Per-band sizes `(j, ||beta_j(rho y)||_inf, ||d_y beta_j(rho y)||_2)` for the band sweep.
pub fn band_norms(beta: &BetaProfile, grid: &Grid, rho: f64) -> Result<Vec<(i32, f64, f64)>> {
    let split = dyadic_beta_bands(beta, rho)?;
    Ok(split
        .bands
        .iter()
        .map(|(j, b)| {
            let f = b.synthesize_scaled(grid, rho);
            (
                *j,
                linf_norm(&f),
                crate::spectral_core::l2_norm(&derivative_y(&f, 1)),
            )
        })
        .collect())
}

/// Coefficient transform samples for diagnostics: `(zeta, beta^, g0^, g2^)`.
pub fn coefficient_spectrum(beta: &BetaProfile, grid: &Grid) -> Result<Vec<(f64, C64, C64, C64)>> {
    let dz = std::f64::consts::PI / grid.half_width();
    let floor = RESONANCE_TOL * beta.hat_sup();
    (0..grid.len())
        .map(|i| {
            let z = grid.wavenumber(i);
            let b = beta.transform(z);
            g_hats(b, z, dz, floor).map(|(a, c)| (z, b, a, c))
        })
        .collect()
}

/// Forward transform helper used by the band tests.
pub fn coefficients_of(f: &Real) -> Vec<C64> {
    let mut buf: Vec<C64> = f.values.iter().map(|&x| Complex::new(x, 0.0)).collect();
    forward_in_place(&f.grid, &mut buf);
    buf
}
