//! Bilinear semiclassical operators
//! `B(u,v)^(m) = (1/2L) sum_{k+l=m} b(xi_k/rho, xi_l/rho) u^_k v^_l`
//! and the quadratic normal form `w1 = rho^{-1/2}(B1(v,v) + B2(v_dot,v_dot))`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::fit::{fit_power_law, PowerFit};
use crate::littlewood_paley::{b_infinity_norm, theta};
use crate::quad::composite_nodes;
use crate::spectral_core::{
    apply_real_multiplier, dft_forward, forward_in_place, h1_norm, inverse_in_place, l2_norm,
    linf_norm, random_band_limited, semiclassical_derivative, ComplexField, Field, RealField,
};
use crate::{invalid, Grid, Real, Result, C64};

type SymbolFn = dyn Fn(f64, f64) -> C64 + Send + Sync;

#[derive(Clone)]
pub struct BilinearSymbol {
    name: String,
    f: Arc<SymbolFn>,
}

impl fmt::Debug for BilinearSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BilinearSymbol({})", self.name)
    }
}

/// `4 xi^2 + 4 eta^2 + 4 xi eta + 3`, minus the determinantal polynomial.
fn q(xi: f64, eta: f64) -> f64 {
    4.0 * xi * xi + 4.0 * eta * eta + 4.0 * xi * eta + 3.0
}

/// Determinant of the symbol system, `-(4 xi^2 + 4 eta^2 + 4 xi eta + 3)`.
pub fn determinant_polynomial(xi: f64, eta: f64) -> f64 {
    -q(xi, eta)
}

impl BilinearSymbol {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn real(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, move |a, b| C64::new(f(a, b), 0.0))
    }

    pub fn constant(c: f64) -> Self {
        Self::real(format!("const({c})"), move |_, _| c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, xi: f64, eta: f64) -> C64 {
        (self.f)(xi, eta)
    }

    /// `d_xi^m d_eta^n b` by centered differences, `m, n <= 2`.
    pub fn partial(&self, m: u32, n: u32, xi: f64, eta: f64) -> C64 {
        let hx = 1e-3 * (1.0 + xi.abs());
        let hy = 1e-3 * (1.0 + eta.abs());
        let stencil = |k: u32, h: f64| -> Vec<(f64, f64)> {
            match k {
                0 => vec![(0.0, 1.0)],
                1 => vec![(h, 0.5 / h), (-h, -0.5 / h)],
                _ => vec![
                    (h, 1.0 / (h * h)),
                    (0.0, -2.0 / (h * h)),
                    (-h, 1.0 / (h * h)),
                ],
            }
        };
        let mut acc = C64::new(0.0, 0.0);
        for (dx, wx) in stencil(m, hx) {
            for &(dy, wy) in &stencil(n, hy) {
                acc += self.eval(xi + dx, eta + dy) * (wx * wy);
            }
        }
        acc
    }

    /// Symbol `d_xi b` (`which = 1`) or `d_eta b` (`which = 2`).
    pub fn derivative_symbol(&self, which: u32) -> Self {
        let s = self.clone();
        let (m, n) = if which == 1 { (1, 0) } else { (0, 1) };
        Self::new(format!("d{which} {}", self.name), move |a, b| {
            s.partial(m, n, a, b)
        })
    }

    /// Samples on the tensor grid `xs x ys` (row per `xi`).
    pub fn grid(&self, xs: &[f64], ys: &[f64]) -> Vec<Vec<C64>> {
        xs.iter()
            .map(|&x| ys.iter().map(|&y| self.eval(x, y)).collect())
            .collect()
    }

    /// `sum_{k+l <= N} sup (1+|xi|)^k (1+|eta|)^l |d^k d^l b|` over `|xi|, |eta| <= r`.
    pub fn symbol_bound(&self, order: u32, r: f64, samples: usize) -> f64 {
        let pts: Vec<f64> = (0..=samples)
            .map(|i| -r + 2.0 * r * i as f64 / samples as f64)
            .collect();
        let mut total = 0.0;
        for k in 0..=order {
            for l in 0..=(order - k).min(2) {
                if k > 2 {
                    continue;
                }
                let mut sup = 0.0f64;
                for &x in &pts {
                    for &y in &pts {
                        sup = sup.max(
                            (1.0 + x.abs()).powi(k as i32)
                                * (1.0 + y.abs()).powi(l as i32)
                                * self.partial(k, l, x, y).norm(),
                        );
                    }
                }
                total += sup;
            }
        }
        total
    }

    /// `||B||_{M,N} = max_{k,l} sum_{m<=M, n<=N} int_{D_kl} (1+|xi|)^{m-1}(1+|eta|)^{n-1} |d^m d^n b|`
    /// over dyadic boxes with `k, l <= 8`. Index 0 is the low box `|.| <= 2`,
    /// widened to `|.| <= 4` for `D_00`.
    pub fn class_norm(&self, mm: u32, nn: u32) -> f64 {
        let intervals = |k: u32, other: u32| -> Vec<(f64, f64)> {
            if k == 0 {
                let r = if other == 0 { 4.0 } else { 2.0 };
                vec![(-r, r)]
            } else {
                let a = 2f64.powi(k as i32 - 1);
                let b = 2f64.powi(k as i32 + 1);
                vec![(a, b), (-b, -a)]
            }
        };
        let nodes = |iv: &[(f64, f64)]| {
            let mut out = Vec::new();
            for &(a, b) in iv {
                composite_nodes(a, b, 3, |s, w| out.push((s, w)));
            }
            out
        };
        let mut best = 0.0f64;
        for k in 0..=8u32 {
            for l in 0..=8u32 {
                let xs = nodes(&intervals(k, l));
                let ys = nodes(&intervals(l, k));
                let mut total = 0.0;
                for &(x, wx) in &xs {
                    for &(y, wy) in &ys {
                        for m in 0..=mm {
                            for n in 0..=nn {
                                let wt = (1.0 + x.abs()).powi(m as i32 - 1)
                                    * (1.0 + y.abs()).powi(n as i32 - 1);
                                total += wx * wy * wt * self.partial(m, n, x, y).norm();
                            }
                        }
                    }
                }
                best = best.max(total);
            }
        }
        best
    }

    /// `||B|| = ||B||_{1,1} (1 + ln max(||B||_{2,2}/||B||_{1,1}, 1))^2`.
    pub fn operator_norm(&self) -> f64 {
        let n11 = self.class_norm(1, 1);
        if n11 == 0.0 {
            return 0.0;
        }
        let n22 = self.class_norm(2, 2);
        n11 * (1.0 + (n22 / n11).max(1.0).ln()).powi(2)
    }
}

/// `b1 = a0 (1 - 2 xi eta) / q`, `q = 4 xi^2 + 4 eta^2 + 4 xi eta + 3`.
pub fn symbol_b1(alpha0: f64) -> BilinearSymbol {
    BilinearSymbol::real(format!("b1({alpha0})"), move |x, y| {
        alpha0 * (1.0 - 2.0 * x * y) / q(x, y)
    })
}

/// `b2 = 2 a0 / q`.
pub fn symbol_b2(alpha0: f64) -> BilinearSymbol {
    BilinearSymbol::real(format!("b2({alpha0})"), move |x, y| 2.0 * alpha0 / q(x, y))
}

/// Residuals of `(-1 + 2 xi eta) b1 + 2 (xi^2+1)(eta^2+1) b2 = a0` and
/// `(-1 + 2 xi eta) b2 + 2 b1 = 0` at one point.
pub fn symbol_system_residual(alpha0: f64, xi: f64, eta: f64) -> (f64, f64) {
    let b1 = symbol_b1(alpha0).eval(xi, eta).re;
    let b2 = symbol_b2(alpha0).eval(xi, eta).re;
    let c = -1.0 + 2.0 * xi * eta;
    (
        c * b1 + 2.0 * (xi * xi + 1.0) * (eta * eta + 1.0) * b2 - alpha0,
        c * b2 + 2.0 * b1,
    )
}

#[derive(Debug, Clone)]
pub struct PdoOutput {
    /// Dealiased result.
    pub field: ComplexField<f64>,
    /// `L^2` mass of the output modes removed by dealiasing or outside the grid,
    /// relative to the full output.
    pub discarded: f64,
}

impl PdoOutput {
    pub fn overflowed(&self) -> bool {
        self.discarded > 1e-12
    }
}

/// Evaluates `B(u, v)` as the double spectral sum.
pub fn apply_bilinear_pdo<U: Field<f64>, V: Field<f64>>(
    b: &BilinearSymbol,
    u: &U,
    v: &V,
    rho: f64,
) -> Result<PdoOutput> {
    u.grid().check_same(v.grid())?;
    if !(rho >= 1.0) {
        return invalid("bilinear operator requires rho >= 1");
    }
    let grid = *u.grid();
    let n = grid.len() as i64;
    let mut uh = u.to_complex_values();
    let mut vh = v.to_complex_values();
    forward_in_place(&grid, &mut uh);
    forward_in_place(&grid, &mut vh);
    let nz = |h: &[C64]| -> Vec<(i64, f64, C64)> {
        h.iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(i, c)| (grid.mode(i), grid.wavenumber(i) / rho, *c))
            .collect()
    };
    let us = nz(&uh);
    let vs = nz(&vh);
    let mut full = vec![C64::new(0.0, 0.0); 2 * n as usize];
    for &(k, xk, ck) in &us {
        for &(l, xl, cl) in &vs {
            full[(k + l + n) as usize] += b.eval(xk, xl) * ck * cl;
        }
    }
    let s = 1.0 / (2.0 * grid.half_width());
    let cut = grid.dealias_cutoff();
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let (mut kept, mut lost) = (0.0, 0.0);
    for (idx, c) in full.iter().enumerate() {
        let m = idx as i64 - n;
        let c = c * s;
        if m.abs() <= cut {
            out[grid.index_of_mode(m)] = c;
            kept += c.norm_sqr();
        } else {
            lost += c.norm_sqr();
        }
    }
    inverse_in_place(&grid, &mut out);
    let discarded = if kept + lost > 0.0 {
        (lost / (kept + lost)).sqrt()
    } else {
        0.0
    };
    Ok(PdoOutput {
        field: ComplexField {
            grid,
            values: out,
            rho,
        },
        discarded,
    })
}

/// Real part of `B(u, v)`.
pub fn apply_real(b: &BilinearSymbol, u: &Real, v: &Real, rho: f64) -> Result<Real> {
    Ok(apply_bilinear_pdo(b, u, v, rho)?.field.re())
}

fn dy(f: &Real, rho: f64, k: u32) -> Result<ComplexField<f64>> {
    semiclassical_derivative(f, rho, k)
}

/// `(D_y^2 + 1) f`.
fn helmholtz(f: &Real, rho: f64) -> Result<Real> {
    Ok(apply_real_multiplier(f, |xi| 1.0 + (xi / rho).powi(2)))
}

/// Relative residuals of
/// `-B1(u,v) + 2 B1(D u, D v) + 2 B2((D^2+1)u, (D^2+1)v) = a0 u v` and
/// `-B2(u,v) + 2 B2(D u, D v) + 2 B1(u, v) = 0`, with `u v` formed by the
/// constant-symbol operator.
pub fn cancellation_residual(alpha0: f64, u: &Real, v: &Real, rho: f64) -> Result<(f64, f64)> {
    let b1 = symbol_b1(alpha0);
    let b2 = symbol_b2(alpha0);
    let du = dy(u, rho, 1)?;
    let dv = dy(v, rho, 1)?;
    let hu = helmholtz(u, rho)?;
    let hv = helmholtz(v, rho)?;
    let t1 = apply_bilinear_pdo(&b1, u, v, rho)?.field;
    let t2 = apply_bilinear_pdo(&b1, &du, &dv, rho)?.field;
    let t3 = apply_bilinear_pdo(&b2, &hu, &hv, rho)?.field;
    let prod = apply_bilinear_pdo(&BilinearSymbol::constant(alpha0), u, v, rho)?.field;
    let lhs1: Vec<C64> = (0..u.values.len())
        .map(|j| -t1.values[j] + 2.0 * t2.values[j] + 2.0 * t3.values[j] - prod.values[j])
        .collect();
    let s1 = t1
        .values
        .iter()
        .chain(&t2.values)
        .chain(&t3.values)
        .fold(0.0f64, |a, z| a.max(z.norm()));
    let r1 = lhs1.iter().fold(0.0f64, |a, z| a.max(z.norm())) / s1.max(f64::MIN_POSITIVE);
    let s2a = apply_bilinear_pdo(&b2, u, v, rho)?.field;
    let s2b = apply_bilinear_pdo(&b2, &du, &dv, rho)?.field;
    let s2c = apply_bilinear_pdo(&b1, u, v, rho)?.field;
    let lhs2: Vec<C64> = (0..u.values.len())
        .map(|j| -s2a.values[j] + 2.0 * s2b.values[j] + 2.0 * s2c.values[j])
        .collect();
    let sc = s2a
        .values
        .iter()
        .chain(&s2b.values)
        .chain(&s2c.values)
        .fold(0.0f64, |a, z| a.max(z.norm()));
    let r2 = lhs2.iter().fold(0.0f64, |a, z| a.max(z.norm())) / sc.max(f64::MIN_POSITIVE);
    Ok((r1, r2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalculusReport {
    /// Relative residual of `D_y B(u,v) = B(D_y u, v) + B(u, D_y v)`.
    pub leib1: f64,
    /// Relative residual of the `d_rho` identity with a centered difference of width `2 d_rho`.
    pub leib2: f64,
}

fn sup_rel(a: &[C64], b: &[C64]) -> f64 {
    let d = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    let s = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.norm()));
    if s == 0.0 {
        0.0
    } else {
        d / s
    }
}

/// Checks both calculus identities for fields `pair(rho) = (u, v)` that depend on `rho`.
pub fn pdo_calculus_check(
    b: &BilinearSymbol,
    pair: &dyn Fn(f64) -> (Real, Real),
    rho: f64,
    d_rho: f64,
) -> Result<CalculusReport> {
    let (u, v) = pair(rho);
    let lhs = semiclassical_derivative(&apply_bilinear_pdo(b, &u, &v, rho)?.field, rho, 1)?;
    let r1 = apply_bilinear_pdo(b, &dy(&u, rho, 1)?, &v, rho)?.field;
    let r2 = apply_bilinear_pdo(b, &u, &dy(&v, rho, 1)?, rho)?.field;
    let rhs: Vec<C64> = r1
        .values
        .iter()
        .zip(&r2.values)
        .map(|(a, c)| a + c)
        .collect();
    let leib1 = sup_rel(&lhs.values, &rhs);

    let (up, vp) = pair(rho + d_rho);
    let (um, vm) = pair(rho - d_rho);
    let bp = apply_bilinear_pdo(b, &up, &vp, rho + d_rho)?.field;
    let bm = apply_bilinear_pdo(b, &um, &vm, rho - d_rho)?.field;
    let lhs2: Vec<C64> = bp
        .values
        .iter()
        .zip(&bm.values)
        .map(|(p, m)| (p - m) / (2.0 * d_rho))
        .collect();
    let du = up.zip_with(&um, |p, m| (p - m) / (2.0 * d_rho));
    let dv = vp.zip_with(&vm, |p, m| (p - m) / (2.0 * d_rho));
    let d1 = b.derivative_symbol(1);
    let d2 = b.derivative_symbol(2);
    let a1 = apply_bilinear_pdo(b, &du, &v, rho)?.field;
    let a2 = apply_bilinear_pdo(b, &u, &dv, rho)?.field;
    let a3 = apply_bilinear_pdo(&d1, &dy(&u, rho, 1)?, &v, rho)?.field;
    let a4 = apply_bilinear_pdo(&d2, &u, &dy(&v, rho, 1)?, rho)?.field;
    let rhs2: Vec<C64> = (0..u.values.len())
        .map(|j| a1.values[j] + a2.values[j] - (a3.values[j] + a4.values[j]) / rho)
        .collect();
    Ok(CalculusReport {
        leib1,
        leib2: sup_rel(&lhs2, &rhs2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdoBoundReport {
    pub rho: f64,
    pub operator_norm: f64,
    /// Max of `||B(u,v)||_p / (||B|| ||u||_p ||v||_B)` over `p = 2` and `p = inf`.
    pub est1: f64,
    /// Max of `||B(u,v)||_{H^1} / (||B|| (||u||_{H^1}||v||_B + ||u||_B||v||_{H^1}))`.
    pub est3: f64,
    /// Max of `||B(u,v)||_B / (||B|| ||u||_B ||v||_B)`.
    pub est5: f64,
    pub trials: usize,
}

/// Empirical constants of the three operator estimates over random band-limited pairs.
pub fn pdo_operator_bound_check<R: Rng + ?Sized>(
    b: &BilinearSymbol,
    grid: &Grid,
    rho: f64,
    trials: usize,
    kmax: usize,
    rng: &mut R,
) -> Result<PdoBoundReport> {
    let norm = b.operator_norm();
    let mut rep = PdoBoundReport {
        rho,
        operator_norm: norm,
        est1: 0.0,
        est3: 0.0,
        est5: 0.0,
        trials: 0,
    };
    if norm == 0.0 {
        return Ok(rep);
    }
    for _ in 0..trials {
        let u = random_band_limited(*grid, kmax, rng);
        let v = random_band_limited(*grid, kmax, rng);
        if l2_norm(&u) == 0.0 || l2_norm(&v) == 0.0 {
            continue;
        }
        let w = apply_real(b, &u, &v, rho)?;
        let (ub, vb) = (b_infinity_norm(&u, rho)?, b_infinity_norm(&v, rho)?);
        let (uh, vh) = (h1_norm(&u), h1_norm(&v));
        let e1 = (l2_norm(&w) / (norm * l2_norm(&u) * vb))
            .max(linf_norm(&w) / (norm * linf_norm(&u) * vb));
        let e3 = h1_norm(&w) / (norm * (uh * vb + ub * vh));
        let e5 = b_infinity_norm(&w, rho)? / (norm * ub * vb);
        rep.est1 = rep.est1.max(e1);
        rep.est3 = rep.est3.max(e3);
        rep.est5 = rep.est5.max(e5);
        rep.trials += 1;
    }
    Ok(rep)
}

/// `||P_{<= rho^sigma} B(u,v)||_B / ((||u||_B + ||u||_{H^1})(||v||_B + ||v||_{H^1}))`.
pub fn low_frequency_ratio(
    b: &BilinearSymbol,
    u: &Real,
    v: &Real,
    rho: f64,
    sigma: f64,
) -> Result<f64> {
    let w = apply_real(b, u, v, rho)?;
    let cut = rho.powf(sigma);
    let low = apply_real_multiplier(&w, |xi| theta(xi.abs() / cut));
    let den = (b_infinity_norm(u, rho)? + h1_norm(u)) * (b_infinity_norm(v, rho)? + h1_norm(v));
    Ok(if den > 0.0 {
        b_infinity_norm(&low, rho)? / den
    } else {
        0.0
    })
}

/// Largest low-frequency ratio per `rho` over random pairs whose spectra reach
/// `|xi| ~ rho`, and the fitted exponent in `rho`.
pub fn low_frequency_exponent<R: Rng + ?Sized>(
    b: &BilinearSymbol,
    grid: &Grid,
    rhos: &[f64],
    trials: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<(Vec<(f64, f64)>, PowerFit)> {
    let mut pts = Vec::new();
    for &rho in rhos {
        let kmax =
            ((rho * grid.half_width() / std::f64::consts::PI) as usize).clamp(1, grid.len() / 3);
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let u = random_band_limited(*grid, kmax, rng);
            let v = random_band_limited(*grid, kmax, rng);
            worst = worst.max(low_frequency_ratio(b, &u, &v, rho, sigma)?);
        }
        pts.push((rho, worst));
    }
    let f = fit_power_law(&pts)?;
    Ok((pts, f))
}

#[derive(Debug, Clone)]
pub struct QuadraticNf {
    pub rho: f64,
    pub w1: Real,
    /// `d_rho w1` with `v_ddot` replaced by its linear part.
    pub w1_dot: Real,
    /// `||w1||_{H^1} + ||w1_dot||_{H^1} + ||D_y w1||_{H^1}`.
    pub norm: f64,
}

/// `rho^{-1/2}(B1(v,v) + B2(v_dot,v_dot))` alone.
pub fn w1_field(v: &Real, v_dot: &Real, rho: f64, alpha0: f64) -> Result<Real> {
    let s = rho.powf(-0.5);
    let a = apply_real(&symbol_b1(alpha0), v, v, rho)?;
    let b = apply_real(&symbol_b2(alpha0), v_dot, v_dot, rho)?;
    Ok(a.zip_with(&b, |x, y| s * (x + y)))
}

pub fn build_w1(v: &Real, v_dot: &Real, rho: f64, alpha0: f64) -> Result<QuadraticNf> {
    let b1 = symbol_b1(alpha0);
    let b2 = symbol_b2(alpha0);
    let s = rho.powf(-0.5);
    let w1 = w1_field(v, v_dot, rho, alpha0)?;
    let vdd = apply_real_multiplier(v, |xi| -(1.0 + 0.25 / (rho * rho) + (xi / rho).powi(2)));
    let dv = dy(v, rho, 1)?;
    let dvd = dy(v_dot, rho, 1)?;
    let t = [
        apply_bilinear_pdo(&b1, v_dot, v, rho)?.field.re(),
        apply_bilinear_pdo(&b2, &vdd, v_dot, rho)?.field.re(),
        apply_bilinear_pdo(&b1.derivative_symbol(1), &dv, v, rho)?
            .field
            .re(),
        apply_bilinear_pdo(&b1.derivative_symbol(2), v, &dv, rho)?
            .field
            .re(),
        apply_bilinear_pdo(&b2.derivative_symbol(1), &dvd, v_dot, rho)?
            .field
            .re(),
        apply_bilinear_pdo(&b2.derivative_symbol(2), v_dot, &dvd, rho)?
            .field
            .re(),
    ];
    let values = (0..v.values.len())
        .map(|j| {
            -0.5 / rho * w1.values[j]
                + s * (2.0 * t[0].values[j] + 2.0 * t[1].values[j]
                    - (t[2].values[j] + t[3].values[j] + t[4].values[j] + t[5].values[j]) / rho)
        })
        .collect();
    let w1_dot = RealField {
        grid: v.grid,
        values,
        rho,
    };
    let dw = dy(&w1, rho, 1)?;
    let norm = h1_norm(&w1) + h1_norm(&w1_dot) + h1_norm(&dw);
    Ok(QuadraticNf {
        rho,
        w1,
        w1_dot,
        norm,
    })
}

/// Weights of the centered second difference on 3 or 5 points.
pub fn second_difference(f: &[&Real], h: f64) -> Result<Real> {
    let w: &[f64] = match f.len() {
        3 => &[1.0, -2.0, 1.0],
        5 => &[
            -1.0 / 12.0,
            16.0 / 12.0,
            -30.0 / 12.0,
            16.0 / 12.0,
            -1.0 / 12.0,
        ],
        n => return invalid(format!("second difference needs 3 or 5 slices, got {n}")),
    };
    let mut out = RealField::zeros(f[0].grid, f[f.len() / 2].rho);
    for (fi, wi) in f.iter().zip(w) {
        for (o, x) in out.values.iter_mut().zip(&fi.values) {
            *o += wi * x / (h * h);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct QuadResidual {
    pub rho: f64,
    pub e_quad: Real,
    pub e_h1: f64,
    /// `||a0 rho^{-1/2} v^2||_{H^1}`.
    pub source_h1: f64,
    pub w1_h1: f64,
    /// Difference between the 3- and 5-point estimates exceeds 10% of the residual.
    pub fd_dominated: bool,
}

/// `E_quad = (d_rho^2 + D_y^2 + 1) w1 - a0 rho^{-1/2} v^2` from five slices
/// `(v, v_dot)` at `rho + k h`, `k = -2..=2`.
pub fn quad_error_residual(
    slices: &[(Real, Real)],
    rho: f64,
    h: f64,
    alpha0: f64,
) -> Result<QuadResidual> {
    if slices.len() != 5 {
        return invalid("quadratic residual needs five slices");
    }
    let w: Vec<Real> = slices
        .iter()
        .enumerate()
        .map(|(k, (v, vd))| w1_field(v, vd, rho + (k as f64 - 2.0) * h, alpha0))
        .collect::<Result<_>>()?;
    let refs: Vec<&Real> = w.iter().collect();
    let d5 = second_difference(&refs, h)?;
    let d3 = second_difference(&refs[1..4], h)?;
    let w0 = &w[2];
    let lin = apply_real_multiplier(w0, |xi| 1.0 + (xi / rho).powi(2));
    let (v, _) = &slices[2];
    let src = apply_real(&BilinearSymbol::constant(alpha0 / rho.sqrt()), v, v, rho)?;
    let e5 = RealField::from_fn(v.grid, rho, |_| 0.0);
    let e5 = RealField {
        values: (0..v.values.len())
            .map(|j| d5.values[j] + lin.values[j] - src.values[j])
            .collect(),
        ..e5
    };
    let diff = d5.zip_with(&d3, |a, b| a - b);
    let e_h1 = h1_norm(&e5);
    Ok(QuadResidual {
        rho,
        e_h1,
        source_h1: h1_norm(&src),
        w1_h1: h1_norm(w0),
        fd_dominated: h1_norm(&diff) > 0.1 * e_h1,
        e_quad: e5,
    })
}

/// Spectral realness check helper: largest imaginary part of `B(u,v)` relative to its size.
pub fn realness_ratio(b: &BilinearSymbol, u: &Real, v: &Real, rho: f64) -> Result<f64> {
    Ok(apply_bilinear_pdo(b, u, v, rho)?.field.imag_ratio())
}

/// Transform of `B(u,v)` for diagnostics.
pub fn pdo_spectrum(b: &BilinearSymbol, u: &Real, v: &Real, rho: f64) -> Result<crate::Spectrum> {
    Ok(dft_forward(&apply_bilinear_pdo(b, u, v, rho)?.field))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_values() {
        assert_eq!(determinant_polynomial(0.0, 0.0), -3.0);
        assert_eq!(determinant_polynomial(1.0, 1.0), -15.0);
    }

    #[test]
    fn symbols_at_origin() {
        assert!((symbol_b1(1.0).eval(0.0, 0.0).re - 1.0 / 3.0).abs() < 1e-15);
        assert!((symbol_b2(1.0).eval(0.0, 0.0).re - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(symbol_b1(0.0).eval(0.3, 0.2).re, 0.0);
    }
}
