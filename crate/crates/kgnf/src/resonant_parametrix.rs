//! Oscillatory-integral approximations `K_n`, `n = 1, 3`, of
//! `(d_rho^2 - rho^{-2} d_y^2 + 1) K_n = e^{i n rho} beta(rho y)`.
//!
//! Per `y`-frequency `xi`,
//! `K_n^(rho, xi) = int e^{i n s} U(rho, s; xi) beta^(xi/s)/s chi_1(s/rho) ds`
//! with `U = sin(psi) / (xi^2/s^2 + 1)^{1/2}` and `psi = int_s^rho (xi^2/z^2 + 1)^{1/2} dz`.

use crate::littlewood_paley::{b_infinity_norm, theta, theta_prime, theta_second};
use crate::quad::composite_nodes;
use crate::spectral_core::{
    derivative_y, inverse_in_place, semiclassical_derivative, ComplexField, RealField,
};
use crate::{invalid, BetaProfile, Error, Grid, Real, Result, C64};

/// Widest quadrature panel, resolving `e^{3 i s}` against the kernel phase.
pub const PANEL_WIDTH: f64 = std::f64::consts::PI / 6.0;
pub const REL_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: u32 = 8;

/// Antiderivative of `(z^2 + xi^2)^{1/2} / z`.
fn phase_antiderivative(z: f64, xi: f64) -> f64 {
    let a = xi.abs();
    if a == 0.0 {
        return z;
    }
    (z * z + a * a).sqrt() - a * (a / z).asinh()
}

/// `psi(rho, s; xi) = int_s^rho (xi^2/z^2 + 1)^{1/2} dz`.
pub fn phase_psi(rho: f64, s: f64, xi: f64) -> f64 {
    phase_antiderivative(rho, xi) - phase_antiderivative(s, xi)
}

/// `U(rho, s; xi) = sin(psi) / (xi^2/s^2 + 1)^{1/2}`.
pub fn kernel_u(rho: f64, s: f64, xi: f64) -> f64 {
    phase_psi(rho, s, xi).sin() / (xi * xi / (s * s) + 1.0).sqrt()
}

/// `chi_1(z) = theta(|z|/2) (1 - theta(4|z|))`: one on `1/2 <= |z| <= 2`, zero near 0.
pub fn chi1(z: f64) -> f64 {
    let a = z.abs();
    theta(a / 2.0) * (1.0 - theta(4.0 * a))
}

fn chi1_derivs(z: f64) -> [f64; 3] {
    let (p, dp, ddp) = (
        theta(z / 2.0),
        theta_prime(z / 2.0) / 2.0,
        theta_second(z / 2.0) / 4.0,
    );
    let (q, dq, ddq) = (
        1.0 - theta(4.0 * z),
        -4.0 * theta_prime(4.0 * z),
        -16.0 * theta_second(4.0 * z),
    );
    [p * q, dp * q + p * dq, ddp * q + 2.0 * dp * dq + p * ddq]
}

/// Window `chi(y)`: one on `|y| <= 1`, zero for `|y| >= 2`.
pub fn window(y: f64) -> f64 {
    theta(y.abs())
}

#[derive(Debug, Clone)]
pub struct ParametrixKernel {
    pub n: u32,
    pub rho: f64,
    /// Frequency samples `K^(xi_k)` in FFT order.
    pub k_hat: Vec<C64>,
    pub k: ComplexField<f64>,
    /// `d_rho K`.
    pub k_rho: ComplexField<f64>,
    /// `(d_rho^2 - rho^{-2} d_y^2 + 1) K - e^{i n rho} beta(rho y)`, from the integral representation.
    pub residual: ComplexField<f64>,
    pub window: Real,
}

fn windowed(f: &ComplexField<f64>, w: &Real) -> ComplexField<f64> {
    ComplexField {
        grid: f.grid,
        rho: f.rho,
        values: f
            .values
            .iter()
            .zip(&w.values)
            .map(|(z, c)| z * *c)
            .collect(),
    }
}

fn sup_inner(f: &ComplexField<f64>) -> f64 {
    f.values
        .iter()
        .zip(f.grid.points())
        .filter(|(_, y)| y.abs() <= 1.0)
        .map(|(z, _)| z.norm())
        .fold(0.0, f64::max)
}

impl ParametrixKernel {
    /// `sup_{|y| <= 1} |chi K|`.
    pub fn windowed_sup(&self) -> f64 {
        sup_inner(&self.k)
    }

    /// `sup_{|y| <= 1} |chi E_K|`.
    pub fn residual_windowed_sup(&self) -> f64 {
        sup_inner(&self.residual)
    }

    /// `||chi K||_B + ||D_y (chi K)||_B + ||d_rho (chi K)||_B`.
    pub fn windowed_b_norm(&self) -> Result<f64> {
        let ck = windowed(&self.k, &self.window);
        let dk = semiclassical_derivative(&ck, self.rho, 1)?;
        let rk = windowed(&self.k_rho, &self.window);
        Ok(b_infinity_norm(&ck, self.rho)?
            + b_infinity_norm(&dk, self.rho)?
            + b_infinity_norm(&rk, self.rho)?)
    }

    /// `xi / rho` at the largest `|K^(xi)|`.
    pub fn k_hat_argmax(&self) -> f64 {
        let (i, _) = self
            .k_hat
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bm), (i, z)| {
                if z.norm() > bm {
                    (i, z.norm())
                } else {
                    (bi, bm)
                }
            });
        self.k.grid.wavenumber(i).abs() / self.rho
    }
}

/// `(lo, hi)` with `beta^(zeta) = 0` unless `lo <= |zeta| <= hi`.
fn hat_support(beta: &BetaProfile) -> (f64, f64) {
    let hi = beta.hat_support_radius();
    let m = 20_000;
    let dz = hi / m as f64;
    let first = (0..=m)
        .find(|&i| beta.transform(i as f64 * dz).norm() > 0.0)
        .unwrap_or(m);
    (((first as f64) - 1.0).max(0.0) * dz, hi)
}

struct Column {
    k: C64,
    k_rho: C64,
    residual: C64,
}

fn column(
    n: u32,
    beta: &BetaProfile,
    rho: f64,
    xi: f64,
    support: (f64, f64),
    kinks: &[f64],
) -> Result<Column> {
    let a = xi.abs();
    let lo = (rho / 4.0).max(1.0).max(if support.1 > 0.0 {
        a / support.1
    } else {
        f64::INFINITY
    });
    let hi = if support.0 > 0.0 {
        rho.min(a / support.0)
    } else {
        rho
    };
    let zero = C64::new(0.0, 0.0);
    if !(hi > lo) {
        return Ok(Column {
            k: zero,
            k_rho: zero,
            residual: zero,
        });
    }
    let nf = n as f64;
    let a_rho = (1.0 + xi * xi / (rho * rho)).sqrt();
    let da_rho = -xi * xi / (rho * rho * rho * a_rho);
    // Split where the integrand is only finitely smooth: window edges of
    // beta^ at s = |xi|/zeta and the inner edge of chi_1 at s = rho/2.
    let mut cuts: Vec<f64> = kinks
        .iter()
        .filter(|&&z| z > 0.0)
        .map(|z| a / z)
        .chain([rho / 2.0])
        .filter(|s| *s > lo && *s < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    let ends: Vec<f64> = [lo].into_iter().chain(cuts).chain([hi]).collect();
    let eval = |refine: usize| {
        let mut acc = [zero; 3];
        let mut scale = 0.0;
        for seg in ends.windows(2) {
            let panels = ((seg[1] - seg[0]) / PANEL_WIDTH).ceil().max(1.0) as usize * refine;
            composite_nodes(seg[0], seg[1], panels, |s, w| {
                let src = beta.transform(xi / s) / s;
                if src.norm() == 0.0 {
                    return;
                }
                let r = s / rho;
                let [c, dc, ddc] = chi1_derivs(r);
                let c_rho = -(s / (rho * rho)) * dc;
                let c_rr =
                    (2.0 * s / (rho * rho * rho)) * dc + (s * s / (rho * rho * rho * rho)) * ddc;
                let psi = phase_psi(rho, s, xi);
                let (sn, cs) = psi.sin_cos();
                let b = (1.0 + xi * xi / (s * s)).sqrt();
                let f = C64::from_polar(1.0, nf * s) * src * w;
                acc[0] += f * (sn / b * c);
                acc[1] += f * ((a_rho * cs * c + sn * c_rho) / b);
                acc[2] += f * ((da_rho * cs * c + 2.0 * a_rho * cs * c_rho + sn * c_rr) / b);
                scale += src.norm() * w.abs();
            });
        }
        (acc, scale)
    };
    let mut refine = 1;
    let (mut prev, _) = eval(refine);
    for _ in 0..MAX_DOUBLINGS {
        refine *= 2;
        let (next, scale) = eval(refine);
        let ok = (0..3)
            .all(|i| (next[i] - prev[i]).norm() <= REL_TOL * next[i].norm().max(1e-4 * scale));
        if ok {
            return Ok(Column {
                k: next[0],
                k_rho: next[1],
                residual: next[2],
            });
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "s-integral for xi = {xi} at rho = {rho} did not converge"
    )))
}

fn to_field(grid: &Grid, mut c: Vec<C64>, rho: f64) -> ComplexField<f64> {
    inverse_in_place(grid, &mut c);
    ComplexField {
        grid: *grid,
        values: c,
        rho,
    }
}

pub fn build_k(n: u32, beta: &BetaProfile, grid: &Grid, rho: f64) -> Result<ParametrixKernel> {
    if n != 1 && n != 3 {
        return invalid(format!("parametrix index must be 1 or 3, got {n}"));
    }
    if !(rho >= 1.0) {
        return invalid("parametrix requires rho >= 1");
    }
    let support = hat_support(beta);
    let kinks = beta.hat_breakpoints();
    let cols: Vec<Column> = (0..grid.len())
        .map(|i| {
            if beta.is_zero() {
                Ok(Column {
                    k: C64::new(0.0, 0.0),
                    k_rho: C64::new(0.0, 0.0),
                    residual: C64::new(0.0, 0.0),
                })
            } else {
                column(n, beta, rho, grid.wavenumber(i), support, &kinks)
            }
        })
        .collect::<Result<_>>()?;
    let k_hat: Vec<C64> = cols.iter().map(|c| c.k).collect();
    let k = to_field(grid, k_hat.clone(), rho);
    let k_rho = to_field(grid, cols.iter().map(|c| c.k_rho).collect(), rho);
    let residual = to_field(grid, cols.iter().map(|c| c.residual).collect(), rho);
    Ok(ParametrixKernel {
        n,
        rho,
        k_hat,
        k,
        k_rho,
        residual,
        window: RealField::from_fn(*grid, rho, window),
    })
}

#[derive(Debug, Clone)]
pub struct ParametrixResidual {
    pub rho: f64,
    /// Finite-difference residual field.
    pub field: ComplexField<f64>,
    /// `sup_{|y| <= 1} |chi E|` from the finite-difference residual.
    pub windowed_sup: f64,
    /// Same quantity from the integral representation at the center slice.
    pub analytic_sup: f64,
    /// The 3- and 5-point estimates differ by more than 10% of the residual.
    pub fd_dominated: bool,
}

/// `(d_rho^2 - rho^{-2} d_y^2 + 1) K_n - e^{i n rho} beta(rho y)` with the
/// `rho`-derivative taken by the five-point centered difference of width `h`.
pub fn parametrix_residual(
    n: u32,
    beta: &BetaProfile,
    grid: &Grid,
    rho: f64,
    h: f64,
) -> Result<ParametrixResidual> {
    if !(h > 0.0) || rho - 2.0 * h < 1.0 {
        return invalid("need h > 0 and rho - 2h >= 1");
    }
    let ks: Vec<ParametrixKernel> = (-2..=2)
        .map(|k| build_k(n, beta, grid, rho + k as f64 * h))
        .collect::<Result<_>>()?;
    let c = &ks[2];
    let len = grid.len();
    let d5: Vec<C64> = (0..len)
        .map(|j| {
            (-ks[0].k.values[j] + 16.0 * ks[1].k.values[j] - 30.0 * ks[2].k.values[j]
                + 16.0 * ks[3].k.values[j]
                - ks[4].k.values[j])
                / (12.0 * h * h)
        })
        .collect();
    let d3: Vec<C64> = (0..len)
        .map(|j| (ks[1].k.values[j] - 2.0 * ks[2].k.values[j] + ks[3].k.values[j]) / (h * h))
        .collect();
    let yy = derivative_y(&c.k, 2);
    let src = beta.synthesize_scaled(grid, rho);
    let ph = C64::from_polar(1.0, n as f64 * rho);
    let values: Vec<C64> = (0..len)
        .map(|j| d5[j] - yy.values[j] / (rho * rho) + c.k.values[j] - ph * src.values[j])
        .collect();
    let field = ComplexField {
        grid: *grid,
        values,
        rho,
    };
    let windowed_sup = sup_inner(&field);
    let diff = ComplexField {
        grid: *grid,
        values: d5.iter().zip(&d3).map(|(a, b)| a - b).collect(),
        rho,
    };
    Ok(ParametrixResidual {
        rho,
        windowed_sup,
        analytic_sup: c.residual_windowed_sup(),
        fd_dominated: sup_inner(&diff) > 0.1 * windowed_sup,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_limits() {
        assert_eq!(phase_psi(7.0, 7.0, 3.0), 0.0);
        assert!((phase_psi(7.0, 2.0, 0.0) - 5.0).abs() < 1e-15);
        assert!((kernel_u(9.0, 4.0, 0.0) - 5f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn chi1_plateau() {
        assert_eq!(chi1(0.1), 0.0);
        assert_eq!(chi1(1.0), 1.0);
        assert_eq!(chi1(5.0), 0.0);
        let h = 1e-6;
        for &z in &[0.3, 0.4, 2.5, 3.5] {
            let d = chi1_derivs(z);
            assert!(((chi1(z + h) - chi1(z - h)) / (2.0 * h) - d[1]).abs() < 1e-7);
        }
    }
}
