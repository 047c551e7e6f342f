//! Hyperbolic coordinates `t = rho cosh y`, `x = rho sinh y`, the conjugation
//! `v = rho^{1/2} u`, and the remainder `R_beta = beta(rho sinh y) - beta(rho y)`.

use crate::beta::BetaProfile;
use crate::fit::{fit_power_law, PowerFit};
use crate::spectral_core::RealField;
use crate::{invalid, Error, Grid, Real, Result};

/// Bound-check window `|y| <= 2`.
pub const BOUND_WINDOW: f64 = 2.0;
/// Threshold for the support-overflow flag.
pub const OVERFLOW_LEVEL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPoint {
    pub rho: f64,
    pub y: f64,
}

impl HyperbolicPoint {
    pub fn new(rho: f64, y: f64) -> Result<Self> {
        if !(rho > 0.0) || !y.is_finite() {
            return invalid("hyperbolic point needs rho > 0 and finite y");
        }
        Ok(Self { rho, y })
    }

    pub fn to_cartesian(&self) -> (f64, f64) {
        (self.rho * self.y.cosh(), self.rho * self.y.sinh())
    }
}

pub fn cartesian_to_hyperbolic(t: f64, x: f64) -> Result<HyperbolicPoint> {
    if !(t > x.abs()) {
        return Err(Error::OutsideCone { t, x });
    }
    Ok(HyperbolicPoint {
        rho: ((t - x) * (t + x)).sqrt(),
        y: (x / t).atanh(),
    })
}

/// `v = rho^{1/2} u`.
pub fn conjugate(u: &Real, rho: f64) -> Result<Real> {
    if !(rho >= 1.0) {
        return invalid("conjugation requires rho >= 1");
    }
    let s = rho.sqrt();
    Ok(RealField {
        rho,
        ..u.map(|x| s * x)
    })
}

/// `u = rho^{-1/2} v`.
pub fn deconjugate(v: &Real, rho: f64) -> Result<Real> {
    if !(rho >= 1.0) {
        return invalid("conjugation requires rho >= 1");
    }
    let s = rho.sqrt();
    Ok(RealField {
        rho,
        ..v.map(|x| x / s)
    })
}

/// A sampled coefficient together with its size at the grid edge.
#[derive(Debug, Clone)]
pub struct ScaledField {
    pub field: Real,
    /// `max |beta|` at the outermost argument reached by the grid.
    pub boundary: f64,
}

impl ScaledField {
    pub fn overflow(&self) -> bool {
        self.boundary > OVERFLOW_LEVEL
    }
}

fn edge_value(beta: &BetaProfile, z: f64) -> f64 {
    beta.eval(z).abs().max(beta.eval(-z).abs())
}

/// Samples `beta(rho y)` on the grid.
pub fn beta_scaled_field(beta: &BetaProfile, rho: f64, grid: &Grid) -> Result<ScaledField> {
    if !(rho >= 1.0) {
        return invalid("beta scaling requires rho >= 1");
    }
    let field = RealField::from_fn(*grid, rho, |y| beta.eval(rho * y));
    let boundary = edge_value(beta, rho * grid.half_width());
    Ok(ScaledField { field, boundary })
}

#[derive(Debug, Clone)]
pub struct RemainderField {
    pub rho: f64,
    pub field: Real,
    pub boundary: f64,
}

impl RemainderField {
    pub fn overflow(&self) -> bool {
        self.boundary > OVERFLOW_LEVEL
    }
}

/// `R_beta(rho, y) = beta(rho sinh y) - beta(rho y)`.
pub fn remainder_r_beta(beta: &BetaProfile, rho: f64, grid: &Grid) -> Result<RemainderField> {
    if !(rho >= 1.0) {
        return invalid("remainder requires rho >= 1");
    }
    let field = RealField::from_fn(*grid, rho, |y| r_beta_value(beta, rho, y));
    let l = grid.half_width();
    let boundary = edge_value(beta, rho * l).max(edge_value(beta, rho * l.sinh()));
    Ok(RemainderField {
        rho,
        field,
        boundary,
    })
}

pub fn r_beta_value(beta: &BetaProfile, rho: f64, y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    beta.eval(rho * y.sinh()) - beta.eval(rho * y)
}

/// `d_y^k d_rho^m R_beta` for `k, m <= 1`, from the chain rule.
pub fn r_beta_derivative(beta: &BetaProfile, rho: f64, y: f64, k: u32, m: u32) -> f64 {
    let (s, c) = (y.sinh(), y.cosh());
    let a = beta.derivs(rho * s);
    let b = beta.derivs(rho * y);
    match (k, m) {
        (0, 0) => a[0] - b[0],
        (1, 0) => a[1] * rho * c - b[1] * rho,
        (0, 1) => a[1] * s - b[1] * y,
        _ => a[2] * rho * s * c + a[1] * c - b[2] * rho * y - b[1],
    }
}

/// `sum_{1 <= j <= k+m+1} sup_z (1+|z|)^{j+2} |beta^(j)(z)|`, the weight on the
/// right-hand side of the remainder bound.
pub fn beta_weight(beta: &BetaProfile, k: u32, m: u32) -> f64 {
    let r = beta.effective_support_radius().max(8.0) + 4.0;
    let n = 8000;
    let mut out = 0.0;
    for j in 1..=(k + m + 1).min(2) as usize {
        let mut sup = 0.0f64;
        for i in 0..=n {
            let z = -r + 2.0 * r * i as f64 / n as f64;
            sup = sup.max((1.0 + z.abs()).powi(j as i32 + 2) * beta.derivs(z)[j].abs());
        }
        out += sup;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RBetaRow {
    pub k: u32,
    pub m: u32,
    pub rho: f64,
    /// `sup_{|y| <= 2} |d_y^k d_rho^m R_beta|`.
    pub sup: f64,
    /// `rho^k rho^{-2-m} W_{k,m}`.
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct RBetaReport {
    pub rows: Vec<RBetaRow>,
    /// Log-log fit of the `k = m = 0` sup against `rho`.
    pub decay: Option<PowerFit>,
}

impl RBetaReport {
    pub fn max_ratio(&self, k: u32, m: u32) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.k == k && r.m == m)
            .map(|r| r.ratio)
            .fold(0.0, f64::max)
    }
}

/// Measures `|d_y^k d_rho^m R_beta|` on `|y| <= 2` against `rho^{k-2-m}`.
pub fn r_beta_bound_check(beta: &BetaProfile, rhos: &[f64], samples: usize) -> Result<RBetaReport> {
    if rhos.iter().any(|&r| !(r >= 1.0)) {
        return invalid("all rho must be >= 1");
    }
    let samples = samples.max(64);
    let mut rows = Vec::new();
    for k in 0..=1u32 {
        for m in 0..=1u32 {
            let w = beta_weight(beta, k, m);
            for &rho in rhos {
                // Resolve the scale 1/rho of beta(rho y) on the window.
                let n = samples.max((rho * 64.0 * BOUND_WINDOW) as usize);
                let mut sup = 0.0f64;
                for i in 0..=n {
                    let y = -BOUND_WINDOW + 2.0 * BOUND_WINDOW * i as f64 / n as f64;
                    sup = sup.max(r_beta_derivative(beta, rho, y, k, m).abs());
                }
                let bound = rho.powi(k as i32 - 2 - m as i32) * w;
                let ratio = if bound > 0.0 { sup / bound } else { 0.0 };
                rows.push(RBetaRow {
                    k,
                    m,
                    rho,
                    sup,
                    bound,
                    ratio,
                });
            }
        }
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.k == 0 && r.m == 0 && r.sup > 0.0)
        .map(|r| (r.rho, r.sup))
        .collect();
    let decay = if pts.len() >= 3 {
        Some(fit_power_law(&pts)?)
    } else {
        None
    };
    Ok(RBetaReport { rows, decay })
}
