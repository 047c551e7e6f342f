//! Least-squares fits with Student-t confidence intervals.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coeffs: Vec<f64>,
    pub stderr: Vec<f64>,
    /// 95% confidence intervals per coefficient.
    pub ci95: Vec<(f64, f64)>,
    pub residual_rms: f64,
    pub n: usize,
}

/// Solves `min ||X c - y||` for the design matrix given by rows.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<LinearFit> {
    let n = rows.len();
    if n == 0 || n != y.len() {
        return Err(Error::Fit(format!(
            "{} rows for {} observations",
            n,
            y.len()
        )));
    }
    let p = rows[0].len();
    if n < p || rows.iter().any(|r| r.len() != p) {
        return Err(Error::Fit(format!(
            "need at least {p} consistent rows, got {n}"
        )));
    }
    if rows.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite data".into()));
    }
    let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    let yv = DVector::from_column_slice(y);
    let xtx = x.transpose() * &x;
    let inv = xtx
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Fit("singular design".into()))?;
    let c = &inv * x.transpose() * &yv;
    let r = &yv - &x * &c;
    let ss = r.norm_squared();
    let dof = n - p;
    let sigma2 = if dof > 0 { ss / dof as f64 } else { 0.0 };
    let stderr: Vec<f64> = (0..p)
        .map(|j| (sigma2 * inv[(j, j)]).max(0.0).sqrt())
        .collect();
    let t = if dof > 0 {
        StudentsT::new(0.0, 1.0, dof as f64)
            .map_err(|e| Error::Fit(e.to_string()))?
            .inverse_cdf(0.975)
    } else {
        f64::INFINITY
    };
    let coeffs: Vec<f64> = c.iter().copied().collect();
    let ci95 = coeffs
        .iter()
        .zip(&stderr)
        .map(|(&c, &s)| {
            if dof > 0 {
                (c - t * s, c + t * s)
            } else {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
        })
        .collect();
    Ok(LinearFit {
        coeffs,
        stderr,
        ci95,
        residual_rms: (ss / n as f64).sqrt(),
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub ci95: (f64, f64),
    pub n: usize,
}

/// Fits `y = C x^e` by regressing `ln y` on `ln x`. Non-positive points are rejected.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Fit("power-law fit needs positive data".into()));
    }
    let rows: Vec<Vec<f64>> = points.iter().map(|&(x, _)| vec![x.ln(), 1.0]).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let f = least_squares(&rows, &ys)?;
    Ok(PowerFit {
        exponent: f.coeffs[0],
        prefactor: f.coeffs[1].exp(),
        ci95: f.ci95[0],
        n: f.n,
    })
}

/// Power-law fit restricted to `lo <= x <= hi`.
pub fn fit_power_law_window(points: &[(f64, f64)], lo: f64, hi: f64) -> Result<PowerFit> {
    let sel: Vec<_> = points
        .iter()
        .copied()
        .filter(|&(x, _)| x >= lo * (1.0 - 1e-12) && x <= hi * (1.0 + 1e-12))
        .collect();
    fit_power_law(&sel)
}

/// Geometric sequence of `n` points from `a` to `b` inclusive.
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let r = (b / a).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a * (r * i as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = geomspace(1.0, 100.0, 9)
            .into_iter()
            .map(|x| (x, 3.0 * x.powf(-0.75)))
            .collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.exponent + 0.75).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-10);
        assert!(f.ci95.0 <= f.exponent && f.exponent <= f.ci95.1);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(fit_power_law(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
    }
}
