//! Free scattering profiles, the logarithmic phase correction and decay reports.

use std::f64::consts::PI;

use crate::fit::{fit_power_law, least_squares, PowerFit};
use crate::kg_solver::EnergyLedger;
use crate::{invalid, Error, Real, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileSource {
    FromData,
    Fitted,
}

/// `u(t, x) ~ rho^{-1/2} 2 Re(c e^{i phi} a(x/rho))` with the stationary-phase
/// constant `c = e^{i pi/4} / (2 pi)^{1/2}` and
/// `phi = rho - c_phase |a|^2 ln rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticProfile {
    /// Hyperbolic angles `y` with `x/rho = sinh y`.
    pub y: Vec<f64>,
    pub amplitude: Vec<C64>,
    pub c_phase: f64,
    pub source: ProfileSource,
}

/// Constant of the stationary-phase expansion for our transform normalization.
pub fn stationary_phase_constant() -> C64 {
    C64::from_polar(1.0 / (2.0 * PI).sqrt(), PI / 4.0)
}

impl AsymptoticProfile {
    /// Predicted `v = rho^{1/2} u` at the stored `y` (linear phase, `c_phase` ignored).
    pub fn predict_v(&self, rho: f64) -> Vec<f64> {
        let c = stationary_phase_constant() * C64::from_polar(1.0, rho);
        self.amplitude.iter().map(|a| 2.0 * (c * a).re).collect()
    }

    /// Predicted `u` at the stored points `x = rho sinh y` of the hyperbola through `(t, 0)`.
    pub fn predict_u(&self, rho: f64) -> Vec<(f64, f64)> {
        let s = rho.sqrt();
        self.y
            .iter()
            .zip(self.predict_v(rho))
            .map(|(y, v)| (rho * y.sinh(), v / s))
            .collect()
    }
}

/// `u_+^(xi) = (u0^(xi) - i (xi^2 + 1)^{-1/2} u1^(xi)) / 2` by direct summation.
pub fn plus_transform(u0: &Real, u1: &Real, xi: f64) -> C64 {
    let h = u0.grid.spacing();
    let mut a = C64::new(0.0, 0.0);
    let mut b = C64::new(0.0, 0.0);
    for (j, (p, q)) in u0.values.iter().zip(&u1.values).enumerate() {
        let e = C64::from_polar(h, -xi * u0.grid.point(j));
        a += e * *p;
        b += e * *q;
    }
    (a - C64::new(0.0, 1.0) * b / (xi * xi + 1.0).sqrt()) / 2.0
}

/// `a(y) = cosh y u_+^(-sinh y)` at the requested angles, for data given at `t = 0`.
pub fn free_profile_from_data(u0: &Real, u1: &Real, y: &[f64]) -> Result<AsymptoticProfile> {
    u0.grid.check_same(&u1.grid)?;
    let amplitude = y
        .iter()
        .map(|&y| y.cosh() * plus_transform(u0, u1, -y.sinh()))
        .collect();
    Ok(AsymptoticProfile {
        y: y.to_vec(),
        amplitude,
        c_phase: 0.0,
        source: ProfileSource::FromData,
    })
}

/// `(3/8) beta0 + (5/12) alpha0^2`.
pub fn delort_phase_coefficient(alpha0: f64, beta0: f64) -> f64 {
    0.375 * beta0 + 5.0 / 12.0 * alpha0 * alpha0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub rho: f64,
    pub v: f64,
    pub v_dot: f64,
}

impl PhaseSample {
    /// `v - i v_dot`.
    pub fn z(&self) -> C64 {
        C64::new(self.v, -self.v_dot)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogPhaseFit {
    /// Coefficient of `ln rho` in the phase minus `rho` (minus the reference phase).
    pub slope: f64,
    pub ci95: (f64, f64),
    /// Mean of `|v - i v_dot|^2` over the window.
    pub amplitude_sq: f64,
    /// `slope / amplitude_sq`.
    pub normalized: f64,
    /// Some sample had `|z|` below 10% of the running mean and was dropped.
    pub unwrap_flagged: bool,
    pub points: usize,
}

fn unwrapped(samples: &[PhaseSample]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev = 0.0;
    let mut acc = 0.0;
    for (k, s) in samples.iter().enumerate() {
        let a = s.z().arg();
        if k > 0 {
            let mut d = a - prev;
            d -= 2.0 * PI * (d / (2.0 * PI)).round();
            acc += d;
        } else {
            acc = a;
        }
        prev = a;
        out.push(acc - s.rho);
    }
    out
}

/// Fits `arg(v - i v_dot) - rho = c ln rho + p + q / rho` on `[rho1, rho2]`.
///
/// With a reference (a linear run from the same data sampled at the same
/// points) its phase is subtracted first, removing the linear phase drift.
/// For uniformly spaced samples the phase is averaged over consecutive
/// blocks spanning one period `2 pi` before fitting, which removes the
/// harmonics generated by the nonlinearity.
pub fn fit_log_phase(
    samples: &[PhaseSample],
    reference: Option<&[PhaseSample]>,
    rho1: f64,
    rho2: f64,
) -> Result<LogPhaseFit> {
    if !(rho1 > 0.0 && rho2 >= 10.0 * rho1) {
        return invalid("phase fit window must satisfy rho2 >= 10 rho1");
    }
    let sel: Vec<usize> = (0..samples.len())
        .filter(|&k| samples[k].rho >= rho1 && samples[k].rho <= rho2)
        .collect();
    if sel.len() < 8 {
        return Err(Error::Fit("too few phase samples in window".into()));
    }
    let win: Vec<PhaseSample> = sel.iter().map(|&k| samples[k]).collect();
    let mut phase = unwrapped(&win);
    if let Some(r) = reference {
        let rw: Vec<PhaseSample> = sel
            .iter()
            .map(|&k| r.get(k).copied())
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Fit("reference shorter than samples".into()))?;
        if rw
            .iter()
            .zip(&win)
            .any(|(a, b)| (a.rho - b.rho).abs() > 1e-9 * b.rho)
        {
            return Err(Error::Fit("reference sampled at different rho".into()));
        }
        for (p, q) in phase.iter_mut().zip(unwrapped(&rw)) {
            *p -= q;
        }
    }
    let mut keep = vec![true; win.len()];
    let mut flagged = false;
    let mut mean = 0.0;
    for (k, s) in win.iter().enumerate() {
        let m = s.z().norm();
        mean = if k == 0 {
            m
        } else {
            mean + (m - mean) / (k as f64 + 1.0).min(200.0)
        };
        if m < 0.1 * mean {
            keep[k] = false;
            flagged = true;
        }
    }
    let steps: Vec<f64> = win.windows(2).map(|w| w[1].rho - w[0].rho).collect();
    let d0 = steps[0];
    let uniform = steps.iter().all(|d| (d - d0).abs() <= 1e-6 * d0);
    let block = if uniform && d0 > 0.0 {
        (2.0 * PI / d0).round() as usize
    } else {
        1
    };
    let block = if block >= 8 { block } else { 1 };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for chunk in (0..win.len()).collect::<Vec<_>>().chunks(block) {
        if chunk.len() < block || chunk.iter().any(|&k| !keep[k]) {
            continue;
        }
        let n = chunk.len() as f64;
        xs.push(chunk.iter().map(|&k| win[k].rho).sum::<f64>() / n);
        ys.push(chunk.iter().map(|&k| phase[k]).sum::<f64>() / n);
    }
    if xs.len() < 4 {
        return Err(Error::Fit("too few phase blocks in window".into()));
    }
    let rows: Vec<Vec<f64>> = xs.iter().map(|&r| vec![r.ln(), 1.0, 1.0 / r]).collect();
    let f = least_squares(&rows, &ys)?;
    let kept: Vec<f64> = win
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(s, _)| s.z().norm_sqr())
        .collect();
    let amplitude_sq = kept.iter().sum::<f64>() / kept.len() as f64;
    let slope = f.coeffs[0];
    Ok(LogPhaseFit {
        slope,
        ci95: f.ci95[0],
        amplitude_sq,
        normalized: slope / amplitude_sq,
        unwrap_flagged: flagged,
        points: xs.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// `(rho, sup_y |v|, sup |u| (1 + rho)^{1/2})`.
    pub series: Vec<(f64, f64, f64)>,
    /// Fitted exponent of `sup |v|` against `rho`; `None` for a zero run.
    pub exponent_v: Option<PowerFit>,
    pub exponent_u: Option<PowerFit>,
    /// `sup / inf` of `sup |v|` over the last decade.
    pub tail_ratio: f64,
}

impl DecayReport {
    /// `max_rho sup|v| / max_{rho <= split} sup|v|`.
    pub fn growth_ratio(&self, split: f64) -> f64 {
        let early = self
            .series
            .iter()
            .filter(|r| r.0 <= split)
            .map(|r| r.1)
            .fold(0.0, f64::max);
        let all = self.series.iter().map(|r| r.1).fold(0.0, f64::max);
        if early > 0.0 {
            all / early
        } else {
            0.0
        }
    }
}

pub fn decay_rate_report(ledger: &EnergyLedger) -> Result<DecayReport> {
    let rows = &ledger.rows;
    if rows.len() < 3 {
        return Err(Error::Fit("decay report needs at least three rows".into()));
    }
    if rows.windows(2).any(|w| w[1].rho <= w[0].rho) {
        return invalid("ledger rho must increase");
    }
    let (r0, r1) = (rows[0].rho, rows[rows.len() - 1].rho);
    if r1 < 100.0 * r0 {
        return invalid("decay report needs two decades in rho");
    }
    let series: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| (r.rho, r.sup_v, r.sup_v * ((1.0 + r.rho) / r.rho).sqrt()))
        .collect();
    let fit = |pick: fn(&(f64, f64, f64)) -> f64| -> Result<Option<PowerFit>> {
        let pts: Vec<(f64, f64)> = series
            .iter()
            .map(|s| (s.0, pick(s)))
            .filter(|p| p.1 > 0.0)
            .collect();
        if pts.len() < 3 {
            return Ok(None);
        }
        fit_power_law(&pts).map(Some)
    };
    let tail: Vec<f64> = series
        .iter()
        .filter(|s| s.0 >= r1 / 10.0)
        .map(|s| s.1)
        .collect();
    let (hi, lo) = tail
        .iter()
        .fold((0.0f64, f64::INFINITY), |(h, l), &x| (h.max(x), l.min(x)));
    let tail_ratio = if lo > 0.0 { hi / lo } else { 0.0 };
    Ok(DecayReport {
        exponent_v: fit(|s| s.1)?,
        exponent_u: fit(|s| s.2)?,
        series,
        tail_ratio,
    })
}
