//! The variable cubic coefficient `beta(z)` and its transform
//! `beta^(zeta) = int e^{-i zeta z} beta(z) dz`.
//!
//! Presets with a closed form are evaluated directly. Profiles defined through
//! a frequency window (and the Fourier bump) are evaluated from a table built
//! once by FFT and interpolated with quintic Hermite splines.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex;

use crate::littlewood_paley::theta;
use crate::spectral_core::{inverse_in_place, GridSpec, RealField};
use crate::{invalid, Result, C64};

pub const SQRT8: f64 = 2.828_427_124_746_190_3;

const TABLE_HALF_WIDTH: f64 = 1024.0;
const TABLE_POINTS: usize = 1 << 17;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    Zero,
    /// `e^{-z^2}`.
    Gaussian,
    /// `d^2/dz^2 e^{-z^2} = (4z^2 - 2) e^{-z^2}`.
    GaussianDd,
    /// Transform equal to a smooth bump on `lo <= |zeta| <= hi`.
    FourierBump {
        lo: f64,
        hi: f64,
    },
    /// `sech(z)^p`.
    SechPow {
        p: u32,
    },
}

/// Frequency window multiplying the transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// `theta(|zeta| / r)`.
    LowPass { radius: f64 },
    /// `theta(||zeta| - c| / r)`.
    Shell { center: f64, radius: f64 },
    /// `1 - theta(|zeta|/r0) - theta(||zeta| - sqrt8| / r8)`.
    Far { r0: f64, r8: f64 },
    /// `theta(2^j |zeta| / 2) - theta(2^j |zeta|)`, supported in `2^-j <= |zeta| <= 2^{2-j}`.
    Band { j: i32 },
    /// `theta(2^j |zeta|)`.
    LowRest { j: i32 },
    /// `1 - theta(|zeta|)`.
    HighRest,
}

impl Window {
    pub fn symbol(&self, zeta: f64) -> f64 {
        let a = zeta.abs();
        match *self {
            Window::LowPass { radius } => theta(a / radius),
            Window::Shell { center, radius } => theta((a - center).abs() / radius),
            Window::Far { r0, r8 } => 1.0 - theta(a / r0) - theta((a - SQRT8).abs() / r8),
            Window::Band { j } => {
                let s = 2f64.powi(j) * a;
                theta(s / 2.0) - theta(s)
            }
            Window::LowRest { j } => theta(2f64.powi(j) * a),
            Window::HighRest => 1.0 - theta(a),
        }
    }

    /// Values of `|zeta|` where the symbol is only finitely smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let edges = |c: f64, r: f64| vec![c - 2.0 * r, c - r, c + r, c + 2.0 * r];
        let v = match *self {
            Window::LowPass { radius } => vec![radius, 2.0 * radius],
            Window::Shell { center, radius } => edges(center, radius),
            Window::Far { r0, r8 } => [vec![r0, 2.0 * r0], edges(SQRT8, r8)].concat(),
            Window::Band { j } => {
                let s = 2f64.powi(-j);
                vec![s, 2.0 * s, 4.0 * s]
            }
            Window::LowRest { j } => vec![2f64.powi(-j), 2.0 * 2f64.powi(-j)],
            Window::HighRest => vec![1.0, 2.0],
        };
        v.into_iter().filter(|z| *z > 0.0).collect()
    }
}

struct Table {
    dz: f64,
    /// Derivatives 0..=4 at the nodes `z_j = -Z + j dz`.
    derivs: [Vec<f64>; 5],
}

#[derive(Clone)]
pub struct BetaProfile {
    preset: Preset,
    amplitude: f64,
    shift: f64,
    windows: Vec<Window>,
    table: Arc<OnceLock<Table>>,
}

impl PartialEq for BetaProfile {
    fn eq(&self, o: &Self) -> bool {
        self.preset == o.preset
            && self.amplitude == o.amplitude
            && self.shift == o.shift
            && self.windows == o.windows
    }
}

impl fmt::Debug for BetaProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BetaProfile")
            .field("preset", &self.preset)
            .field("amplitude", &self.amplitude)
            .field("shift", &self.shift)
            .field("windows", &self.windows)
            .finish()
    }
}

fn bump(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// `int sech(z)^p cos(zeta z) dz`, from `I_1`, `I_2` and
/// `I_{p+2} = (p^2 + zeta^2) / (p (p+1)) I_p`.
fn sech_pow_hat(p: u32, zeta: f64) -> f64 {
    let x = PI * zeta.abs() / 2.0;
    let (mut q, mut val) = if p % 2 == 1 {
        (1u32, PI * sech(x))
    } else if x < 1e-8 {
        (2u32, 2.0)
    } else {
        // pi zeta / sinh(pi zeta / 2), written to avoid overflow.
        (
            2u32,
            2.0 * PI * zeta.abs() * (-x).exp() / (1.0 - (-2.0 * x).exp()),
        )
    };
    while q < p {
        let qf = q as f64;
        val *= (qf * qf + zeta * zeta) / (qf * (qf + 1.0));
        q += 2;
    }
    val
}

impl BetaProfile {
    fn from_preset(preset: Preset) -> Self {
        Self {
            preset,
            amplitude: 1.0,
            shift: 0.0,
            windows: Vec::new(),
            table: Arc::new(OnceLock::new()),
        }
    }

    pub fn zero() -> Self {
        Self::from_preset(Preset::Zero)
    }

    pub fn gaussian() -> Self {
        Self::from_preset(Preset::Gaussian)
    }

    pub fn gaussian_dd() -> Self {
        Self::from_preset(Preset::GaussianDd)
    }

    pub fn fourier_bump(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return invalid(format!("fourier_bump needs 0 <= lo < hi, got [{lo}, {hi}]"));
        }
        Ok(Self::from_preset(Preset::FourierBump { lo, hi }))
    }

    pub fn sech_pow(p: u32) -> Result<Self> {
        if p == 0 || p > 16 {
            return invalid(format!("sech_pow exponent must be in 1..=16, got {p}"));
        }
        Ok(Self::from_preset(Preset::SechPow { p }))
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            amplitude: self.amplitude * a,
            table: Arc::new(OnceLock::new()),
            ..self.clone()
        }
    }

    /// `beta(z - s)`.
    pub fn shifted(&self, s: f64) -> Self {
        Self {
            shift: self.shift + s,
            table: Arc::new(OnceLock::new()),
            ..self.clone()
        }
    }

    pub fn windowed(&self, w: Window) -> Self {
        let mut windows = self.windows.clone();
        windows.push(w);
        Self {
            windows,
            table: Arc::new(OnceLock::new()),
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.preset == Preset::Zero || self.amplitude == 0.0
    }

    /// Human readable tag such as `gaussian_dd` or `fourier_bump[0.5,2.5]`.
    pub fn tag(&self) -> String {
        let base = match self.preset {
            Preset::Zero => "zero".to_string(),
            Preset::Gaussian => "gaussian".to_string(),
            Preset::GaussianDd => "gaussian_dd".to_string(),
            Preset::FourierBump { lo, hi } => format!("fourier_bump[{lo},{hi}]"),
            Preset::SechPow { p } => format!("sech_pow({p})"),
        };
        if self.windows.is_empty() {
            base
        } else {
            format!("{base}+{}w", self.windows.len())
        }
    }

    /// Transform of the unshifted, unwindowed preset (real and even).
    pub fn base_hat(&self, zeta: f64) -> f64 {
        match self.preset {
            Preset::Zero => 0.0,
            Preset::Gaussian => PI.sqrt() * (-zeta * zeta / 4.0).exp(),
            Preset::GaussianDd => -zeta * zeta * PI.sqrt() * (-zeta * zeta / 4.0).exp(),
            Preset::FourierBump { lo, hi } => {
                let c = 0.5 * (lo + hi);
                let w = 0.5 * (hi - lo);
                bump((zeta.abs() - c) / w)
            }
            Preset::SechPow { p } => sech_pow_hat(p, zeta),
        }
    }

    pub fn window_symbol(&self, zeta: f64) -> f64 {
        self.windows.iter().map(|w| w.symbol(zeta)).product()
    }

    pub fn transform(&self, zeta: f64) -> C64 {
        let r = self.amplitude * self.base_hat(zeta) * self.window_symbol(zeta);
        if self.shift == 0.0 {
            Complex::new(r, 0.0)
        } else {
            Complex::from_polar(r, -zeta * self.shift)
        }
    }

    /// Frequency beyond which the transform is below `1e-16` of its size.
    pub fn hat_support_radius(&self) -> f64 {
        let base: f64 = match self.preset {
            Preset::Zero => 1.0,
            Preset::Gaussian | Preset::GaussianDd => 14.0,
            Preset::FourierBump { hi, .. } => hi,
            Preset::SechPow { p } => 26.0 + 2.0 * p as f64,
        };
        let mut r = base;
        for w in &self.windows {
            r = match *w {
                Window::LowPass { radius } => r.min(2.0 * radius),
                Window::Shell { center, radius } => r.min(center + 2.0 * radius),
                Window::Band { j } => r.min(4.0 * 2f64.powi(-j)),
                Window::LowRest { j } => r.min(2.0 * 2f64.powi(-j)),
                Window::Far { .. } | Window::HighRest => r,
            };
        }
        r
    }

    /// Sorted breakpoints of all windows in `|zeta|`.
    pub fn hat_breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.windows.iter().flat_map(|w| w.breakpoints()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Sup of `|beta^|` sampled on a fine grid over its support.
    pub fn hat_sup(&self) -> f64 {
        let r = self.hat_support_radius();
        let n = 20_000;
        (0..=n)
            .map(|i| self.transform(r * i as f64 / n as f64).norm())
            .fold(0.0, f64::max)
    }

    fn closed_form(&self) -> bool {
        self.windows.is_empty() && !matches!(self.preset, Preset::FourierBump { .. })
    }

    fn closed_derivs(&self, z: f64) -> [f64; 3] {
        let z = z - self.shift;
        let a = self.amplitude;
        match self.preset {
            Preset::Zero | Preset::FourierBump { .. } => [0.0; 3],
            Preset::Gaussian => {
                let e = (-z * z).exp();
                [a * e, a * -2.0 * z * e, a * (4.0 * z * z - 2.0) * e]
            }
            Preset::GaussianDd => {
                let e = (-z * z).exp();
                let z2 = z * z;
                [
                    a * (4.0 * z2 - 2.0) * e,
                    a * (12.0 * z - 8.0 * z2 * z) * e,
                    a * (16.0 * z2 * z2 - 48.0 * z2 + 12.0) * e,
                ]
            }
            Preset::SechPow { p } => {
                let pf = p as f64;
                let s = sech(z).powi(p as i32);
                let t = z.tanh();
                [
                    a * s,
                    a * -pf * t * s,
                    a * s * (pf * pf * t * t - pf * (1.0 - t * t)),
                ]
            }
        }
    }

    fn table(&self) -> &Table {
        self.table.get_or_init(|| {
            let grid = GridSpec::new(TABLE_HALF_WIDTH, TABLE_POINTS).expect("table grid");
            let base: Vec<C64> = (0..TABLE_POINTS)
                .map(|i| self.transform(grid.wavenumber(i)))
                .collect();
            let derivs = std::array::from_fn(|k| {
                let mut buf: Vec<C64> = base
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        if k % 2 == 1 && i == TABLE_POINTS / 2 {
                            return Complex::new(0.0, 0.0);
                        }
                        c * Complex::new(0.0, grid.wavenumber(i)).powu(k as u32)
                    })
                    .collect();
                inverse_in_place(&grid, &mut buf);
                buf.into_iter().map(|z| z.re).collect()
            });
            Table {
                dz: grid.spacing(),
                derivs,
            }
        })
    }

    fn table_derivs(&self, z: f64) -> [f64; 3] {
        let t = self.table();
        let s = (z + TABLE_HALF_WIDTH) / t.dz;
        if !(s >= 0.0) || s >= (TABLE_POINTS - 1) as f64 {
            return [0.0; 3];
        }
        let j = s.floor() as usize;
        let u = s - j as f64;
        let h = t.dz;
        let herm = |k: usize| {
            let d = &t.derivs;
            quintic_hermite(
                u,
                h,
                [d[k][j], d[k + 1][j], d[k + 2][j]],
                [d[k][j + 1], d[k + 1][j + 1], d[k + 2][j + 1]],
            )
        };
        [herm(0), herm(1), herm(2)]
    }

    /// `[beta(z), beta'(z), beta''(z)]`.
    pub fn derivs(&self, z: f64) -> [f64; 3] {
        if self.is_zero() {
            return [0.0; 3];
        }
        if self.closed_form() {
            self.closed_derivs(z)
        } else {
            self.table_derivs(z)
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.derivs(z)[0]
    }

    /// Radius outside which `|beta| < 1e-12 max|beta|` (up to the shift).
    pub fn effective_support_radius(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let base = match (self.closed_form(), self.preset) {
            (true, Preset::Gaussian) | (true, Preset::GaussianDd) => 6.0,
            (true, Preset::SechPow { p }) => 28.3 / p as f64,
            _ => {
                let t = self.table();
                let v = &t.derivs[0];
                let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                let first = v
                    .iter()
                    .position(|x| x.abs() > 1e-12 * m)
                    .unwrap_or(TABLE_POINTS / 2);
                let last = v
                    .iter()
                    .rposition(|x| x.abs() > 1e-12 * m)
                    .unwrap_or(TABLE_POINTS / 2);
                let lo = -TABLE_HALF_WIDTH + first as f64 * t.dz;
                let hi = -TABLE_HALF_WIDTH + last as f64 * t.dz;
                return lo.abs().max(hi.abs());
            }
        };
        base + self.shift.abs()
    }

    /// Samples `beta(rho y)` through the spectrum: the `y`-coefficients are
    /// `beta^(xi / rho) / rho`, so the result is the band-limited projection
    /// of the scaled coefficient on `grid`.
    pub fn synthesize_scaled(&self, grid: &GridSpec<f64>, rho: f64) -> RealField<f64> {
        let mut buf: Vec<C64> = (0..grid.len())
            .map(|i| self.transform(grid.wavenumber(i) / rho) / rho)
            .collect();
        let ny = grid.len() / 2;
        buf[ny] = Complex::new(buf[ny].re, 0.0);
        inverse_in_place(grid, &mut buf);
        RealField {
            grid: *grid,
            values: buf.into_iter().map(|z| z.re).collect(),
            rho,
        }
    }
}

/// Quintic Hermite interpolant on `[0, h]` at `u = (z - z0)/h`, matching
/// value, first and second derivative at both ends.
pub fn quintic_hermite(u: f64, h: f64, a: [f64; 3], b: [f64; 3]) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    let h3 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let h5 = 0.5 * (u3 - 2.0 * u4 + u5);
    a[0] * h0 + h * a[1] * h1 + h * h * a[2] * h2 + b[0] * h3 + h * b[1] * h4 + h * h * b[2] * h5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sech_hat_closed_forms() {
        for &z in &[0.0, 0.3, 1.0, 4.0] {
            let two = if z == 0.0 {
                2.0
            } else {
                PI * z / (PI * z / 2.0).sinh()
            };
            assert!((sech_pow_hat(2, z) - two).abs() < 1e-13);
            assert!((sech_pow_hat(1, z) - PI / (PI * z / 2.0).cosh()).abs() < 1e-13);
        }
        assert!((sech_pow_hat(3, 0.0) - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn table_matches_closed_form() {
        let g = BetaProfile::gaussian_dd().windowed(Window::LowPass { radius: 50.0 });
        let c = BetaProfile::gaussian_dd();
        for &z in &[0.0, 0.37, -1.2, 2.5] {
            let a = g.derivs(z);
            let b = c.derivs(z);
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-10, "k={k} z={z} {a:?} {b:?}");
            }
        }
    }

    #[test]
    fn windows_partition() {
        let (r0, r8) = (0.15, 0.15);
        for i in 0..400 {
            let z = i as f64 * 0.01;
            let s = Window::LowPass { radius: r0 }.symbol(z)
                + Window::Shell {
                    center: SQRT8,
                    radius: r8,
                }
                .symbol(z)
                + Window::Far { r0, r8 }.symbol(z);
            assert!((s - 1.0).abs() < 1e-15);
        }
    }
}
