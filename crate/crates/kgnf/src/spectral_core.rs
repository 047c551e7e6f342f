//! Periodic grids, Fourier transforms and spectral derivatives.
//!
//! The domain is `[-L, L)` with `N` points. Forward coefficients approximate
//! `f^(xi) = int e^{-i xi y} f(y) dy` at `xi_k = pi k / L`, so that the inverse is
//! `f(y) = (1/2L) sum_k f^_k e^{i xi_k y}` and Parseval reads
//! `||f||^2 = (1/2L) sum |f^_k|^2`. Coefficients are stored in FFT order.

use std::any::{Any, TypeId};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, Zero};
use rand::Rng;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::scalar::Scalar;
use crate::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    half_width: T,
    n: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(half_width: T, n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return invalid(format!("point count must be even and >= 2, got {n}"));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return invalid("half width must be positive and finite");
        }
        Ok(Self { half_width, n })
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> T {
        (self.half_width + self.half_width) / T::of_usize(self.n)
    }

    pub fn point(&self, j: usize) -> T {
        -self.half_width + T::of_usize(j) * self.spacing()
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Integer mode `k` stored at FFT index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index holding mode `k`.
    pub fn index_of_mode(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// `xi_k = pi k / L` at FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> T {
        T::PI() * T::of(self.mode(i) as f64) / self.half_width
    }

    pub fn wavenumbers(&self) -> Vec<T> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Largest resolved `|xi|`, attained by the Nyquist mode.
    pub fn max_wavenumber(&self) -> T {
        T::PI() * T::of_usize(self.n / 2) / self.half_width
    }

    /// Mode cutoff of the 2/3 rule: modes with `|k| > N/3` are removed.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "N={} L={:?} vs N={} L={:?}",
                self.n,
                self.half_width.to_f64_lossy(),
                other.n,
                other.half_width.to_f64_lossy()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealField<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<T>,
    pub rho: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<Complex<T>>,
    pub rho: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Coefficients `f^(xi_k)`.
    Standard,
    /// Coefficients `rho f^(xi_k)` attached to the frequencies `xi_k / rho`.
    Semiclassical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    pub grid: GridSpec<T>,
    pub coeffs: Vec<Complex<T>>,
    pub convention: Convention,
    pub rho: T,
}

/// Common access to real and complex sampled fields.
pub trait Field<T: Scalar>: Clone {
    fn grid(&self) -> &GridSpec<T>;
    fn rho(&self) -> T;
    fn to_complex_values(&self) -> Vec<Complex<T>>;
    fn from_complex_values(grid: GridSpec<T>, rho: T, values: Vec<Complex<T>>) -> Self;
    fn moduli(&self) -> Vec<T>;
}

impl<T: Scalar> Field<T> for RealField<T> {
    fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }
    fn rho(&self) -> T {
        self.rho
    }
    fn to_complex_values(&self) -> Vec<Complex<T>> {
        self.values
            .iter()
            .map(|&x| Complex::new(x, T::zero()))
            .collect()
    }
    fn from_complex_values(grid: GridSpec<T>, rho: T, values: Vec<Complex<T>>) -> Self {
        Self {
            grid,
            rho,
            values: values.into_iter().map(|z| z.re).collect(),
        }
    }
    fn moduli(&self) -> Vec<T> {
        self.values.iter().map(|x| Float::abs(*x)).collect()
    }
}

impl<T: Scalar> Field<T> for ComplexField<T> {
    fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }
    fn rho(&self) -> T {
        self.rho
    }
    fn to_complex_values(&self) -> Vec<Complex<T>> {
        self.values.clone()
    }
    fn from_complex_values(grid: GridSpec<T>, rho: T, values: Vec<Complex<T>>) -> Self {
        Self { grid, rho, values }
    }
    fn moduli(&self) -> Vec<T> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

impl<T: Scalar> RealField<T> {
    pub fn new(grid: GridSpec<T>, values: Vec<T>, rho: T) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            ));
        }
        Ok(Self { grid, values, rho })
    }

    pub fn zeros(grid: GridSpec<T>, rho: T) -> Self {
        Self {
            grid,
            values: vec![T::zero(); grid.len()],
            rho,
        }
    }

    pub fn from_fn(grid: GridSpec<T>, rho: T, f: impl Fn(T) -> T) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values, rho }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            rho: self.rho,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self {
            grid: self.grid,
            rho: self.rho,
            values,
        }
    }

    pub fn to_complex(&self) -> ComplexField<T> {
        ComplexField {
            grid: self.grid,
            rho: self.rho,
            values: self.to_complex_values(),
        }
    }
}

impl<T: Scalar> ComplexField<T> {
    pub fn new(grid: GridSpec<T>, values: Vec<Complex<T>>, rho: T) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            ));
        }
        Ok(Self { grid, values, rho })
    }

    pub fn from_fn(grid: GridSpec<T>, rho: T, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values, rho }
    }

    pub fn re(&self) -> RealField<T> {
        RealField {
            grid: self.grid,
            rho: self.rho,
            values: self.values.iter().map(|z| z.re).collect(),
        }
    }

    pub fn im(&self) -> RealField<T> {
        RealField {
            grid: self.grid,
            rho: self.rho,
            values: self.values.iter().map(|z| z.im).collect(),
        }
    }

    /// Largest imaginary part relative to the largest modulus.
    pub fn imag_ratio(&self) -> T {
        let m = self.values.iter().fold(T::zero(), |a, z| a.max(z.norm()));
        if m == T::zero() {
            return T::zero();
        }
        self.values
            .iter()
            .fold(T::zero(), |a, z| a.max(Float::abs(z.im)))
            / m
    }
}

impl<T: Scalar> SpectralField<T> {
    /// Frequency attached to FFT index `i` under this field's convention.
    pub fn frequency(&self, i: usize) -> T {
        match self.convention {
            Convention::Standard => self.grid.wavenumber(i),
            Convention::Semiclassical => self.grid.wavenumber(i) / self.rho,
        }
    }

    /// Coefficient at integer mode `k`.
    pub fn at_mode(&self, k: i64) -> Complex<T> {
        self.coeffs[self.grid.index_of_mode(k)]
    }

    pub fn to_standard(&self) -> Self {
        match self.convention {
            Convention::Standard => self.clone(),
            Convention::Semiclassical => Self {
                grid: self.grid,
                rho: self.rho,
                convention: Convention::Standard,
                coeffs: self.coeffs.iter().map(|c| c / self.rho).collect(),
            },
        }
    }

    /// `||f||_{L^2}` computed from the coefficients.
    pub fn parseval_norm(&self) -> T {
        let s = self.to_standard();
        let sum = s.coeffs.iter().fold(T::zero(), |a, c| a + c.norm_sqr());
        (sum / (self.grid.half_width + self.grid.half_width)).sqrt()
    }

    pub fn inverse(&self) -> ComplexField<T> {
        dft_inverse(self)
    }

    pub fn inverse_real(&self) -> RealField<T> {
        dft_inverse(self).re()
    }

    /// Evaluates the trigonometric interpolant at an arbitrary point.
    pub fn interpolate(&self, y: T) -> Complex<T> {
        let s = self.to_standard();
        let l = self.grid.half_width;
        let mut acc = Complex::zero();
        for (i, c) in s.coeffs.iter().enumerate() {
            let xi = self.grid.wavenumber(i);
            acc = acc + c * Complex::from_polar(T::one(), xi * y);
        }
        acc / (l + l)
    }
}

/// FFT plans keyed by scalar type, length and direction.
type PlanCache = HashMap<(TypeId, usize, bool), Box<dyn Any>>;

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(HashMap::new());
}

/// Cached FFT plan for the current thread.
pub fn plan<T: Scalar>(n: usize, inverse: bool) -> Arc<dyn Fft<T>> {
    PLANS.with(|cell| {
        let mut map = cell.borrow_mut();
        let key = (TypeId::of::<T>(), n, inverse);
        if let Some(p) = map
            .get(&key)
            .and_then(|b| b.downcast_ref::<Arc<dyn Fft<T>>>())
        {
            return p.clone();
        }
        let dir = if inverse {
            FftDirection::Inverse
        } else {
            FftDirection::Forward
        };
        let p = FftPlanner::<T>::new().plan_fft(n, dir);
        map.insert(key, Box::new(p.clone()));
        p
    })
}

/// In-place forward transform of samples into coefficients.
pub fn forward_in_place<T: Scalar>(grid: &GridSpec<T>, buf: &mut [Complex<T>]) {
    plan::<T>(grid.len(), false).process(buf);
    let h = grid.spacing();
    for (i, c) in buf.iter_mut().enumerate() {
        *c = if i % 2 == 0 { *c * h } else { -*c * h };
    }
}

/// In-place inverse transform of coefficients into samples.
pub fn inverse_in_place<T: Scalar>(grid: &GridSpec<T>, buf: &mut [Complex<T>]) {
    let s = T::one() / (grid.half_width + grid.half_width);
    for (i, c) in buf.iter_mut().enumerate() {
        *c = if i % 2 == 0 { *c * s } else { -*c * s };
    }
    plan::<T>(grid.len(), true).process(buf);
}

pub fn dft_forward<T: Scalar, F: Field<T>>(f: &F) -> SpectralField<T> {
    let mut coeffs = f.to_complex_values();
    forward_in_place(f.grid(), &mut coeffs);
    SpectralField {
        grid: *f.grid(),
        coeffs,
        convention: Convention::Standard,
        rho: f.rho(),
    }
}

pub fn dft_inverse<T: Scalar>(s: &SpectralField<T>) -> ComplexField<T> {
    let mut values = s.to_standard().coeffs;
    inverse_in_place(&s.grid, &mut values);
    ComplexField {
        grid: s.grid,
        values,
        rho: s.rho,
    }
}

/// `f~(xi) = rho f^(rho xi)`, i.e. the coefficients scaled by `rho` at frequencies `xi_k / rho`.
pub fn semiclassical_forward<T: Scalar, F: Field<T>>(f: &F, rho: T) -> Result<SpectralField<T>> {
    if !(rho >= T::one()) {
        return invalid("semiclassical transform requires rho >= 1");
    }
    let mut s = dft_forward(f);
    for c in s.coeffs.iter_mut() {
        *c = *c * rho;
    }
    s.convention = Convention::Semiclassical;
    s.rho = rho;
    Ok(s)
}

/// Multiplies the spectrum by `m(xi)` on the standard frequency grid.
pub fn apply_multiplier<T: Scalar, F: Field<T>>(f: &F, m: impl Fn(T) -> Complex<T>) -> F {
    let grid = *f.grid();
    let mut buf = f.to_complex_values();
    forward_in_place(&grid, &mut buf);
    for (i, c) in buf.iter_mut().enumerate() {
        *c = *c * m(grid.wavenumber(i));
    }
    inverse_in_place(&grid, &mut buf);
    F::from_complex_values(grid, f.rho(), buf)
}

/// Real even multiplier `m(xi)`; preserves realness.
pub fn apply_real_multiplier<T: Scalar, F: Field<T>>(f: &F, m: impl Fn(T) -> T) -> F {
    apply_multiplier(f, |xi| Complex::new(m(xi), T::zero()))
}

fn nyquist_index<T: Scalar>(grid: &GridSpec<T>) -> usize {
    grid.len() / 2
}

/// `d^k f / dy^k` via multiplication by `(i xi)^k`.
///
/// For odd `k` the Nyquist mode is dropped, since its derivative is not
/// representable by a real trigonometric interpolant.
pub fn derivative_y<T: Scalar, F: Field<T>>(f: &F, k: u32) -> F {
    let grid = *f.grid();
    let ny = nyquist_index(&grid);
    let mut buf = f.to_complex_values();
    forward_in_place(&grid, &mut buf);
    for (i, c) in buf.iter_mut().enumerate() {
        if k % 2 == 1 && i == ny {
            *c = Complex::zero();
            continue;
        }
        let ik = Complex::new(T::zero(), grid.wavenumber(i)).powu(k);
        *c = *c * ik;
    }
    inverse_in_place(&grid, &mut buf);
    F::from_complex_values(grid, f.rho(), buf)
}

/// `D_y^k f` with `D_y = (i rho)^{-1} d/dy`, i.e. multiplication by `(xi / rho)^k`.
pub fn semiclassical_derivative<T: Scalar, F: Field<T>>(
    f: &F,
    rho: T,
    k: u32,
) -> Result<ComplexField<T>> {
    if !(rho >= T::one()) {
        return invalid("semiclassical derivative requires rho >= 1");
    }
    let grid = *f.grid();
    let ny = nyquist_index(&grid);
    let mut buf = f.to_complex_values();
    forward_in_place(&grid, &mut buf);
    for (i, c) in buf.iter_mut().enumerate() {
        if k % 2 == 1 && i == ny {
            *c = Complex::zero();
            continue;
        }
        *c = *c * Float::powi(grid.wavenumber(i) / rho, k as i32);
    }
    inverse_in_place(&grid, &mut buf);
    Ok(ComplexField {
        grid,
        values: buf,
        rho,
    })
}

/// Zeroes modes with `|k| > N/3`.
pub fn dealias<T: Scalar, F: Field<T>>(f: &F) -> F {
    let grid = *f.grid();
    let mut buf = f.to_complex_values();
    forward_in_place(&grid, &mut buf);
    dealias_coeffs(&grid, &mut buf);
    inverse_in_place(&grid, &mut buf);
    F::from_complex_values(grid, f.rho(), buf)
}

pub fn dealias_coeffs<T: Scalar>(grid: &GridSpec<T>, coeffs: &mut [Complex<T>]) {
    let cut = grid.dealias_cutoff();
    for (i, c) in coeffs.iter_mut().enumerate() {
        if grid.mode(i).abs() > cut {
            *c = Complex::zero();
        }
    }
}

pub fn l2_norm<T: Scalar, F: Field<T>>(f: &F) -> T {
    let h = f.grid().spacing();
    (f.moduli().into_iter().fold(T::zero(), |a, m| a + m * m) * h).sqrt()
}

pub fn linf_norm<T: Scalar, F: Field<T>>(f: &F) -> T {
    f.moduli().into_iter().fold(T::zero(), |a, m| a.max(m))
}

/// `||f||_{L^2} + ||f_y||_{L^2}`.
pub fn h1_norm<T: Scalar, F: Field<T>>(f: &F) -> T {
    l2_norm(f) + l2_norm(&derivative_y(f, 1))
}

/// Real field with independent Gaussian coefficients on modes `0 < |k| <= kmax`,
/// scaled to unit `L^2` norm.
pub fn random_band_limited<T: Scalar, R: Rng + ?Sized>(
    grid: GridSpec<T>,
    kmax: usize,
    rng: &mut R,
) -> RealField<T> {
    let kmax = kmax.min(grid.len() / 2 - 1);
    let mut coeffs = vec![Complex::<T>::zero(); grid.len()];
    for k in 1..=kmax as i64 {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        let c = Complex::new(T::of(a), T::of(b));
        coeffs[grid.index_of_mode(k)] = c;
        coeffs[grid.index_of_mode(-k)] = c.conj();
    }
    let a0: f64 = rng.gen_range(-1.0..1.0);
    coeffs[0] = Complex::new(T::of(a0), T::zero());
    let mut buf = coeffs;
    inverse_in_place(&grid, &mut buf);
    let f = RealField {
        grid,
        rho: T::one(),
        values: buf.into_iter().map(|z| z.re).collect(),
    };
    let n = l2_norm(&f);
    if n > T::zero() {
        f.map(|x| x / n)
    } else {
        f
    }
}
