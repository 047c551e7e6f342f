//! Dyadic frequency projections, Bernstein ratios and the `B^inf_rho` norm.
//!
//! The base cutoff is `theta(r) = s(clamp(2 - r, 0, 1))` with the quintic
//! smoothstep `s(t) = 6t^5 - 15t^4 + 10t^3`, so `theta = 1` on `r <= 1` and
//! `theta = 0` on `r >= 2`.

use num_traits::Float;

use crate::scalar::Scalar;
use crate::spectral_core::{
    apply_real_multiplier, derivative_y, h1_norm, l2_norm, linf_norm, Field,
};
use crate::{invalid, Result};

pub fn smoothstep<T: Scalar>(t: T) -> T {
    let t = t.max(T::zero()).min(T::one());
    let t3 = t * t * t;
    t3 * (T::of(10.0) + t * (T::of(-15.0) + T::of(6.0) * t))
}

pub fn smoothstep_prime<T: Scalar>(t: T) -> T {
    if t <= T::zero() || t >= T::one() {
        return T::zero();
    }
    let u = t * (T::one() - t);
    T::of(30.0) * u * u
}

pub fn smoothstep_second<T: Scalar>(t: T) -> T {
    if t <= T::zero() || t >= T::one() {
        return T::zero();
    }
    T::of(60.0) * t * (T::one() - t) * (T::one() - t - t)
}

/// Low-pass profile: 1 on `[0, 1]`, 0 on `[2, inf)`.
pub fn theta<T: Scalar>(r: T) -> T {
    smoothstep(T::of(2.0) - r)
}

/// `d theta / dr`.
pub fn theta_prime<T: Scalar>(r: T) -> T {
    -smoothstep_prime(T::of(2.0) - r)
}

/// `d^2 theta / dr^2`.
pub fn theta_second<T: Scalar>(r: T) -> T {
    smoothstep_second(T::of(2.0) - r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectionKey<T> {
    /// `p_lambda = theta(|xi|/2 lambda) - theta(|xi|/lambda)`, supported in `[lambda, 4 lambda]`.
    Band(T),
    /// `theta(|xi|/lambda)`.
    Low(T),
    /// `1 - theta(|xi|/lambda)`.
    High(T),
}

impl<T: Scalar> ProjectionKey<T> {
    pub fn lambda(&self) -> T {
        match *self {
            Self::Band(l) | Self::Low(l) | Self::High(l) => l,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.lambda();
        if !(l >= T::one()) || !l.is_finite() {
            return invalid("projection threshold must be >= 1");
        }
        Ok(())
    }

    pub fn symbol(&self, xi: T) -> T {
        let a = Float::abs(xi);
        match *self {
            Self::Band(l) => theta(a / (l + l)) - theta(a / l),
            Self::Low(l) => theta(a / l),
            Self::High(l) => T::one() - theta(a / l),
        }
    }
}

pub fn project<T: Scalar, F: Field<T>>(f: &F, key: ProjectionKey<T>) -> Result<F> {
    key.validate()?;
    Ok(apply_real_multiplier(f, |xi| key.symbol(xi)))
}

/// `start * 2^m` for `m = 0, 1, ...` up to the first `lambda` with `2 lambda >= xi_max`.
///
/// With this ladder `P_{<=start} + sum_m P_{start 2^m}` is the identity on every
/// resolved frequency.
pub fn dyadic_ladder<T: Scalar>(start: T, xi_max: T) -> Vec<T> {
    let mut out = vec![start];
    let mut l = start;
    while l + l < xi_max {
        l = l + l;
        out.push(l);
    }
    out
}

#[derive(Debug, Clone)]
pub struct Partition<T, F> {
    pub low: F,
    pub bands: Vec<(T, F)>,
}

/// Splits `f` into `P_{<=start} f` and the bands of the dyadic ladder starting at `start`.
pub fn partition<T: Scalar, F: Field<T>>(f: &F, start: T) -> Result<Partition<T, F>> {
    let low = project(f, ProjectionKey::Low(start))?;
    let bands = dyadic_ladder(start, f.grid().max_wavenumber())
        .into_iter()
        .map(|l| project(f, ProjectionKey::Band(l)).map(|b| (l, b)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition { low, bands })
}

/// `(||P_{<=1} f||^2_{H^1} + sum_lambda ||P_lambda f||^2_{H^1})^{1/2}`.
pub fn dyadic_h1_norm<T: Scalar, F: Field<T>>(f: &F) -> Result<T> {
    let p = partition(f, T::one())?;
    let mut s = Float::powi(h1_norm(&p.low), 2);
    for (_, b) in &p.bands {
        s = s + Float::powi(h1_norm(b), 2);
    }
    Ok(s.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinReport<T> {
    pub lambda: T,
    /// `||P f||_inf / (lambda^{1/2} ||P f||_2)`.
    pub l2_ratio: Option<T>,
    /// `||P f||_inf / (lambda^{-1/2} ||P f_y||_2)`.
    pub derivative_ratio: Option<T>,
}

pub fn bernstein_check<T: Scalar, F: Field<T>>(f: &F, lambda: T) -> Result<BernsteinReport<T>> {
    let pf = project(f, ProjectionKey::Band(lambda))?;
    let floor = T::of(1e-13) * l2_norm(f);
    let sup = linf_norm(&pf);
    let l2 = l2_norm(&pf);
    let dl2 = l2_norm(&derivative_y(&pf, 1));
    let l2_ratio = (l2 > floor && l2 > T::zero()).then(|| sup / (lambda.sqrt() * l2));
    let derivative_ratio =
        (dl2 > floor * lambda && dl2 > T::zero()).then(|| sup * lambda.sqrt() / dl2);
    Ok(BernsteinReport {
        lambda,
        l2_ratio,
        derivative_ratio,
    })
}

/// `||P_{<=rho} f||_inf + sum_{lambda >= rho} max(ln(lambda/rho), 1) ||P_lambda f||_inf`
/// over `lambda = rho 2^m`.
pub fn b_infinity_norm<T: Scalar, F: Field<T>>(f: &F, rho: T) -> Result<T> {
    if !(rho >= T::one()) {
        return invalid("B-norm requires rho >= 1");
    }
    let p = partition(f, rho)?;
    let mut acc = linf_norm(&p.low);
    for (l, b) in &p.bands {
        let w = (*l / rho).ln().max(T::one());
        acc = acc + w * linf_norm(b);
    }
    Ok(acc)
}

/// `||u v||_B / (||u||_B ||v||_B)`; `None` when a factor has zero norm.
pub fn b_norm_algebra_check<T: Scalar, F: Field<T>>(u: &F, v: &F, rho: T) -> Result<Option<T>> {
    u.grid().check_same(v.grid())?;
    let nu = b_infinity_norm(u, rho)?;
    let nv = b_infinity_norm(v, rho)?;
    if nu == T::zero() || nv == T::zero() {
        return Ok(None);
    }
    let uv: Vec<_> = u
        .to_complex_values()
        .iter()
        .zip(v.to_complex_values())
        .map(|(a, b)| a * b)
        .collect();
    let prod = F::from_complex_values(*u.grid(), u.rho(), uv);
    Ok(Some(b_infinity_norm(&prod, rho)? / (nu * nv)))
}

#[derive(Debug, Clone)]
pub struct HighLowSplit<T, F> {
    pub low: F,
    pub high: F,
    /// `rho^{sigma/2} ||high||_inf / ||f||_{H^1}`; `None` for `f = 0`.
    pub ratio: Option<T>,
}

/// `low = P_{<= rho^sigma} f`, `high = f - low`.
pub fn high_low_split<T: Scalar, F: Field<T>>(
    f: &F,
    rho: T,
    sigma: T,
) -> Result<HighLowSplit<T, F>> {
    if !(sigma > T::zero() && sigma < T::one()) {
        return invalid("sigma must lie in (0, 1)");
    }
    if !(rho >= T::one()) {
        return invalid("rho must be >= 1");
    }
    let cut = rho.powf(sigma);
    let low = apply_real_multiplier(f, |xi| theta(Float::abs(xi) / cut));
    let hv: Vec<_> = f
        .to_complex_values()
        .iter()
        .zip(low.to_complex_values())
        .map(|(a, b)| a - b)
        .collect();
    let high = F::from_complex_values(*f.grid(), f.rho(), hv);
    let n = h1_norm(f);
    let ratio = (n > T::zero()).then(|| rho.powf(sigma / T::of(2.0)) * linf_norm(&high) / n);
    Ok(HighLowSplit { low, high, ratio })
}

/// `[d_rho, P_{<= c rho^sigma}] f = -(sigma/rho) P' f`, where `P'` has symbol
/// `r theta'(r)` at `r = |xi| / (c rho^sigma)`.
pub fn commutator_band<T: Scalar, F: Field<T>>(f: &F, rho: T, c: T, sigma: T) -> F {
    let cut = c * rho.powf(sigma);
    let s = -sigma / rho;
    apply_real_multiplier(f, |xi| {
        let r = Float::abs(xi) / cut;
        s * r * theta_prime(r)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_endpoints() {
        assert_eq!(theta(0.5f64), 1.0);
        assert_eq!(theta(1.0f64), 1.0);
        assert_eq!(theta(2.0f64), 0.0);
        assert!((theta(1.5f64) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn theta_prime_matches_difference() {
        for &r in &[1.1, 1.3, 1.5, 1.9] {
            let h = 1e-6;
            let fd = (theta(r + h) - theta(r - h)) / (2.0 * h);
            assert!((fd - theta_prime(r)).abs() < 1e-8);
            let fd2 = (theta_prime(r + h) - theta_prime(r - h)) / (2.0 * h);
            assert!((fd2 - theta_second(r)).abs() < 1e-6);
        }
    }

    #[test]
    fn band_support() {
        let k = ProjectionKey::Band(2.0);
        assert_eq!(k.symbol(1.9), 0.0);
        assert_eq!(k.symbol(8.1), 0.0);
        assert!(k.symbol(3.0) > 0.0 && k.symbol(3.0) <= 1.0);
        assert!(ProjectionKey::Low(0.5).validate().is_err());
    }
}
