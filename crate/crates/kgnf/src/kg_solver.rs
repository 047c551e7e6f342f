//! Strang-split pseudospectral evolution of
//! `v'' - rho^{-2} v_yy + (1 + 1/(4 rho^2)) v = a0 rho^{-1/2} v^2 + (b0 + beta(rho sinh y)) rho^{-1} v^3`
//! and of the Cartesian equation it is conjugate to, plus energy and decay monitors.
//!
//! The state is kept in Fourier space. Each step is a half kick with the
//! dealiased nonlinearity, an exact per-mode rotation with the frequency frozen
//! at the midpoint, and a second half kick. The nonlinearity at the end of a
//! step is reused at the start of the next, so a step costs two FFTs.

use crate::beta::BetaProfile;
use crate::fit::{fit_power_law, PowerFit};
use crate::littlewood_paley::{b_infinity_norm, commutator_band, project, theta, ProjectionKey};
use crate::spectral_core::{
    dealias_coeffs, derivative_y, forward_in_place, h1_norm, inverse_in_place, l2_norm, linf_norm,
    Field, GridSpec, RealField,
};
use crate::{invalid, Error, Grid, Real, Result, C64};

/// Largest admissible step size.
pub const MAX_STEP: f64 = 0.1;
/// A run aborts once `||v||_inf` exceeds this multiple of its initial value.
pub const BLOWUP_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearityParams {
    pub alpha0: f64,
    pub beta0: f64,
    pub beta: BetaProfile,
    /// Keep the `1/(4 rho^2)` mass correction.
    pub include_quarter_term: bool,
    /// Sample the coefficient at `rho sinh y` (exact) rather than `rho y`.
    pub include_r_beta: bool,
}

impl Default for NonlinearityParams {
    fn default() -> Self {
        Self {
            alpha0: 0.0,
            beta0: 0.0,
            beta: BetaProfile::zero(),
            include_quarter_term: true,
            include_r_beta: true,
        }
    }
}

impl NonlinearityParams {
    pub fn new(alpha0: f64, beta0: f64, beta: BetaProfile) -> Self {
        Self {
            alpha0,
            beta0,
            beta,
            ..Self::default()
        }
    }

    pub fn is_linear(&self) -> bool {
        self.alpha0 == 0.0 && self.beta0 == 0.0 && self.beta.is_zero()
    }

    fn stretch(&self, y: f64) -> f64 {
        if self.include_r_beta {
            y.sinh()
        } else {
            y
        }
    }

    /// Cubic coefficient `b0 + beta(rho s(y))` of the hyperbolic equation.
    pub fn cubic_coefficient(&self, rho: f64, y: f64) -> f64 {
        self.beta0 + self.beta.eval(rho * self.stretch(y))
    }

    /// `d_rho` of the cubic coefficient.
    pub fn cubic_coefficient_rate(&self, rho: f64, y: f64) -> f64 {
        let s = self.stretch(y);
        s * self.beta.derivs(rho * s)[1]
    }

    fn quarter(&self) -> f64 {
        if self.include_quarter_term {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    pub rho: f64,
    pub v: Real,
    pub v_dot: Real,
    pub d_rho: f64,
    pub params: NonlinearityParams,
}

impl SimulationState {
    pub fn new(
        rho: f64,
        v: Real,
        v_dot: Real,
        d_rho: f64,
        params: NonlinearityParams,
    ) -> Result<Self> {
        v.grid.check_same(&v_dot.grid)?;
        if !(rho >= 1.0) {
            return invalid("simulation state requires rho >= 1");
        }
        if !(d_rho.abs() <= MAX_STEP && d_rho != 0.0) {
            return invalid(format!("step size must satisfy 0 < |d_rho| <= {MAX_STEP}"));
        }
        Ok(Self {
            rho,
            v,
            v_dot,
            d_rho,
            params,
        })
    }

    pub fn zero(grid: Grid, d_rho: f64, params: NonlinearityParams) -> Result<Self> {
        Self::new(
            1.0,
            RealField::zeros(grid, 1.0),
            RealField::zeros(grid, 1.0),
            d_rho,
            params,
        )
    }

    pub fn grid(&self) -> &Grid {
        &self.v.grid
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Geometry {
    Hyperbolic,
    Cartesian,
}

/// Time stepper for either geometry. For the Cartesian case `rho` plays the role of `t`.
#[derive(Debug, Clone)]
pub struct Solver {
    geometry: Geometry,
    grid: Grid,
    params: NonlinearityParams,
    d_rho: f64,
    rho: f64,
    xi: Vec<f64>,
    points: Vec<f64>,
    vhat: Vec<C64>,
    what: Vec<C64>,
    nl: Vec<C64>,
    buf: Vec<C64>,
    static_coeff: Option<Vec<f64>>,
    initial_sup: f64,
    steps: u64,
}

fn to_hat(f: &Real) -> Vec<C64> {
    let mut b = f.to_complex_values();
    forward_in_place(&f.grid, &mut b);
    b
}

impl Solver {
    pub fn new(state: SimulationState) -> Result<Self> {
        state.v.grid.check_same(&state.v_dot.grid)?;
        Self::build(
            Geometry::Hyperbolic,
            state.v.grid,
            state.params,
            state.d_rho,
            state.rho,
            &state.v,
            &state.v_dot,
        )
    }

    /// Cartesian solver for `u_tt - u_xx + u = a0 u^2 + (b0 + beta(x)) u^3` starting at `t0`.
    pub fn cartesian(
        u0: &Real,
        u1: &Real,
        t0: f64,
        dt: f64,
        params: NonlinearityParams,
    ) -> Result<Self> {
        u0.grid.check_same(&u1.grid)?;
        if !(dt.abs() <= MAX_STEP && dt != 0.0) {
            return invalid(format!("step size must satisfy 0 < |dt| <= {MAX_STEP}"));
        }
        Self::build(Geometry::Cartesian, u0.grid, params, dt, t0, u0, u1)
    }

    fn build(
        geometry: Geometry,
        grid: Grid,
        params: NonlinearityParams,
        d_rho: f64,
        rho: f64,
        v: &Real,
        v_dot: &Real,
    ) -> Result<Self> {
        let points = grid.points();
        let static_coeff = (geometry == Geometry::Cartesian).then(|| {
            points
                .iter()
                .map(|&x| params.beta0 + params.beta.eval(x))
                .collect()
        });
        let mut s = Self {
            geometry,
            grid,
            params,
            d_rho,
            rho,
            xi: grid.wavenumbers(),
            points,
            vhat: to_hat(v),
            what: to_hat(v_dot),
            nl: vec![C64::new(0.0, 0.0); grid.len()],
            buf: vec![C64::new(0.0, 0.0); grid.len()],
            static_coeff,
            initial_sup: linf_norm(v),
            steps: 0,
        };
        s.update_nonlinearity()?;
        Ok(s)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &NonlinearityParams {
        &self.params
    }

    pub fn d_rho(&self) -> f64 {
        self.d_rho
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps
    }

    pub fn set_step(&mut self, d_rho: f64) -> Result<()> {
        if !(d_rho.abs() <= MAX_STEP && d_rho != 0.0) {
            return invalid(format!("step size must satisfy 0 < |d_rho| <= {MAX_STEP}"));
        }
        self.d_rho = d_rho;
        Ok(())
    }

    fn omega(&self, xi: f64, rho: f64) -> f64 {
        match self.geometry {
            Geometry::Hyperbolic => {
                (1.0 + self.params.quarter() / (4.0 * rho * rho) + xi * xi / (rho * rho)).sqrt()
            }
            Geometry::Cartesian => (1.0 + xi * xi).sqrt(),
        }
    }

    fn update_nonlinearity(&mut self) -> Result<()> {
        self.buf.copy_from_slice(&self.vhat);
        inverse_in_place(&self.grid, &mut self.buf);
        let mut sup = 0.0f64;
        for z in &self.buf {
            if !z.re.is_finite() {
                return Err(Error::BlowUp {
                    rho: self.rho,
                    detail: "non-finite value".into(),
                });
            }
            sup = sup.max(z.re.abs());
        }
        if self.initial_sup > 0.0 && sup > BLOWUP_FACTOR * self.initial_sup {
            return Err(Error::BlowUp {
                rho: self.rho,
                detail: format!("sup |v| = {sup:.3e} exceeds {BLOWUP_FACTOR} x initial"),
            });
        }
        if self.params.is_linear() {
            self.nl.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
            return Ok(());
        }
        let rho = self.rho;
        let (qa, qc) = match self.geometry {
            Geometry::Hyperbolic => (self.params.alpha0 / rho.sqrt(), 1.0 / rho),
            Geometry::Cartesian => (self.params.alpha0, 1.0),
        };
        for (j, z) in self.buf.iter_mut().enumerate() {
            let v = z.re;
            let c = match &self.static_coeff {
                Some(cs) => cs[j],
                None => self.params.cubic_coefficient(rho, self.points[j]),
            };
            *z = C64::new(v * v * (qa + qc * c * v), 0.0);
        }
        forward_in_place(&self.grid, &mut self.buf);
        dealias_coeffs(&self.grid, &mut self.buf);
        self.nl.copy_from_slice(&self.buf);
        Ok(())
    }

    /// Advances by `h` (which may be negative).
    pub fn step_by(&mut self, h: f64) -> Result<()> {
        let half = 0.5 * h;
        for (w, n) in self.what.iter_mut().zip(&self.nl) {
            *w += n * half;
        }
        let rm = self.rho + half;
        for i in 0..self.vhat.len() {
            let om = self.omega(self.xi[i], rm);
            let (s, c) = (om * h).sin_cos();
            let v = self.vhat[i];
            let w = self.what[i];
            self.vhat[i] = v * c + w * (s / om);
            self.what[i] = w * c - v * (om * s);
        }
        self.rho += h;
        self.update_nonlinearity()?;
        for (w, n) in self.what.iter_mut().zip(&self.nl) {
            *w += n * half;
        }
        self.steps += 1;
        Ok(())
    }

    pub fn step(&mut self) -> Result<()> {
        self.step_by(self.d_rho)
    }

    /// Steps with `|d_rho|` towards `target`, shortening the last step to land exactly.
    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        let h = self.d_rho.abs();
        let tol = 1e-12 * target.abs().max(1.0);
        loop {
            let gap = target - self.rho;
            if gap.abs() <= tol {
                self.rho = target;
                return Ok(());
            }
            let dir = gap.signum();
            if gap.abs() <= h * (1.0 + 1e-9) {
                self.step_by(gap)?;
                self.rho = target;
                return Ok(());
            }
            self.step_by(dir * h)?;
        }
    }

    pub fn v(&self) -> Real {
        self.field_from(&self.vhat)
    }

    pub fn v_dot(&self) -> Real {
        self.field_from(&self.what)
    }

    fn field_from(&self, hat: &[C64]) -> Real {
        let mut b = hat.to_vec();
        inverse_in_place(&self.grid, &mut b);
        RealField {
            grid: self.grid,
            rho: self.rho,
            values: b.into_iter().map(|z| z.re).collect(),
        }
    }

    pub fn state(&self) -> SimulationState {
        SimulationState {
            rho: self.rho,
            v: self.v(),
            v_dot: self.v_dot(),
            d_rho: self.d_rho,
            params: self.params.clone(),
        }
    }

    /// `(v, v_dot)` at grid index `j` in `O(N)`.
    pub fn value_at_index(&self, j: usize) -> (f64, f64) {
        let n = self.grid.len() as f64;
        let scale = 1.0 / (2.0 * self.grid.half_width());
        let mut v = C64::new(0.0, 0.0);
        let mut w = C64::new(0.0, 0.0);
        for i in 0..self.vhat.len() {
            let ph = 2.0 * std::f64::consts::PI * ((i * j) % self.grid.len()) as f64 / n;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let e = C64::from_polar(sign, ph);
            v += self.vhat[i] * e;
            w += self.what[i] * e;
        }
        (v.re * scale, w.re * scale)
    }

    /// `(v, v_y, v_dot)` at an arbitrary point by trigonometric interpolation.
    pub fn interpolate(&self, y: f64) -> (f64, f64, f64) {
        let scale = 1.0 / (2.0 * self.grid.half_width());
        let (mut v, mut vy, mut w) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let ny = self.grid.len() / 2;
        for i in 0..self.vhat.len() {
            let e = C64::from_polar(1.0, self.xi[i] * y);
            v += self.vhat[i] * e;
            w += self.what[i] * e;
            if i != ny {
                vy += self.vhat[i] * e * C64::new(0.0, self.xi[i]);
            }
        }
        (v.re * scale, vy.re * scale, w.re * scale)
    }
}

/// One step of size `state.d_rho`.
pub fn step(state: &SimulationState) -> Result<SimulationState> {
    let mut s = Solver::new(state.clone())?;
    s.step()?;
    Ok(s.state())
}

/// Bump `phi(r) = exp(1 - 1/(1 - r^2))` on `|r| < 1`.
pub fn bump(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Cartesian data `u(1, x) = eps phi((x - c)/w)`, `u_t(1, x) = 0`.
pub fn bump_data(eps: f64, width: f64, center: f64, grid: &Grid) -> (Real, Real) {
    (
        RealField::from_fn(*grid, 1.0, |x| eps * bump((x - center) / width)),
        RealField::zeros(*grid, 1.0),
    )
}

/// Grid of the short Cartesian run that carries bump data onto the hyperboloid.
pub const TRANSFER_HALF_WIDTH: f64 = 4.0;
pub const TRANSFER_POINTS: usize = 512;
pub const TRANSFER_STEP: f64 = 2e-4;
/// Hyperboloid points with `|sinh y|` beyond this are outside the domain of
/// dependence of the data and are set to zero.
pub const TRANSFER_REACH: f64 = 0.8;

/// `(v, v_dot)` on the hyperboloid `rho = 1` for Cartesian bump data posed at
/// `t = 1`, obtained by evolving the data to each `t = cosh y` and applying
/// `v = u`, `v_dot = u/2 + cosh y u_t + sinh y u_x`.
pub fn initial_data_bump(
    eps: f64,
    width: f64,
    center: f64,
    grid: &Grid,
    params: &NonlinearityParams,
) -> Result<(Real, Real)> {
    if !(width > 0.0 && width <= 0.5) || center.abs() + width > 0.5 + 1e-12 {
        return invalid("bump must be supported in |x| <= 1/2");
    }
    let mut v = RealField::zeros(*grid, 1.0);
    let mut vd = RealField::zeros(*grid, 1.0);
    if eps == 0.0 {
        return Ok((v, vd));
    }
    let xg = GridSpec::new(TRANSFER_HALF_WIDTH, TRANSFER_POINTS)?;
    let (u0, u1) = bump_data(eps, width, center, &xg);
    let mut cart = Solver::cartesian(&u0, &u1, 1.0, TRANSFER_STEP, params.clone())?;
    let mut idx: Vec<usize> = (0..grid.len())
        .filter(|&j| grid.point(j).sinh().abs() <= TRANSFER_REACH)
        .collect();
    idx.sort_by(|&a, &b| grid.point(a).abs().total_cmp(&grid.point(b).abs()));
    for j in idx {
        let y = grid.point(j);
        cart.advance_to(y.cosh())?;
        let (u, ux, ut) = cart.interpolate(y.sinh());
        v.values[j] = u;
        vd.values[j] = 0.5 * u + y.cosh() * ut + y.sinh() * ux;
    }
    Ok((v, vd))
}

/// Cartesian solution slices `(t, u, u_t)` at the requested times.
pub fn cartesian_reference_run(
    u0: &Real,
    u1: &Real,
    t0: f64,
    dt: f64,
    params: &NonlinearityParams,
    times: &[f64],
) -> Result<Vec<(f64, Real, Real)>> {
    let mut s = Solver::cartesian(u0, u1, t0, dt, params.clone())?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        s.advance_to(t)?;
        out.push((t, s.v(), s.v_dot()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub value: f64,
    /// Smallness threshold `K` of the energy estimate.
    pub threshold: f64,
    pub smallness_ok: bool,
}

/// `K = (1 + 16(|a0| + sup_z [|c(z)| + |z c'(z)|]^{1/2}))^{-1}` with `c = b0 + beta`.
pub fn smallness_threshold(params: &NonlinearityParams) -> f64 {
    let r = params.beta.effective_support_radius().max(4.0) * 2.0;
    let n = 4000;
    let mut sup = params.beta0.abs();
    for i in 0..=n {
        let z = -r + 2.0 * r * i as f64 / n as f64;
        let d = params.beta.derivs(z);
        sup = sup.max((params.beta0 + d[0]).abs() + (z * d[1]).abs());
    }
    1.0 / (1.0 + 16.0 * (params.alpha0.abs() + sup.sqrt()))
}

/// `E_0 = int v_dot^2/2 + v_y^2/(2 rho^2) + (1 + 1/(4 rho^2)) v^2/2 - a0 v^3/(3 rho^{1/2}) - c v^4/(4 rho) dy`,
/// the conserved-up-to-explicit-rho-dependence energy of the evolved equation.
pub fn energy_e0(state: &SimulationState) -> EnergyReport {
    let p = &state.params;
    let rho = state.rho;
    let vy = derivative_y(&state.v, 1);
    let h = state.v.grid.spacing();
    let q = p.quarter();
    let mut e = 0.0;
    for j in 0..state.v.values.len() {
        let v = state.v.values[j];
        let c = p.cubic_coefficient(rho, state.v.grid.point(j));
        e += 0.5 * state.v_dot.values[j].powi(2)
            + 0.5 * vy.values[j].powi(2) / (rho * rho)
            + 0.5 * (1.0 + q / (4.0 * rho * rho)) * v * v
            - p.alpha0 * v.powi(3) / (3.0 * rho.sqrt())
            - c * v.powi(4) / (4.0 * rho);
    }
    let threshold = smallness_threshold(p);
    let sup = linf_norm(&state.v) + linf_norm(&state.v_dot);
    EnergyReport {
        value: e * h,
        threshold,
        smallness_ok: sup <= threshold,
    }
}

/// `dE_0/d rho = int -rho^{-3}(v_y^2 + v^2/4) + a0 v^3/(6 rho^{3/2}) - d_rho(c/rho) v^4/4 dy` along solutions.
pub fn energy_rate(state: &SimulationState) -> f64 {
    let p = &state.params;
    let rho = state.rho;
    let vy = derivative_y(&state.v, 1);
    let h = state.v.grid.spacing();
    let q = p.quarter();
    let mut e = 0.0;
    for j in 0..state.v.values.len() {
        let v = state.v.values[j];
        let y = state.v.grid.point(j);
        let dc = p.cubic_coefficient_rate(rho, y) / rho - p.cubic_coefficient(rho, y) / (rho * rho);
        e += -(vy.values[j].powi(2) + q * v * v / 4.0) / rho.powi(3)
            + p.alpha0 * v.powi(3) / (6.0 * rho.powf(1.5))
            - dc * v.powi(4) / 4.0;
    }
    e * h
}

/// Linear energy `int v_dot^2 + rho^{-2} v_y^2 + (1 + 1/(4 rho^2)) v^2 dy`.
pub fn linear_energy(state: &SimulationState) -> f64 {
    let mut s = state.clone();
    s.params = NonlinearityParams {
        alpha0: 0.0,
        beta0: 0.0,
        beta: BetaProfile::zero(),
        ..s.params
    };
    2.0 * energy_e0(&s).value
}

/// `||v||_{H^1} + ||v_dot||_{H^1} + ||rho^{-1} v_y||_{H^1}`.
pub fn h1_triple(v: &Real, v_dot: &Real, rho: f64) -> f64 {
    h1_norm(v) + h1_norm(v_dot) + h1_norm(&derivative_y(v, 1)) / rho
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub rho: f64,
    pub e0: f64,
    pub h1_triple: f64,
    /// `||v||_inf + ||v_dot||_inf`.
    pub linf_pair: f64,
    pub b_norm: f64,
    pub sup_v: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    pub rows: Vec<LedgerRow>,
}

impl EnergyLedger {
    pub fn series(&self, f: impl Fn(&LedgerRow) -> f64) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.rho, f(r))).collect()
    }
}

pub fn ledger_row(state: &SimulationState) -> Result<LedgerRow> {
    Ok(LedgerRow {
        rho: state.rho,
        e0: energy_e0(state).value,
        h1_triple: h1_triple(&state.v, &state.v_dot, state.rho),
        linf_pair: linf_norm(&state.v) + linf_norm(&state.v_dot),
        b_norm: b_infinity_norm(&state.v, state.rho.max(1.0))?,
        sup_v: linf_norm(&state.v),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub checkpoints: Vec<f64>,
    pub store_slices: bool,
}

impl RunOptions {
    /// Checkpoints `rho0 r^k` below `rho_end`, plus `rho_end`.
    pub fn geometric(rho0: f64, rho_end: f64, ratio: f64) -> Self {
        let mut c = Vec::new();
        let mut r = rho0;
        while r < rho_end * (1.0 - 1e-12) {
            c.push(r);
            r *= ratio;
        }
        c.push(rho_end);
        Self {
            checkpoints: c,
            store_slices: false,
        }
    }

    pub fn dyadic(rho0: f64, rho_end: f64) -> Self {
        Self::geometric(rho0, rho_end, 2.0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub ledger: EnergyLedger,
    pub slices: Vec<SimulationState>,
}

impl Solver {
    /// Runs to `rho_end`, recording a ledger row at every checkpoint in `[rho, rho_end]`.
    pub fn run(&mut self, rho_end: f64, opts: &RunOptions) -> Result<RunOutput> {
        if rho_end < self.rho {
            return invalid("rho_end must not precede the current rho");
        }
        let mut out = RunOutput::default();
        let start = self.rho;
        for &cp in opts
            .checkpoints
            .iter()
            .filter(|&&c| c >= start - 1e-12 && c <= rho_end + 1e-12)
        {
            if cp == start && rho_end == start {
                continue;
            }
            self.advance_to(cp)?;
            let st = self.state();
            out.ledger.rows.push(ledger_row(&st)?);
            if opts.store_slices {
                out.slices.push(st);
            }
        }
        self.advance_to(rho_end)?;
        Ok(out)
    }
}

pub fn run(state: &SimulationState, rho_end: f64, opts: &RunOptions) -> Result<RunOutput> {
    Solver::new(state.clone())?.run(rho_end, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapReport {
    pub exponent: f64,
    pub ci95: (f64, f64),
    pub delta: f64,
    pub within: bool,
}

/// Fits the growth exponent of the `H^1` triple norm along the ledger.
pub fn bootstrap_monitor(ledger: &EnergyLedger, delta: f64) -> Result<BootstrapReport> {
    if !(delta > 0.0 && delta < 0.125) {
        return invalid("delta must lie in (0, 1/8)");
    }
    let fit = fit_power_law(&ledger.series(|r| r.h1_triple))?;
    Ok(BootstrapReport {
        exponent: fit.exponent,
        ci95: fit.ci95,
        delta,
        within: fit.exponent <= delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowFrequencyTerms {
    pub rho: f64,
    /// `||(sigma/rho) P' v||_inf`, the commutator with the moving cutoff.
    pub commutator: f64,
    /// `||v^3 - v_1^3||_inf` with `v_1 = P_{<= rho^sigma} v`.
    pub cubic_mismatch: f64,
    /// `||P_{<= rho^sigma}[beta(rho y) v^3]||_inf / rho`.
    pub beta_low: f64,
    /// `||v||_{H^1}`.
    pub h1: f64,
}

/// Checks `6 delta < sigma < 1 - delta`, `sigma <= 2/3`.
pub fn check_sigma_window(sigma: f64, delta: f64) -> Result<()> {
    if !(6.0 * delta < sigma && sigma < 1.0 - delta && sigma <= 2.0 / 3.0 && delta > 0.0) {
        return invalid(format!(
            "sigma={sigma} outside the window for delta={delta}"
        ));
    }
    Ok(())
}

/// Evaluates the remainder terms of the projected low-frequency equation at one state.
pub fn low_frequency_terms(
    state: &SimulationState,
    sigma: f64,
    delta: f64,
) -> Result<LowFrequencyTerms> {
    check_sigma_window(sigma, delta)?;
    let rho = state.rho;
    let cut = rho.powf(sigma);
    let v = &state.v;
    let v1 = if cut >= 1.0 {
        project(v, ProjectionKey::Low(cut))?
    } else {
        crate::spectral_core::apply_real_multiplier(v, |xi| theta(xi.abs() / cut))
    };
    let comm = commutator_band(v, rho, 1.0, sigma);
    let mism = v.zip_with(&v1, |a, b| a.powi(3) - b.powi(3));
    let bv3 = RealField::from_fn(v.grid, rho, |y| state.params.beta.eval(rho * y))
        .zip_with(v, |b, x| b * x.powi(3));
    let bl = crate::spectral_core::apply_real_multiplier(&bv3, |xi| theta(xi.abs() / cut));
    Ok(LowFrequencyTerms {
        rho,
        commutator: linf_norm(&comm),
        cubic_mismatch: linf_norm(&mism),
        beta_low: linf_norm(&bl) / rho,
        h1: h1_norm(v),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowFrequencyReport {
    pub commutator: Option<PowerFit>,
    pub cubic_mismatch: Option<PowerFit>,
    pub beta_low: Option<PowerFit>,
}

impl LowFrequencyReport {
    /// Whether every fitted term decays faster than `rho^{-1}`.
    pub fn integrable(&self) -> bool {
        [&self.commutator, &self.cubic_mismatch, &self.beta_low]
            .iter()
            .all(|f| f.is_none_or(|f| f.exponent < -1.0))
    }
}

/// Fits the rho-decay exponent of each term over a series of evaluations.
pub fn low_frequency_ode_monitor(series: &[LowFrequencyTerms]) -> LowFrequencyReport {
    let fit = |g: &dyn Fn(&LowFrequencyTerms) -> f64| {
        let pts: Vec<_> = series
            .iter()
            .map(|t| (t.rho, g(t)))
            .filter(|&(_, y)| y > 0.0)
            .collect();
        if pts.len() >= 3 {
            fit_power_law(&pts).ok()
        } else {
            None
        }
    };
    LowFrequencyReport {
        commutator: fit(&|t| t.commutator),
        cubic_mismatch: fit(&|t| t.cubic_mismatch),
        beta_low: fit(&|t| t.beta_low),
    }
}

/// Relative `L^2` distance.
pub fn relative_l2(a: &Real, b: &Real) -> f64 {
    let d = a.zip_with(b, |x, y| x - y);
    let n = l2_norm(b);
    if n == 0.0 {
        l2_norm(&d)
    } else {
        l2_norm(&d) / n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_stays_zero() {
        let g = GridSpec::new(8.0, 64).unwrap();
        let p = NonlinearityParams::new(1.0, 1.0, BetaProfile::gaussian());
        let s = SimulationState::zero(g, 0.05, p).unwrap();
        let s2 = step(&s).unwrap();
        assert!(s2
            .v
            .values
            .iter()
            .chain(&s2.v_dot.values)
            .all(|&x| x == 0.0));
        assert!((s2.rho - 1.05).abs() < 1e-15);
    }

    #[test]
    fn step_limit_enforced() {
        let g = GridSpec::new(8.0, 64).unwrap();
        assert!(SimulationState::zero(g, 0.2, NonlinearityParams::default()).is_err());
    }

    #[test]
    fn sigma_window() {
        assert!(check_sigma_window(0.5, 0.05).is_ok());
        assert!(check_sigma_window(0.7, 0.05).is_err());
        assert!(check_sigma_window(0.2, 0.05).is_err());
    }
}
