//! Experiment registry. Each experiment has a typed entry point returning its
//! measurements and a table form written by [`run_experiment`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use kgnf::asymptotics::{
    decay_rate_report, delort_phase_coefficient, fit_log_phase, DecayReport, LogPhaseFit,
    PhaseSample,
};
use kgnf::cubic_normal_form::{classify_resonance, cubic_error_residual, RESONANCE_TOL};
use kgnf::fit::{fit_power_law, fit_power_law_window, geomspace, PowerFit};
use kgnf::kg_solver::{
    bootstrap_monitor, initial_data_bump, ledger_row, BootstrapReport, EnergyLedger, LedgerRow,
    NonlinearityParams, SimulationState, Solver,
};
use kgnf::littlewood_paley::{
    b_infinity_norm, b_norm_algebra_check, bernstein_check, dyadic_ladder,
};
use kgnf::quadratic_normal_form::{
    low_frequency_exponent, pdo_operator_bound_check, quad_error_residual, symbol_b1, symbol_b2,
    w1_field, BilinearSymbol, PdoBoundReport,
};
use kgnf::resonant_parametrix::build_k;
use kgnf::spectral_core::{h1_norm, random_band_limited};
use kgnf::{Real, Window};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::error::{Context, HarnessError, Result};
use crate::output::{emit_csv, emit_plot_data, manifest, write_manifest, PlotPoint, Table};
use crate::split::split_beta;

pub const EXPERIMENTS: [&str; 9] = [
    "simulate",
    "decay_report",
    "log_phase",
    "quad_nf_residual",
    "cubic_nf_residual",
    "parametrix_residual",
    "resonance_classify",
    "psido_bounds",
    "lp_properties",
];

/// Spacing of the slices behind the `rho`-differences of the simulation ledger.
pub const LEDGER_FD_STEP: f64 = 0.005;

pub const LEDGER_COLUMNS: [&str; 9] = [
    "rho",
    "sup_v",
    "sup_u_scaled",
    "h1_triple",
    "b_norm",
    "energy_e0",
    "quad_residual_h1",
    "cubic_residual_h1",
    "parametrix_residual",
];

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub tables: Vec<Table>,
    pub plot: Vec<PlotPoint>,
}

/// Runs `name` and writes its CSV files, plot data and manifest to `out_root/name`.
pub fn run_experiment(name: &str, cfg: &ExperimentConfig, out_root: &Path) -> Result<PathBuf> {
    let out = compute(name, cfg)?;
    let dir = out_root.join(name);
    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    for t in &out.tables {
        let f = format!("{}.csv", t.name);
        emit_csv(t, &dir.join(&f))?;
        files.push(f);
    }
    if !out.plot.is_empty() {
        emit_plot_data(&out.plot, &dir.join("plot.csv"))?;
        files.push("plot.csv".into());
    }
    write_manifest(&manifest(name, cfg, files), &dir)?;
    Ok(dir)
}

pub fn compute(name: &str, cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match name {
        "simulate" => simulate(cfg).map(|rows| ExperimentOutput {
            plot: series_plot(&rows, "sup_v", |r| r.ledger.sup_v),
            tables: vec![ledger_table(&rows)],
        }),
        "decay_report" => decay_report(cfg).map(|d| d.output()),
        "log_phase" => log_phase(cfg).map(|d| d.output()),
        "quad_nf_residual" => quad_nf_residual(cfg).map(|d| d.output("quad_nf_residual")),
        "cubic_nf_residual" => cubic_nf_residual(cfg).map(|d| d.output("cubic_nf_residual")),
        "parametrix_residual" => parametrix_residual(cfg).map(|d| d.output()),
        "resonance_classify" => resonance_classify(cfg),
        "psido_bounds" => psido_bounds(cfg).map(|d| d.output()),
        "lp_properties" => lp_properties(cfg).map(|d| d.output()),
        other => Err(HarnessError::Config(format!(
            "unknown experiment {other:?}; expected one of {EXPERIMENTS:?}"
        ))),
    }
}

fn hyperboloid_data(cfg: &ExperimentConfig, params: &NonlinearityParams) -> Result<(Real, Real)> {
    let s = &cfg.solver;
    initial_data_bump(s.eps, s.bump_width, s.bump_center, &cfg.grid()?, params)
        .context("initial data transfer")
}

fn solver(cfg: &ExperimentConfig, params: &NonlinearityParams) -> Result<Solver> {
    let (v, vd) = hyperboloid_data(cfg, params)?;
    let st = SimulationState::new(1.0, v, vd, cfg.solver.d_rho, params.clone())?;
    Ok(Solver::new(st)?)
}

/// `(v, v_dot)` at `rho + k h`, `k = -3..=3`, stepping the solver there with steps of `h`.
fn seven_slices(s: &mut Solver, rho: f64, h: f64) -> Result<Vec<(Real, Real)>> {
    let mut out = Vec::with_capacity(7);
    for k in -3..=3 {
        s.advance_to(rho + k as f64 * h)
            .context(format!("slices at rho={rho}"))?;
        out.push((s.v(), s.v_dot()));
    }
    Ok(out)
}

/// Five slices of `(w, w_dot)` with `w = v - w1`, `w_dot = v_dot - d_rho w1`
/// (centered difference), from the seven slices of [`seven_slices`].
fn cubic_variables(
    raw: &[(Real, Real)],
    rho: f64,
    h: f64,
    alpha0: f64,
) -> Result<Vec<(Real, Real)>> {
    if alpha0 == 0.0 {
        return Ok(raw[1..6].to_vec());
    }
    let w1: Vec<Real> = raw
        .iter()
        .enumerate()
        .map(|(k, (v, vd))| w1_field(v, vd, rho + (k as f64 - 3.0) * h, alpha0))
        .collect::<kgnf::Result<_>>()
        .context("w1")?;
    Ok((1..6)
        .map(|k| {
            let (v, vd) = &raw[k];
            let dw1 = w1[k + 1].zip_with(&w1[k - 1], |a, b| (a - b) / (2.0 * h));
            (
                v.zip_with(&w1[k], |a, b| a - b),
                vd.zip_with(&dw1, |a, b| a - b),
            )
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct SimulationRow {
    pub ledger: LedgerRow,
    /// `sup |u| (1 + rho)^{1/2}` on the hyperboloid.
    pub sup_u_scaled: f64,
    pub quad_residual_h1: Option<f64>,
    pub cubic_residual_h1: Option<f64>,
    /// `sup |chi E|` of `K_3` for the piece of `beta` away from `zeta = 0`.
    pub parametrix_residual: Option<f64>,
}

/// Evolves bump data to `rho_end`, with a ledger row at every checkpoint
/// `checkpoint_ratio^k`. With the pipeline flags set, each row also carries
/// the quadratic and cubic normal-form residuals and the parametrix residual.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<SimulationRow>> {
    let params = cfg.params()?;
    let near0 = split_beta(&params.beta, cfg.split.r0, cfg.split.r8)?.near0;
    let away = params.beta.windowed(Window::HighRest);
    let grid = cfg.grid()?;
    let mut s = solver(cfg, &params)?;
    let alpha0 = params.alpha0;
    let h = LEDGER_FD_STEP;
    let mut rows = Vec::new();
    let mut cp = 1.0;
    loop {
        s.advance_to(cp).context(format!("evolution to rho={cp}"))?;
        let st = s.state();
        let ledger = ledger_row(&st)?;
        let want_nf = (cfg.pipeline.quad_nf || cfg.pipeline.cubic_nf) && cp - 3.0 * h >= 1.0;
        let (mut quad, mut cubic) = (None, None);
        if want_nf {
            let mut probe = s.clone();
            probe.set_step(h)?;
            let raw = seven_slices(&mut probe, cp, h)?;
            if cfg.pipeline.quad_nf {
                let r =
                    quad_error_residual(&raw[1..6], cp, h, alpha0).context("quadratic residual")?;
                quad = Some(r.e_h1);
            }
            if cfg.pipeline.cubic_nf {
                let w = cubic_variables(&raw, cp, h, alpha0)?;
                let r = cubic_error_residual(&w, &near0, cp, h).context("cubic residual")?;
                cubic = Some(r.e_h1);
            }
        }
        let parametrix = if cfg.pipeline.parametrix {
            let k = build_k(3, &away, &grid, cp).context(format!("K_3 at rho={cp}"))?;
            Some(k.residual_windowed_sup())
        } else {
            None
        };
        rows.push(SimulationRow {
            parametrix_residual: parametrix,
            sup_u_scaled: ledger.sup_v * ((1.0 + cp) / cp).sqrt(),
            ledger,
            quad_residual_h1: quad,
            cubic_residual_h1: cubic,
        });
        if cp >= cfg.solver.rho_end {
            break;
        }
        cp = (cp * cfg.fit.checkpoint_ratio).min(cfg.solver.rho_end);
    }
    Ok(rows)
}

pub fn ledger_table(rows: &[SimulationRow]) -> Table {
    let mut t = Table::new("ledger", &LEDGER_COLUMNS);
    for r in rows {
        let l = &r.ledger;
        t.push(vec![
            l.rho.into(),
            l.sup_v.into(),
            r.sup_u_scaled.into(),
            l.h1_triple.into(),
            l.b_norm.into(),
            l.e0.into(),
            r.quad_residual_h1.into(),
            r.cubic_residual_h1.into(),
            r.parametrix_residual.into(),
        ]);
    }
    t
}

fn series_plot(
    rows: &[SimulationRow],
    label: &str,
    f: impl Fn(&SimulationRow) -> f64,
) -> Vec<PlotPoint> {
    rows.iter()
        .map(|r| PlotPoint {
            x: r.ledger.rho,
            y: f(r),
            label: label.to_string(),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct DecayOutcome {
    pub rows: Vec<SimulationRow>,
    pub report: DecayReport,
    pub bootstrap: BootstrapReport,
    /// `max_rho sup|v| / max_{rho <= 10} sup|v|`.
    pub growth_ratio: f64,
}

pub fn decay_report(cfg: &ExperimentConfig) -> Result<DecayOutcome> {
    let rows = simulate(cfg)?;
    let ledger = EnergyLedger {
        rows: rows.iter().map(|r| r.ledger).collect(),
    };
    let report = decay_rate_report(&ledger).context("decay report")?;
    let bootstrap = bootstrap_monitor(&ledger, cfg.fit.delta).context("bootstrap monitor")?;
    Ok(DecayOutcome {
        growth_ratio: report.growth_ratio(10.0),
        rows,
        report,
        bootstrap,
    })
}

impl DecayOutcome {
    fn output(&self) -> ExperimentOutput {
        let mut s = Table::new(
            "summary",
            &[
                "exponent_v",
                "exponent_u",
                "tail_ratio",
                "growth_ratio",
                "bootstrap_exponent",
                "bootstrap_within",
            ],
        );
        s.push(vec![
            self.report.exponent_v.map(|f| f.exponent).into(),
            self.report.exponent_u.map(|f| f.exponent).into(),
            self.report.tail_ratio.into(),
            self.growth_ratio.into(),
            self.bootstrap.exponent.into(),
            self.bootstrap.within.into(),
        ]);
        ExperimentOutput {
            tables: vec![ledger_table(&self.rows), s],
            plot: series_plot(&self.rows, "sup_v", |r| r.ledger.sup_v),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LogPhaseOutcome {
    pub fit: LogPhaseFit,
    /// `(3/8) beta0 + (5/12) alpha0^2`.
    pub expected: f64,
    /// `-normalized / expected`; 1 is exact agreement.
    pub ratio: f64,
    pub samples: Vec<PhaseSample>,
}

fn phase_samples(
    cfg: &ExperimentConfig,
    params: &NonlinearityParams,
    data: &(Real, Real),
) -> Result<Vec<PhaseSample>> {
    let st = SimulationState::new(
        1.0,
        data.0.clone(),
        data.1.clone(),
        cfg.solver.d_rho,
        params.clone(),
    )?;
    let mut s = Solver::new(st)?;
    let j0 = cfg.grid.points / 2;
    let mut out = Vec::new();
    while s.rho() + 0.5 * cfg.solver.d_rho < cfg.fit.rho2 {
        s.step().context("phase run")?;
        if s.rho() >= cfg.fit.rho1 - 1e-9 {
            let (v, v_dot) = s.value_at_index(j0);
            out.push(PhaseSample {
                rho: s.rho(),
                v,
                v_dot,
            });
        }
    }
    Ok(out)
}

/// Phase of `v - i v_dot` at `y = 0` sampled every `d_rho` on `[rho1, rho2]`,
/// against a linear run from the same hyperboloid data.
pub fn log_phase(cfg: &ExperimentConfig) -> Result<LogPhaseOutcome> {
    let params = cfg.params()?;
    let data = hyperboloid_data(cfg, &params)?;
    let samples = phase_samples(cfg, &params, &data)?;
    let reference = phase_samples(cfg, &NonlinearityParams::default(), &data)?;
    let fit = fit_log_phase(&samples, Some(&reference), cfg.fit.rho1, cfg.fit.rho2)
        .context("phase fit")?;
    let expected = delort_phase_coefficient(params.alpha0, params.beta0);
    Ok(LogPhaseOutcome {
        ratio: -fit.normalized / expected,
        expected,
        fit,
        samples,
    })
}

impl LogPhaseOutcome {
    fn output(&self) -> ExperimentOutput {
        let mut s = Table::new(
            "summary",
            &[
                "slope",
                "ci_lo",
                "ci_hi",
                "amplitude_sq",
                "normalized",
                "expected",
                "ratio",
                "blocks",
                "unwrap_flagged",
            ],
        );
        s.push(vec![
            self.fit.slope.into(),
            self.fit.ci95.0.into(),
            self.fit.ci95.1.into(),
            self.fit.amplitude_sq.into(),
            self.fit.normalized.into(),
            self.expected.into(),
            self.ratio.into(),
            (self.fit.points as f64).into(),
            self.fit.unwrap_flagged.into(),
        ]);
        let mut t = Table::new("samples", &["rho", "v", "v_dot"]);
        for p in self.samples.iter().step_by(16) {
            t.push(vec![p.rho.into(), p.v.into(), p.v_dot.into()]);
        }
        ExperimentOutput {
            tables: vec![t, s],
            plot: vec![],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ResidualPoint {
    pub rho: f64,
    pub e_h1: f64,
    pub source_h1: f64,
    /// `H^1` size of the normal form (`w1`), or the scaled `w2` size.
    pub nf_size: f64,
    pub fd_dominated: bool,
}

#[derive(Debug, Clone)]
pub struct ResidualOutcome {
    pub points: Vec<ResidualPoint>,
    pub residual_fit: PowerFit,
    pub source_fit: PowerFit,
    /// Fit of `nf_size` over the upper half `[sqrt(rho1 rho2), rho2]` of the window (log scale).
    pub size_fit: PowerFit,
}

impl ResidualOutcome {
    fn new(points: Vec<ResidualPoint>, rho1: f64, rho2: f64) -> Result<Self> {
        let pick = |f: fn(&ResidualPoint) -> f64| -> Vec<(f64, f64)> {
            points.iter().map(|p| (p.rho, f(p))).collect()
        };
        Ok(Self {
            residual_fit: fit_power_law(&pick(|p| p.e_h1)).context("residual fit")?,
            source_fit: fit_power_law(&pick(|p| p.source_h1)).context("source fit")?,
            size_fit: fit_power_law_window(
                &pick(|p| p.nf_size),
                (rho1 * rho2).sqrt() * (1.0 - 1e-9),
                rho2,
            )
            .context("size fit")?,
            points,
        })
    }

    fn output(&self, name: &str) -> ExperimentOutput {
        let mut t = Table::new(
            name,
            &["rho", "residual_h1", "source_h1", "nf_size", "fd_dominated"],
        );
        for p in &self.points {
            t.push(vec![
                p.rho.into(),
                p.e_h1.into(),
                p.source_h1.into(),
                p.nf_size.into(),
                p.fd_dominated.into(),
            ]);
        }
        let mut s = Table::new(
            "summary",
            &["residual_exponent", "source_exponent", "size_exponent"],
        );
        s.push(vec![
            self.residual_fit.exponent.into(),
            self.source_fit.exponent.into(),
            self.size_fit.exponent.into(),
        ]);
        let plot = self
            .points
            .iter()
            .flat_map(|p| {
                [
                    PlotPoint {
                        x: p.rho,
                        y: p.e_h1,
                        label: "residual".into(),
                    },
                    PlotPoint {
                        x: p.rho,
                        y: p.source_h1,
                        label: "source".into(),
                    },
                ]
            })
            .collect();
        ExperimentOutput {
            tables: vec![t, s],
            plot,
        }
    }
}

/// Number of geometrically spaced `rho` in the residual sweeps.
pub const RESIDUAL_POINTS: usize = 12;

/// `||E_quad||_{H^1}` against the raw source `||a0 rho^{-1/2} v^2||_{H^1}` on
/// `[rho1, rho2]`, with slices `d_rho` apart.
pub fn quad_nf_residual(cfg: &ExperimentConfig) -> Result<ResidualOutcome> {
    let params = cfg.params()?;
    let mut s = solver(cfg, &params)?;
    let h = cfg.solver.d_rho;
    let mut points = Vec::new();
    for rho in geomspace(cfg.fit.rho1, cfg.fit.rho2, RESIDUAL_POINTS) {
        let raw = seven_slices(&mut s, rho, h)?;
        let r =
            quad_error_residual(&raw[1..6], rho, h, params.alpha0).context("quadratic residual")?;
        points.push(ResidualPoint {
            rho,
            e_h1: r.e_h1,
            source_h1: r.source_h1,
            nf_size: r.w1_h1,
            fd_dominated: r.fd_dominated,
        });
    }
    ResidualOutcome::new(points, cfg.fit.rho1, cfg.fit.rho2)
}

/// Phases per period at which the cubic residual is sampled.
pub const CUBIC_PHASES: usize = 8;

/// `||E_cubic||_{H^1}` for the piece of `beta` near `zeta = 0`, which drives the
/// run. At each `rho` the residual and source are the largest over
/// [`CUBIC_PHASES`] snapshots spread over one period.
pub fn cubic_nf_residual(cfg: &ExperimentConfig) -> Result<ResidualOutcome> {
    let base = cfg.params()?;
    let near0 = split_beta(&base.beta, cfg.split.r0, cfg.split.r8)?.near0;
    let params = NonlinearityParams {
        beta: near0.clone(),
        ..base
    };
    let mut s = solver(cfg, &params)?;
    let h = cfg.solver.d_rho;
    let mut points = Vec::new();
    for rho in geomspace(cfg.fit.rho1, cfg.fit.rho2, RESIDUAL_POINTS) {
        let mut best: Option<ResidualPoint> = None;
        let mut source = 0.0f64;
        for p in 0..CUBIC_PHASES {
            let rc = rho + 2.0 * PI * p as f64 / CUBIC_PHASES as f64;
            let raw = seven_slices(&mut s, rc, h)?;
            let w = cubic_variables(&raw, rc, h, params.alpha0)?;
            let r = cubic_error_residual(&w, &near0, rc, h).context("cubic residual")?;
            source = source.max(r.source_h1);
            if best.is_none_or(|b| r.e_h1 > b.e_h1) {
                best = Some(ResidualPoint {
                    rho,
                    e_h1: r.e_h1,
                    source_h1: 0.0,
                    nf_size: r.scaled_size,
                    fd_dominated: r.fd_dominated,
                });
            }
        }
        let mut b = best.expect("at least one phase");
        b.source_h1 = source;
        points.push(b);
    }
    ResidualOutcome::new(points, cfg.fit.rho1, cfg.fit.rho2)
}

#[derive(Debug, Clone)]
pub struct ParametrixOutcome {
    /// `(rho, sup |chi K_3|, sup |chi E|, argmax |K_3^|/rho)`.
    pub rows: Vec<(f64, f64, f64, f64)>,
    /// `max / min` of `sup |chi K_3|`.
    pub variation: f64,
    pub residual_fit: PowerFit,
}

/// Number of `rho` in the parametrix sweep.
pub const PARAMETRIX_POINTS: usize = 8;

/// `K_3` for the piece of `beta` away from `zeta = 0` (`1 - theta(|zeta|)`) on `[rho1, rho2]`.
pub fn parametrix_residual(cfg: &ExperimentConfig) -> Result<ParametrixOutcome> {
    let beta = cfg.beta()?.windowed(Window::HighRest);
    let grid = cfg.grid()?;
    let mut rows = Vec::new();
    for rho in geomspace(cfg.fit.rho1, cfg.fit.rho2, PARAMETRIX_POINTS) {
        let k = build_k(3, &beta, &grid, rho).context(format!("K_3 at rho={rho}"))?;
        rows.push((
            rho,
            k.windowed_sup(),
            k.residual_windowed_sup(),
            k.k_hat_argmax(),
        ));
    }
    let sups: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let hi = sups.iter().cloned().fold(0.0, f64::max);
    let lo = sups.iter().cloned().fold(f64::INFINITY, f64::min);
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.2)).collect();
    Ok(ParametrixOutcome {
        variation: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        residual_fit: fit_power_law(&pts).context("residual fit")?,
        rows,
    })
}

impl ParametrixOutcome {
    fn output(&self) -> ExperimentOutput {
        let mut t = Table::new(
            "parametrix",
            &[
                "rho",
                "k3_windowed_sup",
                "residual_windowed_sup",
                "k_hat_argmax",
            ],
        );
        for r in &self.rows {
            t.push(vec![r.0.into(), r.1.into(), r.2.into(), r.3.into()]);
        }
        let mut s = Table::new("summary", &["variation", "residual_exponent"]);
        s.push(vec![
            self.variation.into(),
            self.residual_fit.exponent.into(),
        ]);
        ExperimentOutput {
            tables: vec![t, s],
            plot: vec![],
        }
    }
}

/// Resonance class of `beta` and of its three split pieces.
pub fn resonance_classify(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let beta = cfg.beta()?;
    let split = split_beta(&beta, cfg.split.r0, cfg.split.r8)?;
    let recon = split.reconstruction_error(&beta, &cfg.grid()?);
    let mut t = Table::new(
        "resonance",
        &[
            "piece",
            "profile",
            "classification",
            "abs_hat_0",
            "abs_hat_slope_0",
            "abs_hat_sqrt8",
            "hat_sup",
            "split_reconstruction",
        ],
    );
    let mut pieces = vec![("whole", &beta)];
    pieces.extend(split.pieces());
    for (name, b) in pieces {
        let r = classify_resonance(b, RESONANCE_TOL).context(format!("classify {name}"))?;
        t.push(vec![
            name.into(),
            b.tag().as_str().into(),
            r.classification.label().into(),
            r.hat_at_0.norm().into(),
            r.hat_slope_at_0.norm().into(),
            r.hat_at_sqrt8
                .norm()
                .max(r.hat_at_minus_sqrt8.norm())
                .into(),
            r.hat_sup.into(),
            recon.into(),
        ]);
    }
    Ok(ExperimentOutput {
        tables: vec![t],
        plot: vec![],
    })
}

/// Symbol vanishing to second order at the origin, the test case of the low-frequency estimate.
pub fn low_frequency_symbol() -> BilinearSymbol {
    BilinearSymbol::real("xi eta", |x, y| x * y / (1.0 + x * x + y * y))
}

#[derive(Debug, Clone)]
pub struct PsidoOutcome {
    pub bounds: Vec<(String, PdoBoundReport)>,
    pub low_frequency: Vec<(f64, f64)>,
    pub low_frequency_fit: PowerFit,
}

impl PsidoOutcome {
    /// Largest of the three estimate ratios over all symbols and `rho`.
    pub fn worst(&self) -> f64 {
        self.bounds
            .iter()
            .map(|(_, r)| r.est1.max(r.est3).max(r.est5))
            .fold(0.0, f64::max)
    }

    fn output(&self) -> ExperimentOutput {
        let mut t = Table::new(
            "bounds",
            &[
                "symbol",
                "rho",
                "operator_norm",
                "est1",
                "est3",
                "est5",
                "trials",
            ],
        );
        for (name, r) in &self.bounds {
            t.push(vec![
                name.as_str().into(),
                r.rho.into(),
                r.operator_norm.into(),
                r.est1.into(),
                r.est3.into(),
                r.est5.into(),
                (r.trials as f64).into(),
            ]);
        }
        let mut l = Table::new("low_frequency", &["rho", "ratio"]);
        for &(rho, x) in &self.low_frequency {
            l.push(vec![rho.into(), x.into()]);
        }
        let mut s = Table::new("summary", &["low_frequency_exponent"]);
        s.push(vec![self.low_frequency_fit.exponent.into()]);
        ExperimentOutput {
            tables: vec![t, l, s],
            plot: vec![],
        }
    }
}

/// Empirical constants of the bilinear operator estimates for the quadratic
/// normal-form symbols, and the low-frequency exponent, over seeded random fields.
pub fn psido_bounds(cfg: &ExperimentConfig) -> Result<PsidoOutcome> {
    let grid = cfg.grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let alpha0 = if cfg.params.alpha0 == 0.0 {
        1.0
    } else {
        cfg.params.alpha0
    };
    let mut bounds = Vec::new();
    for b in [symbol_b1(alpha0), symbol_b2(alpha0)] {
        for &rho in &cfg.sweep.rhos {
            let r = pdo_operator_bound_check(
                &b,
                &grid,
                rho,
                cfg.sweep.trials,
                grid.len() / 3,
                &mut rng,
            )
            .context(format!("operator bounds of {}", b.name()))?;
            bounds.push((b.name().to_string(), r));
        }
    }
    let (low_frequency, low_frequency_fit) = low_frequency_exponent(
        &low_frequency_symbol(),
        &grid,
        &cfg.sweep.rhos,
        cfg.sweep.trials,
        cfg.fit.sigma,
        &mut rng,
    )
    .context("low-frequency exponent")?;
    Ok(PsidoOutcome {
        bounds,
        low_frequency,
        low_frequency_fit,
    })
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    /// `(lambda, max L^2 ratio, max derivative ratio)`.
    pub bernstein: Vec<(f64, f64, f64)>,
    /// `(rho, max ||uv||_B/(||u||_B ||v||_B), max ||u||_B/||u||_{H^1})`.
    pub b_norm: Vec<(f64, f64, f64)>,
}

impl LpOutcome {
    pub fn bernstein_max(&self) -> f64 {
        self.bernstein
            .iter()
            .map(|r| r.1.max(r.2))
            .fold(0.0, f64::max)
    }

    pub fn algebra_max(&self) -> f64 {
        self.b_norm.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    fn output(&self) -> ExperimentOutput {
        let mut b = Table::new("bernstein", &["lambda", "l2_ratio", "derivative_ratio"]);
        for &(l, x, y) in &self.bernstein {
            b.push(vec![l.into(), x.into(), y.into()]);
        }
        let mut a = Table::new("b_norm", &["rho", "algebra_ratio", "b_over_h1"]);
        for &(r, x, y) in &self.b_norm {
            a.push(vec![r.into(), x.into(), y.into()]);
        }
        ExperimentOutput {
            tables: vec![b, a],
            plot: vec![],
        }
    }
}

/// Bernstein ratios on the dyadic ladder up to a quarter of the largest
/// wavenumber, and B-norm algebra and embedding ratios at each sweep `rho`.
pub fn lp_properties(cfg: &ExperimentConfig) -> Result<LpOutcome> {
    let grid = cfg.grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nyq = grid.max_wavenumber();
    let ladder: Vec<f64> = dyadic_ladder(1.0, nyq / 2.0)
        .into_iter()
        .filter(|&l| l <= nyq / 4.0)
        .collect();
    let mut bern = vec![(0.0f64, 0.0f64); ladder.len()];
    for _ in 0..cfg.sweep.trials {
        let f = random_band_limited(grid, grid.len() / 2 - grid.len() / 64, &mut rng);
        for (i, &l) in ladder.iter().enumerate() {
            let r = bernstein_check(&f, l)?;
            bern[i].0 = bern[i].0.max(r.l2_ratio.unwrap_or(0.0));
            bern[i].1 = bern[i].1.max(r.derivative_ratio.unwrap_or(0.0));
        }
    }
    let mut b_norm = Vec::new();
    for &rho in &cfg.sweep.rhos {
        let (mut alg, mut emb) = (0.0f64, 0.0f64);
        for _ in 0..cfg.sweep.trials {
            let u = random_band_limited(grid, grid.len() / 3, &mut rng);
            let v = random_band_limited(grid, grid.len() / 3, &mut rng);
            if let Some(r) = b_norm_algebra_check(&u, &v, rho)? {
                alg = alg.max(r);
            }
            emb = emb.max(b_infinity_norm(&u, rho)? / h1_norm(&u));
        }
        b_norm.push((rho, alg, emb));
    }
    Ok(LpOutcome {
        bernstein: ladder
            .iter()
            .zip(bern)
            .map(|(&l, (a, b))| (l, a, b))
            .collect(),
        b_norm,
    })
}
