//! Experiment configuration: a TOML file layered over the defaults of a named preset.

use std::path::Path;

use kgnf::kg_solver::{check_sigma_window, NonlinearityParams, MAX_STEP};
use kgnf::{BetaProfile, Grid};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// One of `free`, `quadratic`, `cubic`, `mixed`, `variable`.
    pub preset: String,
    pub seed: u64,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub params: ParamsConfig,
    pub pipeline: PipelineConfig,
    pub fit: FitConfig,
    pub split: SplitConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Half width `L` of the periodic domain `[-L, L)`.
    pub half_width: f64,
    /// Number of points `N`, a power of two.
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub d_rho: f64,
    pub rho_end: f64,
    /// Amplitude of the bump data.
    pub eps: f64,
    pub bump_width: f64,
    pub bump_center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub alpha0: f64,
    pub beta0: f64,
    /// `zero`, `gaussian`, `gaussian_dd`, `fourier_bump` or `sech_pow`.
    pub beta: String,
    /// `[lo, hi]` for `fourier_bump`, `[p]` for `sech_pow`.
    pub beta_args: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub quad_nf: bool,
    pub cubic_nf: bool,
    pub parametrix: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub rho1: f64,
    pub rho2: f64,
    /// Bootstrap growth exponent `delta`.
    pub delta: f64,
    /// Low-frequency cutoff exponent `sigma`.
    pub sigma: f64,
    /// Ratio between consecutive ledger checkpoints.
    pub checkpoint_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub r0: f64,
    pub r8: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Random trials per `rho` in the operator and norm suites.
    pub trials: usize,
    pub rhos: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

pub const PRESETS: [&str; 5] = ["free", "quadratic", "cubic", "mixed", "variable"];

impl ExperimentConfig {
    /// Defaults for a named preset.
    pub fn preset(name: &str) -> Result<Self> {
        let (alpha0, beta0, beta, beta_args) = match name {
            "free" => (0.0, 0.0, "zero", vec![]),
            "quadratic" => (1.0, 0.0, "zero", vec![]),
            "cubic" => (0.0, 1.0, "zero", vec![]),
            "mixed" => (1.0, 1.0, "zero", vec![]),
            "variable" => (1.0, 0.0, "fourier_bump", vec![0.5, 2.5]),
            _ => {
                return Err(HarnessError::Config(format!(
                    "unknown preset {name:?}; expected one of {PRESETS:?}"
                )))
            }
        };
        Ok(Self {
            preset: name.to_string(),
            seed: 0,
            grid: GridConfig {
                half_width: 8.0,
                points: 512,
            },
            solver: SolverConfig {
                d_rho: 0.05,
                rho_end: 100.0,
                eps: 0.01,
                bump_width: 0.5,
                bump_center: 0.0,
            },
            params: ParamsConfig {
                alpha0,
                beta0,
                beta: beta.to_string(),
                beta_args,
            },
            pipeline: PipelineConfig {
                quad_nf: false,
                cubic_nf: false,
                parametrix: false,
            },
            fit: FitConfig {
                rho1: 10.0,
                rho2: 100.0,
                delta: 0.05,
                sigma: 0.5,
                checkpoint_ratio: 1.1,
            },
            split: SplitConfig { r0: 0.15, r8: 0.15 },
            sweep: SweepConfig {
                trials: 100,
                rhos: vec![4.0, 16.0, 64.0, 256.0],
            },
            output: OutputConfig {
                dir: "runs".to_string(),
            },
        })
    }

    /// Parses TOML text over the defaults of its `preset` key (default `free`),
    /// applies `key=value` overrides with dotted keys, then validates.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let file: toml::Table = text
            .parse()
            .map_err(|e| HarnessError::Config(format!("malformed config: {e}")))?;
        let mut layered = file.clone();
        for o in overrides {
            apply_override(&mut layered, o)?;
        }
        let name = match layered.get("preset") {
            None => "free".to_string(),
            Some(toml::Value::String(s)) => s.clone(),
            Some(v) => {
                return Err(HarnessError::Config(format!(
                    "preset must be a string, got {v}"
                )))
            }
        };
        let mut merged = toml::Table::try_from(Self::preset(&name)?)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        merge(&mut merged, layered);
        let cfg: Self = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| HarnessError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse_config(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        let g = &self.grid;
        if !(g.points >= 16 && g.points.is_power_of_two()) {
            return bad(format!(
                "grid.points = {} must be a power of two >= 16",
                g.points
            ));
        }
        if !(g.half_width > 0.0 && g.half_width.is_finite()) {
            return bad("grid.half_width must be positive".into());
        }
        let s = &self.solver;
        if !(s.d_rho > 0.0 && s.d_rho <= MAX_STEP) {
            return bad(format!("solver.d_rho must lie in (0, {MAX_STEP}]"));
        }
        if !(s.rho_end > 1.0 && s.rho_end.is_finite()) {
            return bad("solver.rho_end must exceed 1".into());
        }
        if !(s.eps >= 0.0 && s.eps.is_finite()) {
            return bad("solver.eps must be non-negative".into());
        }
        if !(s.bump_width > 0.0 && s.bump_width <= 0.5)
            || s.bump_center.abs() + s.bump_width > 0.5 + 1e-12
        {
            return bad("bump must be supported in |x| <= 1/2".into());
        }
        let f = &self.fit;
        if !(f.rho1 >= 1.0 && f.rho2 > f.rho1) {
            return bad("fit window must satisfy 1 <= rho1 < rho2".into());
        }
        if !(f.checkpoint_ratio > 1.0) {
            return bad("fit.checkpoint_ratio must exceed 1".into());
        }
        check_sigma_window(f.sigma, f.delta).map_err(|e| HarnessError::Config(e.to_string()))?;
        if !(self.split.r0 > 0.0
            && self.split.r0 < 0.3
            && self.split.r8 > 0.0
            && self.split.r8 < 0.3)
        {
            return bad("split radii must lie in (0, 0.3)".into());
        }
        if self.sweep.trials == 0 || self.sweep.rhos.iter().any(|&r| !(r >= 1.0)) {
            return bad("sweep needs trials > 0 and rhos >= 1".into());
        }
        self.beta()?;
        Ok(())
    }

    pub fn beta(&self) -> Result<BetaProfile> {
        let a = &self.params.beta_args;
        let cfg = |e: kgnf::Error| HarnessError::Config(e.to_string());
        let want = |n: usize| {
            if a.len() == n {
                Ok(())
            } else {
                Err(HarnessError::Config(format!(
                    "beta {:?} takes {n} argument(s), got {}",
                    self.params.beta,
                    a.len()
                )))
            }
        };
        match self.params.beta.as_str() {
            "zero" => want(0).map(|_| BetaProfile::zero()),
            "gaussian" => want(0).map(|_| BetaProfile::gaussian()),
            "gaussian_dd" => want(0).map(|_| BetaProfile::gaussian_dd()),
            "fourier_bump" => {
                want(2)?;
                BetaProfile::fourier_bump(a[0], a[1]).map_err(cfg)
            }
            "sech_pow" => {
                want(1)?;
                if a[0].fract() != 0.0 || a[0] < 1.0 {
                    return Err(HarnessError::Config(
                        "sech_pow takes an integer power".into(),
                    ));
                }
                BetaProfile::sech_pow(a[0] as u32).map_err(cfg)
            }
            other => Err(HarnessError::Config(format!(
                "unknown beta preset {other:?}"
            ))),
        }
    }

    pub fn params(&self) -> Result<NonlinearityParams> {
        Ok(NonlinearityParams::new(
            self.params.alpha0,
            self.params.beta0,
            self.beta()?,
        ))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.half_width, self.grid.points).map_err(HarnessError::from)
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Sets `a.b.c = value`, reading the value as TOML and falling back to a bare string.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("override {spec:?} is not key=value")))?;
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => {
                return Err(HarnessError::Config(format!(
                    "override key {key:?} crosses a value"
                )))
            }
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
