//! Run files: a lattice spec plus an optional `[sweep]` table.
//!
//! ```toml
//! [lattice]
//! cells = 20
//!
//! [boundary]
//! kind = "obc"
//!
//! [hoppings]
//! 0 = 0.5
//! 1 = 1.0
//!
//! [[dissipators]]
//! alpha = "a"
//! alpha_prime = "b"
//! s = 0
//! gamma = 1.2
//!
//! [sweep]
//! outputs = ["winding", "observables"]   # spectrum | winding | steady | observables | dynamics | twobody
//!
//! [[sweep.axes]]
//! path = "hoppings.0"
//! linspace = [0.2, 2.0, 41]               # or logspace = [lo_exp, hi_exp, n], or values = [...]
//!
//! [sweep.options]
//! n_k = 401
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use lindtop::config::{Amplitude, BoundarySection, LatticeSection, SpecFile};
use lindtop::dynamics::{Integrator, DEFAULT_DT};
use lindtop::spectra::DEFAULT_N_K;
use lindtop::twobody::SteadyMode;
use lindtop::{Dissipator, LatticeSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::params::{axis_label, resolve_parameter_path};

pub const MAX_AXES: usize = 2;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    lattice: LatticeSection,
    boundary: BoundarySection,
    #[serde(default)]
    hoppings: BTreeMap<String, Amplitude>,
    #[serde(default)]
    dissipators: Vec<Dissipator>,
    #[serde(default)]
    sweep: Option<SweepSection>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub axes: Vec<AxisDef>,
    #[serde(default)]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub options: PointOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisDef {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linspace: Option<(f64, f64, usize)>,
    /// Base-10 exponents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logspace: Option<(f64, f64, usize)>,
}

fn spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl AxisDef {
    pub fn linspace(path: &str, a: f64, b: f64, n: usize) -> Self {
        Self { path: path.into(), values: None, linspace: Some((a, b, n)), logspace: None }
    }

    pub fn logspace(path: &str, a: f64, b: f64, n: usize) -> Self {
        Self { path: path.into(), values: None, linspace: None, logspace: Some((a, b, n)) }
    }

    pub fn values(path: &str, values: &[f64]) -> Self {
        Self { path: path.into(), values: Some(values.to_vec()), linspace: None, logspace: None }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let points = match (&self.values, self.linspace, self.logspace) {
            (Some(v), None, None) => v.clone(),
            (None, Some((a, b, n)), None) => spaced(a, b, n),
            (None, None, Some((a, b, n))) => spaced(a, b, n).into_iter().map(|x| 10f64.powf(x)).collect(),
            _ => {
                return Err(CliError::Config(format!(
                    "axis `{}`: give exactly one of values, linspace, logspace",
                    self.path
                )))
            }
        };
        if points.is_empty() || points.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("axis `{}` has no points or a non-finite point", self.path)));
        }
        Ok(points)
    }

    /// Replaces the point count of a linspace/logspace axis.
    pub fn with_count(mut self, n: usize) -> Result<Self> {
        if let Some(l) = self.linspace.as_mut() {
            l.2 = n;
        } else if let Some(l) = self.logspace.as_mut() {
            l.2 = n;
        } else {
            return Err(CliError::Config(format!("axis `{}` is an explicit value list", self.path)));
        }
        Ok(self)
    }
}

/// Quantities a sweep can record at each point; CSV columns follow this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    /// `gap`
    Spectrum,
    /// `W_H`, `W_0`
    Winding,
    /// Same columns as `observables`.
    Steady,
    /// `n_bar`, `n_bar_normalized`, `xi_c`
    Observables,
    /// `mean_position_final`, `trace_drift`
    Dynamics,
    /// `n_bar_twobody`
    Twobody,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyMethod {
    /// Full diagonalization; rejects degenerate steady states.
    Spectral,
    Sparse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointOptions {
    pub n_k: usize,
    /// Fixed reference offset for `W_0`; automatic when absent.
    pub epsilon: Option<f64>,
    /// Largest coherence distance; `L - 1` when absent.
    pub d_max: Option<usize>,
    pub steady: SteadyMethod,
    pub twobody: SteadyMode,
    pub t_final: f64,
    pub dt: f64,
    pub stride: f64,
    pub integrator: Integrator,
}

impl Default for PointOptions {
    fn default() -> Self {
        Self {
            n_k: DEFAULT_N_K,
            epsilon: None,
            d_max: None,
            steady: SteadyMethod::Sparse,
            twobody: SteadyMode::SparseNull,
            t_final: 20.0,
            dt: DEFAULT_DT,
            stride: 0.5,
            integrator: Integrator::Rk4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub spec: LatticeSpec,
    pub sweep: SweepSection,
}

impl RunConfig {
    pub fn new(spec: LatticeSpec) -> Self {
        Self { spec, sweep: SweepSection::default() }
    }

    pub fn with_axis(mut self, axis: AxisDef) -> Self {
        self.sweep.axes.push(axis);
        self
    }

    pub fn with_outputs(mut self, outputs: &[OutputKind]) -> Self {
        self.sweep.outputs = outputs.to_vec();
        self
    }

    /// Checks axis count and that every axis path resolves at every point.
    pub fn validate(&self) -> Result<()> {
        if self.sweep.axes.len() > MAX_AXES {
            return Err(CliError::Config(format!(
                "{} sweep axes given, at most {MAX_AXES} are supported",
                self.sweep.axes.len()
            )));
        }
        for axis in &self.sweep.axes {
            for x in axis.points()? {
                resolve_parameter_path(&self.spec, &axis.path, x)?;
            }
            axis_label(&axis.path, &self.spec)?;
        }
        if self.sweep.options.n_k < 64 {
            return Err(CliError::Config(format!("sweep.options.n_k = {} is below 64", self.sweep.options.n_k)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": lindtop::config::spec_to_toml(&self.spec),
            "sweep": self.sweep,
        })
    }
}

pub fn parse_run(text: &str) -> Result<RunConfig> {
    let file: RunFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let spec = SpecFile {
        lattice: file.lattice,
        boundary: file.boundary,
        hoppings: file.hoppings,
        dissipators: file.dissipators,
    }
    .to_spec()
    .map_err(|e| CliError::Config(e.to_string()))?;
    let config = RunConfig { spec, sweep: file.sweep.unwrap_or_default() };
    config.validate()?;
    Ok(config)
}

pub fn load_run(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_run(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
