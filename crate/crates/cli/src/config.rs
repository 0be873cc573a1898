//! Run configuration.
//!
//! A config file is TOML restricted to `[section]` headers and `key = value`
//! pairs; see the README for the full key list. Unknown keys are rejected.
//! Command-line flags override file values.

use serde::{Deserialize, Serialize};

use multiflow::dispersion::{linear_grid, log_grid, DiffusionSpec, Model, PositionMeasure};
use multiflow::measure::FractionalCharges;
use multiflow::walker::Process;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Flow,
    Simulate,
    Pdf,
    Kernel,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Flow => "flow",
            Command::Simulate => "simulate",
            Command::Pdf => "pdf",
            Command::Kernel => "kernel",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_model")]
    pub model: Model,
    #[serde(default = "one_usize")]
    pub dim: usize,
    /// Fixed diffusion-time charge; ignored when `beta_star` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Binomial diffusion-time charge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_star: Option<f64>,
    /// Values of `beta_star` swept by `flow`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_star_sweep: Option<Vec<f64>>,
    #[serde(default = "one_f64")]
    pub nu: f64,
    /// Isotropic position charge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Per-direction position charges; overrides `alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charges: Option<Vec<f64>>,
    #[serde(default = "default_position")]
    pub position: PositionMeasure,
    #[serde(default = "one_f64")]
    pub lstar: f64,
    #[serde(default = "one_f64")]
    pub kappa: f64,
    #[serde(default)]
    pub fuzzy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Defaults: `1e-6·ℓ*` for `flow`/`kernel`, `1e-3·max` for `simulate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default = "yes")]
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(default = "default_process")]
    pub process: Process,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Number of paths written to the trajectory file.
    #[serde(default = "default_export_paths")]
    pub export_paths: usize,
    /// Keep every `subsample`-th step in the trajectory file.
    #[serde(default = "one_usize")]
    pub subsample: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdfSection {
    #[serde(default = "one_f64")]
    pub sigma: f64,
    /// Initial point; defaults to the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Offsets along the diagonal `x0 + t(1,…,1)`.
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_pdf_points")]
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    /// Fixed quadrature half-width; default `max(12ℓ, 10ℓ*)` per point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_halfwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Main CSV; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// MSD summary of `simulate`; defaults to `<path stem>-msd.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub pdf: PdfSection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_model() -> Model {
    Model::Weighted
}
fn default_position() -> PositionMeasure {
    PositionMeasure::Fractional
}
fn default_process() -> Process {
    Process::Bm
}
fn one_usize() -> usize {
    1
}
fn one_f64() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_paths() -> usize {
    10_000
}
fn default_steps() -> usize {
    1024
}
fn default_seed() -> u64 {
    1
}
fn default_export_paths() -> usize {
    16
}
fn default_t_min() -> f64 {
    -5.0
}
fn default_t_max() -> f64 {
    5.0
}
fn default_pdf_points() -> usize {
    200
}

macro_rules! default_via_serde {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                toml::from_str("").expect("empty section deserializes")
            }
        }
    )*};
}
default_via_serde!(ModelSection, GridSection, EnsembleSection, PdfSection, KernelSection, RunConfig);

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {path}: {e}")))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{path}: {m}")),
            other => other,
        })
    }

    fn charges(&self) -> Result<FractionalCharges, CliError> {
        let m = &self.model;
        let c = match (&m.charges, m.alpha) {
            (Some(list), _) => FractionalCharges::new(list.clone()),
            (None, Some(a)) => FractionalCharges::isotropic(m.dim.max(1), a),
            (None, None) => FractionalCharges::isotropic(m.dim.max(1), 1.0),
        };
        c.map_err(|e| CliError::Config(format!("[model] {e}")))
    }

    /// The diffusion spec described by `[model]`, with `beta_star` replaced
    /// by `beta_star_override` when given.
    pub fn spec_with(&self, beta_star_override: Option<f64>) -> Result<DiffusionSpec, CliError> {
        let m = &self.model;
        let charges = self.charges()?;
        let beta_star = beta_star_override.or(m.beta_star);
        let spec = match (m.model, beta_star) {
            (Model::Legacy, _) => DiffusionSpec::fixed(Model::Legacy, m.dim, m.kappa, 1.0, 1.0),
            (model, Some(b)) => {
                if m.nu != 1.0 {
                    return Err(CliError::Config(
                        "[model] nu must be 1 with a binomial beta_star".into(),
                    ));
                }
                DiffusionSpec::binomial(model, m.dim, b, m.lstar, m.kappa, m.fuzzy)
            }
            (model, None) => DiffusionSpec::fixed(model, m.dim, m.kappa, m.beta.unwrap_or(1.0), m.nu)
                .and_then(|mut s| {
                    s.scales.lstar = m.lstar;
                    s.validate()?;
                    Ok(s)
                }),
        };
        spec.and_then(|s| s.with_charges(charges, m.position))
            .map_err(|e| CliError::Config(format!("[model] {e}")))
    }

    pub fn spec(&self) -> Result<DiffusionSpec, CliError> {
        self.spec_with(None)
    }

    /// Diffusion spec for the `[ensemble]` process.
    pub fn process_spec(&self) -> Result<DiffusionSpec, CliError> {
        let m = &self.model;
        let e = |r: multiflow::Result<DiffusionSpec>| r.map_err(|e| CliError::Config(format!("[model] {e}")));
        match self.ensemble.process {
            Process::Bm => e(DiffusionSpec::fixed(Model::Weighted, m.dim, m.kappa, 1.0, 1.0)),
            Process::Sbm => e(DiffusionSpec::fixed(Model::Weighted, m.dim, m.kappa, 1.0, m.nu)),
            Process::FsbmV | Process::Fssbm => match m.beta_star {
                Some(b) => e(DiffusionSpec::binomial(Model::Weighted, m.dim, b, m.lstar, m.kappa, false)),
                None => e(DiffusionSpec::fixed(Model::Weighted, m.dim, m.kappa, m.beta.unwrap_or(1.0), m.nu)),
            },
            Process::FsbmQ => {
                let charges = self.charges()?;
                e(DiffusionSpec::fixed(Model::Q, m.dim, m.kappa, m.beta.unwrap_or(1.0), 1.0)
                    .and_then(|s| s.with_charges(charges, PositionMeasure::Fractional)))
            }
        }
    }

    /// σ grid for `flow`, `kernel` and `validate`.
    pub fn sigma_grid(&self) -> Result<Vec<f64>, CliError> {
        let g = &self.grid;
        let l = self.model.lstar;
        let lo = g.min.unwrap_or(1e-6 * l);
        let hi = g.max.unwrap_or(1e6 * l);
        let n = g.points.unwrap_or(121);
        let grid = if g.log { log_grid(lo, hi, n) } else { linear_grid(lo, hi, n) };
        grid.map_err(|e| CliError::Config(format!("[grid] {e}")))
    }

    /// Step grid for `simulate`: `steps` points ending at `grid.max` (default 1).
    pub fn step_grid(&self) -> Result<Vec<f64>, CliError> {
        let g = &self.grid;
        let n = self.ensemble.steps;
        let hi = g.max.unwrap_or(1.0);
        let grid = if g.log {
            log_grid(g.min.unwrap_or(1e-3 * hi), hi, n)
        } else {
            linear_grid(g.min.unwrap_or(hi / n as f64), hi, n)
        };
        grid.map_err(|e| CliError::Config(format!("[grid] {e}")))
    }

    pub fn check_command(&self, command: Command) -> Result<(), CliError> {
        match self.command {
            Some(c) if c != command => Err(CliError::Config(format!(
                "config is for '{}', not '{}'",
                c.name(),
                command.name()
            ))),
            _ => Ok(()),
        }
    }
}
