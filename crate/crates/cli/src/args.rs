//! Command-line flags and their merge onto a [`RunConfig`].

use clap::{Args, Parser, Subcommand};

use multiflow::dispersion::Model;
use multiflow::walker::Process;

use crate::config::{Command, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "multiflow", version, about = "Diffusion and dimensional flow on multiscale spacetimes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Dispersion and dimension flow on a σ grid.
    Flow(Common),
    /// Monte Carlo ensemble with trajectory and MSD summary files.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Process to simulate.
        #[arg(long)]
        process: Option<Process>,
    },
    /// Diffusion PDF along the diagonal through the initial point.
    Pdf {
        #[command(flatten)]
        common: Common,
        /// Diffusion time of the PDF.
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Return probability Z(σ) by quadrature or closed form.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Fixed quadrature half-width for the ordinary model.
        #[arg(long)]
        box_halfwidth: Option<f64>,
    },
    /// Runs the numerical cross-checks; exits 1 if any fails.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Analytic and quadrature checks only; skips the Monte Carlo checks.
        #[arg(long)]
        quick: bool,
        /// Relative error added to κ on the closed-form side (negative control).
        #[arg(long, value_name = "DELTA")]
        inject_kappa_error: Option<f64>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Config file; flags override its values.
    #[arg(long)]
    pub config: Option<String>,
    #[arg(long)]
    pub model: Option<Model>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Fixed diffusion-time charge.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Binomial diffusion-time charge.
    #[arg(long)]
    pub beta_star: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Isotropic position charge.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lstar: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Fuzzy initial condition ℓ̄ = ℓ*.
    #[arg(long)]
    pub fuzzy: bool,
    #[arg(long)]
    pub sigma_min: Option<f64>,
    #[arg(long)]
    pub sigma_max: Option<f64>,
    #[arg(long)]
    pub sigma_points: Option<usize>,
    /// Log-spaced (true) or linear (false) grid.
    #[arg(long)]
    pub sigma_log: Option<bool>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Main output file; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
    /// Optional SVG figure.
    #[arg(long)]
    pub svg: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidateOptions {
    pub quick: bool,
    pub kappa_error: f64,
}

impl Common {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let m = &mut cfg.model;
        if let Some(v) = self.model {
            m.model = v;
        }
        if let Some(v) = self.dim {
            m.dim = v;
        }
        if let Some(v) = self.beta {
            m.beta = Some(v);
        }
        if let Some(v) = self.beta_star {
            m.beta_star = Some(v);
        }
        if let Some(v) = self.nu {
            m.nu = v;
        }
        if let Some(v) = self.alpha {
            m.alpha = Some(v);
            m.charges = None;
        }
        if let Some(v) = self.lstar {
            m.lstar = v;
        }
        if let Some(v) = self.kappa {
            m.kappa = v;
        }
        m.fuzzy |= self.fuzzy;
        let g = &mut cfg.grid;
        if let Some(v) = self.sigma_min {
            g.min = Some(v);
        }
        if let Some(v) = self.sigma_max {
            g.max = Some(v);
        }
        if let Some(v) = self.sigma_points {
            g.points = Some(v);
        }
        if let Some(v) = self.sigma_log {
            g.log = v;
        }
        let e = &mut cfg.ensemble;
        if let Some(v) = self.paths {
            e.paths = v;
        }
        if let Some(v) = self.steps {
            e.steps = v;
        }
        if let Some(v) = self.seed {
            e.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.output.path = Some(v.clone());
        }
        if let Some(v) = &self.svg {
            cfg.output.svg = Some(v.clone());
        }
    }
}

/// Resolved invocation: command, merged config and validate options.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: RunConfig,
    pub validate: ValidateOptions,
}

impl CommandArgs {
    pub fn resolve(self) -> Result<Invocation, CliError> {
        let (command, common, validate) = match &self {
            CommandArgs::Flow(c) => (Command::Flow, c, ValidateOptions::default()),
            CommandArgs::Simulate { common, .. } => (Command::Simulate, common, ValidateOptions::default()),
            CommandArgs::Pdf { common, .. } => (Command::Pdf, common, ValidateOptions::default()),
            CommandArgs::Kernel { common, .. } => (Command::Kernel, common, ValidateOptions::default()),
            CommandArgs::Validate { common, quick, inject_kappa_error } => (
                Command::Validate,
                common,
                ValidateOptions { quick: *quick, kappa_error: inject_kappa_error.unwrap_or(0.0) },
            ),
        };
        let mut config = match &common.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        config.check_command(command)?;
        common.apply(&mut config);
        match self {
            CommandArgs::Simulate { process: Some(p), .. } => config.ensemble.process = p,
            CommandArgs::Pdf { sigma: Some(s), .. } => config.pdf.sigma = s,
            CommandArgs::Kernel { box_halfwidth: Some(l), .. } => config.kernel.box_halfwidth = Some(l),
            _ => {}
        }
        if !validate.kappa_error.is_finite() || validate.kappa_error <= -1.0 {
            return Err(CliError::Config(format!(
                "--inject-kappa-error must be finite and above -1, got {}",
                validate.kappa_error
            )));
        }
        Ok(Invocation { command, config, validate })
    }
}
