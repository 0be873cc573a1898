//! Monte Carlo walkers: Brownian, scaled Brownian, FSBM-v/FSSBM and FSBM-q.
//!
//! Every process is built from the same exactly simulable core: a scaled
//! Brownian path `Y(σ) = X_BM(τ(σ))` with `τ(σ) = σ^ν`, sampled with exact
//! variance differences. FSBM-v/FSSBM divide `Y` by `√v(σ)`; FSBM-q maps each
//! coordinate of an SBM with `ν = β` through the inverse geometric profile.
//! The FSBM-q map is applied in every orthant via the sign-preserving inverse.
//!
//! Paths are independent and drawn from a counter-based noise source
//! ([`NoiseSource`]), so ensembles are bit-identical for any worker count.

mod noise;
mod stats;

pub use noise::{NoiseSource, PathNoise};
pub use stats::{
    default_fit_window, excess_kurtosis, fit_ensemble, fit_median_of_batches, fit_power_law,
    fit_scaling_exponent, increment_diagnostics, ks_two_sample, mean_position, msd, msd_direction,
    self_similarity_ks, IncrementReport, KsResult, MsdCurve, MsdFit, HEAVY_TAIL_KURTOSIS,
    MEDIAN_BATCHES,
};

use serde::{Deserialize, Serialize};

use crate::dispersion::{check_grid, fractional_time_weight, log_grid, DiffusionSpec, Model, PositionMeasure};
use crate::error::{invalid, Error, Result};
use crate::measure::FractionalCharges;
use crate::specfun::gamma_fn;
use crate::parallel::par_map;
use crate::spectral::{fixed_point_ds, walk_dimension};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    Bm,
    Sbm,
    FsbmV,
    Fssbm,
    FsbmQ,
}

impl Process {
    pub fn name(self) -> &'static str {
        match self {
            Process::Bm => "bm",
            Process::Sbm => "sbm",
            Process::FsbmV => "fsbm-v",
            Process::Fssbm => "fssbm",
            Process::FsbmQ => "fsbm-q",
        }
    }
}

impl std::str::FromStr for Process {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bm" => Ok(Process::Bm),
            "sbm" => Ok(Process::Sbm),
            "fsbm-v" => Ok(Process::FsbmV),
            "fssbm" => Ok(Process::Fssbm),
            "fsbm-q" => Ok(Process::FsbmQ),
            _ => Err(Error::Domain {
                function: "Process::from_str",
                detail: format!("unknown process '{s}'"),
            }),
        }
    }
}

/// Sampled trajectories; positions are laid out as `[(path·n_steps + step)·D + dir]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerEnsemble {
    process: Process,
    n_paths: usize,
    grid: Vec<f64>,
    dim: usize,
    positions: Vec<f64>,
    seed: u64,
    spec: DiffusionSpec,
}

impl WalkerEnsemble {
    pub fn process(&self) -> Process {
        self.process
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_steps(&self) -> usize {
        self.grid.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &DiffusionSpec {
        &self.spec
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, path: usize, step: usize, dir: usize) -> f64 {
        self.positions[(path * self.grid.len() + step) * self.dim + dir]
    }

    /// All `n_steps × D` coordinates of one path.
    pub fn path(&self, path: usize) -> &[f64] {
        let len = self.grid.len() * self.dim;
        &self.positions[path * len..(path + 1) * len]
    }

    /// Walk dimension of the continuum model the process realises.
    pub fn matching_walk_dimension(&self) -> Result<f64> {
        if self.spec.multiscale.is_some() {
            return Err(invalid(
                "multiscale",
                1.0,
                "a multiscale ensemble has no single walk dimension",
            ));
        }
        let s = &self.spec.scales;
        let d_s = fixed_point_ds(self.spec.model, self.dim, s.beta, s.nu, &self.spec.charges);
        let d_h = self.dim as f64 * self.spec.charges.average();
        walk_dimension(self.spec.model, self.dim, d_h, d_s)
    }
}

/// `n` log-spaced points on `[10⁻³·span, span]`.
pub fn default_grid(span: f64, n: usize) -> Result<Vec<f64>> {
    log_grid(1e-3 * span, span, n)
}

const PATH_CHUNK: usize = 64;

enum Map<'a> {
    None,
    /// Multiply step `n` by `scale[n]`.
    Scale(&'a [f64]),
    /// Inverse geometric profile per direction, as `(α, Γ(α+1))`.
    Profile(&'a [(f64, f64)]),
}

// Same map as `geometric_profile_inverse`, with Γ(α+1) hoisted.
fn profile_inverse(q: f64, (alpha, gamma): (f64, f64)) -> f64 {
    if alpha == 1.0 {
        q
    } else {
        q.signum() * (gamma * q.abs()).powf(1.0 / alpha)
    }
}

fn check_paths(n_paths: usize) -> Result<()> {
    if n_paths == 0 {
        return Err(invalid("n_paths", 0.0, "at least one path is required"));
    }
    Ok(())
}

fn build(
    process: Process,
    n_paths: usize,
    grid: &[f64],
    spec: DiffusionSpec,
    seed: u64,
    clock_exponent: f64,
    map: Map<'_>,
) -> Result<WalkerEnsemble> {
    check_paths(n_paths)?;
    check_grid(grid)?;
    let dim = spec.dim;
    let kappa = spec.scales.kappa;
    let mut prev = 0.0;
    let sd: Vec<f64> = grid
        .iter()
        .map(|&s| {
            let tau = if clock_exponent == 1.0 { s } else { s.powf(clock_exponent) };
            let d = (2.0 * kappa * (tau - prev)).max(0.0).sqrt();
            prev = tau;
            d
        })
        .collect();
    let source = NoiseSource::new(seed, dim);
    let n_steps = grid.len();
    let chunks: Vec<usize> = (0..n_paths.div_ceil(PATH_CHUNK)).collect();
    let blocks = par_map(&chunks, |&c| -> Vec<f64> {
        let lo = c * PATH_CHUNK;
        let hi = (lo + PATH_CHUNK).min(n_paths);
        let mut out = Vec::with_capacity((hi - lo) * n_steps * dim);
        let mut y = vec![0.0; dim];
        for p in lo..hi {
            let mut noise = source.path(p as u64);
            y.iter_mut().for_each(|v| *v = 0.0);
            for (n, &d) in sd.iter().enumerate() {
                for (mu, yv) in y.iter_mut().enumerate() {
                    *yv += d * noise.next_gaussian();
                    let x = match map {
                        Map::None => *yv,
                        Map::Scale(scale) => *yv * scale[n],
                        Map::Profile(charges) => profile_inverse(*yv, charges[mu]),
                    };
                    out.push(x);
                }
            }
        }
        out
    });
    let mut positions = Vec::with_capacity(n_paths * n_steps * dim);
    for b in blocks {
        positions.extend(b);
    }
    if let Some(i) = positions.iter().position(|x| !x.is_finite()) {
        let step = (i / dim) % n_steps;
        return Err(Error::Domain {
            function: "walker",
            detail: format!("non-finite position at sigma = {}", grid[step]),
        });
    }
    Ok(WalkerEnsemble {
        process,
        n_paths,
        grid: grid.to_vec(),
        dim,
        positions,
        seed,
        spec,
    })
}

/// Brownian motion with `⟨X²⟩ = 2Dκσ`.
pub fn simulate_bm(n_paths: usize, grid: &[f64], kappa: f64, dim: usize, seed: u64) -> Result<WalkerEnsemble> {
    let spec = DiffusionSpec::fixed(Model::Weighted, dim, kappa, 1.0, 1.0)?;
    build(Process::Bm, n_paths, grid, spec, seed, 1.0, Map::None)
}

/// Scaled Brownian motion `X_BM(σ^ν)`.
pub fn simulate_sbm(
    n_paths: usize,
    grid: &[f64],
    kappa: f64,
    nu: f64,
    dim: usize,
    seed: u64,
) -> Result<WalkerEnsemble> {
    let spec = DiffusionSpec::fixed(Model::Weighted, dim, kappa, 1.0, nu)?;
    build(Process::Sbm, n_paths, grid, spec, seed, nu, Map::None)
}

/// `X_SBM(σ)/√v(σ)` with the fractional or binomial diffusion-time weight of
/// `spec`; tagged FSSBM when `ν ≠ 1`.
pub fn simulate_fsbm_v(n_paths: usize, grid: &[f64], spec: &DiffusionSpec, seed: u64) -> Result<WalkerEnsemble> {
    spec.validate()?;
    check_grid(grid)?;
    let profile = match &spec.multiscale {
        Some(p) => p.clone(),
        None => fractional_time_weight(spec.scales.beta)?,
    };
    let scale = grid
        .iter()
        .map(|&s| {
            let v = profile.weight(s)?;
            if v > 0.0 && v.is_finite() {
                Ok(1.0 / v.sqrt())
            } else {
                Err(Error::SingularPoint { at: s })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let nu = spec.scales.nu;
    let process = if nu == 1.0 { Process::FsbmV } else { Process::Fssbm };
    let mut spec = spec.clone();
    spec.model = Model::Weighted;
    build(process, n_paths, grid, spec, seed, nu, Map::Scale(&scale))
}

/// FSSBM with fractional `v_β`; identical to [`simulate_fsbm_v`] on a fixed spec.
pub fn simulate_fssbm(
    n_paths: usize,
    grid: &[f64],
    kappa: f64,
    beta: f64,
    nu: f64,
    dim: usize,
    seed: u64,
) -> Result<WalkerEnsemble> {
    let spec = DiffusionSpec::fixed(Model::Weighted, dim, kappa, beta, nu)?;
    simulate_fsbm_v(n_paths, grid, &spec, seed)
}

/// `sgn(Q)[Γ(α+1)|Q|]^{1/α}` per coordinate of an SBM `Q` with `ν = β`, `κ = 1`.
pub fn simulate_fsbm_q(
    n_paths: usize,
    grid: &[f64],
    alpha: f64,
    beta: f64,
    dim: usize,
    seed: u64,
) -> Result<WalkerEnsemble> {
    let spec = DiffusionSpec::fixed(Model::Q, dim, 1.0, beta, 1.0)?
        .with_charges(FractionalCharges::isotropic(dim, alpha)?, PositionMeasure::Fractional)?;
    simulate_fsbm_q_spec(n_paths, grid, &spec, seed)
}

/// FSBM-q with `κ`, `β` and the per-direction charges taken from `spec`.
pub fn simulate_fsbm_q_spec(n_paths: usize, grid: &[f64], spec: &DiffusionSpec, seed: u64) -> Result<WalkerEnsemble> {
    spec.validate()?;
    if spec.multiscale.is_some() {
        return Err(invalid("multiscale", 1.0, "FSBM-q needs a fixed beta"));
    }
    let beta = spec.scales.beta;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid("beta", beta, "FSBM-q needs beta in (0, 1]"));
    }
    let mut spec = spec.clone();
    spec.model = Model::Q;
    spec.scales.nu = 1.0;
    let charges = spec
        .charges
        .alphas()
        .iter()
        .map(|&a| Ok((a, gamma_fn(a + 1.0)?)))
        .collect::<Result<Vec<_>>>()?;
    build(Process::FsbmQ, n_paths, grid, spec, seed, beta, Map::Profile(&charges))
}

/// Dispatch on the process tag.
pub fn simulate(process: Process, n_paths: usize, grid: &[f64], spec: &DiffusionSpec, seed: u64) -> Result<WalkerEnsemble> {
    let s = &spec.scales;
    match process {
        Process::Bm => simulate_bm(n_paths, grid, s.kappa, spec.dim, seed),
        Process::Sbm => simulate_sbm(n_paths, grid, s.kappa, s.nu, spec.dim, seed),
        Process::FsbmV | Process::Fssbm => simulate_fsbm_v(n_paths, grid, spec, seed),
        Process::FsbmQ => simulate_fsbm_q_spec(n_paths, grid, spec, seed),
    }
}
