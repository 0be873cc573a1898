//! Cross-checks between closed forms, quadrature oracles and Monte Carlo.
//!
//! Each check reports a measured value against an expected value and a
//! tolerance. For curve comparisons the measured value is the worst
//! deviation and the expected value is zero.

use std::f64::consts::PI;

use multiflow::dispersion::{
    dispersion, dispersion_by_quadrature, linear_grid, log_grid, DiffusionSpec, Model, PositionMeasure,
};
use multiflow::kernel::{
    coordinate_profile, coordinate_weight, ds_from_kernel, heat_kernel_curve, ordinary_normalization, pdf,
    BoxChoice, KernelProbe,
};
use multiflow::measure::{fractional_weight, geometric_profile_inverse, FractionalCharges};
use multiflow::quad::{integrate_across_origin, QuadOptions};
use multiflow::spectral::{fixed_point_ds, probe_asymptotes, spectral_dimension, spectral_weighted_flow};
use multiflow::walker::{
    default_fit_window, default_grid, fit_ensemble, increment_diagnostics, simulate_bm, simulate_fsbm_q,
    simulate_fssbm, simulate_sbm, WalkerEnsemble,
};

use crate::args::ValidateOptions;
use crate::csv::num;
use crate::error::CliError;

pub const MC_PATHS: usize = 10_000;
pub const MC_STEPS: usize = 1024;
pub const MC_SEED: u64 = 20_240_601;
/// Significance for the increment classification.
pub const INCREMENT_Z: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    /// `|measured - expected| <= tol`.
    pub fn near(name: impl Into<String>, measured: f64, expected: f64, tol: f64) -> Self {
        let passed = (measured - expected).abs() <= tol;
        Self { name: name.into(), measured, expected, tol, passed }
    }

    /// `measured < bound`, reported with `expected = bound`.
    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, expected: bound, tol: 0.0, passed: measured < bound }
    }

    /// `measured > bound`, reported with `expected = bound`.
    pub fn above(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, expected: bound, tol: 0.0, passed: measured > bound }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} measured={} expected={} tol={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            num(self.measured),
            num(self.expected),
            num(self.tol)
        )
    }
}

type Checks = Result<Vec<Check>, CliError>;

const BETA_STARS: [f64; 6] = [0.25, 0.5, 0.75, 1.25, 1.5, 1.75];

fn oracle_opts() -> QuadOptions {
    QuadOptions::default().with_rel_tol(1e-11)
}

fn weighted(dim: usize, beta_star: f64, kappa: f64, fuzzy: bool) -> multiflow::Result<DiffusionSpec> {
    DiffusionSpec::binomial(Model::Weighted, dim, beta_star, 1.0, kappa, fuzzy)
}

fn with_alpha(spec: DiffusionSpec, alpha: f64, position: PositionMeasure) -> multiflow::Result<DiffusionSpec> {
    let dim = spec.dim;
    spec.with_charges(FractionalCharges::isotropic(dim, alpha)?, position)
}

pub fn fixed_point_table() -> Checks {
    let mut worst: f64 = 0.0;
    for dim in 1..=4 {
        let d = dim as f64;
        for (beta, nu, alpha) in [(0.3, 1.0, 0.5), (0.5, 0.75, 0.25), (1.5, 1.0, 0.8), (0.9, 1.7, 1.0)] {
            let a = FractionalCharges::isotropic(dim, alpha)?;
            for (model, want) in [
                (Model::Weighted, d * (1.0 + nu - beta)),
                (Model::Ordinary, d * (1.0 + nu - beta)),
                (Model::Q, d * beta),
                (Model::Legacy, d * alpha),
            ] {
                worst = worst.max((fixed_point_ds(model, dim, beta, nu, &a) - want).abs());
            }
        }
    }
    Ok(vec![Check::near("fixed-point-table", worst, 0.0, 0.0)])
}

pub fn weighted_flow_asymptotes() -> Checks {
    let mut out = Vec::new();
    for (b, uv, ir) in [(1.5, 4.0, 2.0), (0.5, 6.0, 4.0)] {
        let spec = weighted(4, b, 1.0, false)?;
        let p = probe_asymptotes(|s| spectral_weighted_flow(&spec, s), 1.0)?;
        out.push(Check::near(format!("weighted-flow-uv[beta*={b}]"), p.uv, uv, 0.01));
        out.push(Check::near(format!("weighted-flow-ir[beta*={b}]"), p.ir, ir, 0.01));
    }
    let fuzzy = weighted(4, 0.5, 1.0, true)?;
    out.push(Check::below("fuzzy-flow-uv", spectral_weighted_flow(&fuzzy, 1e-6)?, 0.05));
    // local log-slope of d_S over one decade around 1e-6
    let h = 10f64.sqrt();
    let slope = (spectral_weighted_flow(&fuzzy, 1e-6 * h)?.ln() - spectral_weighted_flow(&fuzzy, 1e-6 / h)?.ln())
        / h.powi(2).ln();
    out.push(Check::near("fuzzy-flow-uv-slope", slope, 1.5, 0.02));
    Ok(out)
}

pub fn q_flow() -> Checks {
    let spec = DiffusionSpec::binomial(Model::Q, 4, 0.5, 1.0, 1.0, false)?;
    Ok(vec![
        Check::near("q-flow-uv", spectral_dimension(&spec, 1e-6)?, 2.0, 0.005),
        Check::near("q-flow-ir", spectral_dimension(&spec, 1e6)?, 4.0, 0.005),
        Check::near("q-flow-lstar", spectral_dimension(&spec, 1.0)?, 3.0, 1e-9),
    ])
}

/// Closed forms evaluated at `κ(1 + kappa_error)` against quadrature at `κ`.
pub fn dispersion_oracle(kappa_error: f64) -> Checks {
    let grid = log_grid(1e-3, 1e3, 50)?;
    let k = 1.0 + kappa_error;
    let mut specs = Vec::new();
    for &b in &BETA_STARS {
        specs.push((weighted(1, b, 1.0, false)?, weighted(1, b, k, false)?));
        if b < 1.0 {
            specs.push((weighted(1, b, 1.0, true)?, weighted(1, b, k, true)?));
        }
    }
    for b in [1.5 - 1e-6, 1.5 + 1e-6] {
        specs.push((weighted(1, b, 1.0, false)?, weighted(1, b, k, false)?));
    }
    let mut worst: f64 = 0.0;
    for (oracle, closed) in &specs {
        for &s in &grid {
            let rel = dispersion(closed, s)? / dispersion_by_quadrature(oracle, s)? - 1.0;
            worst = worst.max(rel.abs());
        }
    }
    let at = weighted(1, 1.5, k, false)?;
    let mut jump: f64 = 0.0;
    for b in [1.5 - 1e-6, 1.5 + 1e-6] {
        let near = weighted(1, b, k, false)?;
        for &s in &grid {
            jump = jump.max((dispersion(&near, s)? / dispersion(&at, s)? - 1.0).abs());
        }
    }
    Ok(vec![
        Check::near("dispersion-oracle", worst, 0.0, 1e-7),
        Check::near("removable-pole-continuity", jump, 0.0, 1e-5),
    ])
}

pub fn kummer_normalization() -> Checks {
    let mut worst: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.8] {
        let spec = with_alpha(DiffusionSpec::fixed(Model::Ordinary, 1, 1.0, 1.0, 1.0)?, alpha, PositionMeasure::Fractional)?;
        for i in 0..20 {
            let t = i as f64 / 19.0;
            let (x0, sigma) = (-3.0 + 6.0 * t * t, 10f64.powf(-2.0 + 3.0 * t));
            let l2 = dispersion(&spec, sigma)?;
            let f = |x: f64| coordinate_weight(&spec, 0, x).unwrap_or(f64::NAN) * (-(x - x0).powi(2) / (4.0 * l2)).exp();
            let l = l2.sqrt();
            let inv = integrate_across_origin(f, x0 - 40.0 * l, x0 + 40.0 * l, alpha, &oracle_opts())?;
            worst = worst.max((ordinary_normalization(&[x0], sigma, &spec)? * inv - 1.0).abs());
        }
    }
    let mut delta: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.8] {
        let spec = with_alpha(DiffusionSpec::fixed(Model::Ordinary, 1, 1.0, 1.0, 1.0)?, alpha, PositionMeasure::Fractional)?;
        let sigma = 1e-4;
        let l2 = dispersion(&spec, sigma)?;
        let x0 = 100.0 * l2.sqrt();
        let want = 1.0 / ((4.0 * PI * l2).sqrt() * fractional_weight(x0, alpha)?);
        delta = delta.max((ordinary_normalization(&[x0], sigma, &spec)? / want - 1.0).abs());
    }
    Ok(vec![
        Check::near("kummer-normalization", worst, 0.0, 1e-6),
        Check::near("fractional-delta-limit", delta, 0.0, 1e-2),
    ])
}

pub fn heat_kernel_duality() -> Checks {
    let grid = log_grid(10f64.powf(-6.2), 10f64.powf(-5.8), 5)?;
    let mut out = Vec::new();
    for dim in [1, 2] {
        for b in [0.5, 1.5] {
            let spec = with_alpha(
                DiffusionSpec::binomial(Model::Ordinary, dim, b, 1.0, 1.0, false)?,
                0.5,
                PositionMeasure::Binomial,
            )?;
            let c = heat_kernel_curve(&spec, &grid, BoxChoice::Default)?;
            let k = ds_from_kernel(&c, KernelProbe::At(grid[2]))?;
            let w = spectral_weighted_flow(&spec, grid[2])?;
            out.push(Check::near(format!("heat-kernel-duality[D={dim},beta*={b}]"), k, w, 1e-2));
        }
    }
    Ok(out)
}

pub fn pdf_normalization() -> Checks {
    let specs = [
        with_alpha(weighted(1, 0.5, 1.0, false)?, 0.5, PositionMeasure::Binomial)?,
        with_alpha(DiffusionSpec::binomial(Model::Ordinary, 1, 1.5, 1.0, 1.0, false)?, 0.5, PositionMeasure::Binomial)?,
        with_alpha(DiffusionSpec::fixed(Model::Q, 1, 1.0, 0.5, 1.0)?, 0.6, PositionMeasure::Fractional)?,
    ];
    let mut out = Vec::new();
    for spec in &specs {
        let alpha = spec.charges.alphas()[0];
        let mut worst: f64 = 0.0;
        for (x0, sigma) in [(0.3, 0.5), (-2.0, 2.0), (4.0, 10.0)] {
            let l = dispersion(spec, sigma)?.sqrt();
            let (lo, hi) = match spec.model {
                Model::Q => {
                    let q0 = coordinate_profile(spec, 0, x0)?;
                    (geometric_profile_inverse(q0 - 12.0 * l, alpha)?, geometric_profile_inverse(q0 + 12.0 * l, alpha)?)
                }
                _ => (x0 - 12.0 * l, x0 + 12.0 * l),
            };
            let f = |x: f64| {
                pdf(&[x], &[x0], sigma, spec)
                    .and_then(|p| coordinate_weight(spec, 0, x).map(|v| p.density * v))
                    .unwrap_or(f64::NAN)
            };
            let m = integrate_across_origin(f, lo, hi, alpha, &oracle_opts())?;
            worst = worst.max((m - 1.0).abs());
        }
        out.push(Check::near(format!("pdf-normalization[{}]", spec.model.name()), worst, 0.0, 1e-6));
    }
    Ok(out)
}

fn fitted(e: &WalkerEnsemble) -> Result<f64, CliError> {
    Ok(fit_ensemble(e, default_fit_window(e.grid()))?.exponent)
}

pub fn monte_carlo_exponents() -> Checks {
    let g = default_grid(1.0, MC_STEPS)?;
    let (n, s) = (MC_PATHS, MC_SEED);
    Ok(vec![
        Check::near("mc-exponent[bm]", fitted(&simulate_bm(n, &g, 1.0, 1, s)?)?, 1.0, 0.03),
        Check::near("mc-exponent[sbm]", fitted(&simulate_sbm(n, &g, 1.0, 0.5, 1, s)?)?, 0.5, 0.03),
        Check::near("mc-exponent[fsbm-v]", fitted(&simulate_fssbm(n, &g, 1.0, 0.5, 1.0, 1, s)?)?, 1.5, 0.05),
        Check::near("mc-exponent[fssbm]", fitted(&simulate_fssbm(n, &g, 1.0, 0.5, 0.75, 1, s)?)?, 1.25, 0.05),
        Check::near("mc-exponent[fsbm-q]", fitted(&simulate_fsbm_q(n, &g, 0.5, 0.5, 1, s)?)?, 1.0, 0.1),
    ])
}

/// Stationarity and correlation z-scores; "stationary" and "uncorrelated"
/// mean `|z| < 5`.
pub fn increment_classification() -> Checks {
    let g = linear_grid(1.0 / MC_STEPS as f64, 1.0, MC_STEPS)?;
    let (n, s) = (MC_PATHS, MC_SEED);
    let bm = increment_diagnostics(&simulate_bm(n, &g, 1.0, 1, s)?, 1)?;
    let v = increment_diagnostics(&simulate_fssbm(n, &g, 1.0, 0.5, 1.0, 1, s)?, 1)?;
    let sbm = increment_diagnostics(&simulate_sbm(n, &g, 1.0, 0.5, 1, s)?, 1)?;
    Ok(vec![
        Check::below("increments-stationary[bm]", bm.stationarity_z().abs(), INCREMENT_Z),
        Check::below("increments-uncorrelated[bm]", bm.correlation_z().abs(), INCREMENT_Z),
        Check::below("increments-uncorrelated[fsbm-v]", v.correlation_z().abs(), INCREMENT_Z),
        Check::above("increments-nonstationary[fsbm-v]", v.stationarity_z().abs(), INCREMENT_Z),
        Check::above("increments-nonstationary[sbm]", sbm.stationarity_z().abs(), INCREMENT_Z),
    ])
}

pub fn run_checks(opts: ValidateOptions) -> Checks {
    let mut out = Vec::new();
    out.extend(fixed_point_table()?);
    out.extend(weighted_flow_asymptotes()?);
    out.extend(q_flow()?);
    out.extend(dispersion_oracle(opts.kappa_error)?);
    if !opts.quick {
        out.extend(kummer_normalization()?);
        out.extend(heat_kernel_duality()?);
        out.extend(pdf_normalization()?);
        out.extend(monte_carlo_exponents()?);
        out.extend(increment_classification()?);
    }
    Ok(out)
}

pub fn report(checks: &[Check]) -> String {
    let mut s: String = checks.iter().map(|c| c.line() + "\n").collect();
    let failed = checks.iter().filter(|c| !c.passed).count();
    s.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_lines() {
        let c = Check::near("x", 1.005, 1.0, 0.01);
        assert_eq!(c.line(), "PASS x measured=1.005e0 expected=1e0 tol=1e-2");
        assert!(!Check::below("y", 0.5, 0.5).passed);
        assert!(Check::above("z", 6.0, 5.0).passed);
    }

    #[test]
    fn quick_suite_passes_and_kappa_error_fails_it() {
        let ok = run_checks(ValidateOptions { quick: true, kappa_error: 0.0 }).unwrap();
        assert!(ok.iter().all(|c| c.passed), "{}", report(&ok));
        let bad = run_checks(ValidateOptions { quick: true, kappa_error: 0.01 }).unwrap();
        let failed: Vec<_> = bad.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["dispersion-oracle"]);
    }
}
