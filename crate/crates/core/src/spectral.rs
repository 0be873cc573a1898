//! Spectral, walk and density-of-states dimensions.

use serde::{Deserialize, Serialize};

use crate::dispersion::{dispersion, DiffusionSpec, DispersionCurve, Model};
use crate::error::{invalid, Error, Result};
use crate::measure::{hausdorff_dimension, FractionalCharges, MeasureProfile};
use crate::parallel::par_map;
use crate::specfun::gamma_fn;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFlow {
    pub sigmas: Vec<f64>,
    pub ds: Vec<f64>,
    pub uv_asymptote: f64,
    pub ir_asymptote: f64,
    pub model: Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionTriple {
    pub d_h: f64,
    pub d_s: f64,
    pub d_w: f64,
    pub model: Model,
}

/// Five-point log-derivative `d ln f / d ln σ` at grid node `i` of a
/// log-uniform grid.
pub(crate) fn log_slope_at(sigmas: &[f64], values: &[f64], i: usize) -> Result<f64> {
    let n = sigmas.len();
    if i < 2 || i + 2 >= n {
        return Err(Error::GridEdge { sigma: sigmas[i.min(n - 1)] });
    }
    let ln_s: Vec<f64> = sigmas[i - 2..=i + 2].iter().map(|s| s.ln()).collect();
    let h = (ln_s[4] - ln_s[0]) / 4.0;
    for k in 0..4 {
        let step = ln_s[k + 1] - ln_s[k];
        if (step - h).abs() > 1e-6 * h.abs() {
            return Err(Error::InvalidGrid(format!(
                "log-derivative needs log-uniform spacing around sigma = {}",
                sigmas[i]
            )));
        }
    }
    let f: Vec<f64> = values[i - 2..=i + 2].iter().map(|v| v.ln()).collect();
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain {
            function: "log_slope",
            detail: format!("non-positive value near sigma = {}", sigmas[i]),
        });
    }
    Ok((f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h))
}

/// Log-slope at an arbitrary interior `σ`, interpolated linearly in `ln σ`
/// between the stencils of the bracketing nodes.
pub(crate) fn log_slope(sigmas: &[f64], values: &[f64], sigma: f64) -> Result<f64> {
    let n = sigmas.len();
    if n < 5 || !(sigma >= sigmas[0] && sigma <= sigmas[n - 1]) {
        return Err(Error::GridEdge { sigma });
    }
    let hi = sigmas.partition_point(|&s| s < sigma);
    if hi < n && sigmas[hi] == sigma {
        return log_slope_at(sigmas, values, hi);
    }
    let lo = hi - 1;
    let a = log_slope_at(sigmas, values, lo)?;
    let b = log_slope_at(sigmas, values, hi)?;
    let t = (sigma.ln() - sigmas[lo].ln()) / (sigmas[hi].ln() - sigmas[lo].ln());
    Ok(a + t * (b - a))
}

/// `d_S = D d ln ℓ²/d ln σ` from a sampled curve.
pub fn spectral_from_dispersion(curve: &DispersionCurve, dim: usize, sigma: f64) -> Result<f64> {
    Ok(dim as f64 * log_slope(&curve.sigmas, &curve.ell2, sigma)?)
}

/// `d_S = D κ σ^ν / (v(σ) ℓ²(σ))` for the weighted and ordinary models.
pub fn spectral_weighted_flow(spec: &DiffusionSpec, sigma: f64) -> Result<f64> {
    if !matches!(spec.model, Model::Weighted | Model::Ordinary) {
        return Err(invalid("model", 0.0, "the weighted flow needs the weighted or ordinary model"));
    }
    let s = &spec.scales;
    let v = match &spec.multiscale {
        Some(p) => p.weight(sigma)?,
        None => sigma.powf(s.beta - 1.0) / gamma_fn(s.beta)?,
    };
    let ell2 = dispersion(spec, sigma)?;
    Ok(spec.dim as f64 * s.kappa * sigma.powf(s.nu) / (v * ell2))
}

/// `d_S = D Σ g_n β_n σ^{β_n} / Σ g_n σ^{β_n}`.
pub fn spectral_q_flow(profile: &MeasureProfile, dim: usize, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(invalid("sigma", sigma, "diffusion time must be positive"));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for t in profile.terms() {
        let w = t.g * sigma.powf(t.charge);
        num += t.charge * w;
        den += w;
    }
    Ok(dim as f64 * num / den)
}

/// Constant spectral dimension without a scale: `D(1+ν-β)` (weighted,
/// ordinary), `Dβ` (q), `Dα` (legacy).
pub fn fixed_point_ds(model: Model, dim: usize, beta: f64, nu: f64, alphas: &FractionalCharges) -> f64 {
    let d = dim as f64;
    match model {
        Model::Weighted | Model::Ordinary => d * (1.0 + nu - beta),
        Model::Q => d * beta,
        Model::Legacy => d * alphas.average(),
    }
}

/// Parameter identifications with a name of their own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedPointCase {
    /// `β = ν = 1`
    OrdinaryDiffusion,
    /// `β = α₀`, `ν = 1`
    TimeCharge { alpha0: f64 },
    /// `β = α`, `ν = 1`
    SpaceCharge { alpha: f64 },
    /// `β = 1`, `ν = α`
    NoiseCharge { alpha: f64 },
}

impl FixedPointCase {
    pub fn beta_nu(self) -> (f64, f64) {
        match self {
            FixedPointCase::OrdinaryDiffusion => (1.0, 1.0),
            FixedPointCase::TimeCharge { alpha0 } => (alpha0, 1.0),
            FixedPointCase::SpaceCharge { alpha } => (alpha, 1.0),
            FixedPointCase::NoiseCharge { alpha } => (1.0, alpha),
        }
    }

    /// Weighted-model `d_S` for this case.
    pub fn ds(self, dim: usize) -> f64 {
        let (beta, nu) = self.beta_nu();
        dim as f64 * (1.0 + nu - beta)
    }
}

/// Legacy `d_S = Dα`. The value rests on an ansatz whose spatial integrals
/// diverge; it is kept for comparison only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegacyDs {
    pub value: f64,
    pub caveat: &'static str,
}

pub const LEGACY_CAVEAT: &str =
    "legacy ansatz: ratio of divergent spatial integrals dropped by hand";

pub fn legacy_ds(alphas: &FractionalCharges) -> LegacyDs {
    LegacyDs {
        value: alphas.dim() as f64 * alphas.average(),
        caveat: LEGACY_CAVEAT,
    }
}

/// `2 d_H/d_S` (q, legacy) or `2D/d_S` (weighted, ordinary).
pub fn walk_dimension(model: Model, dim: usize, d_h: f64, d_s: f64) -> Result<f64> {
    if !(d_s > 0.0) {
        return Err(invalid("d_s", d_s, "walk dimension needs a positive spectral dimension"));
    }
    Ok(match model {
        Model::Q | Model::Legacy => 2.0 * d_h / d_s,
        Model::Weighted | Model::Ordinary => 2.0 * dim as f64 / d_s,
    })
}

/// Exponent of `ρ(E) ~ E^{d_S/2 - 1}`.
pub fn density_of_states_exponent(d_s: f64) -> f64 {
    0.5 * d_s - 1.0
}

/// Closed-form `d_S(σ)` for any model.
pub fn spectral_dimension(spec: &DiffusionSpec, sigma: f64) -> Result<f64> {
    let s = &spec.scales;
    match spec.model {
        Model::Weighted | Model::Ordinary => spectral_weighted_flow(spec, sigma),
        Model::Q => match &spec.multiscale {
            Some(p) => spectral_q_flow(p, spec.dim, sigma),
            None => Ok(fixed_point_ds(Model::Q, spec.dim, s.beta, s.nu, &spec.charges)),
        },
        Model::Legacy => Ok(legacy_ds(&spec.charges).value),
    }
}

/// Analytic `(UV, IR)` limits of `d_S`.
pub fn analytic_asymptotes(spec: &DiffusionSpec) -> (f64, f64) {
    let d = spec.dim as f64;
    let s = &spec.scales;
    match (spec.model, &spec.multiscale) {
        (Model::Legacy, _) => {
            let v = legacy_ds(&spec.charges).value;
            (v, v)
        }
        (Model::Q, Some(p)) => (d * p.min_charge(), d * p.max_charge()),
        (model, None) => {
            let v = fixed_point_ds(model, spec.dim, s.beta, s.nu, &spec.charges);
            (v, v)
        }
        (_, Some(_)) => {
            let b = spec.beta_star().unwrap_or(1.0);
            if spec.fuzzy {
                (0.0, d)
            } else if b > 1.0 {
                (d, d * (2.0 - b))
            } else {
                (d * (2.0 - b), d)
            }
        }
    }
}

/// Numerically probed limits.
///
/// The UV probe starts at `σ/ℓ* = 1e-6` and the IR probe at `1e6`; each
/// probe is converged when it and the two decades inward from it agree to
/// 1e-3, and otherwise moves one decade outward, up to `1e∓16`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbedAsymptotes {
    pub uv: f64,
    pub ir: f64,
    pub uv_at: f64,
    pub ir_at: f64,
    pub uv_converged: bool,
    pub ir_converged: bool,
}

pub const PROBE_TOLERANCE: f64 = 1e-3;

fn probe_side(f: &dyn Fn(f64) -> Result<f64>, lstar: f64, outward: f64) -> Result<(f64, f64, bool)> {
    let at = |k: i32| f(lstar * outward.powi(k));
    let mut window = [at(4)?, at(5)?, at(6)?];
    let mut k = 6;
    loop {
        let settled =
            (window[2] - window[1]).abs() < PROBE_TOLERANCE && (window[1] - window[0]).abs() < PROBE_TOLERANCE;
        if settled || k == 16 {
            return Ok((window[2], lstar * outward.powi(k), settled));
        }
        k += 1;
        window = [window[1], window[2], at(k)?];
    }
}

pub fn probe_asymptotes(f: impl Fn(f64) -> Result<f64>, lstar: f64) -> Result<ProbedAsymptotes> {
    let (uv, uv_at, uv_converged) = probe_side(&f, lstar, 0.1)?;
    let (ir, ir_at, ir_converged) = probe_side(&f, lstar, 10.0)?;
    Ok(ProbedAsymptotes {
        uv,
        ir,
        uv_at,
        ir_at,
        uv_converged,
        ir_converged,
    })
}

/// Samples the closed-form flow on a grid.
pub fn spectral_flow(spec: &DiffusionSpec, sigmas: &[f64]) -> Result<SpectralFlow> {
    crate::dispersion::check_grid(sigmas)?;
    let ds = par_map(sigmas, |&s| spectral_dimension(spec, s))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let (uv, ir) = analytic_asymptotes(spec);
    Ok(SpectralFlow {
        sigmas: sigmas.to_vec(),
        ds,
        uv_asymptote: uv,
        ir_asymptote: ir,
        model: spec.model,
    })
}

/// `(d_H, d_S, d_W)` at `σ`, with the Hausdorff dimension taken from the
/// position charges.
pub fn dimension_triple(spec: &DiffusionSpec, sigma: f64) -> Result<DimensionTriple> {
    let d_h = hausdorff_dimension(&spec.charges);
    let d_s = spectral_dimension(spec, sigma)?;
    let d_w = walk_dimension(spec.model, spec.dim, d_h, d_s)?;
    Ok(DimensionTriple {
        d_h,
        d_s,
        d_w,
        model: spec.model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{dispersion_curve, log_grid, Method};
    use crate::measure::ProfileKind;
    use approx::assert_relative_eq;

    fn ones(d: usize) -> FractionalCharges {
        FractionalCharges::isotropic(d, 1.0).unwrap()
    }

    #[test]
    fn from_dispersion_examples() {
        let grid = log_grid(1e-2, 1e2, 41).unwrap();
        let spec = DiffusionSpec::fixed(Model::Weighted, 3, 2.0, 1.0, 1.0).unwrap();
        let c = dispersion_curve(&spec, &grid, Method::ClosedForm).unwrap();
        assert_relative_eq!(spectral_from_dispersion(&c, 3, 1.0).unwrap(), 3.0, max_relative = 1e-12);
        let spec = DiffusionSpec::fixed(Model::Weighted, 2, 1.0, 0.6, 0.8).unwrap();
        let c = dispersion_curve(&spec, &grid, Method::ClosedForm).unwrap();
        assert_relative_eq!(spectral_from_dispersion(&c, 2, 0.37).unwrap(), 2.0 * 1.2, max_relative = 1e-10);
        assert!(matches!(
            spectral_from_dispersion(&c, 2, grid[1]),
            Err(Error::GridEdge { .. })
        ));
        assert!(spectral_from_dispersion(&c, 2, 1e3).is_err());
    }

    #[test]
    fn q_binomial_at_lstar_from_stencil() {
        let spec = DiffusionSpec::binomial(Model::Q, 4, 0.5, 1.0, 1.0, false).unwrap();
        let grid = log_grid(1e-2, 1e2, 201).unwrap();
        let c = dispersion_curve(&spec, &grid, Method::ClosedForm).unwrap();
        let ds = spectral_from_dispersion(&c, 4, 1.0).unwrap();
        assert!((ds - 3.0).abs() < 1e-6);
    }

    #[test]
    fn weighted_flow_examples() {
        let spec = DiffusionSpec::binomial(Model::Weighted, 4, 1.5, 1.0, 1.0, false).unwrap();
        assert!((spectral_weighted_flow(&spec, 1e-6).unwrap() - 4.0).abs() < 0.01);
        // the IR approach is slow, ~ ln(σ)/√σ
        assert!((spectral_weighted_flow(&spec, 1e6).unwrap() - 2.0).abs() < 0.02);
        let p = probe_asymptotes(|s| spectral_weighted_flow(&spec, s), 1.0).unwrap();
        assert!(p.ir_converged && (p.ir - 2.0).abs() < 0.01);
        let fuzzy = DiffusionSpec::binomial(Model::Weighted, 4, 0.5, 1.0, 1.0, true).unwrap();
        let (a, b) = (1e-6, 2e-6);
        let da = spectral_weighted_flow(&fuzzy, a).unwrap();
        let db = spectral_weighted_flow(&fuzzy, b).unwrap();
        assert!(da < 0.05);
        assert!(((db / da).ln() / 2f64.ln() - 1.5).abs() < 0.02);
    }

    #[test]
    fn q_flow_examples() {
        let one = MeasureProfile::single(1.0, 0.5, ProfileKind::DiffusionTime).unwrap();
        assert_eq!(spectral_q_flow(&one, 4, 0.3).unwrap(), 2.0);
        let p = MeasureProfile::binomial(0.5, 1.0, ProfileKind::DiffusionTime).unwrap();
        assert!((spectral_q_flow(&p, 4, 1e-12).unwrap() - 2.0).abs() < 1e-5);
        assert!((spectral_q_flow(&p, 4, 1e12).unwrap() - 4.0).abs() < 1e-5);
        assert_relative_eq!(spectral_q_flow(&p, 4, 1.0).unwrap(), 3.0, max_relative = 1e-15);
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(fixed_point_ds(Model::Weighted, 4, 1.0, 1.0, &ones(4)), 4.0);
        assert_eq!(fixed_point_ds(Model::Weighted, 4, 0.5, 1.0, &ones(4)), 6.0);
        let half = FractionalCharges::isotropic(4, 0.5).unwrap();
        assert_eq!(fixed_point_ds(Model::Q, 4, 0.5, 1.0, &half), hausdorff_dimension(&half));
        assert_eq!(FixedPointCase::OrdinaryDiffusion.ds(4), 4.0);
        assert_eq!(FixedPointCase::TimeCharge { alpha0: 0.5 }.ds(4), 6.0);
        assert_eq!(FixedPointCase::SpaceCharge { alpha: 0.25 }.ds(4), 7.0);
        assert_eq!(FixedPointCase::NoiseCharge { alpha: 0.5 }.ds(4), 2.0);
    }

    #[test]
    fn legacy_examples() {
        assert_eq!(legacy_ds(&ones(4)).value, 4.0);
        assert_eq!(legacy_ds(&FractionalCharges::isotropic(4, 0.5).unwrap()).value, 2.0);
        let v = legacy_ds(&FractionalCharges::isotropic(2, 0.3).unwrap());
        assert_relative_eq!(v.value, 0.6, max_relative = 1e-15);
        assert!(!v.caveat.is_empty());
    }

    #[test]
    fn walk_dimension_examples() {
        assert_eq!(walk_dimension(Model::Q, 4, 2.0, 2.0).unwrap(), 2.0);
        assert_relative_eq!(walk_dimension(Model::Weighted, 4, 4.0, 6.0).unwrap(), 4.0 / 3.0);
        assert_eq!(walk_dimension(Model::Ordinary, 4, 4.0, 4.0).unwrap(), 2.0);
        assert!(walk_dimension(Model::Q, 4, 2.0, 0.0).is_err());
    }

    #[test]
    fn density_of_states_examples() {
        assert_eq!(density_of_states_exponent(2.0), 0.0);
        assert_eq!(density_of_states_exponent(3.0), 0.5);
        assert_eq!(density_of_states_exponent(4.0), 1.0);
    }

    #[test]
    fn probed_asymptotes_match_analytic() {
        let spec = DiffusionSpec::binomial(Model::Weighted, 4, 0.5, 1.0, 1.0, false).unwrap();
        let p = probe_asymptotes(|s| spectral_weighted_flow(&spec, s), 1.0).unwrap();
        let (uv, ir) = analytic_asymptotes(&spec);
        assert!((p.uv - uv).abs() < 0.01 && (p.ir - ir).abs() < 0.01);
        let q = DiffusionSpec::binomial(Model::Q, 4, 0.5, 1.0, 1.0, false).unwrap();
        let p = probe_asymptotes(|s| spectral_dimension(&q, s), 1.0).unwrap();
        assert!(p.ir_converged);
    }
}
