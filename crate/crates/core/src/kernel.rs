//! Diffusion PDFs, their normalization and heat-kernel traces.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dispersion::{check_grid, dispersion, DiffusionSpec, Model, PositionMeasure};
use crate::error::{invalid, Error, Result};
use crate::measure::{fractional_weight, geometric_profile};
use crate::parallel::par_map;
use crate::quad::{integrate_across_origin, QuadOptions};
use crate::specfun::{gamma_fn, kummer_phi, SeriesControl};

#[derive(Debug, Clone, PartialEq)]
pub struct PdfEvaluation {
    pub x: Vec<f64>,
    pub x0: Vec<f64>,
    pub sigma: f64,
    pub density: f64,
    pub model: Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    PerIntegerVolume,
    Hausdorff,
    /// Regularized power law with the divergent constant set to one.
    Symbolic,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::PerIntegerVolume => "per-integer-volume",
            Convention::Hausdorff => "hausdorff",
            Convention::Symbolic => "symbolic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernelCurve {
    pub sigmas: Vec<f64>,
    pub z: Vec<f64>,
    pub convention: Convention,
    /// False when the large-σ slope is a finite-box artefact.
    pub ir_physical: bool,
}

fn check_points(x: &[f64], x0: &[f64], dim: usize) -> Result<()> {
    if x.len() != dim || x0.len() != dim {
        return Err(invalid("x", x.len() as f64, "point dimension does not match the DiffusionSpec"));
    }
    Ok(())
}

fn squared_distance(x: &[f64], x0: &[f64]) -> f64 {
    x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `exp(-|x-x0|²/(4ℓ²)) / (4πℓ²)^{D/2}`.
pub fn gaussian_pdf(x: &[f64], x0: &[f64], ell2: f64, dim: usize) -> Result<f64> {
    check_points(x, x0, dim)?;
    if !(ell2 > 0.0) {
        return Err(invalid("ell2", ell2, "dispersion must be positive"));
    }
    let r2 = squared_distance(x, x0);
    Ok((-r2 / (4.0 * ell2)).exp() / (4.0 * PI * ell2).powf(0.5 * dim as f64))
}

/// Coordinate weight `v_μ(x)` of the DiffusionSpec position measure.
pub fn coordinate_weight(spec: &DiffusionSpec, mu: usize, x: f64) -> Result<f64> {
    let alpha = spec.charges.alphas()[mu];
    match spec.position {
        PositionMeasure::Fractional => fractional_weight(x, alpha),
        PositionMeasure::Binomial => {
            let l = spec.scales.lstar;
            Ok(1.0 + l.powf(1.0 - alpha) * fractional_weight(x, alpha)?)
        }
    }
}

/// Factorized position weight `v(x) = Π_μ v_μ(x^μ)`.
pub fn position_weight(spec: &DiffusionSpec, x: &[f64]) -> Result<f64> {
    let mut v = 1.0;
    for (mu, &xm) in x.iter().enumerate() {
        v *= coordinate_weight(spec, mu, xm)?;
    }
    Ok(v)
}

/// Geometric coordinate `q_μ(x)` with `dq_μ/dx = v_μ`.
pub fn coordinate_profile(spec: &DiffusionSpec, mu: usize, x: f64) -> Result<f64> {
    let alpha = spec.charges.alphas()[mu];
    match spec.position {
        PositionMeasure::Fractional => geometric_profile(x, alpha),
        PositionMeasure::Binomial => {
            let l = spec.scales.lstar;
            Ok(x + l.powf(1.0 - alpha) * geometric_profile(x, alpha)?)
        }
    }
}

fn positive_dispersion(spec: &DiffusionSpec, sigma: f64) -> Result<f64> {
    let ell2 = dispersion(spec, sigma)?;
    if !(ell2 > 0.0) {
        return Err(Error::NegativeDispersion { sigma, value: ell2 });
    }
    Ok(ell2)
}

/// Weighted-Laplacian PDF `u(x)/v(x)` with `u` Gaussian.
pub fn weighted_pdf(x: &[f64], x0: &[f64], sigma: f64, spec: &DiffusionSpec) -> Result<f64> {
    check_points(x, x0, spec.dim)?;
    let ell2 = positive_dispersion(spec, sigma)?;
    Ok(gaussian_pdf(x, x0, ell2, spec.dim)? / position_weight(spec, x)?)
}

/// `∫ dx |x|^{α-1}/Γ(α) exp(-(x-x0)²/(4ℓ²)) = Γ(α/2)/Γ(α) (2ℓ)^α Φ((1-α)/2; 1/2; -x0²/(4ℓ²))`.
fn fractional_gaussian_mass(alpha: f64, x0: f64, ell: f64) -> Result<f64> {
    let phi = kummer_phi(
        0.5 * (1.0 - alpha),
        0.5,
        -x0 * x0 / (4.0 * ell * ell),
        &SeriesControl::default(),
    )?;
    Ok(gamma_fn(0.5 * alpha)? / gamma_fn(alpha)? * (2.0 * ell).powf(alpha) * phi)
}

/// Per-coordinate `∫ v_μ(x) exp(-(x-x0)²/(4ℓ²)) dx`.
fn coordinate_mass(spec: &DiffusionSpec, mu: usize, x0: f64, ell: f64) -> Result<f64> {
    let alpha = spec.charges.alphas()[mu];
    let frac = fractional_gaussian_mass(alpha, x0, ell)?;
    Ok(match spec.position {
        PositionMeasure::Fractional => frac,
        PositionMeasure::Binomial => {
            (4.0 * PI).sqrt() * ell + spec.scales.lstar.powf(1.0 - alpha) * frac
        }
    })
}

/// `C(x0, σ)` normalizing `C exp(-|x-x0|²/(4ℓ²))` against `v(x) d^Dx`.
///
/// Both measures are factorizable, so `C^{-1}` is the exact product of the
/// one-dimensional Kummer-function masses.
pub fn ordinary_normalization(x0: &[f64], sigma: f64, spec: &DiffusionSpec) -> Result<f64> {
    if x0.len() != spec.dim {
        return Err(invalid("x0", x0.len() as f64, "point dimension does not match the DiffusionSpec"));
    }
    let ell = positive_dispersion(spec, sigma)?.sqrt();
    let mut inv = 1.0;
    for (mu, &x) in x0.iter().enumerate() {
        inv *= coordinate_mass(spec, mu, x, ell)?;
    }
    Ok(1.0 / inv)
}

/// The binomial normalization with the mixed products dropped:
/// `{(4πℓ²)^{D/2} + ℓ*^{D(1-α)} [Γ(α/2)/Γ(α) (2ℓ)^α]^D Π Φ}^{-1}` (isotropic α).
/// Equals [`ordinary_normalization`] for `D = 1`.
pub fn ordinary_normalization_two_term(x0: &[f64], sigma: f64, spec: &DiffusionSpec) -> Result<f64> {
    if x0.len() != spec.dim {
        return Err(invalid("x0", x0.len() as f64, "point dimension does not match the DiffusionSpec"));
    }
    let alpha = spec.charges.alphas()[0];
    if spec.charges.alphas().iter().any(|&a| a != alpha) {
        return Err(invalid("alpha", alpha, "the two-term form needs isotropic charges"));
    }
    let d = spec.dim as f64;
    let ell2 = positive_dispersion(spec, sigma)?;
    let ell = ell2.sqrt();
    let mut prod = 1.0;
    for &x in x0 {
        prod *= fractional_gaussian_mass(alpha, x, ell)?;
    }
    let star = spec.scales.lstar.powf(d * (1.0 - alpha));
    Ok(1.0 / ((4.0 * PI * ell2).powf(0.5 * d) + star * prod))
}

/// Ordinary-Laplacian PDF `C(x0,σ) exp(-|x-x0|²/(4ℓ²))`.
pub fn ordinary_pdf(x: &[f64], x0: &[f64], sigma: f64, spec: &DiffusionSpec) -> Result<f64> {
    check_points(x, x0, spec.dim)?;
    let ell2 = positive_dispersion(spec, sigma)?;
    let c = ordinary_normalization(x0, sigma, spec)?;
    Ok(c * (-squared_distance(x, x0) / (4.0 * ell2)).exp())
}

/// `q`-Laplacian PDF: Gaussian in the geometric coordinates.
pub fn q_pdf(x: &[f64], x0: &[f64], sigma: f64, spec: &DiffusionSpec) -> Result<f64> {
    check_points(x, x0, spec.dim)?;
    let ell2 = positive_dispersion(spec, sigma)?;
    let mut p = 1.0;
    for mu in 0..spec.dim {
        let dq = coordinate_profile(spec, mu, x[mu])? - coordinate_profile(spec, mu, x0[mu])?;
        p *= (-dq * dq / (4.0 * ell2)).exp() / (4.0 * PI * ell2).sqrt();
    }
    Ok(p)
}

/// Model-dispatched PDF.
pub fn pdf(x: &[f64], x0: &[f64], sigma: f64, spec: &DiffusionSpec) -> Result<PdfEvaluation> {
    let density = match spec.model {
        Model::Weighted => weighted_pdf(x, x0, sigma, spec)?,
        Model::Ordinary => ordinary_pdf(x, x0, sigma, spec)?,
        Model::Q => q_pdf(x, x0, sigma, spec)?,
        Model::Legacy => {
            return Err(invalid("model", 0.0, "the legacy model has no normalizable PDF"))
        }
    };
    Ok(PdfEvaluation {
        x: x.to_vec(),
        x0: x0.to_vec(),
        sigma,
        density,
        model: spec.model,
    })
}

/// Gaussian weight remaining outside a box of half-width `l` relative to
/// the kernel width; the trace is rejected above this.
pub const BOX_TAIL_LIMIT: f64 = 1e-4;

/// Default quadrature half-width `max(12ℓ, 10ℓ*)`.
pub fn default_box(spec: &DiffusionSpec, sigma: f64) -> Result<f64> {
    Ok((12.0 * positive_dispersion(spec, sigma)?.sqrt()).max(10.0 * spec.scales.lstar))
}

/// One-dimensional `∫_{-L}^{L} v_μ(x) C_μ(x,σ) dx`.
fn coordinate_trace(spec: &DiffusionSpec, mu: usize, ell: f64, half: f64) -> Result<f64> {
    let alpha = spec.charges.alphas()[mu];
    let failure = std::cell::Cell::new(None);
    let integrand = |x: f64| {
        let r = coordinate_weight(spec, mu, x)
            .and_then(|v| coordinate_mass(spec, mu, x, ell).map(|m| v / m));
        r.unwrap_or_else(|e| {
            failure.set(Some(e));
            f64::NAN
        })
    };
    let opts = QuadOptions::default().with_rel_tol(1e-11);
    let v = integrate_across_origin(integrand, -half, half, alpha, &opts);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    v
}

/// Ordinary-model trace per integer volume over the box `[-L, L]^D`,
/// without the box-size check.
pub fn box_trace(spec: &DiffusionSpec, sigma: f64, half_width: f64) -> Result<f64> {
    if !(half_width > 0.0) {
        return Err(invalid("box_halfwidth", half_width, "must be positive"));
    }
    let ell = positive_dispersion(spec, sigma)?.sqrt();
    let mut z = 1.0;
    let mut cache: Vec<(f64, f64)> = Vec::new();
    for mu in 0..spec.dim {
        let alpha = spec.charges.alphas()[mu];
        let factor = match cache.iter().find(|(a, _)| *a == alpha) {
            Some(&(_, f)) => f,
            None => {
                let f = coordinate_trace(spec, mu, ell, half_width)? / (2.0 * half_width);
                cache.push((alpha, f));
                f
            }
        };
        z *= factor;
    }
    Ok(z)
}

/// Return probability `Z(σ)` and its volume convention.
///
/// * weighted: `(4πℓ²)^{-D/2}` per integer volume;
/// * ordinary: quadrature of `v(x) C(x,σ)` over the box, per integer volume;
/// * q: `Π (4πℓ²)^{-1/2}` per Hausdorff volume;
/// * legacy: `ℓ^{-Dα}` with `ℓ² = κσ`.
pub fn return_probability(
    spec: &DiffusionSpec,
    sigma: f64,
    box_halfwidth: Option<f64>,
) -> Result<(f64, Convention)> {
    let d = spec.dim as f64;
    match spec.model {
        Model::Weighted => {
            let ell2 = positive_dispersion(spec, sigma)?;
            Ok(((4.0 * PI * ell2).powf(-0.5 * d), Convention::PerIntegerVolume))
        }
        Model::Q => {
            let ell2 = positive_dispersion(spec, sigma)?;
            Ok(((4.0 * PI * ell2).powf(-0.5 * d), Convention::Hausdorff))
        }
        Model::Legacy => {
            let ell2 = positive_dispersion(spec, sigma)?;
            let exponent = d * spec.charges.average();
            Ok((ell2.powf(-0.5 * exponent), Convention::Symbolic))
        }
        Model::Ordinary => {
            let half = match box_halfwidth {
                Some(l) => l,
                None => default_box(spec, sigma)?,
            };
            let ell = positive_dispersion(spec, sigma)?.sqrt();
            let tail = (-(half / (2.0 * ell)).powi(2)).exp();
            if tail > BOX_TAIL_LIMIT {
                return Err(Error::BoxTooSmall {
                    boundary: tail,
                    limit: BOX_TAIL_LIMIT,
                });
            }
            Ok((box_trace(spec, sigma, half)?, Convention::PerIntegerVolume))
        }
    }
}

/// How the quadrature box follows `σ` along a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoxChoice {
    /// `max(12ℓ(σ), 10ℓ*)` at each point.
    Default,
    Fixed(f64),
}

pub fn heat_kernel_curve(spec: &DiffusionSpec, sigmas: &[f64], choice: BoxChoice) -> Result<HeatKernelCurve> {
    check_grid(sigmas)?;
    let box_of = |_: f64| match choice {
        BoxChoice::Default => None,
        BoxChoice::Fixed(l) => Some(l),
    };
    let values = par_map(sigmas, |&s| return_probability(spec, s, box_of(s)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let convention = values[0].1;
    let ir_physical = !(spec.model == Model::Ordinary && spec.multiscale.is_none());
    Ok(HeatKernelCurve {
        sigmas: sigmas.to_vec(),
        z: values.into_iter().map(|(z, _)| z).collect(),
        convention,
        ir_physical,
    })
}

/// Where to read `d_S = -2 d ln Z/d ln σ` off a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelProbe {
    At(f64),
    /// Smallest σ with a full stencil.
    UvLimit,
    /// Largest σ with a full stencil.
    IrLimit,
}

pub fn ds_from_kernel(curve: &HeatKernelCurve, probe: KernelProbe) -> Result<f64> {
    let n = curve.sigmas.len();
    let slope = match probe {
        KernelProbe::At(s) => crate::spectral::log_slope(&curve.sigmas, &curve.z, s)?,
        KernelProbe::UvLimit => crate::spectral::log_slope_at(&curve.sigmas, &curve.z, 2)?,
        KernelProbe::IrLimit => {
            if n < 5 {
                return Err(Error::GridEdge { sigma: curve.sigmas[n - 1] });
            }
            crate::spectral::log_slope_at(&curve.sigmas, &curve.z, n - 3)?
        }
    };
    Ok(-2.0 * slope)
}
