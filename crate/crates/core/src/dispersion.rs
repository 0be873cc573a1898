//! Dispersion laws `ℓ²(σ)` for the four Laplacian models.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measure::{FractionalCharges, GeometryScales, MeasureProfile, ProfileKind, Term};
use crate::parallel::par_map;
use crate::quad::{integrate_from_origin, QuadOptions};
use crate::specfun::{gamma_fn, gauss_2f1, sin_pi, SeriesControl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Weighted,
    Ordinary,
    Q,
    Legacy,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Weighted => "weighted",
            Model::Ordinary => "ordinary",
            Model::Q => "q",
            Model::Legacy => "legacy",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted" => Ok(Model::Weighted),
            "ordinary" => Ok(Model::Ordinary),
            "q" => Ok(Model::Q),
            "legacy" => Ok(Model::Legacy),
            _ => Err(Error::Domain {
                function: "Model::from_str",
                detail: format!("unknown model '{s}'"),
            }),
        }
    }
}

/// Position-space weight per coordinate: `v_α(x)` or `1 + ℓ*^{1-α} v_α(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositionMeasure {
    Fractional,
    Binomial,
}

/// Half-width of the excluded band around `β* = 1`.
pub const BETA_STAR_EXCLUSION: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    pub model: Model,
    pub dim: usize,
    pub scales: GeometryScales,
    /// Diffusion-time profile; `None` means fixed dimensionality.
    pub multiscale: Option<MeasureProfile>,
    pub charges: FractionalCharges,
    pub position: PositionMeasure,
    pub fuzzy: bool,
}

impl DiffusionSpec {
    /// Fixed dimensionality with trivial position measure.
    pub fn fixed(model: Model, dim: usize, kappa: f64, beta: f64, nu: f64) -> Result<Self> {
        let spec = Self {
            model,
            dim,
            scales: GeometryScales::new(1.0, 0.0, kappa, nu, beta)?,
            multiscale: None,
            charges: FractionalCharges::isotropic(dim.max(1), 1.0)?,
            position: PositionMeasure::Fractional,
            fuzzy: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Binomial diffusion-time measure with `ν = 1`.
    pub fn binomial(
        model: Model,
        dim: usize,
        beta_star: f64,
        lstar: f64,
        kappa: f64,
        fuzzy: bool,
    ) -> Result<Self> {
        let lbar = if fuzzy { lstar } else { 0.0 };
        let spec = Self {
            model,
            dim,
            scales: GeometryScales::new(lstar, lbar, kappa, 1.0, beta_star)?,
            multiscale: Some(MeasureProfile::binomial(
                beta_star,
                lstar,
                ProfileKind::DiffusionTime,
            )?),
            charges: FractionalCharges::isotropic(dim.max(1), 1.0)?,
            position: PositionMeasure::Fractional,
            fuzzy,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_charges(mut self, charges: FractionalCharges, position: PositionMeasure) -> Result<Self> {
        self.charges = charges;
        self.position = position;
        self.validate()?;
        Ok(self)
    }

    pub fn beta_star(&self) -> Option<f64> {
        self.multiscale.as_ref().and_then(|p| p.binomial_charge())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(invalid("dim", 0.0, "dimension must be at least 1"));
        }
        if self.charges.dim() != self.dim {
            return Err(invalid(
                "alpha",
                self.charges.dim() as f64,
                "one fractional charge per direction is required",
            ));
        }
        let s = &self.scales;
        GeometryScales::new(s.lstar, s.lbar, s.kappa, s.nu, s.beta)?;
        match &self.multiscale {
            None => {
                if self.fuzzy {
                    return Err(invalid(
                        "fuzzy",
                        1.0,
                        "the fuzzy scenario needs a binomial profile with beta* in (0,1)",
                    ));
                }
                if !(s.beta > 0.0 && s.beta < 2.0) {
                    return Err(invalid("beta", s.beta, "beta must lie in (0, 2)"));
                }
            }
            Some(p) => {
                if p.kind() != ProfileKind::DiffusionTime {
                    return Err(invalid(
                        "multiscale",
                        0.0,
                        "the diffusion-time profile must have diffusion-time kind",
                    ));
                }
                let star = self.beta_star();
                match self.model {
                    Model::Q => {
                        if let Some(b) = star {
                            if !(b > 0.0 && b < 1.0) {
                                return Err(invalid("beta_star", b, "the q model needs beta* in (0, 1)"));
                            }
                        }
                    }
                    Model::Weighted | Model::Ordinary => {
                        let b = star.ok_or_else(|| {
                            invalid("multiscale", 0.0, "a binomial profile is required")
                        })?;
                        if (b - 1.0).abs() < BETA_STAR_EXCLUSION {
                            return Err(invalid(
                                "beta_star",
                                b,
                                "beta* within 1e-4 of 1 is outside the validated range",
                            ));
                        }
                        if s.nu != 1.0 {
                            return Err(invalid("nu", s.nu, "multiscale dispersion fixes nu = 1"));
                        }
                    }
                    Model::Legacy => {
                        return Err(invalid(
                            "multiscale",
                            0.0,
                            "the legacy model has no multiscale form",
                        ))
                    }
                }
                if self.fuzzy {
                    let ok = self.model == Model::Weighted && matches!(star, Some(b) if b > 0.0 && b < 1.0);
                    if !ok {
                        return Err(invalid(
                            "fuzzy",
                            1.0,
                            "the fuzzy scenario is only defined for the weighted model with beta* in (0,1)",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Squared initial spread `ℓ̄²`: `ℓ*²` in the fuzzy scenario, else 0.
    pub fn lbar2(&self) -> f64 {
        self.scales.lbar * self.scales.lbar
    }
}

/// A diffusion-time weight `v(σ)` with known behaviour `σ^{c-1}` at the origin.
pub trait TimeWeight: Sync {
    fn value(&self, sigma: f64) -> Result<f64>;
    /// Smallest effective charge `c` such that `v(σ) ~ σ^{c-1}` as `σ → 0`.
    fn origin_charge(&self) -> f64;
}

impl TimeWeight for MeasureProfile {
    fn value(&self, sigma: f64) -> Result<f64> {
        self.weight(sigma)
    }
    fn origin_charge(&self) -> f64 {
        self.min_charge()
    }
}

/// Closure-backed weight.
pub struct FnWeight<F> {
    f: F,
    charge: f64,
}

impl<F: Fn(f64) -> f64 + Sync> FnWeight<F> {
    pub fn with_charge(f: F, charge: f64) -> Self {
        Self { f, charge }
    }

    /// Estimates the origin charge from the log-slope of `v` near zero.
    pub fn new(f: F) -> Self {
        let (s1, s2) = (1e-12, 1e-10);
        let slope = ((f(s2)).ln() - (f(s1)).ln()) / (s2 / s1).ln();
        let charge = if slope.is_finite() { 1.0 + slope } else { 1.0 };
        Self { f, charge }
    }
}

impl<F: Fn(f64) -> f64 + Sync> TimeWeight for FnWeight<F> {
    fn value(&self, sigma: f64) -> Result<f64> {
        let v = (self.f)(sigma);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::SingularPoint { at: sigma })
        }
    }
    fn origin_charge(&self) -> f64 {
        self.charge
    }
}

/// `σ^{β-1}/Γ(β)` as a single-term diffusion-time profile.
pub fn fractional_time_weight(beta: f64) -> Result<MeasureProfile> {
    MeasureProfile::new(
        vec![Term {
            g: 1.0 / gamma_fn(beta)?,
            charge: beta,
        }],
        ProfileKind::DiffusionTime,
    )
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(invalid("sigma", sigma, "diffusion time must be positive"))
    }
}

/// `κ Γ(β) σ^{1+ν-β}/(1+ν-β)`.
pub fn dispersion_fractional(spec: &DiffusionSpec, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let s = &spec.scales;
    let e = 1.0 + s.nu - s.beta;
    if !(e > 0.0) {
        return Err(Error::NonIntegrable { exponent: e });
    }
    Ok(s.kappa * gamma_fn(s.beta)? * sigma.powf(e) / e)
}

/// `∫_0^s dt/(1+t^p)` for `p ∈ (-1, 1) \ {0}`.
///
/// For `p < 0` and `s < 1` the continued hypergeometric form is used with its
/// `Γ(b+1)Γ(1-b)` term dropped, which is exactly what the delta-function
/// initial condition removes; for `s ≥ 1` the complementary integrand
/// `1/(1+t^{-p})` is used instead.
pub fn binomial_integral(p: f64, s: f64) -> Result<f64> {
    let ctl = SeriesControl::default();
    let b = 1.0 / p;
    if p > 0.0 {
        Ok(s * gauss_2f1(1.0, b, b + 1.0, -s.powf(p), &ctl)?)
    } else if s < 1.0 {
        let w = 1.0 / (1.0 + s.powf(p));
        Ok(s * b / (b - 1.0) * w * gauss_2f1(1.0, 1.0, 2.0 - b, w, &ctl)?)
    } else {
        let nb = -b;
        Ok(s - s * gauss_2f1(1.0, nb, nb + 1.0, -s.powf(-p), &ctl)?)
    }
}

/// `ℓ̄² + κσ F[1, 1/(β*-1); β*/(β*-1); -(σ/ℓ*)^{β*-1}]` with the delta-function
/// selection of the constant, plus `ℓ*²` in the fuzzy scenario.
pub fn dispersion_multiscale_weighted(spec: &DiffusionSpec, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let beta_star = spec
        .beta_star()
        .ok_or_else(|| invalid("multiscale", 0.0, "a binomial profile is required"))?;
    if (beta_star - 1.0).abs() < BETA_STAR_EXCLUSION {
        return Err(invalid(
            "beta_star",
            beta_star,
            "beta* within 1e-4 of 1 is outside the validated range",
        ));
    }
    if spec.scales.nu != 1.0 {
        return Err(invalid("nu", spec.scales.nu, "multiscale dispersion fixes nu = 1"));
    }
    let (kappa, lstar) = (spec.scales.kappa, spec.scales.lstar);
    let j = binomial_integral(beta_star - 1.0, sigma / lstar)?;
    Ok(spec.lbar2() + kappa * lstar * j)
}

/// The additive constant of the hypergeometric form that makes `ℓ²(0) = 0`:
/// zero for `β* > 1`, `-κℓ* bπ/sin(bπ)` with `b = 1/(β*-1)` otherwise.
pub fn delta_selection_lbar2(beta_star: f64, kappa: f64, lstar: f64) -> f64 {
    if beta_star > 1.0 {
        0.0
    } else {
        let b = 1.0 / (beta_star - 1.0);
        -kappa * lstar * std::f64::consts::PI * b / sin_pi(b)
    }
}

/// `κ Σ g_n σ^{β_n}`.
pub fn dispersion_q(profile: &MeasureProfile, kappa: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(kappa
        * profile
            .terms()
            .iter()
            .map(|t| t.g * sigma.powf(t.charge))
            .sum::<f64>())
}

/// `ℓ̄² + κ ∫_0^σ σ'^{ν-1}/v(σ') dσ'`.
pub fn dispersion_quadrature(
    weight: &dyn TimeWeight,
    kappa: f64,
    nu: f64,
    sigma: f64,
    lbar2: f64,
) -> Result<f64> {
    check_sigma(sigma)?;
    let gamma = 1.0 + nu - weight.origin_charge();
    if !(gamma > 0.0) {
        return Err(Error::NonIntegrable { exponent: gamma });
    }
    let opts = QuadOptions::default().with_rel_tol(1e-11);
    let failure = std::cell::Cell::new(None);
    let integrand = |s: f64| match weight.value(s) {
        Ok(v) => s.powf(nu - 1.0) / v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let value = integrate_from_origin(integrand, gamma, sigma, &opts);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(lbar2 + kappa * value?)
}

/// Effective time `T = ∫_0^t dt'/v₀(t')`.
pub fn qm_time(weight_v0: &dyn TimeWeight, t: f64) -> Result<f64> {
    dispersion_quadrature(weight_v0, 1.0, 1.0, t, 0.0)
}

/// Closed-form `ℓ²(σ)` for any model.
pub fn dispersion(spec: &DiffusionSpec, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let s = &spec.scales;
    match (spec.model, &spec.multiscale) {
        (Model::Legacy, _) => Ok(s.kappa * sigma),
        (Model::Q, Some(p)) => dispersion_q(p, s.kappa, sigma),
        (Model::Q, None) => Ok(s.kappa * sigma.powf(s.beta)),
        (_, Some(_)) => dispersion_multiscale_weighted(spec, sigma),
        (_, None) => dispersion_fractional(spec, sigma),
    }
}

/// `ℓ²(σ)` from quadrature of the model's defining integral.
pub fn dispersion_by_quadrature(spec: &DiffusionSpec, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let s = &spec.scales;
    match (spec.model, &spec.multiscale) {
        (Model::Legacy, _) => dispersion_quadrature(&trivial_weight(), s.kappa, 1.0, sigma, 0.0),
        (Model::Q, profile) => {
            let single;
            let p = match profile {
                Some(p) => p,
                None => {
                    single = MeasureProfile::single(1.0, s.beta, ProfileKind::DiffusionTime)?;
                    &single
                }
            };
            // d/dσ Σ g σ^β = Σ g β σ^{β-1}
            let rate = p.terms().iter().map(|t| Term { g: t.g * t.charge, charge: t.charge });
            let terms: Vec<Term> = rate.collect();
            let deriv = MeasureProfile::new(terms, ProfileKind::DiffusionTime)?;
            let w = FnWeight::with_charge(
                |x: f64| 1.0 / deriv.weight(x).unwrap_or(f64::NAN),
                2.0 - deriv.min_charge(),
            );
            dispersion_quadrature(&w, s.kappa, 1.0, sigma, 0.0)
        }
        (_, Some(p)) => dispersion_quadrature(p, s.kappa, s.nu, sigma, spec.lbar2()),
        (_, None) => {
            let w = fractional_time_weight(s.beta)?;
            dispersion_quadrature(&w, s.kappa, s.nu, sigma, 0.0)
        }
    }
}

fn trivial_weight() -> MeasureProfile {
    MeasureProfile::single(1.0, 1.0, ProfileKind::DiffusionTime).expect("valid profile")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    pub sigmas: Vec<f64>,
    pub ell2: Vec<f64>,
    pub method: Method,
    pub spec: DiffusionSpec,
}

pub(crate) fn check_grid(sigmas: &[f64]) -> Result<()> {
    if sigmas.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if !(sigmas[0] > 0.0) {
        return Err(Error::InvalidGrid("grid must start after 0".into()));
    }
    if sigmas.windows(2).any(|w| !(w[1] > w[0])) || sigmas.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidGrid("grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Samples `ℓ²` on a grid (grid-parallel) and checks `ℓ² ≥ 0`.
pub fn dispersion_curve(spec: &DiffusionSpec, sigmas: &[f64], method: Method) -> Result<DispersionCurve> {
    check_grid(sigmas)?;
    let values = par_map(sigmas, |&s| match method {
        Method::ClosedForm => dispersion(spec, s),
        Method::Quadrature => dispersion_by_quadrature(spec, s),
    });
    let ell2 = values.into_iter().collect::<Result<Vec<f64>>>()?;
    if let Some((i, &v)) = ell2.iter().enumerate().find(|(_, &v)| !(v >= 0.0)) {
        return Err(Error::NegativeDispersion {
            sigma: sigmas[i],
            value: v,
        });
    }
    Ok(DispersionCurve {
        sigmas: sigmas.to_vec(),
        ell2,
        method,
        spec: spec.clone(),
    })
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::InvalidGrid(format!(
            "log grid needs 0 < lo < hi and at least 2 points (got {lo}, {hi}, {n})"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    g[0] = lo;
    g[n - 1] = hi;
    Ok(g)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(hi > lo) || n < 2 {
        return Err(Error::InvalidGrid(format!(
            "linear grid needs lo < hi and at least 2 points (got {lo}, {hi}, {n})"
        )));
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}
