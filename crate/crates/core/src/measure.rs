//! Measure weights, geometric coordinates and the associated dimensions.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::specfun::gamma_fn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Position,
    DiffusionTime,
}

/// A sum of power-law terms `g_n |x|^{charge_n - 1}` (with `1/Γ(charge_n)`
/// for the position kind). Charges are kept strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureProfile {
    terms: Vec<Term>,
    kind: ProfileKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub g: f64,
    pub charge: f64,
}

impl MeasureProfile {
    pub fn new(terms: Vec<Term>, kind: ProfileKind) -> Result<Self> {
        if terms.is_empty() {
            return Err(invalid("terms", 0.0, "a profile needs at least one term"));
        }
        for t in &terms {
            if !(t.g >= 0.0) || !t.g.is_finite() {
                return Err(invalid("g", t.g, "coefficients must be finite and non-negative"));
            }
            if !(t.charge > 0.0 && t.charge < 2.0) {
                return Err(invalid("charge", t.charge, "charges must lie in (0, 2)"));
            }
        }
        if terms.windows(2).any(|w| w[1].charge <= w[0].charge) {
            return Err(invalid(
                "charge",
                terms[0].charge,
                "charges must be strictly increasing",
            ));
        }
        Ok(Self { terms, kind })
    }

    pub fn single(g: f64, charge: f64, kind: ProfileKind) -> Result<Self> {
        Self::new(vec![Term { g, charge }], kind)
    }

    /// Two terms, charges `(charge_star, 1)` with coefficients `(ℓ*^{1-charge_star}, 1)`.
    pub fn binomial(charge_star: f64, lstar: f64, kind: ProfileKind) -> Result<Self> {
        if !(lstar > 0.0) || !lstar.is_finite() {
            return Err(invalid("lstar", lstar, "must be positive"));
        }
        if charge_star == 1.0 {
            return Err(invalid(
                "charge_star",
                charge_star,
                "a binomial profile needs a charge different from 1",
            ));
        }
        let star = Term {
            g: lstar.powf(1.0 - charge_star),
            charge: charge_star,
        };
        let unit = Term { g: 1.0, charge: 1.0 };
        let terms = if charge_star < 1.0 {
            vec![star, unit]
        } else {
            vec![unit, star]
        };
        Self::new(terms, kind)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn min_charge(&self) -> f64 {
        self.terms[0].charge
    }

    pub fn max_charge(&self) -> f64 {
        self.terms[self.terms.len() - 1].charge
    }

    /// The non-unit charge of a binomial profile.
    pub fn binomial_charge(&self) -> Option<f64> {
        if self.terms.len() != 2 {
            return None;
        }
        let (unit, star) = if self.terms[0].charge == 1.0 {
            (self.terms[0], self.terms[1])
        } else if self.terms[1].charge == 1.0 {
            (self.terms[1], self.terms[0])
        } else {
            return None;
        };
        (unit.g == 1.0).then_some(star.charge)
    }

    /// `ℓ*` of a binomial profile, recovered from its coefficient.
    pub fn binomial_scale(&self) -> Option<f64> {
        let c = self.binomial_charge()?;
        let g = self.terms.iter().find(|t| t.charge == c)?.g;
        Some(g.powf(1.0 / (1.0 - c)))
    }

    /// `v(x)`; see [`multiscale_weight`].
    pub fn weight(&self, x: f64) -> Result<f64> {
        multiscale_weight(x, self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalCharges {
    alphas: Vec<f64>,
}

impl FractionalCharges {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(invalid("dim", 0.0, "dimension must be at least 1"));
        }
        for &a in &alphas {
            if !(a > 0.0 && a <= 1.0) {
                return Err(invalid("alpha", a, "fractional charges must lie in (0, 1]"));
            }
        }
        Ok(Self { alphas })
    }

    pub fn isotropic(dim: usize, alpha: f64) -> Result<Self> {
        Self::new(vec![alpha; dim])
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    /// Mean charge; exactly the common value when the charges are isotropic.
    pub fn average(&self) -> f64 {
        let first = self.alphas[0];
        if self.alphas.iter().all(|&a| a == first) {
            return first;
        }
        self.alphas.iter().sum::<f64>() / self.alphas.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryScales {
    pub lstar: f64,
    pub lbar: f64,
    pub kappa: f64,
    pub nu: f64,
    pub beta: f64,
}

impl GeometryScales {
    pub fn new(lstar: f64, lbar: f64, kappa: f64, nu: f64, beta: f64) -> Result<Self> {
        if !(lstar > 0.0) || !lstar.is_finite() {
            return Err(invalid("lstar", lstar, "must be positive"));
        }
        if !(lbar >= 0.0) || !lbar.is_finite() {
            return Err(invalid("lbar", lbar, "must be non-negative"));
        }
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(invalid("kappa", kappa, "must be positive"));
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(invalid("nu", nu, "must be positive"));
        }
        if !beta.is_finite() {
            return Err(invalid("beta", beta, "must be finite"));
        }
        Ok(Self {
            lstar,
            lbar,
            kappa,
            nu,
            beta,
        })
    }
}

impl Default for GeometryScales {
    fn default() -> Self {
        Self {
            lstar: 1.0,
            lbar: 0.0,
            kappa: 1.0,
            nu: 1.0,
            beta: 1.0,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", alpha, "fractional charges must lie in (0, 1]"))
    }
}

/// `|x|^{α-1}/Γ(α)`.
pub fn fractional_weight(x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(1.0);
    }
    if x == 0.0 {
        return Err(Error::SingularPoint { at: x });
    }
    Ok(x.abs().powf(alpha - 1.0) / gamma_fn(alpha)?)
}

/// Position kind: `Σ g_n |x|^{β_n-1}/Γ(β_n)`; diffusion-time kind:
/// `Σ g_n x^{β_n-1}` on `x > 0`.
pub fn multiscale_weight(x: f64, profile: &MeasureProfile) -> Result<f64> {
    let singular = profile.min_charge() < 1.0;
    match profile.kind {
        ProfileKind::Position => {
            if x == 0.0 && singular {
                return Err(Error::SingularPoint { at: x });
            }
            let ax = x.abs();
            let mut v = 0.0;
            for t in &profile.terms {
                v += if t.charge == 1.0 {
                    t.g
                } else {
                    t.g * ax.powf(t.charge - 1.0) / gamma_fn(t.charge)?
                };
            }
            Ok(v)
        }
        ProfileKind::DiffusionTime => {
            if x < 0.0 {
                return Err(Error::Domain {
                    function: "multiscale_weight",
                    detail: format!("diffusion time {x} must be non-negative"),
                });
            }
            if x == 0.0 && singular {
                return Err(Error::SingularPoint { at: x });
            }
            Ok(profile
                .terms
                .iter()
                .map(|t| {
                    if t.charge == 1.0 {
                        t.g
                    } else {
                        t.g * x.powf(t.charge - 1.0)
                    }
                })
                .sum())
        }
    }
}

/// `sgn(x)|x|^α/Γ(α+1)`.
pub fn geometric_profile(x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(x);
    }
    Ok(x.signum() * x.abs().powf(alpha) / gamma_fn(alpha + 1.0)?)
}

/// Inverse of [`geometric_profile`]: `sgn(q)[Γ(α+1)|q|]^{1/α}`.
pub fn geometric_profile_inverse(q: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(q);
    }
    Ok(q.signum() * (gamma_fn(alpha + 1.0)? * q.abs()).powf(1.0 / alpha))
}

/// `Σ g_n sgn(x)|x|^{α_n}`; Γ factors are part of the coefficients.
pub fn multiscale_profile(x: f64, profile: &MeasureProfile) -> f64 {
    let ax = x.abs();
    let s: f64 = profile
        .terms
        .iter()
        .map(|t| t.g * ax.powf(t.charge))
        .sum();
    if x < 0.0 {
        -s
    } else {
        s
    }
}

pub fn hausdorff_dimension(charges: &FractionalCharges) -> f64 {
    charges.alphas.iter().sum()
}

/// Volume of the ordinary unit `D`-ball.
pub fn unit_ball_volume(dim: usize) -> f64 {
    let d = dim as f64;
    PI.powf(0.5 * d) / gamma_fn(0.5 * d + 1.0).expect("positive argument")
}

/// Two-term ball volume `ℓ*^D [Ω_{D,1}(R/ℓ*)^D + Ω_{D,α*}(R/ℓ*)^{Dα*}]` of an
/// origin-centred ball. Off-diagonal terms are not included.
pub fn ball_volume(radius: f64, dim: usize, alpha_star: f64, lstar: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(invalid("radius", radius, "must be positive"));
    }
    if !(lstar > 0.0) {
        return Err(invalid("lstar", lstar, "must be positive"));
    }
    if dim == 0 {
        return Err(invalid("dim", 0.0, "dimension must be at least 1"));
    }
    check_alpha(alpha_star)?;
    let d = dim as f64;
    let omega1 = unit_ball_volume(dim);
    let omega_star = omega1 / gamma_fn(alpha_star + 1.0)?.powf(d);
    let r = radius / lstar;
    Ok(lstar.powf(d) * (omega1 * r.powf(d) + omega_star * r.powf(d * alpha_star)))
}
