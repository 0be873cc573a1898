//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Subdivision is deterministic: the interval with the largest error
//! estimate is bisected, ties resolved by position, and the final sum is
//! accumulated in interval order.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd Kronrod nodes (XGK[1], XGK[3], XGK[5], 0).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(centre - dx) + f(centre + dx);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    let value = k * half;
    let error = ((k - g) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Domain {
            function: "integrate",
            detail: format!("non-finite integrand on [{a}, {b}]"),
        });
    }
    Ok(Segment { a, b, value, error })
}

/// `∫_a^b f(x) dx` for a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain {
            function: "integrate",
            detail: "infinite limits are not supported".into(),
        });
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, opts).map(|v| -v);
    }
    let mut segments = vec![kronrod(&f, a, b)?];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(total);
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::NonConvergence {
                function: "integrate",
                iterations: segments.len(),
                estimate: total,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, s)| {
                if s.error > best.1 {
                    (i, s.error)
                } else {
                    best
                }
            });
        let s = segments[worst];
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval exhausted at machine resolution; accept what we have
            return Ok(total);
        }
        let left = kronrod(&f, s.a, mid)?;
        let right = kronrod(&f, mid, s.b)?;
        segments[worst] = left;
        segments.insert(worst + 1, right);
    }
}

/// `∫_0^b f(x) dx` for an integrand behaving like `x^{γ-1}` at the origin.
///
/// The substitution `u = x^γ` maps the leading singularity onto a constant.
pub fn integrate_from_origin<F: Fn(f64) -> f64>(
    f: F,
    gamma: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::NonIntegrable { exponent: gamma });
    }
    if !(b >= 0.0) {
        return Err(Error::Domain {
            function: "integrate_from_origin",
            detail: format!("upper limit {b} must be non-negative"),
        });
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    let inv = 1.0 / gamma;
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = u.powf(inv);
        // dx = x / (γ u) du
        f(x) * x / (gamma * u)
    };
    integrate(g, 0.0, b.powf(gamma), opts)
}

/// `∫_a^b f(x) dx` for an integrand behaving like `|x|^{γ-1}` at `x = 0`.
/// The interval is split at the origin when it straddles it.
pub fn integrate_across_origin<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    gamma: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    across_origin(&f, a, b, gamma, opts)
}

fn across_origin(f: &dyn Fn(f64) -> f64, a: f64, b: f64, gamma: f64, opts: &QuadOptions) -> Result<f64> {
    if a > b {
        return across_origin(f, b, a, gamma, opts).map(|v| -v);
    }
    if a > 0.5 * b {
        return integrate(f, a, b, opts);
    }
    if a >= 0.0 {
        let upper = integrate_from_origin(f, gamma, b, opts)?;
        let lower = if a > 0.0 { integrate_from_origin(f, gamma, a, opts)? } else { 0.0 };
        return Ok(upper - lower);
    }
    let mirrored = |y: f64| f(-y);
    if b <= 0.0 {
        return across_origin(&mirrored, -b, -a, gamma, opts);
    }
    let right = integrate_from_origin(f, gamma, b, opts)?;
    let left = integrate_from_origin(mirrored, gamma, -a, opts)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x - x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(v, 6.0, max_relative = 1e-14);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let o = QuadOptions::default();
        let a = integrate(f64::exp, 0.0, 1.0, &o).unwrap();
        let b = integrate(f64::exp, 1.0, 0.0, &o).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn peaked_integrand() {
        let v = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, &QuadOptions::default()).unwrap();
        let want = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert_relative_eq!(v, want, max_relative = 1e-9);
    }

    #[test]
    fn origin_singularity() {
        let o = QuadOptions::default();
        // ∫_0^2 x^{-0.7} dx = 2^{0.3}/0.3
        let v = integrate_from_origin(|x| x.powf(-0.7), 0.3, 2.0, &o).unwrap();
        assert_relative_eq!(v, 2f64.powf(0.3) / 0.3, max_relative = 1e-10);
        // mixed powers: x^{-0.5} + x^{0.25}
        let v = integrate_from_origin(|x| x.powf(-0.5) + x.powf(0.25), 0.5, 3.0, &o).unwrap();
        let want = 2.0 * 3f64.sqrt() + 3f64.powf(1.25) / 1.25;
        assert_relative_eq!(v, want, max_relative = 1e-10);
    }

    #[test]
    fn across_origin_splits() {
        let o = QuadOptions::default();
        let f = |x: f64| x.abs().powf(-0.5);
        let v = integrate_across_origin(f, -1.0, 4.0, 0.5, &o).unwrap();
        assert_relative_eq!(v, 2.0 + 4.0, max_relative = 1e-10);
        let v = integrate_across_origin(f, 1.0, 4.0, 0.5, &o).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
        let v = integrate_across_origin(f, -4.0, -1.0, 0.5, &o).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
        let v = integrate_across_origin(f, 0.01, 4.0, 0.5, &o).unwrap();
        assert_relative_eq!(v, 4.0 - 0.2, max_relative = 1e-10);
    }

    #[test]
    fn non_integrable_exponent_is_rejected() {
        let r = integrate_from_origin(|x| 1.0 / x, 0.0, 1.0, &QuadOptions::default());
        assert!(matches!(r, Err(Error::NonIntegrable { .. })));
    }

    #[test]
    fn interval_budget_is_enforced() {
        let o = QuadOptions {
            max_intervals: 3,
            ..QuadOptions::default()
        };
        let r = integrate(|x| (50.0 * x).sin().abs(), 0.0, 10.0, &o);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
