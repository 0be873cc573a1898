use multiflow::dispersion::*;
use multiflow::measure::{MeasureProfile, ProfileKind};
use proptest::prelude::*;

const BETA_STARS: [f64; 6] = [0.25, 0.5, 0.75, 1.25, 1.5, 1.75];

fn weighted(beta_star: f64, fuzzy: bool) -> DiffusionSpec {
    DiffusionSpec::binomial(Model::Weighted, 1, beta_star, 1.0, 1.0, fuzzy).unwrap()
}

#[test]
fn closed_form_matches_quadrature_oracle() {
    let grid = log_grid(1e-3, 1e3, 50).unwrap();
    for &b in &BETA_STARS {
        let specs = if b < 1.0 { vec![weighted(b, false), weighted(b, true)] } else { vec![weighted(b, false)] };
        for spec in specs {
            let closed = dispersion_curve(&spec, &grid, Method::ClosedForm).unwrap();
            let quad = dispersion_curve(&spec, &grid, Method::Quadrature).unwrap();
            for (i, (c, q)) in closed.ell2.iter().zip(&quad.ell2).enumerate() {
                assert!(
                    (c / q - 1.0).abs() < 1e-7,
                    "beta* {b} fuzzy {} sigma {}: {c} vs {q}",
                    spec.fuzzy,
                    grid[i]
                );
            }
        }
    }
}

#[test]
fn q_model_matches_quadrature_oracle() {
    let grid = log_grid(1e-3, 1e3, 50).unwrap();
    for b in [0.25, 0.5, 0.75] {
        let spec = DiffusionSpec::binomial(Model::Q, 2, b, 1.0, 0.7, false).unwrap();
        let closed = dispersion_curve(&spec, &grid, Method::ClosedForm).unwrap();
        let quad = dispersion_curve(&spec, &grid, Method::Quadrature).unwrap();
        for (c, q) in closed.ell2.iter().zip(&quad.ell2) {
            assert!((c / q - 1.0).abs() < 1e-7, "{c} vs {q}");
        }
    }
}

#[test]
fn dispersion_is_strictly_increasing() {
    let grid = log_grid(1e-4, 1e4, 200).unwrap();
    for &b in &BETA_STARS {
        for model in [Model::Weighted, Model::Ordinary] {
            let spec = DiffusionSpec::binomial(model, 3, b, 2.0, 1.0, false).unwrap();
            let c = dispersion_curve(&spec, &grid, Method::ClosedForm).unwrap();
            assert!(c.ell2.windows(2).all(|w| w[1] > w[0]), "beta* {b}");
        }
    }
    for b in [0.25, 0.5, 0.75] {
        let spec = DiffusionSpec::binomial(Model::Q, 3, b, 2.0, 1.0, false).unwrap();
        let c = dispersion_curve(&spec, &grid, Method::ClosedForm).unwrap();
        assert!(c.ell2.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn initial_condition() {
    for &b in &BETA_STARS {
        let small = dispersion(&weighted(b, false), 1e-12).unwrap();
        assert!((0.0..1e-6).contains(&small), "beta* {b}: {small}");
    }
    for b in [0.25, 0.5, 0.75] {
        let l = dispersion(&weighted(b, true), 1e-12).unwrap();
        assert!((l - 1.0).abs() < 1e-6, "beta* {b}: {l}");
    }
}

#[test]
fn continuous_across_removable_pole() {
    let grid = log_grid(1e-3, 1e3, 50).unwrap();
    let at = dispersion_curve(&weighted(1.5, false), &grid, Method::ClosedForm).unwrap();
    for eps in [1e-6, -1e-6] {
        let near = dispersion_curve(&weighted(1.5 + eps, false), &grid, Method::ClosedForm).unwrap();
        for (a, n) in at.ell2.iter().zip(&near.ell2) {
            assert!((a / n - 1.0).abs() < 1e-5, "{a} vs {n}");
        }
    }
    let oracle = dispersion_curve(&weighted(1.5, false), &grid, Method::Quadrature).unwrap();
    for (a, q) in at.ell2.iter().zip(&oracle.ell2) {
        assert!((a / q - 1.0).abs() < 1e-7);
    }
}

#[test]
fn excluded_band_is_rejected() {
    assert!(DiffusionSpec::binomial(Model::Weighted, 1, 1.0 + 5e-5, 1.0, 1.0, false).is_err());
    assert!(DiffusionSpec::binomial(Model::Weighted, 1, 1.0 - 5e-5, 1.0, 1.0, false).is_err());
}

#[test]
fn qm_time_equals_unit_kappa_dispersion() {
    let spec = weighted(0.5, false);
    let profile = MeasureProfile::binomial(0.5, 1.0, ProfileKind::DiffusionTime).unwrap();
    for t in [1e-2, 0.3, 1.0, 40.0] {
        let want = dispersion(&spec, t).unwrap();
        assert!((qm_time(&profile, t).unwrap() / want - 1.0).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_dimension_matches_quadrature(
        beta in 0.1f64..1.9, nu in 0.3f64..2.0, kappa in 0.1f64..5.0, ls in -3.0f64..3.0
    ) {
        prop_assume!(1.0 + nu - beta > 0.05);
        let spec = DiffusionSpec::fixed(Model::Weighted, 2, kappa, beta, nu).unwrap();
        let sigma = 10f64.powf(ls);
        let c = dispersion(&spec, sigma).unwrap();
        let q = dispersion_by_quadrature(&spec, sigma).unwrap();
        prop_assert!((c / q - 1.0).abs() < 1e-7, "{c} vs {q}");
    }

    #[test]
    fn binomial_integrals_are_complementary(p in 0.05f64..0.95, ls in -4.0f64..4.0) {
        // J_p(s) + J_{-p}(s) = s since 1/(1+t^p) + 1/(1+t^{-p}) = 1
        let s = 10f64.powf(ls);
        let sum = binomial_integral(p, s).unwrap() + binomial_integral(-p, s).unwrap();
        prop_assert!((sum / s - 1.0).abs() < 1e-11);
    }
}
