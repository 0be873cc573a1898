use multiflow::dispersion::*;
use multiflow::measure::FractionalCharges;
use multiflow::spectral::*;
use proptest::prelude::*;

const BETA_STARS: [f64; 6] = [0.25, 0.5, 0.75, 1.25, 1.5, 1.75];

#[test]
fn stencil_on_quadrature_curve_matches_closed_forms() {
    let grid = log_grid(1e-2, 1e2, 200).unwrap();
    let interior = &grid[2..grid.len() - 2];
    for &b in &BETA_STARS {
        let spec = DiffusionSpec::binomial(Model::Weighted, 4, b, 1.0, 1.0, false).unwrap();
        let curve = dispersion_curve(&spec, &grid, Method::Quadrature).unwrap();
        for &s in interior {
            let numeric = spectral_from_dispersion(&curve, 4, s).unwrap();
            let closed = spectral_weighted_flow(&spec, s).unwrap();
            assert!((numeric - closed).abs() < 1e-3, "beta* {b} sigma {s}: {numeric} vs {closed}");
        }
    }
    for b in [0.25, 0.5, 0.75] {
        let spec = DiffusionSpec::binomial(Model::Q, 4, b, 1.0, 1.0, false).unwrap();
        let curve = dispersion_curve(&spec, &grid, Method::Quadrature).unwrap();
        let profile = spec.multiscale.clone().unwrap();
        for &s in interior {
            let numeric = spectral_from_dispersion(&curve, 4, s).unwrap();
            let closed = spectral_q_flow(&profile, 4, s).unwrap();
            assert!((numeric - closed).abs() < 1e-3, "beta* {b} sigma {s}: {numeric} vs {closed}");
        }
    }
}

fn assert_monotone_between(ds: &[f64], uv: f64, ir: f64, label: &str) {
    let (lo, hi) = (uv.min(ir) - 1e-9, uv.max(ir) + 1e-9);
    let rising = ir > uv;
    for w in ds.windows(2) {
        assert!(if rising { w[1] >= w[0] } else { w[1] <= w[0] }, "{label}: {w:?}");
    }
    assert!(ds.iter().all(|&d| d >= lo && d <= hi), "{label}");
}

#[test]
fn binomial_flows_are_monotone() {
    let grid = log_grid(1e-4, 1e4, 200).unwrap();
    for &b in &BETA_STARS {
        let spec = DiffusionSpec::binomial(Model::Weighted, 4, b, 1.0, 1.0, false).unwrap();
        let f = spectral_flow(&spec, &grid).unwrap();
        assert_monotone_between(&f.ds, f.uv_asymptote, f.ir_asymptote, &format!("weighted {b}"));
    }
    for b in [0.25, 0.5, 0.75] {
        let spec = DiffusionSpec::binomial(Model::Q, 4, b, 1.0, 1.0, false).unwrap();
        let f = spectral_flow(&spec, &grid).unwrap();
        assert_monotone_between(&f.ds, f.uv_asymptote, f.ir_asymptote, &format!("q {b}"));
    }
}

// With ℓ̄ = ℓ*, ℓ² ≈ ℓ*² + κ(σ - ℓ*^{1-β*}σ^{β*}/β*) at large σ, so d_S
// approaches D from above.
#[test]
fn fuzzy_flow_settles_from_above() {
    let grid = log_grid(1e-4, 1e4, 200).unwrap();
    for b in [0.25, 0.5, 0.75] {
        let spec = DiffusionSpec::binomial(Model::Weighted, 4, b, 1.0, 1.0, true).unwrap();
        let f = spectral_flow(&spec, &grid).unwrap();
        assert!(f.ds.iter().cloned().fold(f64::MIN, f64::max) > 4.0);
        assert!(f.ds.iter().all(|&d| d >= 0.0));
        let p = probe_asymptotes(|s| spectral_weighted_flow(&spec, s), 1.0).unwrap();
        assert!(p.ir_converged && (p.ir - 4.0).abs() < 1e-2, "{p:?}");
        assert!(p.uv < 0.05, "{p:?}");
    }
}

#[test]
fn regimes_interchange_under_reflection() {
    for b in [0.25, 0.5, 0.75] {
        let d = 4.0;
        let low = DiffusionSpec::binomial(Model::Weighted, 4, b, 1.0, 1.0, false).unwrap();
        let high = DiffusionSpec::binomial(Model::Weighted, 4, 2.0 - b, 1.0, 1.0, false).unwrap();
        let (uv_l, ir_l) = analytic_asymptotes(&low);
        let (uv_h, ir_h) = analytic_asymptotes(&high);
        assert_eq!(ir_l, d);
        assert_eq!(uv_h, d);
        assert!((uv_l + ir_h - 2.0 * d).abs() < 1e-12);
        let pl = probe_asymptotes(|s| spectral_weighted_flow(&low, s), 1.0).unwrap();
        let ph = probe_asymptotes(|s| spectral_weighted_flow(&high, s), 1.0).unwrap();
        assert!(pl.uv_converged && pl.ir_converged && ph.uv_converged && ph.ir_converged);
        assert!((pl.ir - ph.uv).abs() < 1e-2);
        assert!((pl.uv + ph.ir - 2.0 * d).abs() < 2e-2);
    }
}

#[test]
fn fuzzy_flow_vanishes_in_the_ultraviolet() {
    let spec = DiffusionSpec::binomial(Model::Weighted, 4, 0.5, 1.0, 1.0, true).unwrap();
    let grid = log_grid(1e-7, 1e-5, 21).unwrap();
    let f = spectral_flow(&spec, &grid).unwrap();
    let ds_curve = DispersionCurve {
        sigmas: f.sigmas.clone(),
        ell2: f.ds.clone(),
        method: Method::ClosedForm,
        spec: spec.clone(),
    };
    let slope = spectral_from_dispersion(&ds_curve, 1, 1e-6).unwrap();
    assert!(spectral_weighted_flow(&spec, 1e-6).unwrap() < 0.05);
    assert!((slope - 1.5).abs() < 0.02, "slope {slope}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn q_walk_dimension_closure(alpha in 0.05f64..=1.0, beta in 0.05f64..1.0, dim in 1usize..6) {
        let charges = FractionalCharges::isotropic(dim, alpha).unwrap();
        let d_s = fixed_point_ds(Model::Q, dim, beta, 1.0, &charges);
        let d_h = dim as f64 * alpha;
        let d_w = walk_dimension(Model::Q, dim, d_h, d_s).unwrap();
        prop_assert!((d_w - 2.0 * alpha / beta).abs() <= 1e-12 * d_w);
    }
}
