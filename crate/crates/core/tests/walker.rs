use multiflow::dispersion::{linear_grid, log_grid, DiffusionSpec, Model};
use multiflow::parallel::with_threads;
use multiflow::walker::*;

const PATHS: usize = 10_000;
const STEPS: usize = 1024;
const SEED: u64 = 20_240_601;

fn grid() -> Vec<f64> {
    default_grid(1.0, STEPS).unwrap()
}

fn exponent(e: &WalkerEnsemble) -> MsdFit {
    fit_ensemble(e, default_fit_window(e.grid())).unwrap()
}

#[test]
fn bm_msd_exponent_prefactor_and_mean() {
    let e = simulate_bm(PATHS, &grid(), 0.5, 1, SEED).unwrap();
    let f = exponent(&e);
    assert!((f.exponent - 1.0).abs() < 0.03, "{f:?}");
    let c = msd(&e).unwrap();
    for n in [100, 500, STEPS - 1] {
        let want = 2.0 * 0.5 * c.sigmas[n];
        assert!((c.msd[n] / want - 1.0).abs() < 0.03, "step {n}: {} vs {want}", c.msd[n]);
    }
    let (m, se) = mean_position(&e, STEPS - 1, 0).unwrap();
    assert!(m.abs() < 3.0 * se);
    assert!((2.0 / f.exponent - e.matching_walk_dimension().unwrap()).abs() < 0.1);
}

#[test]
fn bm_is_self_similar() {
    let g = log_grid(0.25, 1.0, 2).unwrap();
    let e = simulate_bm(PATHS, &g, 1.0, 1, SEED).unwrap();
    let r = self_similarity_ks(&e, 0, 1, 0.5, 0).unwrap();
    assert!(r.p_value > 0.01, "{r:?}");
}

#[test]
fn sbm_exponent() {
    let e = simulate_sbm(PATHS, &grid(), 1.0, 0.5, 1, SEED).unwrap();
    let f = exponent(&e);
    assert!((f.exponent - 0.5).abs() < 0.03, "{f:?}");
    assert!((2.0 / f.exponent - e.matching_walk_dimension().unwrap()).abs() < 0.1);
}

#[test]
fn fsbm_v_exponents() {
    for (beta, nu, want, tol) in [(0.5, 1.0, 1.5, 0.05), (0.5, 0.75, 1.25, 0.05), (1.5, 1.0, 0.5, 0.05)] {
        let e = simulate_fssbm(PATHS, &grid(), 1.0, beta, nu, 1, SEED).unwrap();
        let f = exponent(&e);
        assert!((f.exponent - want).abs() < tol, "beta {beta} nu {nu}: {f:?}");
        assert!((2.0 / f.exponent - e.matching_walk_dimension().unwrap()).abs() < 0.1);
    }
}

#[test]
fn fsbm_q_exponent_and_symmetry() {
    let e = simulate_fsbm_q(PATHS, &grid(), 0.5, 0.5, 1, SEED).unwrap();
    let f = exponent(&e);
    assert!((f.exponent - 1.0).abs() < 0.1, "{f:?}");
    assert!((2.0 / f.exponent - e.matching_walk_dimension().unwrap()).abs() < 0.1);
    let (m, se) = mean_position(&e, STEPS - 1, 0).unwrap();
    assert!(m.abs() < 3.0 * se);
    assert!(excess_kurtosis(&e, STEPS - 1).unwrap() > HEAVY_TAIL_KURTOSIS);
}

#[test]
fn multiscale_crossover() {
    let spec = DiffusionSpec::binomial(Model::Weighted, 1, 0.5, 1.0, 1.0, false).unwrap();
    let g = log_grid(1e-4, 1e4, STEPS).unwrap();
    let e = simulate_fsbm_v(PATHS, &g, &spec, SEED).unwrap();
    let c = msd(&e).unwrap();
    let uv = fit_scaling_exponent(&c, (1e-4, 1e-2)).unwrap();
    let ir = fit_scaling_exponent(&c, (1e2, 1e4)).unwrap();
    assert!((uv.exponent - 1.5).abs() < 0.1, "{uv:?}");
    assert!((ir.exponent - 1.0).abs() < 0.1, "{ir:?}");
}

#[test]
fn increment_classification() {
    let g = linear_grid(1.0 / STEPS as f64, 1.0, STEPS).unwrap();
    let bm = increment_diagnostics(&simulate_bm(PATHS, &g, 1.0, 1, SEED).unwrap(), 1).unwrap();
    assert!(bm.is_stationary(3.0) && bm.is_uncorrelated(3.0), "{bm:?}");
    let v = simulate_fssbm(PATHS, &g, 1.0, 0.5, 1.0, 1, SEED).unwrap();
    let v = increment_diagnostics(&v, 1).unwrap();
    assert!(v.is_uncorrelated(3.0) && v.stationarity_z().abs() > 5.0, "{v:?}");
    let s = increment_diagnostics(&simulate_sbm(PATHS, &g, 1.0, 0.5, 1, SEED).unwrap(), 1).unwrap();
    assert!(s.stationarity_z().abs() > 5.0, "{s:?}");
}

#[test]
fn ensembles_are_thread_count_invariant() {
    let g = default_grid(1.0, 128).unwrap();
    let run = || {
        let e = simulate_fsbm_q(1000, &g, 0.5, 0.5, 2, SEED).unwrap();
        let c = msd(&e).unwrap();
        (e, c)
    };
    let (a, ca) = with_threads(1, run);
    let (b, cb) = with_threads(8, run);
    assert_eq!(a, b);
    assert_eq!(ca, cb);
}
