//! Ensemble statistics: MSD, power-law fits, increment diagnostics and the
//! two-sample Kolmogorov–Smirnov test.
//!
//! All sums over paths use pairwise summation in path order.

use std::ops::Range;

use super::{Process, WalkerEnsemble};
use crate::error::{invalid, Error, Result};
use crate::parallel::{pairwise_sum, par_map};

/// Number of path batches for the median-of-batches estimators.
pub const MEDIAN_BATCHES: usize = 16;

/// Excess kurtosis above which a marginal is flagged heavy-tailed.
pub const HEAVY_TAIL_KURTOSIS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MsdCurve {
    pub sigmas: Vec<f64>,
    pub msd: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// `⟨X²⟩ ≈ prefactor · σ^exponent` over `window`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsdFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Standard error of the exponent; always ≥ 0.
    pub stderr: f64,
    /// Smallest and largest grid points used.
    pub window: (f64, f64),
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn check_nonempty(ens: &WalkerEnsemble) -> Result<()> {
    if ens.n_paths() == 0 || ens.n_steps() == 0 {
        return Err(Error::InsufficientData("empty ensemble".into()));
    }
    Ok(())
}

fn msd_over(ens: &WalkerEnsemble, paths: Range<usize>, dirs: Range<usize>) -> MsdCurve {
    let steps: Vec<usize> = (0..ens.n_steps()).collect();
    let rows = par_map(&steps, |&n| {
        let v: Vec<f64> = paths
            .clone()
            .map(|p| dirs.clone().map(|mu| ens.position(p, n, mu).powi(2)).sum())
            .collect();
        mean_and_stderr(&v)
    });
    MsdCurve {
        sigmas: ens.grid().to_vec(),
        msd: rows.iter().map(|r| r.0).collect(),
        stderr: rows.iter().map(|r| r.1).collect(),
    }
}

/// Ensemble mean of `|X(σ)|²` at every grid point.
pub fn msd(ens: &WalkerEnsemble) -> Result<MsdCurve> {
    check_nonempty(ens)?;
    Ok(msd_over(ens, 0..ens.n_paths(), 0..ens.dim()))
}

/// Mean of `X_μ(σ)²` for one direction.
pub fn msd_direction(ens: &WalkerEnsemble, dir: usize) -> Result<MsdCurve> {
    check_nonempty(ens)?;
    if dir >= ens.dim() {
        return Err(invalid("dir", dir as f64, "direction index out of range"));
    }
    Ok(msd_over(ens, 0..ens.n_paths(), dir..dir + 1))
}

/// Mean of `X_μ` at one grid point with its standard error.
pub fn mean_position(ens: &WalkerEnsemble, step: usize, dir: usize) -> Result<(f64, f64)> {
    check_nonempty(ens)?;
    if step >= ens.n_steps() || dir >= ens.dim() {
        return Err(invalid("step", step as f64, "index out of range"));
    }
    let v: Vec<f64> = (0..ens.n_paths()).map(|p| ens.position(p, step, dir)).collect();
    Ok(mean_and_stderr(&v))
}

/// Excess kurtosis of the coordinates at one grid point, pooled over directions.
pub fn excess_kurtosis(ens: &WalkerEnsemble, step: usize) -> Result<f64> {
    check_nonempty(ens)?;
    if step >= ens.n_steps() {
        return Err(invalid("step", step as f64, "index out of range"));
    }
    let mut x = Vec::with_capacity(ens.n_paths() * ens.dim());
    for p in 0..ens.n_paths() {
        for mu in 0..ens.dim() {
            x.push(ens.position(p, step, mu));
        }
    }
    let n = x.len() as f64;
    let mean = pairwise_sum(&x) / n;
    let m2 = pairwise_sum(&x.iter().map(|v| (v - mean).powi(2)).collect::<Vec<_>>()) / n;
    let m4 = pairwise_sum(&x.iter().map(|v| (v - mean).powi(4)).collect::<Vec<_>>()) / n;
    if !(m2 > 0.0) {
        return Err(Error::InsufficientData("zero variance".into()));
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

/// Ordinary least squares: `(slope, intercept, stderr of slope)`.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let sxx = pairwise_sum(&x.iter().map(|a| (a - mx).powi(2)).collect::<Vec<_>>());
    let sxy = pairwise_sum(&x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect::<Vec<_>>());
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr = pairwise_sum(
        &x.iter()
            .zip(y)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .collect::<Vec<_>>(),
    );
    let stderr = if x.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, stderr)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Least squares of `ln y` on `ln σ` over grid points with `σ ∈ [lo, hi]`.
pub fn fit_power_law(sigmas: &[f64], values: &[f64], window: (f64, f64)) -> Result<MsdFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InsufficientData(format!(
            "degenerate fit window [{lo}, {hi}]"
        )));
    }
    if sigmas.len() != values.len() {
        return Err(Error::InsufficientData("sigma and value lengths differ".into()));
    }
    let (mut x, mut y) = (Vec::new(), Vec::new());
    let mut used = (f64::INFINITY, f64::NEG_INFINITY);
    for (&s, &v) in sigmas.iter().zip(values) {
        if s >= lo && s <= hi {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid("msd", v, "fit values must be positive"));
            }
            x.push(s.ln());
            y.push(v.ln());
            used = (used.0.min(s), used.1.max(s));
        }
    }
    if x.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "{} points in fit window [{lo}, {hi}], at least 10 required",
            x.len()
        )));
    }
    let (slope, intercept, stderr) = ols(&x, &y);
    Ok(MsdFit {
        exponent: slope,
        prefactor: intercept.exp(),
        stderr,
        window: used,
    })
}

pub fn fit_scaling_exponent(curve: &MsdCurve, window: (f64, f64)) -> Result<MsdFit> {
    fit_power_law(&curve.sigmas, &curve.msd, window)
}

/// The last two decades of the grid.
pub fn default_fit_window(grid: &[f64]) -> (f64, f64) {
    let hi = grid.last().copied().unwrap_or(0.0);
    (1e-2 * hi, hi)
}

/// Median over `n_batches` contiguous path batches of the per-batch fits.
/// The reported stderr is `1.2533·sd/√n_batches` of the batch exponents.
pub fn fit_median_of_batches(ens: &WalkerEnsemble, window: (f64, f64), n_batches: usize) -> Result<MsdFit> {
    check_nonempty(ens)?;
    if n_batches < 2 || ens.n_paths() < 2 * n_batches {
        return Err(Error::InsufficientData(format!(
            "{} paths cannot form {n_batches} batches of at least 2",
            ens.n_paths()
        )));
    }
    let mut fits = Vec::with_capacity(n_batches);
    for range in batches(ens.n_paths(), n_batches) {
        let curve = msd_over(ens, range, 0..ens.dim());
        fits.push(fit_scaling_exponent(&curve, window)?);
    }
    let mut e: Vec<f64> = fits.iter().map(|f| f.exponent).collect();
    let mut c: Vec<f64> = fits.iter().map(|f| f.prefactor).collect();
    let (_, se) = mean_and_stderr(&e);
    Ok(MsdFit {
        exponent: median(&mut e),
        prefactor: median(&mut c),
        stderr: 1.2533 * se,
        window: fits[0].window,
    })
}

/// Median-of-batches for FSBM-q, a single pooled fit otherwise.
pub fn fit_ensemble(ens: &WalkerEnsemble, window: (f64, f64)) -> Result<MsdFit> {
    match ens.process() {
        Process::FsbmQ => fit_median_of_batches(ens, window, MEDIAN_BATCHES),
        _ => fit_scaling_exponent(&msd(ens)?, window),
    }
}

fn batches(n: usize, k: usize) -> impl Iterator<Item = Range<usize>> {
    (0..k).map(move |b| (b * n / k)..((b + 1) * n / k))
}

/// Stationarity and correlation statistics of lagged increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementReport {
    pub lag: usize,
    /// Slope of the increment variance against window start `σ`.
    pub stationarity_slope: f64,
    pub stationarity_stderr: f64,
    /// Correlation of consecutive disjoint increments over the late half of the grid.
    pub correlation: f64,
    pub correlation_stderr: f64,
}

impl IncrementReport {
    pub fn stationarity_z(&self) -> f64 {
        self.stationarity_slope / self.stationarity_stderr
    }

    pub fn correlation_z(&self) -> f64 {
        self.correlation / self.correlation_stderr
    }

    pub fn is_stationary(&self, z: f64) -> bool {
        self.stationarity_z().abs() <= z
    }

    pub fn is_uncorrelated(&self, z: f64) -> bool {
        self.correlation_z().abs() <= z
    }
}

fn increment(ens: &WalkerEnsemble, p: usize, a: usize, b: usize, mu: usize) -> f64 {
    ens.position(p, b, mu) - ens.position(p, a, mu)
}

fn stationarity_slope(ens: &WalkerEnsemble, paths: Range<usize>, lag: usize) -> f64 {
    let starts: Vec<usize> = (0..ens.n_steps() - lag).step_by(lag).collect();
    let var: Vec<f64> = starts
        .iter()
        .map(|&k| {
            let sq: Vec<f64> = paths
                .clone()
                .flat_map(|p| (0..ens.dim()).map(move |mu| increment(ens, p, k, k + lag, mu).powi(2)))
                .collect();
            pairwise_sum(&sq) / sq.len() as f64
        })
        .collect();
    let x: Vec<f64> = starts.iter().map(|&k| ens.grid()[k]).collect();
    ols(&x, &var).0
}

fn increment_correlation(ens: &WalkerEnsemble, paths: Range<usize>, lag: usize) -> f64 {
    let n = ens.n_steps();
    let (mut ab, mut aa, mut bb) = (Vec::new(), Vec::new(), Vec::new());
    let mut k = n / 2;
    while k + 2 * lag < n {
        for p in paths.clone() {
            for mu in 0..ens.dim() {
                let a = increment(ens, p, k, k + lag, mu);
                let b = increment(ens, p, k + lag, k + 2 * lag, mu);
                ab.push(a * b);
                aa.push(a * a);
                bb.push(b * b);
            }
        }
        k += 2 * lag;
    }
    pairwise_sum(&ab) / (pairwise_sum(&aa) * pairwise_sum(&bb)).sqrt()
}

/// Lagged-increment diagnostics on a uniform grid. Standard errors come from
/// the spread over [`MEDIAN_BATCHES`] path batches.
pub fn increment_diagnostics(ens: &WalkerEnsemble, lag: usize) -> Result<IncrementReport> {
    check_nonempty(ens)?;
    let n = ens.n_steps();
    if lag == 0 || lag >= n {
        return Err(Error::InsufficientData(format!(
            "lag {lag} must lie in [1, {n})"
        )));
    }
    let g = ens.grid();
    let h = (g[n - 1] - g[0]) / (n - 1) as f64;
    if g.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidGrid(
            "increment diagnostics need a uniform grid".into(),
        ));
    }
    if (n - lag).div_ceil(lag) < 3 || n / 2 + 2 * lag >= n {
        return Err(Error::InsufficientData(format!(
            "grid of {n} points too short for lag {lag}"
        )));
    }
    if ens.n_paths() < 2 * MEDIAN_BATCHES {
        return Err(Error::InsufficientData(format!(
            "at least {} paths required",
            2 * MEDIAN_BATCHES
        )));
    }
    let all = 0..ens.n_paths();
    let ranges: Vec<Range<usize>> = batches(ens.n_paths(), MEDIAN_BATCHES).collect();
    let per_batch = par_map(&ranges, |r| {
        (
            stationarity_slope(ens, r.clone(), lag),
            increment_correlation(ens, r.clone(), lag),
        )
    });
    let slopes: Vec<f64> = per_batch.iter().map(|b| b.0).collect();
    let corrs: Vec<f64> = per_batch.iter().map(|b| b.1).collect();
    Ok(IncrementReport {
        lag,
        stationarity_slope: stationarity_slope(ens, all.clone(), lag),
        stationarity_stderr: mean_and_stderr(&slopes).1,
        correlation: increment_correlation(ens, all, lag),
        correlation_stderr: mean_and_stderr(&corrs).1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    /// Asymptotic Kolmogorov p-value.
    pub p_value: f64,
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("KS test needs two non-empty samples".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * d),
    })
}

/// KS test of `X_μ(σ_j)` against `(σ_j/σ_i)^H X_μ(σ_i)`, drawn from disjoint
/// halves of the ensemble.
pub fn self_similarity_ks(ens: &WalkerEnsemble, i: usize, j: usize, hurst: f64, dir: usize) -> Result<KsResult> {
    check_nonempty(ens)?;
    if i >= ens.n_steps() || j >= ens.n_steps() || dir >= ens.dim() {
        return Err(invalid("step", i.max(j) as f64, "index out of range"));
    }
    let half = ens.n_paths() / 2;
    if half == 0 {
        return Err(Error::InsufficientData("at least 2 paths required".into()));
    }
    let g = ens.grid();
    let lambda = (g[j] / g[i]).powf(hurst);
    let a: Vec<f64> = (0..half).map(|p| ens.position(p, j, dir)).collect();
    let b: Vec<f64> = (half..ens.n_paths())
        .map(|p| lambda * ens.position(p, i, dir))
        .collect();
    ks_two_sample(&a, &b)
}
