//! `flow`, `kernel`, `pdf` and `simulate`.

use std::path::Path;

use multiflow::dispersion::{dispersion_curve, linear_grid, DiffusionSpec, Method, Model};
use multiflow::kernel::{ds_from_kernel, heat_kernel_curve, pdf, BoxChoice, KernelProbe};
use multiflow::measure::hausdorff_dimension;
use multiflow::spectral::{
    analytic_asymptotes, probe_asymptotes, spectral_dimension, spectral_flow, walk_dimension, LEGACY_CAVEAT,
};
use multiflow::walker::{
    default_fit_window, excess_kurtosis, fit_ensemble, msd, simulate, Process, HEAVY_TAIL_KURTOSIS,
};

use crate::config::RunConfig;
use crate::csv::{num, Table};
use crate::error::CliError;
use crate::svg::{Plot, Series};

/// One output stream; `path == None` is standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: Option<String>,
    pub contents: String,
}

fn list(values: &[f64]) -> String {
    values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(";")
}

fn describe(t: &mut Table, spec: &DiffusionSpec) {
    let s = &spec.scales;
    t.header("model", spec.model.name());
    t.header("dim", spec.dim.to_string());
    match spec.beta_star() {
        Some(b) => t.header("beta_star", num(b)),
        None => {
            t.header("beta", num(s.beta));
            t.header("nu", num(s.nu));
        }
    }
    t.header("kappa", num(s.kappa));
    t.header("lstar", num(s.lstar));
    t.header("fuzzy", spec.fuzzy.to_string());
    t.header("charges", list(spec.charges.alphas()));
    if spec.model == Model::Legacy {
        t.header("caveat", LEGACY_CAVEAT);
    }
}

fn svg_artifact(cfg: &RunConfig, plot: Plot) -> Option<Artifact> {
    cfg.output.svg.as_ref().map(|p| Artifact { path: Some(p.clone()), contents: plot.render() })
}

pub fn run_flow(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let grid = cfg.sigma_grid()?;
    let specs: Vec<(Option<f64>, DiffusionSpec)> = match &cfg.model.beta_star_sweep {
        Some(sweep) if !sweep.is_empty() => {
            sweep.iter().map(|&b| cfg.spec_with(Some(b)).map(|s| (Some(b), s))).collect::<Result<_, _>>()?
        }
        _ => vec![(None, cfg.spec()?)],
    };
    let sweeping = specs[0].0.is_some();
    let columns: &[&str] =
        if sweeping { &["sigma", "ell2", "ds", "d_w", "model", "beta_star"] } else { &["sigma", "ell2", "ds", "d_w", "model"] };
    let mut t = Table::new("flow", columns);
    describe(&mut t, &specs[0].1);
    let mut series = Vec::new();
    for (b, spec) in &specs {
        let curve = dispersion_curve(spec, &grid, Method::ClosedForm)?;
        let flow = spectral_flow(spec, &grid)?;
        let (uv, ir) = analytic_asymptotes(spec);
        let probed = probe_asymptotes(|s| spectral_dimension(spec, s), spec.scales.lstar)?;
        let tag = |k: &str| match b {
            Some(b) => format!("{k}[{}]", num(*b)),
            None => k.to_string(),
        };
        t.header(&tag("uv_analytic"), num(uv));
        t.header(&tag("uv_probed"), num(probed.uv));
        t.header(&tag("uv_probed_at"), num(probed.uv_at));
        t.header(&tag("uv_converged"), probed.uv_converged.to_string());
        t.header(&tag("ir_analytic"), num(ir));
        t.header(&tag("ir_probed"), num(probed.ir));
        t.header(&tag("ir_probed_at"), num(probed.ir_at));
        t.header(&tag("ir_converged"), probed.ir_converged.to_string());
        let d_h = hausdorff_dimension(&spec.charges);
        for ((&s, &l2), &ds) in grid.iter().zip(&curve.ell2).zip(&flow.ds) {
            let d_w = walk_dimension(spec.model, spec.dim, d_h, ds).unwrap_or(f64::INFINITY);
            let mut row = vec![num(s), num(l2), num(ds), num(d_w), spec.model.name().to_string()];
            if let Some(b) = b {
                row.push(num(*b));
            }
            t.row(row);
        }
        series.push(Series {
            label: match b {
                Some(b) => format!("beta_star={}", num(*b)),
                None => spec.model.name().to_string(),
            },
            x: grid.clone(),
            y: flow.ds,
        });
    }
    let mut out = vec![Artifact { path: cfg.output.path.clone(), contents: t.render()? }];
    out.extend(svg_artifact(
        cfg,
        Plot {
            title: format!("spectral dimension, {} model", specs[0].1.model.name()),
            x_label: "sigma".into(),
            y_label: "d_S".into(),
            log_x: cfg.grid.log,
            series,
        },
    ));
    Ok(out)
}

pub fn run_kernel(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let grid = cfg.sigma_grid()?;
    let spec = cfg.spec()?;
    let choice = match cfg.kernel.box_halfwidth {
        Some(l) => BoxChoice::Fixed(l),
        None => BoxChoice::Default,
    };
    let curve = heat_kernel_curve(&spec, &grid, choice)?;
    let mut t = Table::new("kernel", &["sigma", "Z", "convention"]);
    describe(&mut t, &spec);
    t.header("convention", curve.convention.name());
    t.header("ir_physical", curve.ir_physical.to_string());
    t.header(
        "box_halfwidth",
        cfg.kernel.box_halfwidth.map(num).unwrap_or_else(|| "default".into()),
    );
    for (&s, &z) in grid.iter().zip(&curve.z) {
        t.row(vec![num(s), num(z), curve.convention.name().to_string()]);
    }
    if grid.len() >= 5 {
        t.footer("ds_uv", num(ds_from_kernel(&curve, KernelProbe::UvLimit)?));
        t.footer("ds_ir", num(ds_from_kernel(&curve, KernelProbe::IrLimit)?));
    }
    let mut out = vec![Artifact { path: cfg.output.path.clone(), contents: t.render()? }];
    out.extend(svg_artifact(
        cfg,
        Plot {
            title: format!("return probability, {} model", spec.model.name()),
            x_label: "sigma".into(),
            y_label: "log10 Z".into(),
            log_x: cfg.grid.log,
            series: vec![Series {
                label: "Z".into(),
                x: grid.clone(),
                y: curve.z.iter().map(|z| z.log10()).collect(),
            }],
        },
    ));
    Ok(out)
}

pub fn run_pdf(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let spec = cfg.spec()?;
    let p = &cfg.pdf;
    let x0 = p.x0.clone().unwrap_or_else(|| vec![0.0; spec.dim]);
    if x0.len() != spec.dim {
        return Err(CliError::Config(format!("[pdf] x0 has {} entries, dim is {}", x0.len(), spec.dim)));
    }
    if !(p.sigma > 0.0) || !p.sigma.is_finite() {
        return Err(CliError::Config(format!("[pdf] sigma must be positive, got {}", p.sigma)));
    }
    let offsets = linear_grid(p.t_min, p.t_max, p.points).map_err(|e| CliError::Config(format!("[pdf] {e}")))?;
    let columns: Vec<String> = (1..=spec.dim).map(|i| format!("x_{i}")).chain(["density".to_string()]).collect();
    let mut t = Table::new("pdf", &columns.iter().map(String::as_str).collect::<Vec<_>>());
    describe(&mut t, &spec);
    t.header("sigma", num(p.sigma));
    t.header("x0", list(&x0));
    let mut density = Vec::with_capacity(offsets.len());
    for &o in &offsets {
        let x: Vec<f64> = x0.iter().map(|c| c + o).collect();
        let d = pdf(&x, &x0, p.sigma, &spec)?.density;
        density.push(d);
        t.row(x.iter().map(|&v| num(v)).chain([num(d)]).collect());
    }
    let mut out = vec![Artifact { path: cfg.output.path.clone(), contents: t.render()? }];
    out.extend(svg_artifact(
        cfg,
        Plot {
            title: format!("PDF along the diagonal, {} model", spec.model.name()),
            x_label: "offset".into(),
            y_label: "density".into(),
            log_x: false,
            series: vec![Series { label: "P".into(), x: offsets, y: density }],
        },
    ));
    Ok(out)
}

/// `<dir>/<stem>-msd.csv` next to the trajectory file.
pub fn summary_path(out: &str) -> String {
    let p = Path::new(out);
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    p.with_file_name(format!("{stem}-msd.csv")).to_string_lossy().into_owned()
}

pub fn run_simulate(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let e = &cfg.ensemble;
    if e.subsample == 0 {
        return Err(CliError::Config("[ensemble] subsample must be at least 1".into()));
    }
    let spec = cfg.process_spec()?;
    let grid = cfg.step_grid()?;
    let ens = simulate(e.process, e.paths, &grid, &spec, e.seed)?;
    let dim = ens.dim();

    let curve = msd(&ens)?;
    let window = default_fit_window(&grid);
    let fit = fit_ensemble(&ens, window)?;
    let kurtosis = excess_kurtosis(&ens, ens.n_steps() - 1)?;
    let mut s = Table::new("msd", &["sigma", "msd", "stderr"]);
    s.header("process", ens.process().name());
    describe(&mut s, &spec);
    s.header("paths", ens.n_paths().to_string());
    s.header("steps", ens.n_steps().to_string());
    s.header("seed", ens.seed().to_string());
    for i in 0..curve.sigmas.len() {
        s.row(vec![num(curve.sigmas[i]), num(curve.msd[i]), num(curve.stderr[i])]);
    }
    s.footer("fit_exponent", num(fit.exponent));
    s.footer("fit_prefactor", num(fit.prefactor));
    s.footer("fit_stderr", num(fit.stderr));
    s.footer("fit_window", format!("{};{}", num(fit.window.0), num(fit.window.1)));
    s.footer("fit_method", if ens.process() == Process::FsbmQ { "median-of-batches" } else { "ols" });
    if let Ok(d_w) = ens.matching_walk_dimension() {
        s.footer("expected_exponent", num(2.0 / d_w));
    }
    s.footer("excess_kurtosis", num(kurtosis));
    s.footer("heavy_tail", (kurtosis > HEAVY_TAIL_KURTOSIS).to_string());

    let export = e.export_paths.min(ens.n_paths());
    let steps: Vec<usize> = (0..ens.n_steps()).step_by(e.subsample).collect();
    let mut out = Vec::new();
    if let Some(path) = &cfg.output.path {
        let columns: Vec<String> = ["path_id", "step", "sigma"]
            .iter()
            .map(|c| c.to_string())
            .chain((1..=dim).map(|i| format!("x_{i}")))
            .collect();
        let mut t = Table::new("trajectory", &columns.iter().map(String::as_str).collect::<Vec<_>>());
        t.header("process", ens.process().name());
        t.header("seed", ens.seed().to_string());
        t.header("subsample", e.subsample.to_string());
        for p in 0..export {
            for &n in &steps {
                let mut row = vec![p.to_string(), n.to_string(), num(grid[n])];
                row.extend((0..dim).map(|d| num(ens.position(p, n, d))));
                t.row(row);
            }
        }
        out.push(Artifact { path: Some(path.clone()), contents: t.render()? });
    }
    let summary = cfg.output.summary.clone().or_else(|| cfg.output.path.as_deref().map(summary_path));
    out.push(Artifact { path: summary, contents: s.render()? });
    out.extend(svg_artifact(
        cfg,
        Plot {
            title: format!("{} trajectories, x_1", ens.process().name()),
            x_label: "sigma".into(),
            y_label: "x_1".into(),
            log_x: false,
            series: (0..export)
                .map(|p| Series {
                    label: format!("path {p}"),
                    x: steps.iter().map(|&n| grid[n]).collect(),
                    y: steps.iter().map(|&n| ens.position(p, n, 0)).collect(),
                })
                .collect(),
        },
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_path_sits_next_to_output() {
        assert_eq!(summary_path("runs/bm.csv"), "runs/bm-msd.csv");
        assert_eq!(summary_path("traj"), "traj-msd.csv");
    }
}
