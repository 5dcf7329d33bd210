//! The five pipelines behind the command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chiralq_core::diffops::{apply_m, SampledField, SpacetimeGrid};
use chiralq_core::fundamental::{fundamental_f, fundamental_f_regularized};
use chiralq_core::maxwell::{maxwell_residual, SourceSpec, SupportBox};
use chiralq_core::oracle::{inverse_fourier_f, ContourSpec};
use chiralq_core::presets::{gaussian_pulse, static_charge};
use chiralq_core::solver::{convolve_solution, estimate_quadrature_error, ConvolutionPlan};
use chiralq_core::verify::run_all;

use crate::config::{RunConfig, RunKind, SourceConfig};
use crate::output::{read_sampled_source, report_table, write_em, write_field, write_reports};
use crate::CliError;

/// Where the CSV goes and where the human-readable notes go: notes share
/// standard output only when the CSV is written to a file.
struct Sinks {
    out: Option<std::path::PathBuf>,
}

impl Sinks {
    fn csv(&self, write: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
        match &self.out {
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                let mut w = BufWriter::new(f);
                write(&mut w)?;
                w.flush().map_err(|e| CliError::Io(e.to_string()))
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                write(&mut lock)
            }
        }
    }

    fn note(&self, text: &str) {
        if self.out.is_some() {
            print!("{text}");
            let _ = io::stdout().flush();
        } else {
            eprint!("{text}");
        }
    }
}

fn reject_origin(grid: &SpacetimeGrid) -> Result<(), CliError> {
    let hits = (0..grid.len()).any(|lin| grid.coord(grid.unravel(lin)).1 == [0.0; 3]);
    if hits {
        return Err(CliError::Config("the grid passes through the spatial origin, where the kernel is singular".into()));
    }
    Ok(())
}

fn source(cfg: &RunConfig) -> Result<(SourceSpec, Option<SupportBox>), CliError> {
    let bad = |e: chiralq_core::Error| CliError::Config(format!("source: {e}"));
    Ok(match &cfg.source {
        SourceConfig::GaussianPulse(p) => {
            let s = gaussian_pulse((*p).into()).map_err(bad)?;
            let b = s.support();
            (s, b)
        }
        SourceConfig::StaticCharge(p) => {
            let s = static_charge((*p).into()).map_err(bad)?;
            let b = s.support();
            (s, b)
        }
        SourceConfig::File { path } => {
            let table = read_sampled_source(path)?;
            let b = table.support();
            (table.into_source(), Some(b))
        }
    })
}

/// Runs one pipeline; `out` overrides the configured output path.
pub fn run(kind: RunKind, cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    if let Some(k) = cfg.kind {
        if k != kind {
            return Err(CliError::Config(format!(
                "config is for `{}` but `{}` was requested",
                k.name(),
                kind.name()
            )));
        }
    }
    let sinks = Sinks {
        out: out.map(Path::to_path_buf).or_else(|| cfg.output.clone()),
    };
    match kind {
        RunKind::Fundamental => fundamental(cfg, &sinks),
        RunKind::FourierCheck => fourier_check(cfg, &sinks),
        RunKind::KernelCheck => kernel_check(cfg, &sinks),
        RunKind::Solve => solve(cfg, &sinks),
        RunKind::Verify => verify(cfg, &sinks),
    }
}

fn fundamental(cfg: &RunConfig, sinks: &Sinks) -> Result<(), CliError> {
    let (params, grid) = (cfg.params()?, cfg.grid()?);
    reject_origin(&grid)?;
    let f = SampledField::try_from_fn(grid, |t, x| fundamental_f(t, x, &params))?;
    sinks.csv(|w| write_field(&f, w))?;
    sinks.note(&format!("fundamental: {} nodes\n", f.grid().len()));
    Ok(())
}

fn fourier_check(cfg: &RunConfig, sinks: &Sinks) -> Result<(), CliError> {
    let (params, grid) = (cfg.params()?, cfg.grid()?);
    reject_origin(&grid)?;
    let y = cfg.tolerances.fourier_y;
    let oracle = SampledField::try_from_fn(grid, |t, x| {
        inverse_fourier_f(t, x, &params, &ContourSpec::for_point(x, &params, y)?)
    })?;
    let closed = SampledField::try_from_fn(grid, |t, x| fundamental_f_regularized(t, x, &params, y))?;
    sinks.csv(|w| write_field(&oracle, w))?;
    let scale = closed.max_norm();
    let worst = oracle
        .values()
        .iter()
        .zip(closed.values())
        .map(|(a, b)| {
            let d = (*a - *b).norm();
            if b.norm() > 0.0 {
                d / b.norm()
            } else if scale > 0.0 {
                d / scale
            } else {
                d
            }
        })
        .fold(0.0, f64::max);
    sinks.note(&format!("fourier-check: y = {y}, max relative error {worst:.3e}\n"));
    match cfg.tolerances.fourier_rel {
        Some(tol) if !(worst <= tol) => Err(CliError::Assertion(format!(
            "oracle disagrees with the closed form: {worst:.3e} > {tol:e}"
        ))),
        _ => Ok(()),
    }
}

fn kernel_check(cfg: &RunConfig, sinks: &Sinks) -> Result<(), CliError> {
    let (params, grid, stencil) = (cfg.params()?, cfg.grid()?, cfg.stencil()?);
    reject_origin(&grid)?;
    let f = SampledField::try_from_fn(grid, |t, x| fundamental_f(t, x, &params))?;
    let r = apply_m(&f, &params, stencil)?;
    sinks.csv(|w| write_field(&r, w))?;
    let max = r.max_norm();
    sinks.note(&format!(
        "kernel-check: order {} stencil, max residual {max:.6e} relative to max kernel {:.6e}\n",
        stencil.order(),
        f.max_norm()
    ));
    match cfg.tolerances.kernel_residual {
        Some(tol) if !(max <= tol) => Err(CliError::Assertion(format!(
            "kernel residual {max:.3e} exceeds {tol:e}"
        ))),
        _ => Ok(()),
    }
}

fn solve(cfg: &RunConfig, sinks: &Sinks) -> Result<(), CliError> {
    let (params, outputs, stencil) = (cfg.params()?, cfg.grid()?, cfg.stencil()?);
    let (src, support) = source(cfg)?;
    let plan = match &cfg.solver.cells {
        Some(c) => ConvolutionPlan::new(params, c.build()?, outputs)?,
        None => {
            let support = support.ok_or_else(|| CliError::Config("source has no support box; give solver.cells".into()))?;
            ConvolutionPlan::covering(params, support, outputs)?
        }
    };
    let mut plan = plan
        .with_stencil(stencil)
        .with_scalar_tolerance(cfg.tolerances.scalar_ratio);
    if let Some(r0) = cfg.solver.r0 {
        plan = plan.with_r0(r0)?;
    }
    let sol = convolve_solution(&src, &plan)?;
    sinks.csv(|w| write_em(&sol.em, w))?;
    let quad = estimate_quadrature_error(&plan, &src)?;
    let fits = plan.outputs().counts().iter().all(|&n| n > 2 * stencil.margin());
    let residual = if fits {
        Some(maxwell_residual(&sol.em, &src, &params, stencil)?)
    } else {
        None
    };
    let line = match &residual {
        Some(r) => format!(
            "residual max={:.6e} l2={:.6e} ampere={:.6e} faraday={:.6e} gauss_e={:.6e} gauss_h={:.6e}",
            r.max(),
            r.l2(),
            r.ampere.max,
            r.faraday.max,
            r.gauss_e.max,
            r.gauss_h.max
        ),
        None => "residual unavailable: output lattice too small for the stencil".to_string(),
    };
    sinks.note(&format!(
        "{line} scalar_ratio={:.6e} singular_ball_bound={:.6e}\n",
        sol.scalar_ratio, quad.singular_ball_bound
    ));
    match (cfg.tolerances.maxwell_residual, residual) {
        (Some(tol), Some(r)) if !(r.max() <= tol) => Err(CliError::Assertion(format!(
            "Maxwell residual {:.3e} exceeds {tol:e}",
            r.max()
        ))),
        (Some(_), None) => Err(CliError::Assertion(
            "a residual bound was requested but the output lattice is too small to evaluate it".into(),
        )),
        _ => Ok(()),
    }
}

fn verify(cfg: &RunConfig, sinks: &Sinks) -> Result<(), CliError> {
    let reports = run_all(&(&cfg.verify).into());
    sinks.csv(|w| write_reports(&reports, w))?;
    sinks.note(&report_table(&reports));
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(format!("failed: {}", failed.join(", "))))
    }
}
