//! The four verbs and the files they write.

use crate::config::{Format, Method, PenaltyConfig, RunConfig};
use crate::problem::{assemble, default_offsets, Assembled, PenaltySetup};
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sscd_core::linops::mtx;
use sscd_core::tomo::io::{read_image_csv, write_image_csv_file, write_pgm_file, write_sinogram_csv_file};
use sscd_core::tomo::{Phantom, RadonGeometry};
use sscd_core::vecops::{dist, norm};
use sscd_core::{
    solve, solve_fista, solve_pgm, solve_tv, CompositeProblem, Error, ImageGrid, LeastSquares, SolveReport, Termination,
};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// How a run ended; errors before or outside the solve are reported as `Err`.
#[derive(Debug)]
pub enum Outcome {
    Converged,
    Stalled(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub solver: String,
    pub penalty: String,
    pub n1: usize,
    pub n2: usize,
    pub objective: f64,
    pub residual: f64,
    pub relative_residual: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub termination: String,
    /// `‖x − x_true‖ / ‖x_true‖` when the ground truth is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasibility: Option<f64>,
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Converged => "converged",
        Termination::MaxIterations => "max_iterations",
        Termination::Failed => "failed",
    }
}

fn relative_error(img: &ImageGrid, truth: Option<&ImageGrid>) -> Option<f64> {
    let t = truth?;
    let scale = norm(t.values());
    let d = dist(img.values(), t.values());
    Some(if scale > 0.0 { d / scale } else { d })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_image(dir: &Path, img: &ImageGrid, formats: &[Format]) -> Result<()> {
    for f in formats {
        match f {
            Format::Pgm => write_pgm_file(img, dir.join("reconstruction.pgm"))?,
            Format::Csv => write_image_csv_file(img, dir.join("reconstruction.csv"))?,
        }
    }
    Ok(())
}

/// Splits a solver result into its report and, on failure, the reason.
fn settle(result: sscd_core::Result<SolveReport>) -> Result<(SolveReport, Option<String>)> {
    match result {
        Ok(r) if r.converged() => Ok((r, None)),
        Ok(r) => {
            let why = format!("stopped after {} iterations without converging", r.iterations);
            Ok((r, Some(why)))
        }
        Err(e) => {
            let msg = e.to_string();
            match e {
                Error::Stagnation { report, .. } | Error::NonFinite { report, .. } => Ok((*report, Some(msg))),
                other => Err(other.into()),
            }
        }
    }
}

pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let asm = assemble(cfg)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let x0 = vec![0.0; asm.op.ncols()];
    match &asm.penalty {
        PenaltySetup::Lp { penalty, .. } => {
            let f = LeastSquares::new(&*asm.op, asm.y.clone())?;
            let prob = CompositeProblem::new(f, penalty.clone())?;
            let s = &cfg.solver;
            let result = match s.method {
                Method::BasGssn => solve(&prob, &x0, &s.bas_gssn),
                Method::Pgm => solve_pgm(&prob, &x0, &s.bas_gssn),
                Method::Fista => solve_fista(&prob, &x0, &s.fista),
            };
            let (report, failure) = settle(result)?;
            let img = asm.image(&report.z)?;
            write_image(out, &img, &cfg.output.formats)?;
            let mut w = create(out, "iterations.csv")?;
            report.write_log_csv(&mut w)?;
            w.flush()?;
            let summary = Summary {
                solver: s.method.name().into(),
                penalty: "lp".into(),
                n1: asm.n1,
                n2: asm.n2,
                objective: report.objective(),
                residual: report.residual,
                relative_residual: report.relative_residual,
                iterations: report.iterations,
                wall_time_s: report.wall_time_s,
                termination: termination_name(report.termination).into(),
                relative_error: relative_error(&img, asm.truth.as_ref()),
                outer_iterations: None,
                feasibility: None,
            };
            write_json(out, "summary.json", &summary)?;
            Ok(failure.map_or(Outcome::Converged, Outcome::Stalled))
        }
        PenaltySetup::Tv { alpha } => {
            let s = &cfg.solver;
            let report = match solve_tv(&*asm.op, &asm.y, *alpha, asm.n1, asm.n2, &s.tv, &s.bas_gssn) {
                Ok(r) => r,
                Err(e) if e.is_stagnation() => return Ok(Outcome::Stalled(e.to_string())),
                Err(e) => return Err(e.into()),
            };
            write_image(out, &report.image, &cfg.output.formats)?;
            let mut w = create(out, "iterations.csv")?;
            report.write_outer_log_csv(&mut w)?;
            w.flush()?;
            let inner = &report.last_inner;
            let summary = Summary {
                solver: "bas_gssn".into(),
                penalty: "tv".into(),
                n1: asm.n1,
                n2: asm.n2,
                objective: report.objective,
                residual: inner.residual,
                relative_residual: inner.relative_residual,
                iterations: report.inner_iterations,
                wall_time_s: report.wall_time_s,
                termination: if report.converged { "converged" } else { "max_iterations" }.into(),
                relative_error: relative_error(&report.image, asm.truth.as_ref()),
                outer_iterations: Some(report.outer_iterations),
                feasibility: Some(report.feasibility),
            };
            write_json(out, "summary.json", &summary)?;
            Ok(if report.converged {
                Outcome::Converged
            } else {
                Outcome::Stalled(format!("feasibility {:e} after {} outer iterations", report.feasibility, report.outer_iterations))
            })
        }
    }
}

/// One row of `compare.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub solver: &'static str,
    pub iter: usize,
    pub time_s: f64,
    pub rel_residual: f64,
    pub rel_error_vs_best: f64,
}

pub const COMPARE_HEADER: &str = "solver,iter,time_s,rel_residual,rel_error_vs_best";

/// Rows for both runs, with errors measured against the lowest-objective iterate of either.
pub fn compare_rows(runs: &[(&'static str, &SolveReport)]) -> Vec<CompareRow> {
    let best = runs
        .iter()
        .flat_map(|(_, r)| r.log.iter().zip(&r.iterates_z))
        .min_by(|a, b| a.0.phi.total_cmp(&b.0.phi))
        .map(|(_, z)| z.clone())
        .unwrap_or_default();
    let scale = norm(&best);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    runs.iter()
        .flat_map(|(name, r)| {
            let best = &best;
            r.log.iter().zip(&r.iterates_z).map(move |(row, z)| CompareRow {
                solver: name,
                iter: row.iter,
                time_s: row.time_s,
                rel_residual: row.resid / r.scale,
                rel_error_vs_best: dist(z, best) / scale,
            })
        })
        .collect()
}

const PLOT_SCRIPT: &str = "\
set datafile separator ','
set logscale y
set format y '%.0e'
set xlabel 'time [s]'
set key top right
set terminal pngcairo size 1000,420
set output 'compare.png'
set multiplot layout 1,2
set ylabel 'relative residual'
plot \"< grep '^bas_gssn' compare.csv\" using 3:4 with linespoints title 'bas\\_gssn', \\
     \"< grep '^fista' compare.csv\" using 3:4 with lines title 'fista'
set ylabel 'relative error vs best iterate'
plot \"< grep '^bas_gssn' compare.csv\" using 3:5 with linespoints title 'bas\\_gssn', \\
     \"< grep '^fista' compare.csv\" using 3:5 with lines title 'fista'
unset multiplot
";

pub fn cmd_compare(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    match &cfg.penalty {
        PenaltyConfig::Lp { p, .. } if *p == 1.0 => {}
        PenaltyConfig::Lp { p, .. } => bail!("compare requires penalty.p = 1, got {p}"),
        PenaltyConfig::Tv { .. } => bail!("compare requires an lp penalty with p = 1"),
    }
    let asm: Assembled = assemble(cfg)?;
    let PenaltySetup::Lp { penalty, .. } = &asm.penalty else { unreachable!() };
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let x0 = vec![0.0; asm.op.ncols()];
    let prob = CompositeProblem::new(LeastSquares::new(&*asm.op, asm.y.clone())?, penalty.clone())?;
    let newton_cfg = sscd_core::SolverConfig { record_iterates: true, ..cfg.solver.bas_gssn.clone() };
    let fista_cfg = sscd_core::FistaConfig { record_iterates: true, ..cfg.solver.fista.clone() };
    let (newton, failure) = settle(solve(&prob, &x0, &newton_cfg))?;
    let (fista, _) = settle(solve_fista(&prob, &x0, &fista_cfg))?;

    let rows = compare_rows(&[("bas_gssn", &newton), ("fista", &fista)]);
    let mut w = create(out, "compare.csv")?;
    writeln!(w, "{COMPARE_HEADER}")?;
    for r in &rows {
        writeln!(w, "{},{},{:e},{:e},{:e}", r.solver, r.iter, r.time_s, r.rel_residual, r.rel_error_vs_best)?;
    }
    w.flush()?;
    let mut w = create(out, "compare.gp")?;
    w.write_all(PLOT_SCRIPT.as_bytes())?;
    w.flush()?;

    let img = asm.image(&newton.z)?;
    write_image(out, &img, &cfg.output.formats)?;
    let run_summary = |name: &str, r: &SolveReport| Summary {
        solver: name.into(),
        penalty: "lp".into(),
        n1: asm.n1,
        n2: asm.n2,
        objective: r.objective(),
        residual: r.residual,
        relative_residual: r.relative_residual,
        iterations: r.iterations,
        wall_time_s: r.wall_time_s,
        termination: termination_name(r.termination).into(),
        relative_error: asm.image(&r.z).ok().and_then(|i| relative_error(&i, asm.truth.as_ref())),
        outer_iterations: None,
        feasibility: None,
    };
    let summary = serde_json::json!({
        "bas_gssn": run_summary("bas_gssn", &newton),
        "fista": run_summary("fista", &fista),
    });
    write_json(out, "summary.json", &summary)?;
    Ok(failure.map_or(Outcome::Converged, Outcome::Stalled))
}

pub fn cmd_phantom(n1: usize, n2: usize, name: &str, seed: u64, out: &Path) -> Result<()> {
    let img = if name.eq_ignore_ascii_case("spikes") {
        crate::problem::spikes(n1, n2, (n1 * n2 / 64).max(1), seed)?
    } else {
        name.parse::<Phantom>()?.render(n1, n2)?
    };
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_pgm_file(&img, out.join("phantom.pgm"))?;
    write_image_csv_file(&img, out.join("phantom.csv"))?;
    Ok(())
}

pub fn cmd_radon(image: &Path, angles: usize, offsets: Option<usize>, out: &Path) -> Result<()> {
    let f = File::open(image).with_context(|| format!("opening {}", image.display()))?;
    let img = read_image_csv(f).with_context(|| format!("reading {}", image.display()))?;
    let offsets = offsets.unwrap_or_else(|| default_offsets(img.n1(), img.n2()));
    let geom = RadonGeometry::new(img.n1(), img.n2(), angles, offsets)?;
    let a = geom.matrix();
    let sino = geom.project(&a, &img)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    mtx::write_file(&a, out.join("radon.mtx"))?;
    write_sinogram_csv_file(&sino, out.join("sinogram.csv"))?;
    Ok(())
}
