//! `pharmink check | solve | verify`.
//!
//! Exit codes: 0 success, 1 domain failure (inadmissible measure, solver
//! error or no convergence, failed check), 2 I/O or configuration error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pharmink_core::geom::{check_measure_conditions, perturb_antipodal, SphericalMeasure};
use pharmink_core::solver::{solve_classical, solve_discrete, solve_general, SolveConfig, SolveOutcome};
use pharmink_core::verify::{format_table, run_battery, BatteryConfig};
use pharmink_core::MeasureConditions;

use crate::config::{Density, RunConfig};
use crate::error::{io_err, IoError, Result};
use crate::formats::{read_measure, write_json, write_polytope, MeasureFile};
use crate::report::{mesh_dump, stats_csv, verify_json, write_text, RunRecord};
use crate::svg::solve_svg;

#[derive(Debug, Parser)]
#[command(name = "pharmink", version, about = "Minkowski problem for p-harmonic measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report whether a measure spans, is centered and has antipodal atoms.
    Check {
        /// Measure JSON.
        measure: PathBuf,
    },
    /// Find a polytope whose p-harmonic measure matches the target.
    Solve(SolveArgs),
    /// Run the numerical verification battery.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Measure JSON; omit when giving --density.
    pub measure: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Mesh size relative to the circle center's distance to the boundary.
    #[arg(long, default_value_t = 0.04)]
    pub mesh_h: f64,
    /// Inner circle radius relative to the same distance.
    #[arg(long, default_value_t = 0.5)]
    pub shrink: f64,
    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Recorded for provenance; the solver takes no finite-difference step.
    #[arg(long, default_value_t = 0.02)]
    pub dt: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "pharmink-out")]
    pub out: PathBuf,
    /// Solve the surface-area problem instead.
    #[arg(long)]
    pub classical: bool,
    /// Target density `uniform`, `const:c` or `cos:a,k` (1 + a cos kθ).
    #[arg(long)]
    pub density: Option<String>,
    /// Atom counts for --density.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
    pub schedule: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Exponents, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Absolute mesh size of the family checks.
    #[arg(long, default_value_t = 0.02)]
    pub mesh_h: f64,
    /// Replaces every check's tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    pub dt: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report and configuration here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
}

/// Result of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    DomainFailure,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Success => ExitCode::SUCCESS,
            Status::DomainFailure => ExitCode::from(1),
        }
    }
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> ExitCode {
    let result = match cli.command {
        Command::Check { measure } => cmd_check(&measure, out),
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
    };
    match result {
        Ok(s) => s.into(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn report_conditions(c: &MeasureConditions, out: &mut dyn Write) -> Result<()> {
    let defect: Vec<String> = c.center_defect.iter().map(|x| format!("{x:.6e}")).collect();
    let pairs: Vec<String> = c.antipodal_pairs.iter().map(|(i, j)| format!("({i}, {j})")).collect();
    let text = format!(
        "spans: {} (smallest singular value {:.6e})\ncentered: {} (defect [{}])\nantipodal pairs: {}\nadmissible: {}\n",
        c.spans,
        c.min_singular_value,
        c.centered,
        defect.join(", "),
        if pairs.is_empty() { "none".into() } else { pairs.join(" ") },
        c.admissible()
    );
    out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))
}

pub fn cmd_check(path: &Path, out: &mut dyn Write) -> Result<Status> {
    let mu = read_measure(path)?;
    let c = check_measure_conditions(&mu);
    report_conditions(&c, out)?;
    Ok(if c.admissible() { Status::Success } else { Status::DomainFailure })
}

fn say(out: &mut dyn Write, text: String) -> Result<()> {
    writeln!(out, "{text}").map_err(io_err(Path::new("<stdout>")))
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<Status> {
    let config = RunConfig {
        command: "solve".into(),
        p: vec![args.p],
        dim: args.dim,
        target_h: args.mesh_h,
        shrink: args.shrink,
        tol: Some(args.tol),
        max_iter: args.max_iter,
        m_schedule: args.schedule.clone(),
        dt: args.dt,
        seed: args.seed,
        classical: args.classical,
        density: args.density.clone(),
        input: args.measure.clone(),
        out: Some(args.out.clone()),
    };
    config.validate()?;
    if args.classical && args.density.is_some() {
        return Err(IoError::Config("--classical and --density exclude each other".into()));
    }
    let target = match (&args.measure, &args.density) {
        (Some(path), None) => Some(read_measure(path)?),
        (None, Some(_)) => None,
        _ => {
            return Err(IoError::Config(
                "give exactly one of a measure file and --density".into(),
            ))
        }
    };
    if let Some(mu) = &target {
        if mu.dim() != args.dim {
            return Err(IoError::Config(format!(
                "measure has dimension {} but --dim is {}",
                mu.dim(),
                args.dim
            )));
        }
    }
    let cfg = SolveConfig {
        shrink: args.shrink,
        mesh_h_rel: args.mesh_h,
        tol: args.tol,
        max_iter: args.max_iter,
        ..SolveConfig::new(args.p)
    };
    cfg.validate().map_err(|e| IoError::Config(e.to_string()))?;

    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    config.write_to(&args.out)?;
    let record = RunRecord::new(config);
    let record_path = args.out.join("run_record.json");

    let Some(mu) = target else {
        let density = Density::parse(args.density.as_deref().unwrap_or_default(), args.dim)?;
        let general = match solve_general(args.dim, |xi| density.eval(xi), &args.schedule, &cfg) {
            Ok(g) => g,
            Err(e) => {
                write_json(&record_path, &record.with_error(&e))?;
                say(out, format!("solve_general failed: {e}"))?;
                return Ok(Status::DomainFailure);
            }
        };
        let record = record.with_general(&general);
        write_json(&record_path, &record)?;
        for stage in &general.stages {
            say(
                out,
                format!(
                    "m = {}: residual {:.3e}, converged {}{}",
                    stage.m,
                    stage.outcome.residual,
                    stage.outcome.converged,
                    stage
                        .hausdorff_to_previous
                        .map_or(String::new(), |d| format!(", d_H to previous {d:.3e}"))
                ),
            )?;
        }
        if let Some(e) = &general.failure {
            say(out, format!("stopped early: {e}"))?;
        }
        let Some(finest) = general.finest() else {
            return Ok(Status::DomainFailure);
        };
        let stage_mu = general.stages.last().map(|s| s.m).unwrap_or_default();
        let target = pharmink_core::geom::discretize_measure(args.dim, |xi| density.eval(xi), stage_mu)
            .map_err(|e| IoError::Config(e.to_string()))?;
        write_outcome(&args.out, finest, &target)?;
        return Ok(status_of(general.completed() && finest.converged));
    };

    let cond = check_measure_conditions(&mu);
    if !cond.admissible() {
        say(out, "refusing to solve: measure is not admissible".into())?;
        report_conditions(&cond, out)?;
        write_json(&record_path, &record.with_error("measure is not admissible"))?;
        return Ok(Status::DomainFailure);
    }
    // Separate antipodal atoms up front so the bars compare like with like.
    let mu = if cond.antipodal_pairs.is_empty() || args.classical {
        mu
    } else {
        match perturb_antipodal(&mu, cfg.antipodal_eps) {
            Ok(m) => m,
            Err(e) => {
                write_json(&record_path, &record.with_error(&e))?;
                say(out, format!("antipodal perturbation failed: {e}"))?;
                return Ok(Status::DomainFailure);
            }
        }
    };
    let (stage, result) = if args.classical {
        ("solve_classical", solve_classical(&mu, &cfg))
    } else {
        ("solve_discrete", solve_discrete(&mu, &cfg))
    };
    match result {
        Ok(o) => {
            write_json(&record_path, &record.with_outcome(&o))?;
            write_outcome(&args.out, &o, &mu)?;
            say(
                out,
                format!(
                    "{stage}: converged {}, residual {:.3e}, gamma {:.6}, {} iterations, {} facets",
                    o.converged,
                    o.residual,
                    o.gamma,
                    o.iterations,
                    o.polytope.facets().len()
                ),
            )?;
            Ok(status_of(o.converged))
        }
        Err(e) => {
            write_json(&record_path, &record.with_error(format!("{stage}: {e}")))?;
            say(out, format!("{stage} failed: {e}"))?;
            Ok(Status::DomainFailure)
        }
    }
}

fn status_of(ok: bool) -> Status {
    if ok {
        Status::Success
    } else {
        Status::DomainFailure
    }
}

/// Polytope, achieved measure, and for planar p-harmonic runs the final
/// mesh, its Picard statistics and the picture.
fn write_outcome(dir: &Path, o: &SolveOutcome, target: &SphericalMeasure) -> Result<()> {
    write_polytope(&dir.join("polytope.json"), &o.polytope)?;
    write_json(
        &dir.join("achieved_measure.json"),
        &MeasureFile::from_atom_map(o.polytope.dim(), &o.mu_p),
    )?;
    if let Some(sol) = &o.solution {
        let c = &o.diagnostics.ring_center;
        write_text(&dir.join("mesh.txt"), &mesh_dump(sol.mesh(), [c[0], c[1]]))?;
        write_text(&dir.join("pde_stats.csv"), &stats_csv(&sol.stats))?;
    }
    if o.polytope.dim() == 2 {
        write_text(&dir.join("solve.svg"), &solve_svg(&o.polytope, target, &o.mu_p))?;
    }
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<Status> {
    let config = RunConfig {
        command: "verify".into(),
        p: args.p.clone(),
        dim: args.dim,
        target_h: args.mesh_h,
        shrink: pharmink_core::verify::SHRINK,
        tol: args.tol,
        max_iter: 1,
        m_schedule: vec![8, 16, 32, 64],
        dt: args.dt,
        seed: args.seed,
        classical: false,
        density: None,
        input: None,
        out: args.out.clone(),
    };
    config.validate()?;
    if args.dim != 2 {
        return Err(IoError::Config("the verification battery is planar; use --dim 2".into()));
    }
    let battery = BatteryConfig {
        ps: args.p.clone(),
        mesh_h: args.mesh_h,
        dt: args.dt,
        seed: args.seed,
        tolerance_override: args.tol,
        ..BatteryConfig::default()
    };
    let results = run_battery(&battery);
    let json = verify_json(&results)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        config.write_to(dir)?;
        write_text(&dir.join("verify.json"), &(json.clone() + "\n"))?;
    }
    let text = if args.json { json + "\n" } else { format_table(&results) };
    out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))?;
    Ok(status_of(results.iter().all(|r| r.passed)))
}
