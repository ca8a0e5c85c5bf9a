#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use suptv_core::psm::{InnerSolveStats, PsmStop};
use suptv_core::{
    run_basic_algorithm, run_comparison, run_psm, run_superiorized, tv_value, ImageVector, IterationTrace,
    RunSummary, Scenario, SolverSetup, SparseLinearSystem,
};

const DEFAULT_WINDOW: (f64, f64) = (0.204, 0.21675);
/// Rows are swept in the order they are stored: view-major, then detector index.
const ROW_ORDER: &str = "stored";

#[derive(Parser)]
#[command(name = "suptv", version, about = "Superiorized ART and projected subgradient TV reconstruction")]
struct Cli {
    /// Recorded in run summaries; the solvers themselves are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize the config's ellipse table into phantom.sctv and phantom.pgm.
    Phantom {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Trace the scan geometry through a phantom and write system.scts.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Phantom image in SCTV format; rasterized from the config when omitted.
        #[arg(long)]
        phantom: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run one solver on a system file.
    Run {
        #[arg(value_enum)]
        solver: Solver,
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Run PSM, then superiorized ART to the proximity PSM reached.
    Compare {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Display window for PGM output, as `lo,hi`.
    #[arg(long, value_parser = parse_window)]
    window: Option<(f64, f64)>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Caps sweeps for basic/sm and iterations for psm.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Write zeros in the trace's seconds column so traces compare byte-for-byte.
    #[arg(long)]
    untimed: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solver {
    Psm,
    Sm,
    Basic,
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) {
        return Err("window needs lo < hi".into());
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns false when a solver stopped without reaching its target.
fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Phantom { config, out } => phantom(config, out).map(|_| true),
        Command::Simulate { config, phantom, out } => simulate(config, phantom.as_deref(), out).map(|_| true),
        Command::Run { solver, system, solve } => run(*solver, system, solve, cli.seed),
        Command::Compare { system, solve } => compare(system, solve),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    Scenario::parse(&read_text(path)?).with_context(|| format!("in {}", path.display()))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_image(image: &ImageVector, out: &OutputArgs, stem: &str) -> Result<()> {
    image.write_sctv(create(&out.out_dir, &format!("{stem}.sctv"))?)?;
    image.write_pgm(create(&out.out_dir, &format!("{stem}.pgm"))?, out.window.unwrap_or(DEFAULT_WINDOW))?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_trace(trace: &IterationTrace, dir: &Path, name: &str, untimed: bool) -> Result<()> {
    let mut w = create(dir, name)?;
    if untimed {
        w.write_all(trace.to_csv_untimed().as_bytes())?;
    } else {
        trace.write_csv(&mut w)?;
    }
    w.flush()?;
    Ok(())
}

fn write_inner(stats: &[InnerSolveStats], dir: &Path) -> Result<()> {
    let mut w = create(dir, "inner.csv")?;
    writeln!(w, "k,inner_iterations,gradient_norm,exact,step_norm")?;
    for s in stats {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.k, s.inner_iterations, s.gradient_norm, s.exact, s.step_norm
        )?;
    }
    w.flush()?;
    Ok(())
}

fn phantom(config: &Path, out: &OutputArgs) -> Result<()> {
    let scenario = load_scenario(config)?;
    let image = scenario.rasterize()?;
    write_image(&image, out, "phantom")?;
    println!("phantom {}x{} TV {}", image.rows(), image.cols(), tv_value(&image));
    Ok(())
}

fn simulate(config: &Path, phantom: Option<&Path>, out: &OutputArgs) -> Result<()> {
    let scenario = load_scenario(config)?;
    let image = match phantom {
        Some(p) => {
            let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            ImageVector::read_sctv(BufReader::new(file)).with_context(|| format!("reading {}", p.display()))?
        }
        None => scenario.rasterize()?,
    };
    let system = scenario.build_system(&image)?;
    let mut w = create(&out.out_dir, "system.scts")?;
    system.write_to(&mut w)?;
    w.flush()?;
    println!(
        "I {} J {} nnz {} prox(phantom) {:e} ||b|| {}",
        system.num_rows(),
        system.num_cols(),
        system.nnz(),
        system.proximity(&image)?,
        system.rhs_norm()
    );
    Ok(())
}

fn load_inputs(system: &Path, solve: &SolveArgs) -> Result<(SparseLinearSystem, SolverSetup)> {
    let file = File::open(system).with_context(|| format!("opening {}", system.display()))?;
    let system_data =
        SparseLinearSystem::read_from(BufReader::new(file)).with_context(|| format!("reading {}", system.display()))?;
    let text = match &solve.config {
        Some(p) => read_text(p)?,
        None => String::new(),
    };
    let mut setup = SolverSetup::parse(&text, system_data.num_cols()).with_context(|| match &solve.config {
        Some(p) => format!("in {}", p.display()),
        None => "deriving the image shape".to_string(),
    })?;
    if let Some(eps) = solve.epsilon {
        setup.run.epsilon = eps;
    }
    if let Some(n) = solve.max_iter {
        setup.run.max_iterations = n;
        setup.run.psm_max_iterations = n;
    }
    setup.run.validate()?;
    Ok((system_data, setup))
}

fn run(solver: Solver, system_path: &Path, solve: &SolveArgs, seed: Option<u64>) -> Result<bool> {
    let (system, setup) = load_inputs(system_path, solve)?;
    let run = &setup.run;
    let x0 = ImageVector::zeros(setup.rows, setup.cols);
    let dir = &solve.out.out_dir;
    let clock = Instant::now();
    let (image, trace, summary) = match solver {
        Solver::Basic => {
            let r = run_basic_algorithm(&system, run.bounds, &x0, run.epsilon, run.max_iterations)?;
            let seconds = clock.elapsed().as_secs_f64();
            let summary = RunSummary {
                solver: "basic".into(),
                epsilon: Some(run.epsilon),
                iterations: r.outcome.index(),
                final_prox: r.outcome.prox(),
                final_tv: tv_value(r.outcome.iterate()),
                seconds,
                total_beta_consumed: None,
                ell_final: None,
                achieved_epsilon: None,
                converged: r.outcome.is_converged(),
                failure: r.outcome.failure().map(|f| f.as_str().to_string()),
                row_order: ROW_ORDER.into(),
                seed,
            };
            (r.outcome.iterate().clone(), r.trace, summary)
        }
        Solver::Sm => {
            let r = run_superiorized(&system, run.bounds, &x0, run, run.epsilon)?;
            let seconds = clock.elapsed().as_secs_f64();
            let summary = RunSummary {
                solver: "sm".into(),
                epsilon: Some(run.epsilon),
                iterations: r.outcome.index(),
                final_prox: r.outcome.prox(),
                final_tv: tv_value(r.outcome.iterate()),
                seconds,
                total_beta_consumed: Some(r.total_beta_consumed),
                ell_final: Some(r.ell_final),
                achieved_epsilon: None,
                converged: r.outcome.is_converged(),
                failure: r.outcome.failure().map(|f| f.as_str().to_string()),
                row_order: ROW_ORDER.into(),
                seed,
            };
            (r.outcome.iterate().clone(), r.trace, summary)
        }
        Solver::Psm => {
            let r = run_psm(&system, run.bounds, &x0, run)?;
            let seconds = clock.elapsed().as_secs_f64();
            write_inner(&r.inner, dir)?;
            let summary = RunSummary {
                solver: "psm".into(),
                epsilon: None,
                iterations: r.state.k,
                final_prox: r.achieved_epsilon,
                final_tv: tv_value(&r.x),
                seconds,
                total_beta_consumed: None,
                ell_final: None,
                achieved_epsilon: Some(r.achieved_epsilon),
                converged: r.stop == PsmStop::Stalled,
                failure: (r.stop != PsmStop::Stalled).then(|| r.stop.as_str().to_string()),
                row_order: ROW_ORDER.into(),
                seed,
            };
            (r.x, r.trace, summary)
        }
    };
    write_image(&image, &solve.out, "image")?;
    write_trace(&trace, dir, "trace.csv", solve.untimed)?;
    write_json(dir, "summary.json", &summary)?;
    println!(
        "{} iterations {} prox {:e} TV {} seconds {:.3}{}",
        summary.solver,
        summary.iterations,
        summary.final_prox,
        summary.final_tv,
        summary.seconds,
        summary.failure.as_deref().map(|f| format!(" FAILED: {f}")).unwrap_or_default()
    );
    Ok(summary.converged)
}

fn compare(system_path: &Path, solve: &SolveArgs) -> Result<bool> {
    if solve.epsilon.is_some() {
        bail!("compare takes epsilon from the PSM run; --epsilon is not accepted");
    }
    let (system, setup) = load_inputs(system_path, solve)?;
    let c = run_comparison(&system, setup.rows, setup.cols, &setup.run)?;
    let dir = &solve.out.out_dir;
    write_trace(&c.psm.trace, dir, "psm_trace.csv", solve.untimed)?;
    write_trace(&c.sm.trace, dir, "sm_trace.csv", solve.untimed)?;
    write_inner(&c.psm.inner, dir)?;
    write_image(&c.psm.x, &solve.out, "psm")?;
    write_image(c.sm.outcome.iterate(), &solve.out, "sm")?;
    write_json(dir, "report.json", &c.report)?;
    print!("{}", c.report.table());
    Ok(c.report.failure.is_none())
}
