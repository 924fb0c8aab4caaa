use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use weylkit_cli::{emit, run_file, tasks, CliError, Format, Overrides, Scene, Task};

#[derive(Parser)]
#[command(
    name = "weylkit",
    version,
    about = "Weyl functions and boundary-triplet calculus from scene files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task named in the scene file.
    Run(Common),
    /// Evaluate the model at points off the real axis.
    Eval(Common),
    /// Boundary values F(t + i0).
    Limit(Common),
    /// ac spectrum and multiplicity profile on a window.
    Spectrum(Common),
    /// Multiplicity profile d(t) on a grid.
    Multiplicity(Common),
    /// Piecewise-constant spectral density by Stieltjes inversion.
    Invert(Common),
    /// Compare the ac parts of two self-adjoint extensions.
    Compare(Common),
    /// Run invariant suites; without a scene the default bundle runs.
    Verify(VerifyArgs),
    /// ac-closure of an interval set and the two closure lemmas.
    Acset(Common),
}

#[derive(Args)]
struct Common {
    /// Scene file (JSON).
    scene: PathBuf,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct VerifyArgs {
    scene: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Default)]
struct Flags {
    /// Window as `a,b`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<(f64, f64)>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    y0: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    limit_tol: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long)]
    excl_eps: Option<f64>,
    /// Report path; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// json or csv.
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_format(s: &str) -> Result<Format, String> {
    Format::parse(s).ok_or_else(|| "expected json or csv".into())
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            window: self.window,
            grid_points: self.grid_points,
            y0: self.y0,
            ratio: self.ratio,
            limit_tol: self.limit_tol,
            max_steps: self.max_steps,
            rank_tol: self.rank_tol,
            excl_eps: self.excl_eps,
            output: self.output.clone(),
            format: self.format,
        }
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let (task, common) = match cli.command {
        Command::Run(c) => (None, c),
        Command::Eval(c) => (Some(Task::Eval), c),
        Command::Limit(c) => (Some(Task::Limit), c),
        Command::Spectrum(c) => (Some(Task::Spectrum), c),
        Command::Multiplicity(c) => (Some(Task::Multiplicity), c),
        Command::Invert(c) => (Some(Task::Invert), c),
        Command::Compare(c) => (Some(Task::Compare), c),
        Command::Acset(c) => (Some(Task::Acset), c),
        Command::Verify(v) => match v.scene {
            Some(scene) => (Some(Task::Verify), Common { scene, flags: v.flags }),
            None => {
                let mut scene = Scene::parse("{}", "<default>", Some(Task::Verify))?;
                scene.apply(&v.flags.overrides())?;
                let report = tasks::run(&scene)?;
                write_out(&scene, &report)?;
                return Ok(!report.failed());
            }
        },
    };
    let (scene, report) = run_file(&common.scene, task, &common.flags.overrides())?;
    write_out(&scene, &report)?;
    Ok(!report.failed())
}

fn write_out(scene: &Scene, report: &weylkit_cli::Report) -> Result<(), CliError> {
    if let Some(text) = emit(scene, report)? {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::validation(format!("stdout: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        // A completed run whose checks failed.
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("weylkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
