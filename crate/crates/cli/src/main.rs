use clap::{Args, Parser, Subcommand};
use conslaw_cli::{commands, config, Failure, Invocation};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "conslaw",
    version,
    about = "Exact solvers and Monte Carlo statistics for 1D conservation laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed of the [law] section.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for output artifacts, created if absent.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for ensemble commands.
    #[arg(long)]
    workers: Option<usize>,
    /// Comparison tolerance override.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Event-driven adhesion dynamics: worldlines and collision log.
    Sticky(Common),
    /// Convex-hull solution in mass coordinates: hull knots and clusters.
    Hopflax(Common),
    /// Forward-map partition into body, vacuum and gap elements.
    Flowmap(Common),
    /// Generalized-potential minimization: profiles and branch plot.
    Genpot(Common),
    /// Exact front tracking under a piecewise-linear convex flux.
    Fronttrack(Common),
    /// Ensemble correlation estimates and hierarchy residuals.
    McStats(Common),
    /// Shock strength and wavelength statistics by parabola contacts.
    FmShocks(Common),
    /// Agreement of all four exact solvers on one particle scenario.
    Crosscheck(Common),
}

type CommandFn = fn(&config::RunConfig, &Invocation) -> Result<String, Failure>;

fn dispatch(cli: &Cli) -> Result<String, Failure> {
    let (run, common): (CommandFn, &Common) = match &cli.command {
        Command::Sticky(c) => (commands::sticky::run, c),
        Command::Hopflax(c) => (commands::hopflax::run, c),
        Command::Flowmap(c) => (commands::flowmap::run, c),
        Command::Genpot(c) => (commands::genpot::run, c),
        Command::Fronttrack(c) => (commands::fronttrack::run, c),
        Command::McStats(c) => (commands::mc_stats::run, c),
        Command::FmShocks(c) => (commands::fm_shocks::run, c),
        Command::Crosscheck(c) => (commands::crosscheck::run, c),
    };
    let cfg = config::load(&common.config)?;
    let invocation = Invocation {
        out: common.out.clone(),
        seed: common.seed,
        workers: common.workers,
        tolerance: common.tolerance,
    };
    run(&cfg, &invocation)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
