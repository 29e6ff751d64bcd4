use clap::{Parser, Subcommand};
use spinmachine_cli::acceptance::{run_acceptance, AcceptanceContext};
use spinmachine_cli::config::SweepFile;
use spinmachine_cli::figures::run_figure;
use spinmachine_cli::sweep::run_sweep;
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulator for four- and two-stroke quantum thermal machines with a
/// spin-1/2 chain working fluid.
#[derive(Parser)]
#[command(name = "spinmachine", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory (overrides the config and the SPINMACHINE_OUT
    /// environment variable).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for grid evaluation (1 = sequential with warm starts).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Fixed-point tolerance override (trace distance).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a TOML config file.
    Sweep { config: PathBuf },
    /// Run the acceptance suite (optionally a single criterion by name
    /// substring or number).
    Accept { suite: Option<String> },
    /// Run a shipped figure recipe: fig2, fig3, fig4 or fig5.
    Figure { name: String },
}

fn out_override(cli: &Cli) -> Option<PathBuf> {
    cli.out
        .clone()
        .or_else(|| std::env::var_os("SPINMACHINE_OUT").map(PathBuf::from))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Sweep { config } => {
            let text = match std::fs::read_to_string(config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(1);
                }
            };
            let resolved = SweepFile::parse(&text).and_then(|file| file.resolve());
            let mut resolved = match resolved {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            if let Some(dir) = out_override(&cli) {
                resolved.out_dir = dir;
            }
            if let Some(tol) = cli.tol {
                resolved.tol = tol;
            }
            if let Some(seed) = cli.seed {
                resolved.seed = seed;
            }
            match run_sweep(&resolved, cli.jobs.max(1), &text) {
                Ok(outcome) => {
                    println!(
                        "wrote {} ({} rows, {} flagged) and {}",
                        outcome.csv_path.display(),
                        outcome.rows,
                        outcome.flagged,
                        outcome.meta_path.display()
                    );
                    if outcome.flagged > 0 {
                        ExitCode::from(2)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Figure { name } => {
            let out = out_override(&cli).unwrap_or_else(|| PathBuf::from("out").join(name));
            match run_figure(name, &out, cli.jobs.max(1), cli.tol) {
                Ok(outcomes) => {
                    let mut flagged = 0;
                    for o in &outcomes {
                        println!("wrote {} ({} rows, {} flagged)", o.csv_path.display(), o.rows, o.flagged);
                        flagged += o.flagged;
                    }
                    if flagged > 0 {
                        ExitCode::from(2)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Accept { suite } => {
            let ctx = AcceptanceContext {
                seed: cli.seed.unwrap_or(0),
                tol: cli.tol.unwrap_or(1e-13),
            };
            let reports = run_acceptance(suite.as_deref(), &ctx);
            if reports.is_empty() {
                eprintln!("error: selector matched no criterion");
                return ExitCode::from(1);
            }
            for report in &reports {
                println!("{}", report.line());
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            if let Some(dir) = out_override(&cli) {
                if let Err(e) = std::fs::create_dir_all(&dir) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
                let payload = serde_json::json!({
                    "seed": ctx.seed,
                    "tol": ctx.tol,
                    "criteria": reports.iter().map(|r| serde_json::json!({
                        "id": r.id,
                        "name": r.name,
                        "passed": r.passed,
                        "seconds": r.seconds,
                        "details": r.details,
                    })).collect::<Vec<_>>(),
                    "failed": failed,
                });
                let path = dir.join("acceptance.json");
                if let Err(e) = std::fs::write(&path, serde_json::to_string_pretty(&payload).unwrap()) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
                println!("wrote {}", path.display());
            }
            println!(
                "{}/{} criteria passed",
                reports.len() - failed,
                reports.len()
            );
            if failed > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
