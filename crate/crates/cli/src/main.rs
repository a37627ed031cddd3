use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polyseep::config::{parse_config, RunConfig};
use polyseep::runner::{self, exit, exit_code};

/// Polygonal smoothed finite element seepage solver.
#[derive(Debug, Parser)]
#[command(name = "polyseep", version)]
struct Cli {
    /// Output directory (default: `output` from the config, else out/<config name>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the mesh generator seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for element assembly (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the configured problem and write all artifacts.
    Run { config: PathBuf },
    /// Build and write the mesh only.
    Mesh { config: PathBuf },
}

fn load(path: &Path, seed: Option<u64>) -> Result<RunConfig, i32> {
    let mut cfg = parse_config(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        exit_code(&e)
    })?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32, i32> {
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return Err(exit::USAGE);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| {
            eprintln!("error: {e}");
            exit::USAGE
        })?;
    }
    let fail = |e: polyseep::Error| {
        eprintln!("error: {e}");
        exit_code(&e)
    };
    match cli.command {
        Command::Run { config } => {
            let cfg = load(&config, cli.seed)?;
            let out = cli.out.clone().unwrap_or_else(|| runner::output_dir(&cfg, &config));
            let r = runner::run(&cfg, &out).map_err(fail)?;
            print!("{}", r.summary.table());
            if !r.cycles.is_empty() {
                println!("\ncycle  elements  dofs  inner  x_o  time (s)");
                for c in &r.cycles {
                    println!(
                        "{:>5}  {:>8}  {:>4}  {:>5}  {:.6}  {:.3}",
                        c.cycle, c.elements, c.dofs, c.inner_iterations, c.x_o, c.wall_time
                    );
                }
            }
            println!("artifacts written to {}", out.display());
            if !r.summary.converged {
                eprintln!("warning: free-surface iteration did not converge");
                return Ok(exit::NOT_CONVERGED);
            }
            Ok(exit::OK)
        }
        Command::Mesh { config } => {
            let cfg = load(&config, cli.seed)?;
            let out = cli.out.clone().unwrap_or_else(|| runner::output_dir(&cfg, &config));
            let b = runner::preview_mesh(&cfg, &out).map_err(fail)?;
            println!("elements  {}", b.mesh.num_cells());
            println!("nodes     {}", b.mesh.num_nodes());
            println!("mesh written to {}", out.display());
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    let code = run(cli).unwrap_or_else(|c| c);
    ExitCode::from(code as u8)
}
