use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bnls_cli::config::SimulationConfig;
use bnls_cli::presets::list_presets;
use bnls_cli::runner::{default_output_root, groundstate_cli, run_config, run_preset, verify_run_dir};

#[derive(Parser)]
#[command(name = "bnls", about = "Desk-scale laboratory for the mass-critical biharmonic NLS", version)]
struct Cli {
    /// Output root; defaults to $BNLS_OUTPUT_ROOT or the working directory.
    #[arg(long, global = true)]
    output_root: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more config files (TOML). With --parallel, independent
    /// configs run concurrently in separate output directories.
    Run {
        configs: Vec<PathBuf>,
        #[arg(long)]
        parallel: bool,
    },
    /// Run a named preset, optionally with section.key=value overrides.
    /// Without a name, lists the available presets.
    Preset {
        name: Option<String>,
        overrides: Vec<String>,
    },
    /// Solve the elliptic ground state and print its table.
    Groundstate {
        n: usize,
        #[arg(long, default_value_t = 1024)]
        points: usize,
        #[arg(long, default_value_t = 25.0)]
        extent: f64,
        #[arg(long)]
        radial: bool,
    },
    /// Print the stored report of a finished run directory.
    Report { run_dir: PathBuf },
    /// Re-execute the acceptance checks of a run directory against its
    /// stored artifacts. Nonzero exit on any failure.
    Verify { run_dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let root = cli.output_root.unwrap_or_else(default_output_root);
    match run(cli.command, &root) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, root: &std::path::Path) -> Result<bool, Box<dyn std::error::Error>> {
    match command {
        Command::Run { configs, parallel } => {
            if configs.is_empty() {
                return Err("no config files given".into());
            }
            let mut all = true;
            if parallel && configs.len() > 1 {
                let mut handles = Vec::new();
                for path in configs {
                    let root = root.to_path_buf();
                    handles.push(std::thread::spawn(move || -> Result<bool, String> {
                        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
                        let cfg = SimulationConfig::from_toml_str(&text).map_err(|e| e.to_string())?;
                        let out = run_config(&cfg, &root).map_err(|e| e.to_string())?;
                        println!("== {} ==\n{}", path.display(), out.report.render_text());
                        Ok(out.report.all_passed())
                    }));
                }
                for h in handles {
                    all &= h.join().map_err(|_| "worker panicked")??;
                }
            } else {
                for path in configs {
                    let text = std::fs::read_to_string(&path)?;
                    let cfg = SimulationConfig::from_toml_str(&text)?;
                    let out = run_config(&cfg, root)?;
                    println!("== {} ==\n{}", path.display(), out.report.render_text());
                    all &= out.report.all_passed();
                }
            }
            Ok(all)
        }
        Command::Preset { name, overrides } => match name {
            None => {
                for p in list_presets() {
                    println!("{p}");
                }
                Ok(true)
            }
            Some(name) => {
                let out = run_preset(&name, &overrides, root)?;
                println!("{}", out.report.render_text());
                println!("artifacts: {}", out.run_dir.display());
                Ok(out.report.all_passed())
            }
        },
        Command::Groundstate { n, points, extent, radial } => {
            let out_dir = root.join("groundstate");
            let table = groundstate_cli(n, points, extent, radial, &out_dir)?;
            println!("{table}");
            println!("profile checkpoint: {}", out_dir.join("ground_state.ckpt").display());
            Ok(true)
        }
        Command::Report { run_dir } => {
            let text = std::fs::read_to_string(run_dir.join("report.json"))?;
            let report = bnls_cli::report::RunReport::from_json(&text)?;
            println!("{}", report.render_text());
            Ok(report.all_passed())
        }
        Command::Verify { run_dir } => {
            let (ok, log) = verify_run_dir(&run_dir)?;
            println!("{log}");
            println!("verify: {}", if ok { "PASS" } else { "FAIL" });
            Ok(ok)
        }
    }
}
