use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pseudosym::exec::Execution;
use pseudosym_cli::{parse_config, run, write_output, CliError, Preset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Precision {
    F64,
    Extended,
}

#[derive(Debug, Parser)]
#[command(name = "pseudosym", version, about = "Runs the composition-method experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Runs a preset and writes its CSV tables and JSON sidecar.
    Run {
        preset: String,
        /// TOML document overriding preset defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides `output_path`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "f64")]
        precision: Precision,
        /// Use the long-horizon step sizes and final times.
        #[arg(long)]
        full_scale: bool,
        /// Evaluate cells one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Lists the presets.
    List,
    /// Checks a configuration document without running it.
    Validate {
        config: PathBuf,
        /// Preset to validate against when the document names none.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        full_scale: bool,
    },
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::List => {
            for p in Preset::ALL {
                println!("{:<14} {}", p.name(), p.description());
            }
            Ok(())
        }
        Command::Validate {
            config,
            preset,
            full_scale,
        } => {
            let preset = preset.map(|p| p.parse()).transpose()?;
            let parsed = parse_config(&read(&config)?, preset, full_scale)?;
            println!(
                "{}: valid ({} methods, {} step sizes)",
                parsed.preset,
                parsed.methods().len(),
                parsed.tau_list.len()
            );
            Ok(())
        }
        Command::Run {
            preset,
            config,
            out,
            precision,
            full_scale,
            sequential,
        } => {
            if precision == Precision::Extended {
                return Err(CliError::Validation(
                    "extended precision is not available in this build; use --precision f64".into(),
                ));
            }
            let preset: Preset = preset.parse()?;
            let text = match &config {
                Some(path) => read(path)?,
                None => String::new(),
            };
            let mut parsed = parse_config(&text, Some(preset), full_scale)?;
            if let Some(dir) = out {
                parsed.output_path = dir.to_string_lossy().into_owned();
            }
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let output = run(&parsed, exec)?;
            let written = write_output(&output, parsed.output_path.as_ref())?;
            for path in &written {
                println!("wrote {}", path.display());
            }
            for f in &output.failures {
                eprintln!("failed: {} tau={} {}", f.method, f.tau, f.message);
            }
            if output.all_cells_singular() {
                return Err(CliError::AllSingular(format!("{} cells", output.cells)));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
