//! Thin CLI over the microgrid library: run scenarios, list presets,
//! sweep a parameter, or validate a scenario file.

use clap::{Parser, Subcommand};
use microgrid::error::{ScenarioError, SimError};
use microgrid::scenario::{parse_scenario, Scenario};
use microgrid::{plot, presets, run_simulation, write_trace_csv};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mgsim", about = "DC microgrid time-domain simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario (preset name or TOML file) and write a CSV trace
    Run {
        /// Preset name or path to a scenario file
        scenario: String,
        /// Output directory
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also emit SVG plot panels
        #[arg(long)]
        plots: bool,
    },
    /// List the named scenario presets
    Presets,
    /// Batch runs over one scenario parameter, one CSV per value
    Sweep {
        scenario: String,
        /// Dotted key path, e.g. pv.mppt.step
        #[arg(long)]
        param: String,
        #[arg(long, num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Parse and validate a scenario without running it
    Validate { scenario: String },
}

fn load_scenario(arg: &str) -> Result<(Scenario, String), ScenarioError> {
    if let Some(s) = presets::preset(arg) {
        return Ok((s, arg.to_string()));
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(ScenarioError::NotFound(arg.to_string()));
    }
    let text = std::fs::read_to_string(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    Ok((parse_scenario(&text)?, stem))
}

fn run_one(sc: &Scenario, out: &Path, name: &str, plots: bool) -> Result<PathBuf, SimError> {
    let trace = run_simulation(sc)?;
    std::fs::create_dir_all(out).expect("create output directory");
    let csv_path = out.join(format!("{name}.csv"));
    let mut file = std::fs::File::create(&csv_path).expect("create csv");
    let rows = write_trace_csv(&trace, &mut file).expect("write csv");
    eprintln!("wrote {} ({} rows)", csv_path.display(), rows);
    if plots {
        let dir = out.join(name);
        let files = plot::emit_plots(&trace, &dir).expect("emit plots");
        for f in files {
            eprintln!("wrote {}", f.display());
        }
    }
    Ok(csv_path)
}

/// Set a dotted key path inside the scenario's TOML representation.
fn override_param(sc: &Scenario, key: &str, value: f64) -> Result<Scenario, ScenarioError> {
    let mut root = toml::Value::try_from(sc).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
    {
        let mut node = &mut root;
        let parts: Vec<&str> = key.split('.').collect();
        let (last, sections) = parts.split_last().expect("non-empty key");
        for part in sections {
            node = node
                .as_table_mut()
                .and_then(|t| t.get_mut(*part))
                .ok_or_else(|| {
                    ScenarioError::constraint(key, format!("unknown section `{part}`"))
                })?;
        }
        node.as_table_mut()
            .ok_or_else(|| ScenarioError::constraint(key, "parent is not a table"))?
            .insert(last.to_string(), toml::Value::Float(value));
    }
    let sc: Scenario = root
        .try_into()
        .map_err(|e: toml::de::Error| ScenarioError::Syntax(e.to_string()))?;
    sc.validate()?;
    Ok(sc)
}

fn sanitize(v: f64) -> String {
    format!("{v}").replace(['.', '-'], "_")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out, plots } => {
            let (sc, name) = match load_scenario(&scenario) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            if let Err(e) = sc.validate() {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            match run_one(&sc, &out, &name, plots) {
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("numerical abort: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Presets => {
            for name in presets::PRESET_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Sweep {
            scenario,
            param,
            values,
            out,
        } => {
            let (base, name) = match load_scenario(&scenario) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            for v in values {
                let sc = match override_param(&base, &param, v) {
                    Ok(sc) => sc,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                };
                let run_name = format!("{name}__{}_{}", param.replace('.', "_"), sanitize(v));
                if let Err(e) = run_one(&sc, &out, &run_name, false) {
                    eprintln!("numerical abort: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Validate { scenario } => match load_scenario(&scenario) {
            Ok((sc, _)) => match sc.validate() {
                Ok(()) => {
                    eprintln!("ok");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            },
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
