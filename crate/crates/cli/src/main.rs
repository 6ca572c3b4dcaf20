use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ivory_cli::emit::{family_data, render, Format};
use ivory_cli::{run_suite_with, SceneConfig};
use ivory_core::Execution;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ivory", version, about = "Verify Ivory-type identities on projection pencils of quadrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for all random sampling; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Numeric tolerance override, e.g. `--tol identity=1e-8`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tol: Vec<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite and print the report as JSON.
    Verify {
        config: PathBuf,
        /// Run every sweep on the calling thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Sample pencil members for plotting.
    Family {
        config: PathBuf,
        /// Comma-separated member parameters.
        #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Add the quadrangle cut out by members t₁, t₂ and t₃, t₄.
        #[arg(long)]
        quadrangles: bool,
        /// Discard chart points farther than this from the origin.
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
    },
    /// Print singular parameters, type intervals and the square-root domain.
    Info { config: PathBuf },
}

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn load(path: &Path, cli: &Cli) -> Result<SceneConfig, String> {
    let mut config = SceneConfig::load(path).map_err(|e| e.to_string())?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    for item in &cli.tol {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| format!("--tol expects NAME=VALUE, got `{item}`"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("--tol {name}: `{value}` is not a number"))?;
        config.set_tolerance(name.trim(), value).map_err(|e| e.to_string())?;
    }
    Ok(config)
}

fn write(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Info {
    scene: String,
    singular_parameters: Vec<f64>,
    /// Open intervals; `null` marks an unbounded end.
    type_components: Vec<[Option<f64>; 2]>,
    target: f64,
    domain: Option<[Option<f64>; 2]>,
    margin: Option<f64>,
    family_error: Option<String>,
}

fn bound(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Verify { config, sequential } => {
            let config = load(config, cli)?;
            let exec = if *sequential { Execution::Sequential } else { Execution::Parallel };
            let report = run_suite_with(&config, exec).map_err(|e| e.to_string())?;
            write(&cli.out, &report.to_json())?;
            Ok(if report.pass { 0 } else { EXIT_VIOLATION })
        }
        Command::Family {
            config,
            t,
            format,
            quadrangles,
            radius,
        } => {
            let config = load(config, cli)?;
            let policy = config.policy().map_err(|e| e.to_string())?;
            let scene = config.build_scene().map_err(|e| e.to_string())?;
            let data = family_data(&scene, &policy, t, *quadrangles, *radius, Execution::Parallel)
                .map_err(|e| e.to_string())?;
            write(&cli.out, &render(&data, *format))?;
            Ok(0)
        }
        Command::Info { config } => {
            let config = load(config, cli)?;
            let policy = config.policy().map_err(|e| e.to_string())?;
            let scene = config.build_scene().map_err(|e| e.to_string())?;
            let pen = scene.pencil(&policy).map_err(|e| e.to_string())?;
            let target = config.target(&scene, &policy);
            let family = scene.family(target, &policy);
            let info = Info {
                scene: config.scene_name().to_string(),
                singular_parameters: pen.singular_parameters().to_vec(),
                type_components: pen
                    .type_components()
                    .iter()
                    .map(|iv| [bound(iv.lo), bound(iv.hi)])
                    .collect(),
                target,
                domain: family.as_ref().ok().map(|f| [bound(f.domain().lo), bound(f.domain().hi)]),
                margin: family.as_ref().ok().map(|f| f.margin()),
                family_error: family.as_ref().err().map(|e| e.to_string()),
            };
            let mut text = serde_json::to_string_pretty(&info).expect("info serializes");
            text.push('\n');
            write(&cli.out, &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
