//! `emsrc`: simulate measurements, retrieve phases, reconstruct strips and
//! run the validation suites from JSON experiment configs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use emsrc::experiment::{
    retrieval_comparison, run_experiment, simulate, write_retrieval_rows, write_retrieved_dataset, ExperimentConfig,
};
use emsrc::measurement::load_dataset;
use emsrc::validation::{run_validation, Suite};
use emsrc::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(name = "emsrc", version, about = "Strip reconstruction of electromagnetic sources from sparse far field data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the noise seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write one dataset per observation direction.
    Simulate(Common),
    /// Recover phased data from a phaseless dataset, or compare retrieved
    /// and exact data for a scheme-three config.
    Retrieve {
        #[command(flatten)]
        common: Common,
        /// Phaseless dataset CSV with three strengths.
        #[arg(long, conflicts_with = "config")]
        dataset: Option<PathBuf>,
    },
    /// Run the configured scheme and write the grid, heatmap and log.
    Reconstruct(Common),
    /// Run property checks and print a JSON report.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
    Validation(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let path = common.config.as_ref().ok_or_else(|| Failure::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path).map_err(|e| match e {
        Error::Config { line, message } => Failure::Config(format!("{}:{line}: {message}", path.display())),
        Error::Io(io) => Failure::Config(format!("{}: {io}", path.display())),
        other => Failure::Config(other.to_string()),
    })?;
    if let Some(seed) = common.seed {
        cfg.noise.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(common: &Common, cfg: Option<&ExperimentConfig>) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| cfg.map(|c| c.output.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn set_threads(common: &Common) -> Result<(), Failure> {
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn report_paths(paths: &[&Path]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(common) => {
            set_threads(&common)?;
            let cfg = load_config(&common)?;
            let paths = simulate(&cfg, &out_dir(&common, Some(&cfg)))?;
            report_paths(&paths.iter().map(PathBuf::as_path).collect::<Vec<_>>());
        }
        Command::Retrieve { common, dataset } => {
            set_threads(&common)?;
            if let Some(path) = dataset {
                let d = load_dataset(&path)?;
                let out = out_dir(&common, None);
                std::fs::create_dir_all(&out).map_err(Error::from)?;
                let stem = path.file_stem().map_or("dataset".into(), |s| s.to_string_lossy().into_owned());
                let target = out.join(format!("{stem}_retrieved.csv"));
                write_retrieved_dataset(&d, &target)?;
                report_paths(&[&target]);
            } else {
                let cfg = load_config(&common)?;
                let rows = retrieval_comparison(&cfg)?;
                let out = out_dir(&common, Some(&cfg));
                std::fs::create_dir_all(&out).map_err(Error::from)?;
                let target = out.join(format!("{}_retrieval.csv", cfg.stem()));
                write_retrieval_rows(&rows, &target)?;
                report_paths(&[&target]);
            }
        }
        Command::Reconstruct(common) => {
            set_threads(&common)?;
            let cfg = load_config(&common)?;
            let outputs = run_experiment(&cfg, &out_dir(&common, Some(&cfg)))?;
            report_paths(&[&outputs.grid_csv, &outputs.heatmap, &outputs.log]);
        }
        Command::Validate { common, suite } => {
            set_threads(&common)?;
            let suite: Suite = suite.parse().map_err(|e: Error| Failure::Config(e.to_string()))?;
            let report = run_validation(suite);
            let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
            println!("{json}");
            if let Some(out) = &common.out {
                std::fs::create_dir_all(out).map_err(Error::from)?;
                std::fs::write(out.join("validation.json"), &json).map_err(Error::from)?;
            }
            if !report.all_pass() {
                return Err(Failure::Validation(report.failures()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
        Err(Failure::Validation(n)) => {
            eprintln!("{n} validation check(s) failed");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
