use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lempert_core::lempert::estimate_lempert;
use lempert_core::records::EstimateRecord;
use lempert_core::OptimizerConfig;
use lempert_lab::input::{parse_domain, parse_point, read_poles};
use lempert_lab::{run_experiment, ExperimentConfig, ExperimentId, LabError, Result};

const EXIT_UNCERTIFIED: u8 = 3;
const EXIT_ASSERTION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "lempert-lab",
    version,
    about = "Weighted multipole Lempert function experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment and write its result rows.
    Run {
        /// disc-oracle, remark2-bidisc, example4-product,
        /// covering-counterexample, theorem1-truncation or monotonicity-suite
        experiment: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file for the rows; `-` for standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replaces the committed config of the experiment.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        restarts: Option<usize>,
        /// Print a table of the rows to standard error.
        #[arg(long)]
        summary: bool,
        /// Include wall-clock times in the rows.
        #[arg(long)]
        timing: bool,
    },
    /// Estimate one Lempert function value and print the record.
    Estimate {
        /// disc, punctured, bidisc, polydisc:N or ball:N
        #[arg(long)]
        domain: String,
        /// JSON list of {"point": [{"re": .., "im": ..}, ..], "weight": ..}
        #[arg(long)]
        poles: PathBuf,
        /// Comma-separated complex coordinates, e.g. `0.1+0.2i,0`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// TOML file whose [optimizer] table sets the search options.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            experiment,
            seed,
            out,
            config,
            restarts,
            summary,
            timing,
        } => run(&experiment, seed, out, config, restarts, summary, timing),
        Command::Estimate {
            domain,
            poles,
            z,
            restarts,
            seed,
            config,
            timing,
        } => estimate(&domain, &poles, &z, restarts, seed, config, timing),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(
    experiment: &str,
    seed: Option<u64>,
    out: Option<PathBuf>,
    config: Option<PathBuf>,
    restarts: Option<usize>,
    summary: bool,
    timing: bool,
) -> Result<ExitCode> {
    let id: ExperimentId = experiment.parse()?;
    let mut config = match config {
        Some(path) => ExperimentConfig::from_path(&path)?,
        None => ExperimentConfig::builtin(id),
    };
    if config.experiment_id != id {
        return Err(LabError::Usage(format!(
            "config is for `{}`, not `{id}`",
            config.experiment_id
        )));
    }
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(restarts) = restarts {
        config.optimizer.restarts = restarts;
    }
    if let Some(out) = out {
        config.output.path = Some(out);
    }
    config.output.summary |= summary;
    config.output.timing |= timing;

    let report = run_experiment(&config)?;
    match config.output.path.as_deref() {
        Some(path) if path != Path::new("-") => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let mut file = BufWriter::new(File::create(path)?);
            report.write_rows(&mut file, config.output.timing)?;
            file.flush()?;
        }
        _ => report.write_rows(io::stdout().lock(), config.output.timing)?,
    }
    if config.output.summary {
        report.write_summary(io::stderr().lock())?;
    }
    if report.passed() {
        return Ok(ExitCode::SUCCESS);
    }
    for failure in &report.failures {
        eprintln!("FAIL {failure}");
    }
    Ok(ExitCode::from(EXIT_ASSERTION))
}

fn optimizer_from_file(path: &Path) -> Result<OptimizerConfig> {
    let mut table: toml::Table = toml::from_str(&fs::read_to_string(path)?)?;
    match table.remove("optimizer") {
        Some(value) => Ok(value.try_into()?),
        None => Ok(OptimizerConfig::default()),
    }
}

fn estimate(
    domain: &str,
    poles: &Path,
    z: &str,
    restarts: Option<usize>,
    seed: Option<u64>,
    config: Option<PathBuf>,
    timing: bool,
) -> Result<ExitCode> {
    let domain = parse_domain(domain)?;
    let z = parse_point(z)?;
    let spec = read_poles(poles)?;
    let mut optimizer = match config {
        Some(path) => optimizer_from_file(&path)?,
        None => OptimizerConfig::default(),
    };
    if let Some(restarts) = restarts {
        optimizer.restarts = restarts;
    }
    if let Some(seed) = seed {
        optimizer.seed = seed;
    }
    let estimate = estimate_lempert(&domain, &spec, &z, &optimizer)?;
    let mut stdout = io::stdout().lock();
    serde_json::to_writer(&mut stdout, &EstimateRecord::new(&estimate, timing))?;
    writeln!(stdout)?;
    Ok(if estimate.certified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_UNCERTIFIED)
    })
}
