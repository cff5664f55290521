use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use efm_core::exec::Execution;
use efm_core::harness::{run_and_write, run_suite, ConfigFile, HarnessError, PolarChoice, Suite, SuiteOptions};
use efm_core::optim::efm_bound;

#[derive(Parser)]
#[command(name = "efm", version, about = "Muon-family optimizer experiments, property suites and EF-M bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV trace plus a JSON sidecar.
    Run {
        /// TOML experiment config; optional when --preset is given.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Base preset (cex1-appendixE, efm-appendixE); config keys override it.
        #[arg(long)]
        preset: Option<String>,
        /// CSV output path; the sidecar goes next to it with a .json extension.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        polar: Option<PolarArg>,
    },
    /// Run a property suite and report each check; exits 1 on any failure.
    Verify {
        /// reduction, compressor, lmo, cex1, cex2, ef-bound, polar or all.
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Print the EF-M bound for T steps with lambda_t = 1/sqrt(t+1).
    Bound {
        #[arg(long = "T")]
        steps: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        dist0: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolarArg {
    Exact,
    Ns,
}

fn cmd_run(
    config: Option<PathBuf>,
    preset: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    polar: Option<PolarArg>,
) -> Result<(), HarnessError> {
    let file = match &config {
        Some(path) => ConfigFile::load(path)?,
        None if preset.is_some() => ConfigFile::default(),
        None => return Err(HarnessError::Config("run needs --config or --preset".into())),
    };
    let overrides = ConfigFile {
        output: out,
        seed,
        polar: polar.map(|p| match p {
            PolarArg::Exact => PolarChoice::Exact,
            PolarArg::Ns => PolarChoice::Ns,
        }),
        ..ConfigFile::default()
    };
    let resolved = overrides.over(file).resolve(preset.as_deref())?;
    let result = run_and_write(&resolved)?;
    println!(
        "wrote {} rows to {} (config: {})",
        result.rows.len(),
        resolved.output.display(),
        resolved.sidecar_path().display()
    );
    Ok(())
}

fn cmd_verify(suite: &str, trials: Option<usize>, seed: Option<u64>, sequential: bool) -> Result<(), HarnessError> {
    let suites = match suite {
        "all" => Suite::ALL.to_vec(),
        name => vec![name.parse::<Suite>()?],
    };
    let defaults = SuiteOptions::default();
    let opts = SuiteOptions {
        trials,
        seed: seed.unwrap_or(defaults.seed),
        exec: if sequential { Execution::Sequential } else { Execution::Parallel },
    };
    let mut failed = Vec::new();
    for s in suites {
        let report = run_suite(s, &opts)?;
        println!("{report}");
        if !report.passed() {
            failed.push(s.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::Property(format!("failed suites: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            preset,
            out,
            seed,
            polar,
        } => cmd_run(config, preset, out, seed, polar),
        Command::Verify {
            suite,
            trials,
            seed,
            sequential,
        } => cmd_verify(&suite, trials, seed, sequential),
        Command::Bound {
            steps,
            delta,
            beta,
            sigma,
            dist0,
        } => efm_bound(steps, delta, beta, sigma, dist0)
            .map(|b| println!("{b}"))
            .map_err(|e| HarnessError::Config(e.to_string())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
