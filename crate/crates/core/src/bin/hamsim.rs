use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hamsim_core::lab::{self, Format, Report, RunOptions, SuiteOptions, SweepAxis};
use hamsim_core::{Error, Result};

/// Error-mitigated Hamiltonian simulation laboratory.
#[derive(Parser)]
#[command(name = "hamsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the cost model at the spec's target accuracy.
    Cost(Common),
    /// Run one seeded simulation of the spec.
    Simulate(Common),
    /// Run validation suites.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Suite ids, comma separated, or `all`. Use `list` to print them.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Sweep one parameter of the spec.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Axis: d, N, r, epsilon, gamma, t or s. Defaults to the spec's [sweep].
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated values for --axis.
        #[arg(long, value_delimiter = ',', requires = "axis")]
        values: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment spec (TOML).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<usize>,
    /// Directory for the report and its timing file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions { seed: self.seed, shots: self.shots }
    }

    fn experiment(&self) -> Result<lab::Experiment> {
        let path = self.spec.as_ref().ok_or_else(|| Error::Config("--spec is required".into()))?;
        lab::load_spec(path)
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Cost(c) | Command::Simulate(c) => c,
        Command::Sweep { common, .. } | Command::Validate { common, .. } => common,
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Command::Validate { suite, .. } = &cli.command {
        if suite == "list" {
            for (name, what) in lab::SUITES {
                println!("{name:<18} {what}");
            }
            return Ok(true);
        }
    }
    let c = common(&cli.command);
    setup(c)?;
    let started = Instant::now();
    let (report, stem) = match &cli.command {
        Command::Cost(_) => {
            let e = c.experiment()?;
            (lab::cost_report(&e, &c.options())?, format!("{}-cost", e.spec.name))
        }
        Command::Simulate(_) => {
            let e = c.experiment()?;
            (lab::simulate(&e, &c.options())?, format!("{}-simulate", e.spec.name))
        }
        Command::Sweep { axis, values, .. } => {
            let e = c.experiment()?;
            let axis = match axis {
                Some(a) => Some((SweepAxis::parse(a)?, values.clone())),
                None => None,
            };
            (lab::sweep(&e, axis, &c.options())?, format!("{}-sweep", e.spec.name))
        }
        Command::Validate { suite, .. } => {
            if c.spec.is_some() {
                return Err(Error::Config("validate runs built-in suites and takes no --spec".into()));
            }
            let names: Vec<&str> = suite.split(',').map(str::trim).collect();
            let opts = SuiteOptions { seed: c.seed.unwrap_or(0), shots: c.shots };
            (lab::run_suites(&names, &opts)?, "validation".to_string())
        }
    };
    write(c, &report, &stem, started.elapsed().as_secs_f64())?;
    Ok(report.passed())
}

fn setup(c: &Common) -> Result<()> {
    if let Some(n) = c.workers {
        if n == 0 {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn write(c: &Common, report: &Report, stem: &str, elapsed: f64) -> Result<()> {
    match &c.out {
        Some(dir) => {
            let path = lab::emit(report, c.format, dir, stem)?;
            // wall time lives beside the report so the report stays byte-stable
            std::fs::write(dir.join(format!("{stem}.timing")), format!("wall_seconds {elapsed:.3}\n"))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", lab::render(report, c.format)?),
    }
    eprint!("{}", report.summary());
    for (rec, chk) in report.failures() {
        eprintln!(
            "  failed: {} [{}] {}: {} vs {} (margin {:.3e})",
            rec.suite, rec.label, chk.name, chk.value, chk.bound, chk.margin
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
