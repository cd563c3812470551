use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bauv_sim::output::write_waypoints;
use bauv_sim::sweep::{run_sweep, SweepSpec, WAYPOINTS_FILE};
use bauv_sim::{load_config, AppError, Config};
use clap::{Args, Parser, Subcommand};

/// Path-following simulation of a multi-link swimming robot.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial with the configured guidance and amplitude modes.
    Run(Common),
    /// Run the guidance x amplitude x look-ahead sweep.
    Sweep(Common),
    /// Write the reference waypoints only.
    Path(Common),
    /// Check a configuration file and print the resolved configuration.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "bauv-out")]
    out: PathBuf,
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Overrides `sim.rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Record per-trial wall-clock time in the metrics CSV.
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn load(&self) -> Result<Config, AppError> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => Config::default(),
        };
        if let Some(seed) = self.seed {
            cfg.sim.rng_seed = seed;
        }
        Ok(cfg)
    }
}

fn simulate(spec: &SweepSpec, opts: &Common) -> Result<(), AppError> {
    let (outcomes, written, table) = run_sweep(spec, &opts.out, opts.jobs, opts.timing)?;
    let mut stdout = io::stdout().lock();
    stdout.write_all(table.as_bytes())?;
    writeln!(
        stdout,
        "wrote {} files to {}",
        written.files.len(),
        opts.out.display()
    )?;
    let failed: Vec<String> = written
        .rows
        .iter()
        .filter_map(|r| r.error.clone())
        .collect();
    for f in &failed {
        eprintln!("error: {f}");
    }
    if outcomes.iter().any(|o| o.aborted()) {
        return Err(AppError::Diverged(format!(
            "{} of {} trials aborted",
            failed.len(),
            outcomes.len()
        )));
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Run(opts) => simulate(&SweepSpec::single(&opts.load()?)?, &opts),
        Command::Sweep(opts) => simulate(&SweepSpec::from_config(&opts.load()?)?, &opts),
        Command::Path(opts) => {
            let cfg = opts.load()?;
            let points = cfg
                .sim_config()?
                .path
                .points()
                .expect("validated path spec");
            std::fs::create_dir_all(&opts.out)?;
            let p = opts.out.join(WAYPOINTS_FILE);
            write_waypoints(&points, io::BufWriter::new(std::fs::File::create(&p)?))?;
            println!("wrote {} waypoints to {}", points.len(), p.display());
            Ok(())
        }
        Command::Validate(opts) => {
            let cfg = opts.load()?;
            cfg.validate()?;
            print!("{}", cfg.to_toml_string());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
