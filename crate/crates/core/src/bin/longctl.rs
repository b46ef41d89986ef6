use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use longctl::harness::{
    default_matrix, run_spec, summary_to_csv, tune_pid, ControllerId, RunSpec, ScenarioKind,
    TerrainId,
};
use longctl::{Config, Error};

#[derive(Parser)]
#[command(name = "longctl", about = "Longitudinal speed-tracking benchmark harness")]
struct Cli {
    /// TOML config file; missing keys take built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Sensor RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Plant integration step in seconds.
    #[arg(long, global = true, default_value_t = 0.01)]
    dt: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario and print its metrics.
    Run {
        #[arg(long, default_value = "set-point")]
        scenario: String,
        #[arg(long, default_value = "flat")]
        terrain: String,
        #[arg(long, default_value = "shrinking-domain")]
        controller: String,
        /// Trace CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full scenario × terrain × controller matrix and write a
    /// summary CSV plus per-run traces.
    Compare {
        /// Output directory for traces and summary.csv.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Grid-search PID gains on the flat-terrain scenarios and print them.
    TunePid,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(0),
        Err(e @ (Error::ConfigParse(_) | Error::ConfigInvariant { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<Config, Error> {
    match path {
        Some(p) => Config::from_file(p),
        None => Ok(Config::default()),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if !(cli.dt > 0.0 && cli.dt.is_finite()) {
        return Err(Error::ConfigParse("--dt must be a positive number".into()));
    }
    let config = load_config(cli.config.as_ref())?;

    match cli.command {
        Command::Run {
            scenario,
            terrain,
            controller,
            out,
        } => {
            let spec = RunSpec {
                scenario: ScenarioKind::parse(&scenario)?,
                terrain: TerrainId::parse(&terrain)?,
                controller: ControllerId::parse(&controller)?,
                config,
                seed: cli.seed,
                dt_s: cli.dt,
                out,
            };
            let (_, report) = run_spec(&spec)?;
            print!("{}", summary_to_csv(std::slice::from_ref(&report)));
            Ok(())
        }
        Command::Compare { out } => {
            let specs = default_matrix(&config, cli.seed, cli.dt, Some(&out));
            let mut reports = Vec::with_capacity(specs.len());
            for spec in &specs {
                let (_, report) = run_spec(spec)?;
                reports.push(report);
            }
            let summary = summary_to_csv(&reports);
            std::fs::create_dir_all(&out)?;
            std::fs::write(out.join("summary.csv"), &summary)?;
            print!("{summary}");
            Ok(())
        }
        Command::TunePid => {
            let (gains, rmse_kmh) = tune_pid(&config, cli.dt)?;
            println!("kp = {}", gains.kp);
            println!("ki = {}", gains.ki);
            println!("kd = {}", gains.kd);
            println!("# mean flat RMSE: {rmse_kmh:.4} km/h");
            Ok(())
        }
    }
}
