use clap::{Parser, Subcommand, ValueEnum};
use kkgreen::scenario::{check_descriptions, emit_reports, load_scenario, run_with_units, summary_table, OutputFormat, UnitSystem};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kkgreen", version, about = "Run verification scenarios for dispersive Green-function solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scenario and write reports.
    Run {
        scenario: PathBuf,
        /// Output directory; reports go into a subdirectory named after the scenario.
        #[arg(long, env = "KKGREEN_OUT", default_value = "kkgreen-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
        /// Worker threads for frequency-parallel work (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Override the scenario's unit system.
        #[arg(long, value_enum)]
        units: Option<Units>,
    },
    /// Load and validate a scenario, printing it with defaults filled in.
    Validate { scenario: PathBuf },
    /// List the available check names.
    ListChecks,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Si,
    Natural,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::ListChecks => {
            for (name, what) in check_descriptions() {
                println!("{name:<14} {what}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { scenario } => match load_scenario(&scenario) {
            Ok(loaded) => {
                for w in &loaded.warnings {
                    eprintln!("warning: {w}");
                }
                println!("{}", serde_json::to_string_pretty(&loaded.scenario).expect("scenario serializes"));
                ExitCode::SUCCESS
            }
            Err(e) => {
                report_error(&scenario, &e);
                ExitCode::from(2)
            }
        },
        Command::Run { scenario, out, format, threads, units } => {
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: cannot configure {n} threads: {e}");
                    return ExitCode::from(2);
                }
            }
            let loaded = match load_scenario(&scenario) {
                Ok(l) => l,
                Err(e) => {
                    report_error(&scenario, &e);
                    return ExitCode::from(2);
                }
            };
            let units = units.map(|u| match u {
                Units::Si => UnitSystem::Si.units(),
                Units::Natural => UnitSystem::Natural.units(),
            });
            let outcome = run_with_units(&loaded, units);
            print!("{}", summary_table(&outcome));
            let format = match format {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
                Format::Both => OutputFormat::Both,
            };
            let dir = out.join(&loaded.scenario.name);
            match emit_reports(&outcome, &dir, format) {
                Ok(_) => println!("reports written to {}", dir.display()),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn report_error(path: &std::path::Path, e: &kkgreen::Error) {
    match e {
        kkgreen::Error::Validation(list) => {
            eprintln!("error: {} is not a valid scenario:", path.display());
            for item in list {
                eprintln!("  - {item}");
            }
        }
        other => eprintln!("error: {}: {other}", path.display()),
    }
}
