use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use solar_ehs::harness::trace::{write_trace, write_trace_files};
use solar_ehs::harness::{eval, power_budget, run_sweep, SweepAxis, SweepSpec};
use solar_ehs::mppt::MpptConfig;
use solar_ehs::oscillator::RoVariant;
use solar_ehs::trojan::{attack_feasibility, ToggleSource, TrojanConfig};
use solar_ehs::{run_scenario, Error, Hertz, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "ehs",
    version,
    about = "Solar energy-harvesting system simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its summary as JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Write the per-clock trace here (plus a `.meta.json` sidecar).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sweep one axis and print a CSV table.
    Sweep {
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated, strictly increasing.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the oscillator variant of the base scenario.
        #[arg(long)]
        variant: Option<RoVariant>,
    },
    /// Evaluate one model equation.
    Eval {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        eq: u8,
        /// `key=value,...`
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Run the Trojan attack against the tracker and report detection.
    TrojanDemo {
        /// External toggle rate; the controller clock is used when omitted.
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the attack trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print the per-block power budget.
    Budget {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(path: Option<&PathBuf>) -> Result<ScenarioConfig, Error> {
    path.map_or_else(
        || Ok(ScenarioConfig::default()),
        |p| ScenarioConfig::load(p),
    )
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, trace } => {
            let cfg = ScenarioConfig::load(&config)?;
            let (records, summary) = run_scenario(&cfg)?;
            if let Some(path) = trace {
                write_trace_files(&path, &records, &summary, &cfg)?;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
        }
        Command::Sweep {
            axis,
            values,
            config,
            variant,
        } => {
            let mut scenario = load(config.as_ref())?;
            if let Some(v) = variant {
                scenario.oscillator.variant = v;
            }
            let report = run_sweep(&SweepSpec {
                axis,
                values,
                scenario,
            })?;
            report.write_csv(std::io::stdout().lock())?;
        }
        Command::Eval { eq, params } => {
            let value = eval::evaluate(eq, &eval::parse_params(&params)?)?;
            println!("{value}");
        }
        Command::TrojanDemo {
            rate,
            config,
            trace,
        } => {
            let mut cfg = load(config.as_ref())?;
            let mut trojan = cfg.trojan.take().unwrap_or_default();
            trojan.enabled = true;
            if let Some(r) = rate {
                trojan.toggle_source = ToggleSource::ExternalRate(Hertz(r));
            }
            cfg.trojan = Some(trojan.clone());
            trojan_demo(&cfg, &trojan, trace)?;
        }
        Command::Budget { config } => {
            let cfg = load(config.as_ref())?;
            solar_ehs::validate_scenario(&cfg).into_result()?;
            println!("{}", power_budget(&cfg));
        }
    }
    Ok(())
}

fn trojan_demo(
    cfg: &ScenarioConfig,
    trojan: &TrojanConfig,
    trace: Option<PathBuf>,
) -> Result<(), Error> {
    let (records, summary) = run_scenario(cfg)?;
    let f_s = solar_ehs::harness::effective_converter(cfg).0.f_s;
    let window = f_s.period() * f64::from(MpptConfig::default().window_clocks());
    let rate = match trojan.toggle_source {
        ToggleSource::MpptClock => f_s,
        ToggleSource::ExternalRate(r) => r,
    };
    let feasibility = attack_feasibility(trojan, window, rate);
    println!("toggle rate        {} Hz", rate.0);
    println!("detection window   {:.2} us", window.micros());
    match feasibility.time_to_fire {
        Some(t) => println!(
            "isolated attack    fires after {} toggles ({:.2} us)",
            feasibility.toggles_to_fire.unwrap_or(0),
            t.micros()
        ),
        None => println!(
            "isolated attack    never fires (peak {:.1} mV)",
            feasibility.peak_v_cap.0 * 1e3
        ),
    }
    match summary.rst_fired_at {
        Some(t) => println!("RST fired          t = {:.2} us", t.micros()),
        None => println!("RST fired          no"),
    }
    match summary.first_flag_clock {
        Some(c) => println!(
            "Trojan flagged     clock {c} ({} flagged clocks)",
            summary.flagged_clocks
        ),
        None => println!("Trojan flagged     no"),
    }
    match summary.locked_code {
        Some(c) if summary.rst_fired_at.is_none() => {
            println!("MPP lock           code {}", c.count())
        }
        _ => println!("MPP lock           interrupted"),
    }
    if let Some(path) = trace {
        write_trace_files(&path, &records, &summary, cfg)?;
    } else if log::log_enabled!(log::Level::Debug) {
        write_trace(&records, std::io::stderr().lock())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
