use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bayesbound::report::{
    parse_config, render, resolve_seed, run, run_suite, validate, write_csv, write_json, OracleChoice,
    OutputFormat, DEFAULT_MC_SAMPLES,
};

#[derive(Parser)]
#[command(name = "bayesbound", version, about = "Bayes and minimax risk lower bounds checked against oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format: table, csv or json (overrides the config).
    #[arg(long, global = true)]
    output: Option<OutputFormat>,
    /// Master seed (overrides BAYESBOUND_SEED and the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count for simulated oracles.
    #[arg(long, global = true)]
    mc_samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured bounds against the oracle.
    Run { config: PathBuf },
    /// Check a config and list schema violations.
    Validate { config: PathBuf },
    /// Run the built-in corpus.
    Suite,
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_seed = std::env::var("BAYESBOUND_SEED").ok();
    match cli.command {
        Command::Validate { config } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let diagnostics = validate(&text);
            if diagnostics.is_empty() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                for d in &diagnostics {
                    println!("{d}");
                }
                ExitCode::from(2)
            }
        }
        Command::Run { config } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let mut cfg = match parse_config(&text) {
                Ok(c) => c,
                Err(diagnostics) => {
                    for d in &diagnostics {
                        eprintln!("error: {d}");
                    }
                    return ExitCode::from(2);
                }
            };
            cfg.seed = match resolve_seed(cfg.seed, env_seed.as_deref(), cli.seed) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(n) = cli.mc_samples {
                if matches!(cfg.oracle, Some(OracleChoice::Mc { .. })) || cfg.oracle.is_none() {
                    cfg.oracle = Some(OracleChoice::Mc { n_samples: n });
                }
            }
            let format = cli.output.unwrap_or(cfg.output);
            match run(&cfg) {
                Ok(report) => {
                    print!("{}", render(&report, format));
                    ExitCode::from(report.exit_status() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Suite => {
            let seed = match resolve_seed(0, env_seed.as_deref(), cli.seed) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let results = match run_suite(seed, cli.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES)) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let status = results.iter().map(|(_, r)| r.exit_status()).max().unwrap_or(0);
            match cli.output.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let refs: Vec<(Option<&str>, &_)> = results.iter().map(|(n, r)| (Some(n.as_str()), r)).collect();
                    print!("{}", write_csv(&refs));
                }
                OutputFormat::Json => print!("{}", write_json(&results)),
                OutputFormat::Table => {
                    for (name, r) in &results {
                        println!("== {name}");
                        print!("{}", render(r, OutputFormat::Table));
                    }
                }
            }
            ExitCode::from(status as u8)
        }
    }
}
