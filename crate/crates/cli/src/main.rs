use std::process::ExitCode;

use clap::Parser;
use wimax_sim::config::{config_from_cli, Cli};
use wimax_sim::output::{emit_results, render, sweep_path};
use wimax_sim::{load_tap_table, run, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = config_from_cli(cli)?;
    let table = load_tap_table(&cfg)?;
    let results = run(&cfg, &table)?;
    for result in &results {
        match &cfg.output {
            Some(base) => {
                let path = sweep_path(base, result, results.len(), cfg.format);
                let manifest = emit_results(result, &cfg, &table, &path, cfg.format)?;
                eprintln!(
                    "{} g={}: {} points -> {} (tap delays {:?} samples)",
                    result.channel,
                    result.cp,
                    result.curve.points.len(),
                    path.display(),
                    manifest.tap_delays_samples
                );
            }
            None => {
                if results.len() > 1 {
                    println!("# channel={} cp={}", result.channel, result.cp);
                }
                print!("{}", render(result, &cfg, cfg.format)?);
            }
        }
    }
    Ok(())
}
