//! Batch front end for the fixed-WiMAX OFDM BER simulator: parses a run
//! configuration, runs one BER curve per (channel, CP) combination and
//! writes CSV or JSON results with a manifest beside each file.

pub mod config;
pub mod output;

use std::path::PathBuf;

use wimax_phy::channel::{ChannelKind, TapTable};
use wimax_phy::harness::{run_curve, BerCurve, ChannelModel, Experiment};
use wimax_phy::link::{Coding, LinkProfile};
use wimax_phy::ofdm::{CpRatio, OfdmParams};
use wimax_phy::PhyError;

pub use config::{parse_config, OutputFormat, RunConfig, SnrRange};
pub use output::{emit_results, JsonResults, Manifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid value for `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{}:{line}: {message}", path.display())]
    ConfigFile {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error("JSON encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// One curve of a sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub channel: ChannelKind,
    pub cp: CpRatio,
    /// Tap delays in samples after rounding; empty for AWGN.
    pub sample_delays: Vec<usize>,
    pub sample_rate_hz: f64,
    pub curve: BerCurve,
}

pub fn load_tap_table(cfg: &RunConfig) -> Result<TapTable, CliError> {
    match &cfg.tap_table {
        Some(path) => Ok(TapTable::load(path)?),
        None => Ok(TapTable::builtin()),
    }
}

/// The experiment for one (channel, CP) combination.
pub fn experiment_for(
    cfg: &RunConfig,
    table: &TapTable,
    channel: ChannelKind,
    cp: CpRatio,
) -> Result<Experiment, CliError> {
    let coding = match cfg.coding_profile() {
        Some(p) => Coding::Coded(p),
        None => Coding::Uncoded(cfg.modulation),
    };
    let ofdm = OfdmParams::new(cp, cfg.bandwidth_hz)?;
    let model = match channel {
        ChannelKind::Awgn => ChannelModel::Awgn,
        ChannelKind::Sui(id) => ChannelModel::Sui(
            table
                .model(id)
                .cloned()
                .ok_or_else(|| PhyError::Config(format!("tap table has no SUI-{id} model")))?,
        ),
    };
    let mut e = Experiment::new(
        LinkProfile::new(coding, ofdm, cfg.estimation),
        model,
        cfg.snr.grid(),
        cfg.seed,
    );
    e.snr_axis = cfg.snr_axis;
    e.noise_reference = cfg.noise_reference;
    e.stop = cfg.stop;
    e.symbols_per_burst = cfg.symbols_per_burst;
    e.validate()?;
    Ok(e)
}

/// Runs every channel × CP combination in the order given.
pub fn run(cfg: &RunConfig, table: &TapTable) -> Result<Vec<SweepResult>, CliError> {
    let mut results = Vec::new();
    for &channel in &cfg.channels {
        for &cp in &cfg.cps {
            let e = experiment_for(cfg, table, channel, cp)?;
            let sample_delays = match &e.channel {
                ChannelModel::Awgn => Vec::new(),
                ChannelModel::Sui(m) => m.sample_delays(e.profile.ofdm.sample_rate),
            };
            let curve = run_curve(&e)?;
            results.push(SweepResult {
                channel,
                cp,
                sample_delays,
                sample_rate_hz: e.profile.ofdm.sample_rate,
                curve,
            });
        }
    }
    Ok(results)
}
