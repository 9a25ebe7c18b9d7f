//! Result files and run manifests.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};
use wimax_phy::channel::{ChannelKind, TapTable};
use wimax_phy::harness::BerCurve;
use wimax_phy::ofdm::CpRatio;

use crate::config::{OutputFormat, RunConfig};
use crate::{CliError, SweepResult};

pub const TOOL_NAME: &str = "wimax-sim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON result document: the full configuration plus per-point records.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonResults {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    #[serde_as(as = "DisplayFromStr")]
    pub channel: ChannelKind,
    #[serde_as(as = "DisplayFromStr")]
    pub cp: CpRatio,
    pub curve: BerCurve,
}

/// Provenance record written next to every result file. Two identical
/// runs produce manifests that differ only in `timestamp_unix`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    /// Coding-table row, or the uncoded modulation.
    pub profile: String,
    #[serde_as(as = "DisplayFromStr")]
    pub channel: ChannelKind,
    #[serde_as(as = "DisplayFromStr")]
    pub cp: CpRatio,
    pub bandwidth_hz: f64,
    pub sample_rate_hz: f64,
    /// Tap delays in samples after rounding to the sampling grid.
    pub tap_delays_samples: Vec<usize>,
    pub tap_table: String,
    pub tap_table_sha256: String,
    pub config: RunConfig,
    pub results_file: Option<String>,
    pub timestamp_unix: u64,
}

pub fn profile_label(cfg: &RunConfig) -> String {
    match cfg.coding_profile() {
        Some(p) => {
            let (k, n) = p.cc_rate.ratio();
            format!(
                "{} {}: {} -> {} bytes, RS({},{},{}), CC {}/{}",
                p.modulation,
                p.overall_rate,
                p.uncoded_bytes,
                p.coded_bytes,
                p.rs.n_out,
                p.rs.k_in,
                p.rs.t_corr,
                n,
                k
            )
        }
        None => format!("{} uncoded", cfg.modulation),
    }
}

pub fn manifest_for(
    result: &SweepResult,
    cfg: &RunConfig,
    table: &TapTable,
    results_file: Option<&Path>,
) -> Manifest {
    Manifest {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        seed: cfg.seed,
        profile: profile_label(cfg),
        channel: result.channel,
        cp: result.cp,
        bandwidth_hz: cfg.bandwidth_hz,
        sample_rate_hz: result.sample_rate_hz,
        tap_delays_samples: result.sample_delays.clone(),
        tap_table: cfg
            .tap_table
            .as_ref()
            .map_or_else(|| "builtin".to_string(), |p| p.display().to_string()),
        tap_table_sha256: table.checksum().to_string(),
        config: cfg.clone(),
        results_file: results_file.map(|p| p.display().to_string()),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    }
}

/// Serialized result body in the requested format.
pub fn render(
    result: &SweepResult,
    cfg: &RunConfig,
    format: OutputFormat,
) -> Result<String, CliError> {
    Ok(match format {
        OutputFormat::Csv => result.curve.to_csv(),
        OutputFormat::Json => {
            let doc = JsonResults {
                tool: TOOL_NAME.into(),
                version: TOOL_VERSION.into(),
                config: cfg.clone(),
                channel: result.channel,
                cp: result.cp,
                curve: result.curve.clone(),
            };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    })
}

pub fn parse_json_results(text: &str) -> Result<JsonResults, CliError> {
    Ok(serde_json::from_str(text)?)
}

/// Manifest path for a results file: `<file>.manifest.json`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

/// Output path for one combination of a sweep: the configured path when
/// the sweep has a single combination, otherwise `<stem>-<channel>-g<den>.<ext>`.
pub fn sweep_path(
    base: &Path,
    result: &SweepResult,
    sweep_len: usize,
    format: OutputFormat,
) -> PathBuf {
    if sweep_len == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().unwrap_or_default().to_string_lossy();
    let ext = base.extension().map_or_else(
        || format.extension().to_string(),
        |e| e.to_string_lossy().into_owned(),
    );
    base.with_file_name(format!(
        "{stem}-{}-g{}.{ext}",
        result.channel,
        result.cp.denominator()
    ))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the result file and its manifest.
pub fn emit_results(
    result: &SweepResult,
    cfg: &RunConfig,
    table: &TapTable,
    path: &Path,
    format: OutputFormat,
) -> Result<Manifest, CliError> {
    write(path, &render(result, cfg, format)?)?;
    let manifest = manifest_for(result, cfg, table, Some(path));
    write(
        &manifest_path(path),
        &(serde_json::to_string_pretty(&manifest)? + "\n"),
    )?;
    Ok(manifest)
}
