//! Run configuration: command-line flags merged over an optional
//! `key = value` file, validated into a [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};
use wimax_phy::channel::{ChannelKind, NoiseReference};
use wimax_phy::harness::{SnrAxis, StopRule, DEFAULT_SYMBOLS_PER_BURST};
use wimax_phy::link::Estimation;
use wimax_phy::mapper::Modulation;
use wimax_phy::ofdm::CpRatio;
use wimax_phy::profile::{CodingProfile, Rate};

use crate::CliError;

/// Supported channel bandwidths, Hz.
pub const BANDWIDTH_RANGE: std::ops::RangeInclusive<f64> = 1.25e6..=28e6;

#[derive(Parser, Debug, Default)]
#[command(
    name = "wimax-sim",
    version,
    about = "BER sweeps for the fixed-WiMAX OFDM physical layer"
)]
pub struct Cli {
    /// bpsk, qpsk, 16qam or 64qam
    #[arg(long)]
    pub modulation: Option<String>,
    /// Overall code rate selecting the coding-table row, e.g. 1/2
    #[arg(long)]
    pub rate: Option<String>,
    /// Bypass RS and convolutional coding
    #[arg(long)]
    pub uncoded: bool,
    /// awgn or sui1..sui6; repeat for a sweep
    #[arg(long = "channel")]
    pub channels: Vec<String>,
    /// Cyclic prefix ratio 1/32, 1/16, 1/8 or 1/4; repeat for a sweep
    #[arg(long = "cp")]
    pub cps: Vec<String>,
    /// Channel bandwidth in Hz (1.25e6 to 28e6), or with an MHz suffix
    #[arg(long)]
    pub bandwidth: Option<String>,
    /// SNR grid in dB as start:step:stop, or a single value
    #[arg(long)]
    pub snr: Option<String>,
    /// Grid meaning: snr (channel SNR) or ebn0
    #[arg(long = "snr-axis")]
    pub snr_axis: Option<String>,
    /// Channel estimation: perfect or pilot_ls
    #[arg(long)]
    pub estimation: Option<String>,
    /// SNR reference power: received or transmitted
    #[arg(long = "noise-ref")]
    pub noise_ref: Option<String>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<String>,
    /// Stop a point after this many bit errors
    #[arg(long = "min-errors")]
    pub min_errors: Option<String>,
    /// Stop a point after this many payload bits
    #[arg(long = "max-bits")]
    pub max_bits: Option<String>,
    /// OFDM symbols per burst (one channel draw per burst)
    #[arg(long = "symbols-per-burst")]
    pub symbols_per_burst: Option<String>,
    /// SUI tap table file replacing the built-in one
    #[arg(long = "tap-table")]
    pub tap_table: Option<String>,
    /// Result file; standard output when absent
    #[arg(long)]
    pub output: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// key = value file with the same keys as the long flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format {s:?}; expected csv or json")),
        }
    }
}

/// Inclusive SNR grid `start:step:stop` in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrRange {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl SnrRange {
    /// Grid values, computed by index so steps do not accumulate rounding.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl fmt::Display for SnrRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.step, self.stop)
    }
}

impl FromStr for SnrRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("{t:?} is not a finite number"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let range = match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                SnrRange {
                    start: v,
                    step: 1.0,
                    stop: v,
                }
            }
            [a, b, c] => SnrRange {
                start: num(a)?,
                step: num(b)?,
                stop: num(c)?,
            },
            _ => return Err(format!("{s:?} is not start:step:stop or a single value")),
        };
        if range.step <= 0.0 {
            return Err("step must be positive".into());
        }
        if range.stop < range.start {
            return Err("stop must not be below start".into());
        }
        if range.grid().len() > 10_000 {
            return Err("grid has more than 10000 points".into());
        }
        Ok(range)
    }
}

/// Fully validated run configuration.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde_as(as = "DisplayFromStr")]
    pub modulation: Modulation,
    /// Overall code rate; `None` for uncoded runs.
    #[serde_as(as = "Option<DisplayFromStr>")]
    pub rate: Option<Rate>,
    #[serde_as(as = "Vec<DisplayFromStr>")]
    pub channels: Vec<ChannelKind>,
    #[serde_as(as = "Vec<DisplayFromStr>")]
    pub cps: Vec<CpRatio>,
    pub bandwidth_hz: f64,
    #[serde_as(as = "DisplayFromStr")]
    pub snr: SnrRange,
    pub snr_axis: SnrAxis,
    #[serde_as(as = "DisplayFromStr")]
    pub estimation: Estimation,
    pub noise_reference: NoiseReference,
    pub seed: u64,
    pub stop: StopRule,
    pub symbols_per_burst: usize,
    pub tap_table: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn uncoded(&self) -> bool {
        self.rate.is_none()
    }

    /// Coding-table row for coded runs.
    pub fn coding_profile(&self) -> Option<CodingProfile> {
        self.rate
            .map(|r| CodingProfile::lookup(self.modulation, r).expect("validated at construction"))
    }
}

/// Keys accepted in config files, matching the long flag names.
const KEYS: [&str; 17] = [
    "modulation",
    "rate",
    "uncoded",
    "channel",
    "cp",
    "bandwidth",
    "snr",
    "snr-axis",
    "estimation",
    "noise-ref",
    "seed",
    "min-errors",
    "max-bits",
    "symbols-per-burst",
    "tap-table",
    "output",
    "format",
];

/// Keys whose values accumulate across lines and commas.
const LIST_KEYS: [&str; 2] = ["channel", "cp"];

type Values = BTreeMap<&'static str, Vec<String>>;

fn canonical_key(raw: &str) -> Option<&'static str> {
    let k = raw.trim().to_ascii_lowercase().replace('_', "-");
    KEYS.iter().copied().find(|key| *key == k)
}

fn split_list(key: &str, value: &str) -> Vec<String> {
    if LIST_KEYS.contains(&key) {
        value
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect()
    } else {
        vec![value.trim().to_string()]
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str, path: &Path) -> Result<Values, CliError> {
    let mut values = Values::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CliError::ConfigFile {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
        let key = canonical_key(k).ok_or_else(|| {
            err(format!(
                "unknown key {:?}; valid keys: {}",
                k.trim(),
                KEYS.join(", ")
            ))
        })?;
        let entry = values.entry(key).or_default();
        if LIST_KEYS.contains(&key) {
            entry.extend(split_list(key, v));
        } else {
            *entry = split_list(key, v);
        }
    }
    Ok(values)
}

fn flag_values(cli: &Cli) -> Values {
    let mut values = Values::new();
    let mut put = |key: &'static str, v: &Option<String>| {
        if let Some(v) = v {
            values.insert(key, split_list(key, v));
        }
    };
    put("modulation", &cli.modulation);
    put("rate", &cli.rate);
    put("bandwidth", &cli.bandwidth);
    put("snr", &cli.snr);
    put("snr-axis", &cli.snr_axis);
    put("estimation", &cli.estimation);
    put("noise-ref", &cli.noise_ref);
    put("seed", &cli.seed);
    put("min-errors", &cli.min_errors);
    put("max-bits", &cli.max_bits);
    put("symbols-per-burst", &cli.symbols_per_burst);
    put("tap-table", &cli.tap_table);
    put("output", &cli.output);
    put("format", &cli.format);
    if cli.uncoded {
        values.insert("uncoded", vec!["true".into()]);
    }
    for (key, list) in [("channel", &cli.channels), ("cp", &cli.cps)] {
        if !list.is_empty() {
            values.insert(key, list.iter().flat_map(|v| split_list(key, v)).collect());
        }
    }
    values
}

fn field_error(field: &str, message: impl fmt::Display) -> CliError {
    CliError::Field {
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn parse_one<T>(values: &Values, key: &'static str, default: T) -> Result<T, CliError>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    match values.get(key).and_then(|v| v.last()) {
        Some(v) => v.parse().map_err(|e| field_error(key, e)),
        None => Ok(default),
    }
}

fn parse_list<T>(values: &Values, key: &'static str, default: T) -> Result<Vec<T>, CliError>
where
    T: FromStr + PartialEq,
    T::Err: fmt::Display,
{
    let mut out = Vec::new();
    for v in values.get(key).into_iter().flatten() {
        let item: T = v.parse().map_err(|e| field_error(key, e))?;
        if !out.contains(&item) {
            out.push(item);
        }
    }
    if out.is_empty() {
        out.push(default);
    }
    Ok(out)
}

fn parse_bandwidth(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let (num, scale) = match t.strip_suffix("mhz") {
        Some(n) => (n, 1e6),
        None => (t.as_str(), 1.0),
    };
    let hz = num
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("{s:?} is not a number of Hz"))?
        * scale;
    if !BANDWIDTH_RANGE.contains(&hz) {
        return Err(format!(
            "{hz} Hz is outside the supported range {} to {} Hz",
            BANDWIDTH_RANGE.start(),
            BANDWIDTH_RANGE.end()
        ));
    }
    Ok(hz)
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("{s:?} is not a boolean")),
    }
}

/// Builds a validated configuration from merged key/value strings.
pub fn config_from_values(values: &Values) -> Result<RunConfig, CliError> {
    let modulation: Modulation = parse_one(values, "modulation", Modulation::Qpsk)?;
    let uncoded = match values.get("uncoded").and_then(|v| v.last()) {
        Some(v) => parse_bool(v).map_err(|e| field_error("uncoded", e))?,
        None => false,
    };
    let rate = if uncoded {
        None
    } else {
        let rate: Rate = parse_one(values, "rate", Rate::new(1, 2))?;
        CodingProfile::lookup(modulation, rate).map_err(|e| field_error("rate", e))?;
        Some(rate)
    };
    let bandwidth_hz = match values.get("bandwidth").and_then(|v| v.last()) {
        Some(v) => parse_bandwidth(v).map_err(|e| field_error("bandwidth", e))?,
        None => 5e6,
    };
    let snr: SnrRange = parse_one(
        values,
        "snr",
        SnrRange {
            start: 0.0,
            step: 2.0,
            stop: 20.0,
        },
    )?;
    let stop = StopRule {
        min_errors: parse_one(values, "min-errors", StopRule::default().min_errors)?,
        max_bits: parse_one(values, "max-bits", StopRule::default().max_bits)?,
    };
    if stop.min_errors == 0 {
        return Err(field_error("min-errors", "must be at least 1"));
    }
    let symbols_per_burst: usize =
        parse_one(values, "symbols-per-burst", DEFAULT_SYMBOLS_PER_BURST)?;
    if symbols_per_burst == 0 {
        return Err(field_error("symbols-per-burst", "must be at least 1"));
    }
    let path = |key| values.get(key).and_then(|v| v.last()).map(PathBuf::from);
    let cfg = RunConfig {
        modulation,
        rate,
        channels: parse_list(values, "channel", ChannelKind::Awgn)?,
        cps: parse_list(values, "cp", CpRatio::G1_8)?,
        bandwidth_hz,
        snr,
        snr_axis: parse_one(values, "snr-axis", SnrAxis::Snr)?,
        estimation: parse_one(values, "estimation", Estimation::Perfect)?,
        noise_reference: parse_one(values, "noise-ref", NoiseReference::Received)?,
        seed: parse_one(values, "seed", 1)?,
        stop,
        symbols_per_burst,
        tap_table: path("tap-table"),
        output: path("output"),
        format: parse_one(values, "format", OutputFormat::Csv)?,
    };
    let block_bits = match cfg.coding_profile() {
        Some(p) => p.uncoded_bytes * 8,
        None => wimax_phy::profile::uncoded_symbol_bytes(modulation) * 8,
    } * symbols_per_burst;
    if cfg.stop.max_bits < block_bits as u64 {
        return Err(field_error(
            "max-bits",
            format!("must cover at least one burst ({block_bits} bits)"),
        ));
    }
    Ok(cfg)
}

/// Merges flags over the `--config` file (if any) and validates.
pub fn config_from_cli(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut values = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_config_file(&text, path)?
        }
        None => Values::new(),
    };
    values.extend(flag_values(cli));
    config_from_values(&values)
}

/// Parses a full argument list (program name first).
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    config_from_cli(&cli)
}
