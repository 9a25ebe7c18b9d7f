//! AWGN and SUI-1..6 tapped-delay-line channels.
//!
//! Fading is quasi-static: one realization is drawn per burst and held for
//! every sample of it. Tap delays are rounded to the nearest sample at the
//! configured rate. The Doppler figures in the tap table are carried for
//! reference only; they do not affect a realization.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{PhyError, Result};
use crate::ofdm::{N_DATA, N_FFT, N_PILOT};

/// Tap table shipped with the crate.
pub const BUILTIN_TAP_TABLE: &str = include_str!("../data/sui_models.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terrain {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Low,
    Moderate,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub delay_us: f64,
    pub power_db: f64,
    /// Linear Rician K-factor; 0 is Rayleigh, infinity is a fixed gain.
    pub k_factor: f64,
    pub doppler_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiModel {
    pub id: u8,
    pub terrain: Terrain,
    #[serde(rename = "doppler")]
    pub doppler_class: Level,
    pub delay_spread: Level,
    pub los: Level,
    #[serde(rename = "tap")]
    pub taps: Vec<Tap>,
}

impl SuiModel {
    /// Mean tap powers, linear, scaled to sum to one.
    pub fn normalized_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self
            .taps
            .iter()
            .map(|t| 10f64.powf(t.power_db / 10.0))
            .collect();
        let total: f64 = lin.iter().sum();
        lin.into_iter().map(|p| p / total).collect()
    }

    /// Tap delays rounded to whole samples at `sample_rate`.
    pub fn sample_delays(&self, sample_rate: f64) -> Vec<usize> {
        self.taps
            .iter()
            .map(|t| (t.delay_us * 1e-6 * sample_rate).round() as usize)
            .collect()
    }

    pub fn name(&self) -> String {
        format!("sui{}", self.id)
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: String| PhyError::Config(format!("SUI-{}: {reason}", self.id));
        if !(1..=6).contains(&self.id) {
            return Err(bad("id must be 1..6".into()));
        }
        if self.taps.len() != 3 {
            return Err(bad(format!("expected 3 taps, found {}", self.taps.len())));
        }
        if self.taps.windows(2).any(|w| w[1].delay_us < w[0].delay_us) {
            return Err(bad("tap delays must be nondecreasing".into()));
        }
        if self.taps.iter().any(|t| {
            t.delay_us < 0.0 || !t.power_db.is_finite() || t.k_factor.is_nan() || t.k_factor < 0.0
        }) {
            return Err(bad("negative delay, non-finite power or negative K".into()));
        }
        let expected = match self.id {
            1 | 2 => Terrain::C,
            3 | 4 => Terrain::B,
            _ => Terrain::A,
        };
        if self.terrain != expected {
            return Err(bad(format!("terrain must be {expected:?}")));
        }
        Ok(())
    }
}

/// Parsed tap table plus the checksum of its source text.
#[derive(Debug, Clone)]
pub struct TapTable {
    models: Vec<SuiModel>,
    checksum: String,
}

#[derive(Deserialize)]
struct TapTableFile {
    model: Vec<SuiModel>,
}

impl TapTable {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_TAP_TABLE).expect("built-in tap table is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: TapTableFile =
            toml::from_str(text).map_err(|e| PhyError::Config(format!("tap table: {e}")))?;
        let mut models = file.model;
        models.sort_by_key(|m| m.id);
        for m in &models {
            m.validate()?;
        }
        let ids: Vec<u8> = models.iter().map(|m| m.id).collect();
        if ids != [1, 2, 3, 4, 5, 6] {
            return Err(PhyError::Config(format!(
                "tap table must define SUI-1..6 exactly once, found {ids:?}"
            )));
        }
        let checksum = Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(Self { models, checksum })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PhyError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn model(&self, id: u8) -> Option<&SuiModel> {
        self.models.iter().find(|m| m.id == id)
    }

    pub fn models(&self) -> &[SuiModel] {
        &self.models
    }

    /// Hex SHA-256 of the table text.
    pub fn checksum(&self) -> &str {
        &self.checksum
    }
}

/// Channel selection: AWGN only, or a SUI model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    Awgn,
    Sui(u8),
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelKind::Awgn => f.write_str("awgn"),
            ChannelKind::Sui(id) => write!(f, "sui{id}"),
        }
    }
}

impl FromStr for ChannelKind {
    type Err = PhyError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('-', "");
        if t == "awgn" {
            return Ok(ChannelKind::Awgn);
        }
        t.strip_prefix("sui")
            .and_then(|n| n.parse::<u8>().ok())
            .filter(|n| (1..=6).contains(n))
            .map(ChannelKind::Sui)
            .ok_or_else(|| PhyError::InvalidParameter {
                name: "channel",
                reason: format!("unknown channel {s:?}; expected awgn or sui1..sui6"),
            })
    }
}

/// One drawn channel: complex gain and integer delay per tap.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<Complex64>,
    pub sample_delays: Vec<usize>,
}

impl ChannelRealization {
    /// Single unit tap at zero delay.
    pub fn identity() -> Self {
        Self {
            gains: vec![Complex64::new(1.0, 0.0)],
            sample_delays: vec![0],
        }
    }

    pub fn new(gains: Vec<Complex64>, sample_delays: Vec<usize>) -> Result<Self> {
        crate::error::check_len("channel tap delays", gains.len(), sample_delays.len())?;
        Ok(Self {
            gains,
            sample_delays,
        })
    }

    pub fn max_delay(&self) -> usize {
        self.sample_delays.iter().copied().max().unwrap_or(0)
    }

    pub fn total_power(&self) -> f64 {
        self.gains.iter().map(|g| g.norm_sqr()).sum()
    }

    /// `H[k] = sum_i g_i exp(-j 2 pi k d_i / N)` for every FFT bin.
    pub fn frequency_response(&self, n_fft: usize) -> Vec<Complex64> {
        (0..n_fft)
            .map(|k| {
                self.gains
                    .iter()
                    .zip(&self.sample_delays)
                    .map(|(&g, &d)| {
                        let phase =
                            -2.0 * std::f64::consts::PI * ((k * d) % n_fft) as f64 / n_fft as f64;
                        g * Complex64::from_polar(1.0, phase)
                    })
                    .sum()
            })
            .collect()
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sigma = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(sigma * re, sigma * im)
}

/// Draws one quasi-static realization. Each tap is a fixed line-of-sight
/// component of power `P K/(K+1)` plus circular Gaussian scatter of power
/// `P/(K+1)`, with tap powers normalized to unit total.
pub fn draw_realization<R: Rng + ?Sized>(
    model: &SuiModel,
    rng: &mut R,
    sample_rate: f64,
) -> ChannelRealization {
    let powers = model.normalized_powers();
    let gains = model
        .taps
        .iter()
        .zip(&powers)
        .map(|(tap, &p)| {
            let k = tap.k_factor;
            let (los, scatter) = if k.is_infinite() {
                (p, 0.0)
            } else {
                (p * k / (k + 1.0), p / (k + 1.0))
            };
            let mut g = Complex64::new(los.sqrt(), 0.0);
            if scatter > 0.0 {
                g += complex_gaussian(rng, scatter);
            }
            g
        })
        .collect();
    ChannelRealization {
        gains,
        sample_delays: model.sample_delays(sample_rate),
    }
}

pub fn draw_realization_seeded(
    model: &SuiModel,
    seed: u64,
    sample_rate: f64,
) -> ChannelRealization {
    draw_realization(model, &mut ChaCha8Rng::seed_from_u64(seed), sample_rate)
}

pub fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        0.0
    } else {
        x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
    }
}

/// Signal power that the requested SNR refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseReference {
    /// Mean power of the noise-free received samples of this burst, so the
    /// SNR is the one actually seen at the receiver for each realization.
    #[default]
    Received,
    /// Mean power of the transmitted burst; with unit mean channel power
    /// this is the ensemble-average received SNR.
    Transmitted,
}

impl fmt::Display for NoiseReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseReference::Received => "received",
            NoiseReference::Transmitted => "transmitted",
        })
    }
}

impl FromStr for NoiseReference {
    type Err = PhyError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "received" | "rx" => Ok(NoiseReference::Received),
            "transmitted" | "tx" => Ok(NoiseReference::Transmitted),
            _ => Err(PhyError::InvalidParameter {
                name: "noise_reference",
                reason: format!("unknown reference {s:?}; expected received or transmitted"),
            }),
        }
    }
}

/// Noise variance per complex sample that puts `signal` at `snr_db`.
/// Zero at infinite SNR.
pub fn noise_variance(signal: &[Complex64], snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        mean_power(signal) / 10f64.powf(snr_db / 10.0)
    }
}

/// Passes `x` through the tapped delay line and adds complex AWGN sized so
/// that the mean noise-free received power over the noise power equals
/// `snr_db`. Samples before the burst are taken as zero and the output
/// keeps the input length. Returns the received samples and the noise
/// variance used.
pub fn apply_channel<R: Rng + ?Sized>(
    x: &[Complex64],
    h: &ChannelRealization,
    snr_db: f64,
    rng: &mut R,
) -> Result<(Vec<Complex64>, f64)> {
    apply_channel_with(x, h, snr_db, NoiseReference::Received, rng)
}

/// [`apply_channel`] with an explicit choice of SNR reference power.
pub fn apply_channel_with<R: Rng + ?Sized>(
    x: &[Complex64],
    h: &ChannelRealization,
    snr_db: f64,
    reference: NoiseReference,
    rng: &mut R,
) -> Result<(Vec<Complex64>, f64)> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(PhyError::InvalidParameter {
            name: "snr_db",
            reason: format!("must be finite or +inf, got {snr_db}"),
        });
    }
    let mut y = convolve(x, h);
    let nv = match reference {
        NoiseReference::Received => noise_variance(&y, snr_db),
        NoiseReference::Transmitted => noise_variance(x, snr_db),
    };
    if nv > 0.0 {
        for v in &mut y {
            *v += complex_gaussian(rng, nv);
        }
    }
    Ok((y, nv))
}

/// Noise-free tapped-delay-line output, truncated to `x.len()`.
pub fn convolve(x: &[Complex64], h: &ChannelRealization) -> Vec<Complex64> {
    let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
    for (&g, &d) in h.gains.iter().zip(&h.sample_delays) {
        if d >= x.len() {
            continue;
        }
        for (out, &v) in y[d..].iter_mut().zip(x) {
            *out += g * v;
        }
    }
    y
}

/// Share of FFT bins carrying energy (data plus pilots).
pub const OCCUPIED_FRACTION: f64 = (N_DATA + N_PILOT) as f64 / N_FFT as f64;

/// Converts Eb/N0 to channel SNR (both dB). Eb is the energy per
/// information bit on a data subcarrier: `Es/N0 = SNR / occupied_fraction`
/// and `Eb/N0 = Es/N0 / (bits_per_symbol * code_rate)`.
pub fn ebn0_to_snr_db(ebn0_db: f64, bits_per_symbol: usize, code_rate: f64) -> f64 {
    ebn0_db + 10.0 * (bits_per_symbol as f64 * code_rate * OCCUPIED_FRACTION).log10()
}

pub fn snr_to_ebn0_db(snr_db: f64, bits_per_symbol: usize, code_rate: f64) -> f64 {
    snr_db - 10.0 * (bits_per_symbol as f64 * code_rate * OCCUPIED_FRACTION).log10()
}
