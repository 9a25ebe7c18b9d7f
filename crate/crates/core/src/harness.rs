//! Monte-Carlo BER estimation over SNR grids.
//!
//! Every burst draws its payload, channel realization and noise from a
//! generator seeded by `(master_seed, snr_index, burst)`, so results do not
//! depend on thread count and the first bursts of a point are unaffected by
//! the stopping rule. Bursts run in parallel chunks and are folded in burst
//! order; the fold stops at the first burst that satisfies the rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    apply_channel_with, draw_realization, ebn0_to_snr_db, ChannelRealization, NoiseReference,
    SuiModel,
};
use crate::error::{PhyError, Result};
use crate::link::{Link, LinkProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    /// Stop once this many bit errors have accumulated.
    pub min_errors: u64,
    /// Stop once this many payload bits have been simulated.
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_errors: 100,
            max_bits: 10_000_000,
        }
    }
}

/// Meaning of the grid values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnrAxis {
    /// Channel SNR: mean received signal power over noise power per sample.
    #[default]
    Snr,
    /// Energy per information bit over noise density.
    Ebn0,
}

impl std::str::FromStr for SnrAxis {
    type Err = PhyError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "snr" => Ok(SnrAxis::Snr),
            "ebn0" | "eb/n0" => Ok(SnrAxis::Ebn0),
            _ => Err(PhyError::InvalidParameter {
                name: "snr_axis",
                reason: format!("unknown axis {s:?}; expected snr or ebn0"),
            }),
        }
    }
}

impl std::fmt::Display for SnrAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SnrAxis::Snr => "snr",
            SnrAxis::Ebn0 => "ebn0",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Identity channel plus white noise.
    Awgn,
    Sui(SuiModel),
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub profile: LinkProfile,
    pub channel: ChannelModel,
    /// Strictly increasing grid, in units of `snr_axis` (dB).
    pub snr_grid: Vec<f64>,
    pub snr_axis: SnrAxis,
    pub noise_reference: NoiseReference,
    pub stop: StopRule,
    /// OFDM symbols per burst; one channel realization per burst.
    pub symbols_per_burst: usize,
    pub master_seed: u64,
}

pub const DEFAULT_SYMBOLS_PER_BURST: usize = 4;

impl Experiment {
    pub fn new(
        profile: LinkProfile,
        channel: ChannelModel,
        snr_grid: Vec<f64>,
        master_seed: u64,
    ) -> Self {
        Self {
            profile,
            channel,
            snr_grid,
            snr_axis: SnrAxis::Snr,
            noise_reference: NoiseReference::Received,
            stop: StopRule::default(),
            symbols_per_burst: DEFAULT_SYMBOLS_PER_BURST,
            master_seed,
        }
    }

    pub fn bits_per_burst(&self) -> u64 {
        (self.symbols_per_burst * self.profile.coding.block_bytes() * 8) as u64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(PhyError::InvalidParameter { name, reason });
        if self.snr_grid.is_empty() {
            return bad("snr_grid", "must contain at least one value".into());
        }
        if self
            .snr_grid
            .iter()
            .any(|s| s.is_nan() || *s == f64::NEG_INFINITY)
        {
            return bad("snr_grid", "values must be finite or +inf".into());
        }
        if self.snr_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("snr_grid", "must be strictly increasing".into());
        }
        if self.symbols_per_burst == 0 {
            return bad("symbols_per_burst", "must be at least 1".into());
        }
        if self.stop.min_errors == 0 {
            return bad("min_errors", "must be at least 1".into());
        }
        if self.stop.max_bits < self.bits_per_burst() {
            return bad(
                "max_bits",
                format!(
                    "must cover at least one burst ({} bits)",
                    self.bits_per_burst()
                ),
            );
        }
        Ok(())
    }

    /// Channel SNR in dB for a grid value.
    pub fn channel_snr_db(&self, grid_value: f64) -> f64 {
        match self.snr_axis {
            SnrAxis::Snr => grid_value,
            SnrAxis::Ebn0 => ebn0_to_snr_db(
                grid_value,
                self.profile.coding.modulation().bits_per_symbol(),
                self.profile.coding.code_rate(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    /// Grid value, in the experiment's axis units.
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub stderr: f64,
}

impl BerPoint {
    pub fn from_counts(snr_db: f64, bits: u64, bit_errors: u64) -> Self {
        let ber = if bits == 0 {
            0.0
        } else {
            bit_errors as f64 / bits as f64
        };
        let stderr = if bits == 0 {
            0.0
        } else {
            (ber * (1.0 - ber) / bits as f64).sqrt()
        };
        Self {
            snr_db,
            bits,
            bit_errors,
            ber,
            stderr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BerCurve {
    pub points: Vec<BerPoint>,
}

pub const CSV_HEADER: &str = "snr_db,bits,bit_errors,ber,stderr";

impl BerCurve {
    /// Fixed-format CSV: header line, then one row per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{:.6e},{:.6e}\n",
                p.snr_db, p.bits, p.bit_errors, p.ber, p.stderr
            ));
        }
        out
    }

    /// Grid value where the BER first falls to `target`, interpolating
    /// `log10(ber)` linearly between neighbouring points. A zero-error point
    /// is treated as `0.5 / bits`. `None` when the curve never reaches the
    /// target; the first grid value when it starts at or below it.
    pub fn required_snr(&self, target: f64) -> Option<f64> {
        let log_ber = |p: &BerPoint| {
            let b = if p.bit_errors == 0 {
                0.5 / p.bits.max(1) as f64
            } else {
                p.ber
            };
            b.log10()
        };
        let i = self.points.iter().position(|p| p.ber <= target)?;
        if i == 0 {
            return Some(self.points[0].snr_db);
        }
        let (a, b) = (&self.points[i - 1], &self.points[i]);
        let (la, lb, lt) = (log_ber(a), log_ber(b), target.log10());
        if la == lb {
            return Some(b.snr_db);
        }
        let t = ((la - lt) / (la - lb)).clamp(0.0, 1.0);
        Some(a.snr_db + t * (b.snr_db - a.snr_db))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one burst, mixed from the master seed, grid index and burst index.
pub fn burst_seed(master_seed: u64, snr_index: usize, burst: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ snr_index as u64) ^ burst)
}

/// Bit errors between `a` and `b` over their first `n_bits` bits (MSB first).
fn prefix_bit_errors(a: &[u8], b: &[u8], n_bits: u64) -> u64 {
    let full = (n_bits / 8) as usize;
    let mut errs = crate::bits::byte_bit_errors(&a[..full], &b[..full]);
    let rem = n_bits % 8;
    if rem > 0 {
        let mask = !(0xFFu8 >> rem);
        errs += ((a[full] ^ b[full]) & mask).count_ones() as u64;
    }
    errs
}

/// Simulates one burst and returns the received payload alongside the sent one.
fn run_burst(link: &Link, e: &Experiment, snr_db: f64, seed: u64) -> Result<(Vec<u8>, Vec<u8>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut payload = vec![0u8; e.symbols_per_burst * link.block_bytes()];
    rng.fill(&mut payload[..]);
    let h = match &e.channel {
        ChannelModel::Awgn => ChannelRealization::identity(),
        ChannelModel::Sui(model) => draw_realization(model, &mut rng, e.profile.ofdm.sample_rate),
    };
    let tx = link.transmit(&payload)?;
    let (y, noise_var) = apply_channel_with(&tx, &h, snr_db, e.noise_reference, &mut rng)?;
    let rx = link.receive(&y, Some(&h), noise_var)?;
    Ok((payload, rx))
}

/// Runs grid point `snr_index` until the stop rule fires.
pub fn run_point(e: &Experiment, snr_index: usize) -> Result<BerPoint> {
    e.validate()?;
    let grid_value = *e
        .snr_grid
        .get(snr_index)
        .ok_or_else(|| PhyError::InvalidParameter {
            name: "snr_index",
            reason: format!(
                "{snr_index} is outside a grid of {} points",
                e.snr_grid.len()
            ),
        })?;
    let snr_db = e.channel_snr_db(grid_value);
    let link = Link::new(e.profile.clone())?;
    let per_burst = e.bits_per_burst();
    let max_bursts = e.stop.max_bits.div_ceil(per_burst);
    let chunk = (rayon::current_num_threads() as u64 * 2).max(1);

    let (mut bits, mut errors) = (0u64, 0u64);
    let mut next = 0u64;
    'outer: while next < max_bursts {
        let end = (next + chunk).min(max_bursts);
        let results: Vec<Result<(Vec<u8>, Vec<u8>)>> = (next..end)
            .into_par_iter()
            .map(|b| run_burst(&link, e, snr_db, burst_seed(e.master_seed, snr_index, b)))
            .collect();
        for r in results {
            let (sent, got) = r?;
            let take = per_burst.min(e.stop.max_bits - bits);
            bits += take;
            errors += prefix_bit_errors(&sent, &got, take);
            if errors >= e.stop.min_errors || bits >= e.stop.max_bits {
                break 'outer;
            }
        }
        next = end;
    }
    Ok(BerPoint::from_counts(grid_value, bits, errors))
}

/// Runs every grid point, in grid order.
pub fn run_curve(e: &Experiment) -> Result<BerCurve> {
    e.validate()?;
    let points = (0..e.snr_grid.len())
        .map(|i| run_point(e, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(BerCurve { points })
}
