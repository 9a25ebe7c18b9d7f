//! Transmitter and receiver chains.
//!
//! Transmit, per OFDM symbol: scramble, RS encode, convolutional encode and
//! puncture, interleave, map, insert pilots, IFFT, prepend CP. The receiver
//! runs the inverse chain with zero-forcing equalization. Each OFDM symbol
//! carries exactly one RS/CC block; the scrambler runs continuously across
//! a call's payload.

use num_complex::Complex64;

use crate::bits::{bits_to_bytes, bytes_to_bits};
use crate::channel::ChannelRealization;
use crate::conv_codec::{decode_block, encode_block};
use crate::error::{PhyError, Result};
use crate::interleaver::{Interleaver, InterleaverSpec};
use crate::mapper::{Constellation, Modulation};
use crate::ofdm::{bin_to_offset, OfdmParams, N_FFT, N_PILOT, PILOT_OFFSETS};
use crate::profile::{uncoded_symbol_bytes, CodingProfile};
use crate::rs_codec::{rs_decode, rs_encode};
use crate::scrambler::{scramble_bytes, DEFAULT_SEED};

/// Channel-state source used by the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimation {
    /// Exact frequency response of the known realization.
    Perfect,
    /// Least squares at the pilots, linear interpolation across data bins.
    PilotLs,
}

impl std::str::FromStr for Estimation {
    type Err = PhyError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "perfect" => Ok(Estimation::Perfect),
            "pilot_ls" | "ls" => Ok(Estimation::PilotLs),
            _ => Err(PhyError::InvalidParameter {
                name: "estimation",
                reason: format!("unknown mode {s:?}; expected perfect or pilot_ls"),
            }),
        }
    }
}

impl std::fmt::Display for Estimation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Estimation::Perfect => "perfect",
            Estimation::PilotLs => "pilot_ls",
        })
    }
}

/// FEC configuration: a coding-table row, or no FEC at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coding {
    Coded(CodingProfile),
    Uncoded(Modulation),
}

impl Coding {
    pub fn modulation(&self) -> Modulation {
        match self {
            Coding::Coded(p) => p.modulation,
            Coding::Uncoded(m) => *m,
        }
    }

    /// Payload bytes per OFDM symbol.
    pub fn block_bytes(&self) -> usize {
        match self {
            Coding::Coded(p) => p.uncoded_bytes,
            Coding::Uncoded(m) => uncoded_symbol_bytes(*m),
        }
    }

    pub fn code_rate(&self) -> f64 {
        match self {
            Coding::Coded(p) => p.overall_rate.as_f64(),
            Coding::Uncoded(_) => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkProfile {
    pub coding: Coding,
    pub ofdm: OfdmParams,
    pub estimation: Estimation,
    pub scrambler_seed: u16,
    pub pilots: [Complex64; N_PILOT],
}

impl LinkProfile {
    pub fn new(coding: Coding, ofdm: OfdmParams, estimation: Estimation) -> Self {
        Self {
            coding,
            ofdm,
            estimation,
            scrambler_seed: DEFAULT_SEED,
            pilots: [Complex64::new(1.0, 0.0); N_PILOT],
        }
    }
}

/// Zero-forcing: `y / h` per bin, with the noise variance scaled by
/// `1 / |h|^2`. Bins with `|h| < 1e-12` come back as erasures: a zero
/// symbol with infinite noise variance.
pub fn equalize(
    bins: &[Complex64],
    h_freq: &[Complex64],
    noise_var: f64,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    crate::error::check_len("equalizer channel response", bins.len(), h_freq.len())?;
    Ok(bins
        .iter()
        .zip(h_freq)
        .map(|(&y, &h)| {
            if h.norm() < 1e-12 {
                (Complex64::new(0.0, 0.0), f64::INFINITY)
            } else {
                (y / h, noise_var / h.norm_sqr())
            }
        })
        .unzip())
}

/// Smallest noise variance handed to the demapper; keeps noiseless
/// simulations finite.
const NOISE_FLOOR: f64 = 1e-12;

/// A configured transmitter/receiver pair.
#[derive(Debug, Clone)]
pub struct Link {
    profile: LinkProfile,
    constellation: Constellation,
    interleaver: Interleaver,
}

impl Link {
    pub fn new(profile: LinkProfile) -> Result<Self> {
        crate::scrambler::LfsrState::new(profile.scrambler_seed)?;
        let m = profile.coding.modulation();
        Ok(Self {
            constellation: Constellation::new(m),
            interleaver: Interleaver::new(InterleaverSpec::for_modulation(m)),
            profile,
        })
    }

    pub fn profile(&self) -> &LinkProfile {
        &self.profile
    }

    pub fn block_bytes(&self) -> usize {
        self.profile.coding.block_bytes()
    }

    pub fn symbol_len(&self) -> usize {
        self.profile.ofdm.symbol_len()
    }

    pub fn transmit(&self, payload: &[u8]) -> Result<Vec<Complex64>> {
        let block = self.block_bytes();
        if payload.is_empty() || !payload.len().is_multiple_of(block) {
            return Err(PhyError::Padding {
                what: "payload (pad to whole coding blocks)",
                multiple: block,
                actual: payload.len(),
            });
        }
        let scrambled = scramble_bytes(payload, self.profile.scrambler_seed)?;
        let ofdm = &self.profile.ofdm;
        let mut out = Vec::with_capacity(payload.len() / block * ofdm.symbol_len());
        for chunk in scrambled.chunks(block) {
            let coded = match self.profile.coding {
                Coding::Coded(p) => {
                    let rs = rs_encode(chunk, p.rs)?;
                    encode_block(&bytes_to_bits(&rs), p.cc_rate)?
                }
                Coding::Uncoded(_) => bytes_to_bits(chunk),
            };
            let interleaved = self.interleaver.interleave(&coded)?;
            let data = self.constellation.map_bits(&interleaved)?;
            let freq = ofdm.assemble(&data, &self.profile.pilots)?;
            out.extend(ofdm.modulate(&freq)?);
        }
        Ok(out)
    }

    /// Recovers the payload. `h_known` is required for perfect estimation;
    /// `noise_var` is the per-sample noise variance of the channel.
    pub fn receive(
        &self,
        y: &[Complex64],
        h_known: Option<&ChannelRealization>,
        noise_var: f64,
    ) -> Result<Vec<u8>> {
        let ofdm = &self.profile.ofdm;
        let sym_len = ofdm.symbol_len();
        if y.is_empty() || !y.len().is_multiple_of(sym_len) {
            return Err(PhyError::Padding {
                what: "received samples (whole OFDM symbols)",
                multiple: sym_len,
                actual: y.len(),
            });
        }
        let perfect_h = match (self.profile.estimation, h_known) {
            (Estimation::Perfect, Some(h)) => Some(h.frequency_response(N_FFT)),
            (Estimation::Perfect, None) => {
                return Err(PhyError::Config(
                    "perfect channel estimation requires the channel realization".into(),
                ))
            }
            (Estimation::PilotLs, _) => None,
        };
        let perfect_data_h: Option<Vec<Complex64>> = perfect_h
            .as_ref()
            .map(|h| ofdm.data_idx.iter().map(|&b| h[b]).collect());
        let nv = noise_var.max(NOISE_FLOOR);

        let mut scrambled = Vec::with_capacity(y.len() / sym_len * self.block_bytes());
        for sym in y.chunks(sym_len) {
            let freq = ofdm.demodulate(sym)?;
            let (data, pilots) = ofdm.disassemble(&freq)?;
            let h_data = match &perfect_data_h {
                Some(h) => h.clone(),
                None => self.pilot_ls_estimate(&pilots),
            };
            let (eq, vars) = equalize(&data, &h_data, nv)?;
            match self.profile.coding {
                Coding::Coded(p) => {
                    let llrs = self.constellation.demap_soft_per_symbol(&eq, &vars)?;
                    let llrs = self.interleaver.deinterleave(&llrs)?;
                    let bits = decode_block(&llrs, p.cc_rate)?;
                    let decoded = rs_decode(&bits_to_bytes(&bits), p.rs)?;
                    scrambled.extend(decoded.message);
                }
                Coding::Uncoded(_) => {
                    let bits = self.constellation.demap_hard(&eq);
                    let bits = self.interleaver.deinterleave(&bits)?;
                    scrambled.extend(bits_to_bytes(&bits));
                }
            }
        }
        scramble_bytes(&scrambled, self.profile.scrambler_seed)
    }

    /// Least-squares channel at the pilots, linearly interpolated (and
    /// extrapolated past the outer pilots) onto the data subcarriers.
    fn pilot_ls_estimate(&self, rx_pilots: &[Complex64]) -> Vec<Complex64> {
        let ls: Vec<Complex64> = rx_pilots
            .iter()
            .zip(&self.profile.pilots)
            .map(|(&y, &p)| y / p)
            .collect();
        let offsets = PILOT_OFFSETS;
        self.profile
            .ofdm
            .data_idx
            .iter()
            .map(|&b| {
                let o = bin_to_offset(b);
                let i = match offsets.iter().position(|&p| p > o) {
                    Some(0) => 0,
                    Some(i) => i - 1,
                    None => offsets.len() - 2,
                };
                let (o0, o1) = (offsets[i] as f64, offsets[i + 1] as f64);
                let t = (o as f64 - o0) / (o1 - o0);
                ls[i] * (1.0 - t) + ls[i + 1] * t
            })
            .collect()
    }
}

pub fn transmit(payload: &[u8], profile: &LinkProfile) -> Result<Vec<Complex64>> {
    Link::new(profile.clone())?.transmit(payload)
}

pub fn receive(
    y: &[Complex64],
    profile: &LinkProfile,
    h_known: Option<&ChannelRealization>,
    noise_var: f64,
) -> Result<Vec<u8>> {
    Link::new(profile.clone())?.receive(y, h_known, noise_var)
}
