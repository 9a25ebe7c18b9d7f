//! The mandatory channel-coding table: one row per modulation and overall
//! code rate, with the RS and convolutional stages that realize it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conv_codec::PunctureRate;
use crate::error::{PhyError, Result};
use crate::mapper::Modulation;
use crate::ofdm::N_DATA;
use crate::rs_codec::RsProfile;

/// A code rate written as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rate {
    pub num: u32,
    pub den: u32,
}

impl Rate {
    pub const fn new(num: u32, den: u32) -> Self {
        Self { num, den }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rate {
    type Err = PhyError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || PhyError::InvalidParameter {
            name: "rate",
            reason: format!("expected a fraction such as 1/2, got {s:?}"),
        };
        let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
        let num: u32 = n.trim().parse().map_err(|_| bad())?;
        let den: u32 = d.trim().parse().map_err(|_| bad())?;
        if num == 0 || den == 0 || num > den {
            return Err(bad());
        }
        Ok(Rate::new(num, den))
    }
}

/// One row of the coding table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodingProfile {
    pub modulation: Modulation,
    pub uncoded_bytes: usize,
    pub coded_bytes: usize,
    pub overall_rate: Rate,
    pub rs: RsProfile,
    pub cc_rate: PunctureRate,
}

const fn row(
    modulation: Modulation,
    uncoded_bytes: usize,
    coded_bytes: usize,
    overall_rate: Rate,
    rs: RsProfile,
    cc_rate: PunctureRate,
) -> CodingProfile {
    CodingProfile {
        modulation,
        uncoded_bytes,
        coded_bytes,
        overall_rate,
        rs,
        cc_rate,
    }
}

pub const CODING_TABLE: [CodingProfile; 7] = [
    row(
        Modulation::Bpsk,
        12,
        24,
        Rate::new(1, 2),
        RsProfile::TABLE[0],
        PunctureRate::R1_2,
    ),
    row(
        Modulation::Qpsk,
        24,
        48,
        Rate::new(1, 2),
        RsProfile::TABLE[1],
        PunctureRate::R2_3,
    ),
    row(
        Modulation::Qpsk,
        36,
        48,
        Rate::new(3, 4),
        RsProfile::TABLE[2],
        PunctureRate::R5_6,
    ),
    row(
        Modulation::Qam16,
        48,
        96,
        Rate::new(1, 2),
        RsProfile::TABLE[3],
        PunctureRate::R2_3,
    ),
    row(
        Modulation::Qam16,
        72,
        96,
        Rate::new(3, 4),
        RsProfile::TABLE[4],
        PunctureRate::R5_6,
    ),
    row(
        Modulation::Qam64,
        96,
        144,
        Rate::new(2, 3),
        RsProfile::TABLE[5],
        PunctureRate::R3_4,
    ),
    row(
        Modulation::Qam64,
        108,
        144,
        Rate::new(3, 4),
        RsProfile::TABLE[6],
        PunctureRate::R5_6,
    ),
];

impl CodingProfile {
    pub fn lookup(modulation: Modulation, rate: Rate) -> Result<CodingProfile> {
        CODING_TABLE
            .iter()
            .find(|p| p.modulation == modulation && p.overall_rate == rate)
            .copied()
            .ok_or_else(|| {
                let rows: Vec<String> = CODING_TABLE.iter().map(|p| p.to_string()).collect();
                PhyError::Config(format!(
                    "no coding profile for {modulation} at rate {rate}; valid rows: {}",
                    rows.join(", ")
                ))
            })
    }

    /// Coded bits per OFDM symbol.
    pub fn coded_bits(&self) -> usize {
        self.coded_bytes * 8
    }
}

impl fmt::Display for CodingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.modulation, self.overall_rate)
    }
}

/// Bytes carried by one OFDM symbol without any FEC.
pub fn uncoded_symbol_bytes(modulation: Modulation) -> usize {
    N_DATA * modulation.bits_per_symbol() / 8
}
