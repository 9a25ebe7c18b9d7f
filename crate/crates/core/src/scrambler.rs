//! Data randomization with the 1 + x^14 + x^15 pseudo-random binary sequence.
//!
//! The register holds stages 1..15; a seed's bit 14 loads stage 1 and bit 0
//! loads stage 15. Each step the feedback bit `stage14 ^ stage15` is XORed
//! with the data bit and then shifted into stage 1. Taking the keystream bit
//! before the shift is a convention of this crate.

use crate::error::{PhyError, Result};

/// Default initialization vector: all fifteen stages set.
pub const DEFAULT_SEED: u16 = 0x7FFF;

const STAGE_MASK: u16 = 0x7FFF;

/// 15-stage LFSR state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LfsrState {
    registers: u16,
    seed: u16,
}

impl LfsrState {
    pub fn new(seed: u16) -> Result<Self> {
        if seed & STAGE_MASK == 0 || seed > STAGE_MASK {
            return Err(PhyError::InvalidSeed(seed));
        }
        Ok(Self {
            registers: seed,
            seed,
        })
    }

    pub fn seed(&self) -> u16 {
        self.seed
    }

    /// Register contents ordered stage 1..15.
    pub fn stages(&self) -> [u8; 15] {
        let mut out = [0u8; 15];
        for (k, s) in out.iter_mut().enumerate() {
            *s = ((self.registers >> (14 - k)) & 1) as u8;
        }
        out
    }

    /// Emits the next keystream bit and advances the register.
    #[inline]
    pub fn step(&mut self) -> u8 {
        let fb = ((self.registers >> 1) ^ self.registers) & 1;
        self.registers = (self.registers >> 1) | (fb << 14);
        fb as u8
    }
}

impl Iterator for LfsrState {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.step())
    }
}

/// First `len` keystream bits for `seed`.
pub fn prbs(seed: u16, len: usize) -> Result<Vec<u8>> {
    Ok(LfsrState::new(seed)?.take(len).collect())
}

/// XORs `data` with the keystream started from `seed`. Applying it twice
/// with the same seed restores the input.
pub fn scramble(data: &[u8], seed: u16) -> Result<Vec<u8>> {
    let lfsr = LfsrState::new(seed)?;
    Ok(data.iter().zip(lfsr).map(|(&d, k)| d ^ k).collect())
}

pub fn descramble(data: &[u8], seed: u16) -> Result<Vec<u8>> {
    scramble(data, seed)
}

/// Byte-wise variant: bits are consumed MSB first.
pub fn scramble_bytes(data: &[u8], seed: u16) -> Result<Vec<u8>> {
    let mut lfsr = LfsrState::new(seed)?;
    Ok(data
        .iter()
        .map(|&byte| {
            let mut key = 0u8;
            for _ in 0..8 {
                key = (key << 1) | lfsr.step();
            }
            byte ^ key
        })
        .collect())
}
