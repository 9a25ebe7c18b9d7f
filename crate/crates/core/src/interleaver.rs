//! Two-step block interleaver over the coded bits of one OFDM symbol.
//!
//! Step one spreads adjacent coded bits across subcarriers twelve columns
//! apart: `m = (n_cbps / 12) * (k mod 12) + floor(k / 12)`. Step two rotates
//! bits within each group of `s` so adjacent bits alternate between more and
//! less significant constellation bits:
//! `j = s * floor(m / s) + (m + n_cbps - floor(12 m / n_cbps)) mod s`.

use crate::error::{check_len, PhyError, Result};
use crate::mapper::Modulation;
use crate::ofdm::N_DATA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InterleaverSpec {
    /// Coded bits per OFDM symbol.
    pub n_cbps: usize,
    /// Coded bits per subcarrier.
    pub n_cpc: usize,
    pub s: usize,
}

impl InterleaverSpec {
    pub fn new(n_cpc: usize) -> Result<Self> {
        if ![1, 2, 4, 6].contains(&n_cpc) {
            return Err(PhyError::InvalidParameter {
                name: "n_cpc",
                reason: format!("must be 1, 2, 4 or 6, got {n_cpc}"),
            });
        }
        Ok(Self {
            n_cbps: N_DATA * n_cpc,
            n_cpc,
            s: (n_cpc / 2).max(1),
        })
    }

    pub fn for_modulation(m: Modulation) -> Self {
        Self::new(m.bits_per_symbol()).expect("every modulation has a valid n_cpc")
    }

    /// Output index of input bit `k`.
    pub fn permute(&self, k: usize) -> usize {
        let n = self.n_cbps;
        let s = self.s;
        let m = (n / 12) * (k % 12) + k / 12;
        s * (m / s) + (m + n - (12 * m) / n) % s
    }
}

/// Precomputed permutation tables for one spec.
#[derive(Debug, Clone)]
pub struct Interleaver {
    spec: InterleaverSpec,
    forward: Vec<usize>,
}

impl Interleaver {
    pub fn new(spec: InterleaverSpec) -> Self {
        let forward = (0..spec.n_cbps).map(|k| spec.permute(k)).collect();
        Self { spec, forward }
    }

    pub fn spec(&self) -> InterleaverSpec {
        self.spec
    }

    /// `forward[k]` is the output position of input bit `k`.
    pub fn table(&self) -> &[usize] {
        &self.forward
    }

    pub fn interleave<T: Copy + Default>(&self, bits: &[T]) -> Result<Vec<T>> {
        check_len("interleave block", self.spec.n_cbps, bits.len())?;
        let mut out = vec![T::default(); bits.len()];
        for (k, &j) in self.forward.iter().enumerate() {
            out[j] = bits[k];
        }
        Ok(out)
    }

    pub fn deinterleave<T: Copy + Default>(&self, bits: &[T]) -> Result<Vec<T>> {
        check_len("deinterleave block", self.spec.n_cbps, bits.len())?;
        Ok(self.forward.iter().map(|&j| bits[j]).collect())
    }
}

pub fn interleave(bits: &[u8], spec: InterleaverSpec) -> Result<Vec<u8>> {
    Interleaver::new(spec).interleave(bits)
}

pub fn deinterleave(bits: &[u8], spec: InterleaverSpec) -> Result<Vec<u8>> {
    Interleaver::new(spec).deinterleave(bits)
}
