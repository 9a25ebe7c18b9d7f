//! Gray-coded BPSK/QPSK/16-QAM/64-QAM mapping and max-log demapping.
//!
//! Labels are read first bit first. For the square constellations the first
//! half of a label selects the in-phase level and the second half the
//! quadrature level. On each axis the leading bit is the sign (0 is
//! positive) and the remaining bits Gray-code the magnitude 1, 3, 5, 7.
//! BPSK maps 0 to -1 and 1 to +1.

use num_complex::Complex64;

use crate::bits::BitBlock;
use crate::error::{PhyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub const ALL: [Modulation; 4] = [
        Modulation::Bpsk,
        Modulation::Qpsk,
        Modulation::Qam16,
        Modulation::Qam64,
    ];

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }

    /// Amplitude factor giving unit mean symbol energy.
    pub fn scale(self) -> f64 {
        match self {
            Modulation::Bpsk => 1.0,
            Modulation::Qpsk => 1.0 / 2f64.sqrt(),
            Modulation::Qam16 => 1.0 / 10f64.sqrt(),
            Modulation::Qam64 => 1.0 / 42f64.sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Bpsk => "bpsk",
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "16qam",
            Modulation::Qam64 => "64qam",
        }
    }
}

impl std::fmt::Display for Modulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Modulation {
    type Err = PhyError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "bpsk" => Ok(Modulation::Bpsk),
            "qpsk" => Ok(Modulation::Qpsk),
            "16qam" | "qam16" => Ok(Modulation::Qam16),
            "64qam" | "qam64" => Ok(Modulation::Qam64),
            _ => Err(PhyError::InvalidParameter {
                name: "modulation",
                reason: format!("unknown scheme {s:?}; expected bpsk, qpsk, 16qam or 64qam"),
            }),
        }
    }
}

/// Unscaled level of one axis for `bits` (first bit = sign, rest Gray
/// magnitude).
fn axis_level(bits: &[u8]) -> f64 {
    let sign = if bits[0] == 0 { 1.0 } else { -1.0 };
    let mut gray = 0usize;
    for &b in &bits[1..] {
        gray = (gray << 1) | b as usize;
    }
    // Gray -> binary gives the magnitude index.
    let mut idx = gray;
    let mut shift = gray >> 1;
    while shift != 0 {
        idx ^= shift;
        shift >>= 1;
    }
    sign * (2 * idx + 1) as f64
}

/// Lookup table for one scheme, indexed by label value.
#[derive(Debug, Clone)]
pub struct Constellation {
    scheme: Modulation,
    points: Vec<Complex64>,
    /// Per-axis scaled levels indexed by axis label (QAM/QPSK only).
    axis: Vec<f64>,
}

impl Constellation {
    pub fn new(scheme: Modulation) -> Self {
        let bps = scheme.bits_per_symbol();
        let scale = scheme.scale();
        let label_bits = |label: usize, n: usize| -> Vec<u8> {
            (0..n).map(|i| ((label >> (n - 1 - i)) & 1) as u8).collect()
        };
        let (points, axis) = if scheme == Modulation::Bpsk {
            (
                vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
                Vec::new(),
            )
        } else {
            let half = bps / 2;
            let axis: Vec<f64> = (0..1usize << half)
                .map(|l| scale * axis_level(&label_bits(l, half)))
                .collect();
            let points = (0..1usize << bps)
                .map(|label| Complex64::new(axis[label >> half], axis[label & ((1 << half) - 1)]))
                .collect();
            (points, axis)
        };
        Self {
            scheme,
            points,
            axis,
        }
    }

    pub fn scheme(&self) -> Modulation {
        self.scheme
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.scheme.bits_per_symbol()
    }

    pub fn scale(&self) -> f64 {
        self.scheme.scale()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let bps = self.bits_per_symbol();
        if !bits.len().is_multiple_of(bps) {
            return Err(PhyError::Padding {
                what: "map_bits input",
                multiple: bps,
                actual: bits.len(),
            });
        }
        Ok(bits
            .chunks_exact(bps)
            .map(|c| {
                let label = c
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                self.points[label]
            })
            .collect())
    }

    /// Max-log LLRs with one noise variance for all symbols.
    pub fn demap_soft(&self, symbols: &[Complex64], noise_var: f64) -> Result<Vec<f64>> {
        check_noise(noise_var)?;
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for &y in symbols {
            self.push_llrs(y, noise_var, &mut out);
        }
        Ok(out)
    }

    /// Max-log LLRs with a per-symbol noise variance. An infinite variance
    /// yields zero (erased) metrics for that symbol.
    pub fn demap_soft_per_symbol(
        &self,
        symbols: &[Complex64],
        noise_vars: &[f64],
    ) -> Result<Vec<f64>> {
        crate::error::check_len("noise variances", symbols.len(), noise_vars.len())?;
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for (&y, &nv) in symbols.iter().zip(noise_vars) {
            check_noise(nv)?;
            if nv.is_infinite() {
                out.extend(std::iter::repeat_n(0.0, self.bits_per_symbol()));
            } else {
                self.push_llrs(y, nv, &mut out);
            }
        }
        Ok(out)
    }

    /// `(min d^2 over bit=1) - (min d^2 over bit=0)` per bit, divided by the
    /// noise variance. Positive favors 0.
    fn push_llrs(&self, y: Complex64, noise_var: f64, out: &mut Vec<f64>) {
        if self.scheme == Modulation::Bpsk {
            let d0 = (y.re + 1.0).powi(2);
            let d1 = (y.re - 1.0).powi(2);
            out.push((d1 - d0) / noise_var);
            return;
        }
        // Square constellations separate into two independent axes; the
        // other axis' distance term cancels in the max-log difference.
        let half = self.bits_per_symbol() / 2;
        for v in [y.re, y.im] {
            for bit in 0..half {
                let mut d0 = f64::INFINITY;
                let mut d1 = f64::INFINITY;
                for (label, &level) in self.axis.iter().enumerate() {
                    let d = (v - level) * (v - level);
                    if (label >> (half - 1 - bit)) & 1 == 0 {
                        d0 = d0.min(d);
                    } else {
                        d1 = d1.min(d);
                    }
                }
                out.push((d1 - d0) / noise_var);
            }
        }
    }

    /// Nearest-point decisions; exact ties go to the lower label.
    pub fn demap_hard(&self, symbols: &[Complex64]) -> BitBlock {
        const TIE: f64 = 1e-12;
        let bps = self.bits_per_symbol();
        let mut out = Vec::with_capacity(symbols.len() * bps);
        for &y in symbols {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (label, p) in self.points.iter().enumerate() {
                let d = (y - p).norm_sqr();
                if d < best_d - TIE {
                    best = label;
                    best_d = d;
                }
            }
            out.extend((0..bps).map(|i| ((best >> (bps - 1 - i)) & 1) as u8));
        }
        out
    }
}

fn check_noise(noise_var: f64) -> Result<()> {
    if noise_var > 0.0 {
        Ok(())
    } else {
        Err(PhyError::InvalidParameter {
            name: "noise_var",
            reason: format!("must be positive, got {noise_var}"),
        })
    }
}

pub fn map_bits(bits: &[u8], c: &Constellation) -> Result<Vec<Complex64>> {
    c.map_bits(bits)
}

pub fn demap_soft(symbols: &[Complex64], c: &Constellation, noise_var: f64) -> Result<Vec<f64>> {
    c.demap_soft(symbols, noise_var)
}

pub fn demap_hard(symbols: &[Complex64], c: &Constellation) -> BitBlock {
    c.demap_hard(symbols)
}

/// Hard decisions implied by soft metrics (negative means 1).
pub fn hard_from_soft(llrs: &[f64]) -> BitBlock {
    llrs.iter().map(|&l| u8::from(l < 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.random_range(0..2)).collect()
    }

    #[test]
    fn bpsk_convention() {
        let c = Constellation::new(Modulation::Bpsk);
        assert_eq!(
            c.map_bits(&[0, 1]).unwrap(),
            vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]
        );
        assert_eq!(c.demap_hard(&[Complex64::new(0.9, 0.0)]), vec![1]);
        let llr = c.demap_soft(&[Complex64::new(1.0, 0.0)], 0.01).unwrap();
        assert!(llr[0] < -100.0);
        assert_eq!(hard_from_soft(&llr), vec![1]);
    }

    #[test]
    fn qpsk_zero_label() {
        let c = Constellation::new(Modulation::Qpsk);
        let p = c.map_bits(&[0, 0]).unwrap()[0];
        let r = 1.0 / 2f64.sqrt();
        assert!((p - Complex64::new(r, r)).norm() < 1e-15);
    }

    #[test]
    fn qam64_energy_is_42_before_scaling() {
        let mut sum = 0.0;
        for i in [-7i32, -5, -3, -1, 1, 3, 5, 7] {
            for q in [-7i32, -5, -3, -1, 1, 3, 5, 7] {
                sum += f64::from(i * i + q * q);
            }
        }
        assert_eq!(sum / 64.0, 42.0);
        assert!((Modulation::Qam64.scale() - 1.0 / 42f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unit_mean_energy() {
        for m in Modulation::ALL {
            let c = Constellation::new(m);
            let e: f64 =
                c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.points().len() as f64;
            assert!((e - 1.0).abs() < 1e-12, "{m}: {e}");
            assert_eq!(c.points().len(), 1 << m.bits_per_symbol());
        }
    }

    #[test]
    fn gray_adjacency() {
        for m in Modulation::ALL {
            let c = Constellation::new(m);
            let pts = c.points();
            let dmin = 2.0 * m.scale();
            let mut pairs = 0;
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    if ((pts[a] - pts[b]).norm() - dmin).abs() < 1e-9 {
                        pairs += 1;
                        assert_eq!((a ^ b).count_ones(), 1, "{m}: labels {a:b} {b:b}");
                    }
                }
            }
            assert!(pairs > 0);
        }
    }

    #[test]
    fn round_trips_hard_and_soft() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for m in Modulation::ALL {
            let c = Constellation::new(m);
            let bits = random_bits(&mut rng, 600 * m.bits_per_symbol());
            let syms = c.map_bits(&bits).unwrap();
            assert_eq!(syms.len(), 600);
            assert_eq!(c.demap_hard(&syms), bits);
            let llr = c.demap_soft(&syms, 0.1).unwrap();
            assert_eq!(hard_from_soft(&llr), bits);
        }
    }

    #[test]
    fn axis_llr_matches_brute_force_max_log() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for m in Modulation::ALL {
            let c = Constellation::new(m);
            let bps = m.bits_per_symbol();
            for _ in 0..200 {
                let y = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
                let fast = c.demap_soft(&[y], 0.37).unwrap();
                for (bit, &llr) in fast.iter().enumerate() {
                    let (mut d0, mut d1) = (f64::INFINITY, f64::INFINITY);
                    for (label, p) in c.points().iter().enumerate() {
                        let d = (y - p).norm_sqr();
                        if (label >> (bps - 1 - bit)) & 1 == 0 {
                            d0 = d0.min(d);
                        } else {
                            d1 = d1.min(d);
                        }
                    }
                    assert!((llr - (d1 - d0) / 0.37).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn boundary_symbol_has_zero_metric() {
        let c = Constellation::new(Modulation::Qam16);
        // +1 and -1 differ only in the I sign bit
        let y = Complex64::new(0.0, 1.0 / 10f64.sqrt());
        let llr = c.demap_soft(&[y], 1.0).unwrap();
        assert_eq!(llr[0], 0.0);
    }

    #[test]
    fn hard_tie_breaks_to_lower_label() {
        let c = Constellation::new(Modulation::Qam16);
        let p = c.points();
        // labels 0b0000 (+1,+1) and 0b0100 (+3,+1)
        let mid = (p[0b0000] + p[0b0100]) / 2.0;
        assert_eq!(c.demap_hard(&[mid]), vec![0, 0, 0, 0]);
        let mid = (p[0b1000] + p[0b0000]) / 2.0;
        assert_eq!(c.demap_hard(&[mid]), vec![0, 0, 0, 0]);
    }

    #[test]
    fn parameter_errors() {
        let c = Constellation::new(Modulation::Qam64);
        assert!(c.map_bits(&[0; 7]).is_err());
        assert!(c.demap_soft(&[Complex64::new(0.0, 0.0)], 0.0).is_err());
        assert!("8psk".parse::<Modulation>().is_err());
        assert_eq!("16-QAM".parse::<Modulation>().unwrap(), Modulation::Qam16);
    }
}
