//! Rate-1/2, constraint-length-7 convolutional code (generators 171 and 133
//! octal), rate puncturing, and soft-input Viterbi decoding.
//!
//! Soft metrics follow the crate-wide convention: a positive value favors a
//! 0 bit, a negative value favors a 1 bit, and exactly 0.0 marks an erasure.

use crate::bits::BitBlock;
use crate::error::{PhyError, Result};

/// Generator for the X output, 171 octal.
pub const G1: u8 = 0o171;
/// Generator for the Y output, 133 octal.
pub const G2: u8 = 0o133;
pub const MEMORY: usize = 6;
pub const NUM_STATES: usize = 1 << MEMORY;

/// Encoder memory: bit 5 holds the most recent input, bit 0 the oldest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConvState(u8);

impl ConvState {
    pub const ZERO: ConvState = ConvState(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Shifts `bit` in and returns the `(x, y)` output pair.
    #[inline]
    pub fn advance(&mut self, bit: u8) -> (u8, u8) {
        let (next, x, y) = branch(self.0, bit);
        self.0 = next;
        (x, y)
    }
}

#[inline]
fn parity(v: u8) -> u8 {
    (v.count_ones() & 1) as u8
}

/// Next state and output bits for input `bit` from `state`.
#[inline]
fn branch(state: u8, bit: u8) -> (u8, u8, u8) {
    let reg = (bit << 6) | state;
    (reg >> 1, parity(reg & G1), parity(reg & G2))
}

/// Punctured code rates derived from the rate-1/2 mother code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PunctureRate {
    R1_2,
    R2_3,
    R3_4,
    R5_6,
}

impl PunctureRate {
    pub const ALL: [PunctureRate; 4] = [
        PunctureRate::R1_2,
        PunctureRate::R2_3,
        PunctureRate::R3_4,
        PunctureRate::R5_6,
    ];

    /// Keep masks for the X and Y streams over one period.
    pub fn patterns(self) -> (&'static [u8], &'static [u8]) {
        match self {
            PunctureRate::R1_2 => (&[1], &[1]),
            PunctureRate::R2_3 => (&[1, 0], &[1, 1]),
            PunctureRate::R3_4 => (&[1, 0, 1], &[1, 1, 0]),
            PunctureRate::R5_6 => (&[1, 0, 1, 0, 1], &[1, 1, 0, 1, 0]),
        }
    }

    /// Input bits per puncturing period.
    pub fn period(self) -> usize {
        self.patterns().0.len()
    }

    /// Coded bits kept per period.
    pub fn kept_per_period(self) -> usize {
        let (x, y) = self.patterns();
        x.iter().chain(y).map(|&b| b as usize).sum()
    }

    /// Code rate as `(numerator, denominator)`.
    pub fn ratio(self) -> (usize, usize) {
        (self.period(), self.kept_per_period())
    }

    pub fn as_f64(self) -> f64 {
        let (n, d) = self.ratio();
        n as f64 / d as f64
    }

    /// Mask over one period of the interleaved `X0 Y0 X1 Y1 ...` stream.
    fn keep_mask(self) -> Vec<bool> {
        let (x, y) = self.patterns();
        x.iter()
            .zip(y)
            .flat_map(|(&a, &b)| [a == 1, b == 1])
            .collect()
    }
}

/// Encodes and flushes with six zero bits; output is `X0 Y0 X1 Y1 ...` of
/// length `2 * (bits.len() + 6)`.
pub fn conv_encode(bits: &[u8]) -> BitBlock {
    let mut state = ConvState::ZERO;
    let mut out = Vec::with_capacity(2 * (bits.len() + MEMORY));
    for &b in bits.iter().chain(std::iter::repeat_n(&0u8, MEMORY)) {
        let (x, y) = state.advance(b & 1);
        out.push(x);
        out.push(y);
    }
    out
}

pub fn puncture<T: Copy>(coded: &[T], rate: PunctureRate) -> Result<Vec<T>> {
    let mask = rate.keep_mask();
    if !coded.len().is_multiple_of(mask.len()) {
        return Err(PhyError::Padding {
            what: "puncture input",
            multiple: mask.len(),
            actual: coded.len(),
        });
    }
    Ok(coded
        .iter()
        .zip(mask.iter().cycle())
        .filter_map(|(&c, &keep)| keep.then_some(c))
        .collect())
}

/// Re-inserts zero-metric erasures at the punctured positions.
pub fn depuncture(kept: &[f64], rate: PunctureRate) -> Result<Vec<f64>> {
    let mask = rate.keep_mask();
    let per_period = rate.kept_per_period();
    if !kept.len().is_multiple_of(per_period) {
        return Err(PhyError::Padding {
            what: "depuncture input",
            multiple: per_period,
            actual: kept.len(),
        });
    }
    let periods = kept.len() / per_period;
    let mut out = Vec::with_capacity(periods * mask.len());
    let mut src = kept.iter();
    for _ in 0..periods {
        for &keep in &mask {
            out.push(if keep {
                *src.next().expect("counted")
            } else {
                0.0
            });
        }
    }
    Ok(out)
}

/// Decodes a zero-tail-terminated block from its punctured soft metrics.
/// The trellis starts and ends in state 0 and the six flush bits are
/// stripped from the result.
pub fn viterbi_decode(soft: &[f64], rate: PunctureRate) -> Result<BitBlock> {
    let mother = depuncture(soft, rate)?;
    let steps = mother.len() / 2;
    if steps < MEMORY {
        return Err(PhyError::InvalidParameter {
            name: "trellis",
            reason: format!("{steps} trellis steps cannot hold the {MEMORY}-bit tail"),
        });
    }
    let mut bits = decode_trellis(&mother, true);
    bits.truncate(steps - MEMORY);
    Ok(bits)
}

/// Encodes one fixed-size block: the flush bits drive the trellis to zero but
/// their coded outputs are not transmitted, so the output length is exactly
/// `2 * bits.len() * rate`.
pub fn encode_block(bits: &[u8], rate: PunctureRate) -> Result<BitBlock> {
    let mut coded = conv_encode(bits);
    coded.truncate(2 * bits.len());
    puncture(&coded, rate)
}

/// Inverse of [`encode_block`]; the untransmitted tail is decoded as
/// erasures, so the final state is free.
pub fn decode_block(soft: &[f64], rate: PunctureRate) -> Result<BitBlock> {
    let mother = depuncture(soft, rate)?;
    Ok(decode_trellis(&mother, false))
}

/// Maximum-metric path search over `mother.len() / 2` steps. Path metric is
/// the correlation `sum(m * (1 - 2c))` between metrics and candidate code
/// bits. Ties prefer the predecessor whose dropped bit is 0, then the lowest
/// final state.
fn decode_trellis(mother: &[f64], terminated: bool) -> BitBlock {
    let steps = mother.len() / 2;
    let mut metric = [f64::NEG_INFINITY; NUM_STATES];
    metric[0] = 0.0;
    let mut next = [0.0f64; NUM_STATES];
    // bit s of decisions[t] is the dropped bit of the survivor into state s
    let mut decisions = vec![0u64; steps];

    for t in 0..steps {
        let mx = mother[2 * t];
        let my = mother[2 * t + 1];
        let mut dec = 0u64;
        for (ns, slot) in next.iter_mut().enumerate() {
            let input = ((ns >> 5) & 1) as u8;
            let mut best = f64::NEG_INFINITY;
            let mut best_b = 0u64;
            for b in 0..2u8 {
                let ps = (((ns << 1) | b as usize) & (NUM_STATES - 1)) as u8;
                let pm = metric[ps as usize];
                if pm == f64::NEG_INFINITY {
                    continue;
                }
                let (_, x, y) = branch(ps, input);
                let m = pm + signed(mx, x) + signed(my, y);
                if m > best {
                    best = m;
                    best_b = u64::from(b);
                }
            }
            *slot = best;
            dec |= best_b << ns;
        }
        decisions[t] = dec;
        metric = next;
    }

    let mut state = if terminated {
        0
    } else {
        let mut best = 0;
        for s in 1..NUM_STATES {
            if metric[s] > metric[best] {
                best = s;
            }
        }
        best
    };

    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        bits[t] = ((state >> 5) & 1) as u8;
        let b = ((decisions[t] >> state) & 1) as usize;
        state = ((state << 1) | b) & (NUM_STATES - 1);
    }
    bits
}

#[inline]
fn signed(metric: f64, bit: u8) -> f64 {
    if bit == 0 {
        metric
    } else {
        -metric
    }
}

/// Noiseless antipodal metrics for hard bits: 0 -> +1, 1 -> -1.
pub fn to_soft(bits: &[u8]) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b == 0 { 1.0 } else { -1.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Shift-register trace using explicit tap lists instead of bit masks.
    fn trace_oracle(bits: &[u8]) -> (Vec<u8>, Vec<u8>) {
        let taps_x = [1, 1, 1, 1, 0, 0, 1];
        let taps_y = [1, 0, 1, 1, 0, 1, 1];
        let mut reg = [0u8; 7];
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for &b in bits.iter().chain([0u8; 6].iter()) {
            reg.rotate_right(1);
            reg[0] = b;
            xs.push(reg.iter().zip(&taps_x).map(|(r, t)| r & t).sum::<u8>() % 2);
            ys.push(reg.iter().zip(&taps_y).map(|(r, t)| r & t).sum::<u8>() % 2);
        }
        (xs, ys)
    }

    fn split(coded: &[u8]) -> (Vec<u8>, Vec<u8>) {
        (
            coded.iter().step_by(2).copied().collect(),
            coded.iter().skip(1).step_by(2).copied().collect(),
        )
    }

    #[test]
    fn zero_input_zero_output() {
        assert_eq!(conv_encode(&[0; 10]), vec![0; 32]);
    }

    #[test]
    fn impulse_response_is_generator_taps() {
        let mut input = vec![1u8];
        input.extend([0; 9]);
        let (x, y) = split(&conv_encode(&input));
        assert_eq!(&x[..7], &[1, 1, 1, 1, 0, 0, 1]);
        assert_eq!(&y[..7], &[1, 0, 1, 1, 0, 1, 1]);
        assert_eq!((x, y), trace_oracle(&input));
    }

    #[test]
    fn linearity_of_double_impulse() {
        let (ox, oy) = trace_oracle(&[1, 0, 0, 0, 0, 0, 0, 0]);
        let shift = |v: &[u8]| {
            let mut s = vec![0u8];
            s.extend_from_slice(&v[..v.len() - 1]);
            s
        };
        let ex: Vec<u8> = ox.iter().zip(shift(&ox)).map(|(a, b)| a ^ b).collect();
        let ey: Vec<u8> = oy.iter().zip(shift(&oy)).map(|(a, b)| a ^ b).collect();
        let (x, y) = split(&conv_encode(&[1, 1, 0, 0, 0, 0, 0, 0]));
        assert_eq!((x, y), (ex, ey));
    }

    #[test]
    fn puncture_patterns() {
        let coded = ["X1", "Y1", "X2", "Y2", "X3", "Y3"];
        assert_eq!(
            puncture(&coded, PunctureRate::R1_2).unwrap(),
            coded.to_vec()
        );
        assert_eq!(
            puncture(&coded, PunctureRate::R3_4).unwrap(),
            vec!["X1", "Y1", "Y2", "X3"]
        );
        assert_eq!(
            puncture(&coded[..4], PunctureRate::R2_3).unwrap(),
            vec!["X1", "Y1", "Y2"]
        );
        let ten: Vec<usize> = (0..10).collect();
        // X1 Y1 Y2 X3 Y4 X5
        assert_eq!(
            puncture(&ten, PunctureRate::R5_6).unwrap(),
            vec![0, 1, 3, 4, 7, 8]
        );
        assert!(matches!(
            puncture(&coded[..5], PunctureRate::R3_4),
            Err(PhyError::Padding { .. })
        ));
    }

    #[test]
    fn depuncture_places_erasures_at_dropped_indices() {
        for rate in PunctureRate::ALL {
            let n = 2 * rate.period() * 4;
            let coded: Vec<f64> = (1..=n).map(|i| i as f64).collect();
            let kept = puncture(&coded, rate).unwrap();
            let restored = depuncture(&kept, rate).unwrap();
            assert_eq!(restored.len(), n);
            let mask = rate.keep_mask();
            for (i, (&r, &c)) in restored.iter().zip(&coded).enumerate() {
                if mask[i % mask.len()] {
                    assert_eq!(r, c);
                } else {
                    assert_eq!(r, 0.0);
                }
            }
        }
    }

    #[test]
    fn rate_ratios() {
        assert_eq!(PunctureRate::R2_3.ratio(), (2, 3));
        assert_eq!(PunctureRate::R3_4.ratio(), (3, 4));
        assert_eq!(PunctureRate::R5_6.ratio(), (5, 6));
    }

    #[test]
    fn noiseless_round_trip_all_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for rate in PunctureRate::ALL {
            for len in [rate.period() * 10 - 6, 60 * rate.period() - 6, 1014] {
                if !(len + MEMORY).is_multiple_of(rate.period()) {
                    continue;
                }
                let msg: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
                let tx = puncture(&conv_encode(&msg), rate).unwrap();
                assert_eq!(
                    viterbi_decode(&to_soft(&tx), rate).unwrap(),
                    msg,
                    "{rate:?}"
                );
            }
        }
    }

    #[test]
    fn block_round_trip_all_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for rate in PunctureRate::ALL {
            let len = 960;
            let msg: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
            let tx = encode_block(&msg, rate).unwrap();
            let (k, n) = rate.ratio();
            assert_eq!(tx.len() * k, len * n);
            assert_eq!(decode_block(&to_soft(&tx), rate).unwrap(), msg);
        }
    }

    #[test]
    fn corrects_isolated_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let msg: Vec<u8> = (0..400).map(|_| rng.random_range(0..2)).collect();
            let mut soft = to_soft(&conv_encode(&msg));
            // one flipped bit per 40-bit window keeps errors far apart
            let mut pos = rng.random_range(0..20);
            while pos < soft.len() {
                soft[pos] = -soft[pos];
                pos += 40 + rng.random_range(0..10);
            }
            assert_eq!(viterbi_decode(&soft, PunctureRate::R1_2).unwrap(), msg);
        }
    }

    #[test]
    fn all_zero_metrics_are_deterministic() {
        let soft = vec![0.0; 2 * 50];
        let a = viterbi_decode(&soft, PunctureRate::R1_2).unwrap();
        let b = viterbi_decode(&soft, PunctureRate::R1_2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, vec![0; 44]);
        assert_eq!(
            decode_block(&vec![0.0; 40], PunctureRate::R1_2).unwrap(),
            vec![0; 20]
        );
    }

    #[test]
    fn trellis_too_short() {
        assert!(viterbi_decode(&[1.0; 8], PunctureRate::R1_2).is_err());
    }

    #[test]
    fn decoded_path_beats_perturbed_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let msg: Vec<u8> = (0..200).map(|_| rng.random_range(0..2)).collect();
        let soft: Vec<f64> = to_soft(&conv_encode(&msg))
            .into_iter()
            .map(|m| m + rng.random_range(-1.4..1.4))
            .collect();
        let decoded = viterbi_decode(&soft, PunctureRate::R1_2).unwrap();
        let score = |bits: &[u8]| -> f64 {
            conv_encode(bits)
                .iter()
                .zip(&soft)
                .map(|(&c, &m)| signed(m, c))
                .sum()
        };
        let best = score(&decoded);
        for i in 0..decoded.len() {
            let mut alt = decoded.clone();
            alt[i] ^= 1;
            assert!(score(&alt) <= best + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn encode_length(bits in proptest::collection::vec(0u8..2, 0..300)) {
            prop_assert_eq!(conv_encode(&bits).len(), 2 * (bits.len() + 6));
        }
    }
}
