//! Systematic Reed-Solomon coding over GF(256).
//!
//! Every profile is derived from the RS(255, 239, 8) mother code whose
//! generator has roots `0x02^0 .. 0x02^15`. A profile with `k_in` message
//! bytes is shortened by treating `239 - k_in` leading zero bytes as present,
//! and punctured by transmitting only the first `2 * t_corr` of the sixteen
//! parity bytes. The decoder re-inserts the dropped parity bytes as erasures
//! at known positions, so the usual `t_corr` error guarantee holds for every
//! profile.
//!
//! Codewords are ordered highest-degree coefficient first: message bytes,
//! then parity bytes.

use std::sync::OnceLock;

use crate::error::{check_len, PhyError, Result};
use crate::gf256::{poly_eval, poly_mul, Gf256};

pub const MOTHER_N: usize = 255;
pub const MOTHER_K: usize = 239;
pub const MOTHER_T: usize = 8;
const MOTHER_PARITY: usize = 2 * MOTHER_T;

/// Block sizes of one RS code variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RsProfile {
    pub n_out: usize,
    pub k_in: usize,
    pub t_corr: usize,
}

impl RsProfile {
    pub const MOTHER: RsProfile = RsProfile::raw(255, 239, 8);

    /// The rows of the mandatory channel-coding table.
    pub const TABLE: [RsProfile; 7] = [
        RsProfile::raw(12, 12, 0),
        RsProfile::raw(32, 24, 4),
        RsProfile::raw(40, 36, 2),
        RsProfile::raw(64, 48, 8),
        RsProfile::raw(80, 72, 4),
        RsProfile::raw(108, 96, 6),
        RsProfile::raw(120, 108, 6),
    ];

    const fn raw(n_out: usize, k_in: usize, t_corr: usize) -> Self {
        Self {
            n_out,
            k_in,
            t_corr,
        }
    }

    /// Accepts only the mother code and the table rows.
    pub fn new(n_out: usize, k_in: usize, t_corr: usize) -> Result<Self> {
        let p = Self::raw(n_out, k_in, t_corr);
        if p == Self::MOTHER || Self::TABLE.contains(&p) {
            Ok(p)
        } else {
            Err(PhyError::InvalidParameter {
                name: "rs_profile",
                reason: format!("({n_out},{k_in},{t_corr}) is not a supported RS code"),
            })
        }
    }

    pub fn parity_len(&self) -> usize {
        2 * self.t_corr
    }

    pub fn is_bypass(&self) -> bool {
        self.t_corr == 0
    }
}

/// Outcome of a decode attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsOutcome {
    /// Decoded to a codeword after fixing this many byte errors.
    Corrected(usize),
    /// Too many errors; the returned message is the uncorrected systematic part.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsDecoded {
    pub message: Vec<u8>,
    pub outcome: RsOutcome,
}

/// `(x + a^0)(x + a^1)...(x + a^(2t-1))`, lowest degree first.
pub fn rs_generator(t: usize) -> Result<Vec<Gf256>> {
    if t > MOTHER_T {
        return Err(PhyError::InvalidParameter {
            name: "t",
            reason: format!("must be at most {MOTHER_T}, got {t}"),
        });
    }
    let mut g = vec![Gf256::ONE];
    for i in 0..2 * t {
        g = poly_mul(&g, &[Gf256::alpha_pow(i as i64), Gf256::ONE]);
    }
    Ok(g)
}

fn mother_generator() -> &'static [Gf256] {
    static GEN: OnceLock<Vec<Gf256>> = OnceLock::new();
    GEN.get_or_init(|| rs_generator(MOTHER_T).expect("mother code generator"))
}

/// Parity of the mother code for a (virtually zero-prefixed) message.
fn mother_parity(msg: &[u8]) -> [Gf256; MOTHER_PARITY] {
    let g = mother_generator();
    let mut par = [Gf256::ZERO; MOTHER_PARITY];
    for &b in msg {
        let fb = Gf256(b) + par[0];
        for j in 0..MOTHER_PARITY - 1 {
            par[j] = par[j + 1] + fb * g[MOTHER_PARITY - 1 - j];
        }
        par[MOTHER_PARITY - 1] = fb * g[0];
    }
    par
}

pub fn rs_encode(msg: &[u8], profile: RsProfile) -> Result<Vec<u8>> {
    check_len("rs_encode message", profile.k_in, msg.len())?;
    let mut out = Vec::with_capacity(profile.n_out);
    out.extend_from_slice(msg);
    if !profile.is_bypass() {
        let par = mother_parity(msg);
        out.extend(par[..profile.parity_len()].iter().map(|p| p.0));
    }
    Ok(out)
}

/// Bounded-distance decoder: syndromes, Berlekamp-Massey seeded with the
/// punctured-parity erasure locator, Chien search and Forney's formula.
pub fn rs_decode(code: &[u8], profile: RsProfile) -> Result<RsDecoded> {
    check_len("rs_decode codeword", profile.n_out, code.len())?;
    let k = profile.k_in;
    if profile.is_bypass() {
        return Ok(RsDecoded {
            message: code.to_vec(),
            outcome: RsOutcome::Corrected(0),
        });
    }

    // Degree of each received byte in the mother codeword polynomial.
    // Message byte j sits at degree 15 + k - j, transmitted parity byte p at
    // 15 - p, and the dropped parity bytes occupy degrees 15 - 2t .. 0.
    let top_degree = MOTHER_PARITY - 1 + k;
    let n_erased = MOTHER_PARITY - profile.parity_len();
    let erasure_degrees: Vec<usize> = (0..n_erased).collect();

    let mut word: Vec<Gf256> = code.iter().map(|&b| Gf256(b)).collect();
    word.resize(k + MOTHER_PARITY, Gf256::ZERO);

    let syndromes = compute_syndromes(&word);
    if syndromes.iter().all(|s| s.is_zero()) {
        return Ok(RsDecoded {
            message: code[..k].to_vec(),
            outcome: RsOutcome::Corrected(0),
        });
    }

    let failed = || RsDecoded {
        message: code[..k].to_vec(),
        outcome: RsOutcome::Failed,
    };

    let locator = match berlekamp_massey(&syndromes, &erasure_degrees) {
        Some(l) => l,
        None => return Ok(failed()),
    };
    let degree = poly_degree(&locator);

    // Chien search restricted to positions that exist in the shortened code.
    let mut positions = Vec::with_capacity(degree);
    for d in 0..=top_degree {
        let x_inv = Gf256::alpha_pow(-(d as i64));
        if poly_eval(&locator, x_inv).is_zero() {
            positions.push(d);
        }
    }
    if positions.len() != degree {
        return Ok(failed());
    }

    let mut omega = poly_mul(&syndromes, &locator);
    omega.truncate(MOTHER_PARITY);
    let derivative: Vec<Gf256> = locator
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| if j % 2 == 1 { c } else { Gf256::ZERO })
        .collect();

    let mut corrected = 0;
    for &d in &positions {
        let x = Gf256::alpha_pow(d as i64);
        let x_inv = x.inv();
        let denom = poly_eval(&derivative, x_inv);
        if denom.is_zero() {
            return Ok(failed());
        }
        let magnitude = x * poly_eval(&omega, x_inv) / denom;
        if magnitude.is_zero() {
            continue;
        }
        let idx = top_degree - d;
        word[idx] += magnitude;
        if d >= n_erased {
            corrected += 1;
        }
    }

    if compute_syndromes(&word).iter().any(|s| !s.is_zero()) {
        return Ok(failed());
    }
    Ok(RsDecoded {
        message: word[..k].iter().map(|g| g.0).collect(),
        outcome: RsOutcome::Corrected(corrected),
    })
}

/// `S_i = r(a^i)` for i in 0..16, with `word` ordered highest degree first.
fn compute_syndromes(word: &[Gf256]) -> Vec<Gf256> {
    (0..MOTHER_PARITY)
        .map(|i| {
            let root = Gf256::alpha_pow(i as i64);
            word.iter().fold(Gf256::ZERO, |acc, &c| acc * root + c)
        })
        .collect()
}

fn poly_degree(p: &[Gf256]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// Errors-and-erasures Berlekamp-Massey. Returns the combined
/// error/erasure locator, lowest degree first, or `None` when the syndromes
/// are inconsistent with a correctable pattern.
fn berlekamp_massey(syndromes: &[Gf256], erasure_degrees: &[usize]) -> Option<Vec<Gf256>> {
    let two_t = syndromes.len();
    let e = erasure_degrees.len();

    let mut lambda = vec![Gf256::ONE];
    for &d in erasure_degrees {
        lambda = poly_mul(&lambda, &[Gf256::ONE, Gf256::alpha_pow(d as i64)]);
    }
    lambda.resize(two_t + 1, Gf256::ZERO);
    let mut prev = lambda.clone();
    let mut len = e;

    for r in (e + 1)..=two_t {
        let mut delta = Gf256::ZERO;
        for j in 0..=len.min(r - 1) {
            delta += lambda[j] * syndromes[r - 1 - j];
        }
        // prev <- x * prev, shared by both branches below
        prev.rotate_right(1);
        prev[0] = Gf256::ZERO;
        if delta.is_zero() {
            continue;
        }
        let next: Vec<Gf256> = lambda
            .iter()
            .zip(&prev)
            .map(|(&l, &b)| l + delta * b)
            .collect();
        if 2 * len < r + e {
            let scale = delta.inv();
            prev = lambda.iter().map(|&c| c * scale).collect();
            len = r + e - len;
        }
        lambda = next;
    }

    if len > (two_t + e) / 2 || poly_degree(&lambda) != len {
        return None;
    }
    lambda.truncate(len + 1);
    Some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generator_t1_by_hand() {
        // (x + 1)(x + 2) = x^2 + 3x + 2
        assert_eq!(rs_generator(1).unwrap(), vec![Gf256(2), Gf256(3), Gf256(1)]);
    }

    #[test]
    fn generator_degree_and_roots() {
        assert_eq!(rs_generator(0).unwrap(), vec![Gf256::ONE]);
        for t in 1..=8 {
            let g = rs_generator(t).unwrap();
            assert_eq!(g.len(), 2 * t + 1);
            assert_eq!(*g.last().unwrap(), Gf256::ONE);
            for i in 0..2 * t {
                assert!(poly_eval(&g, Gf256::alpha_pow(i as i64)).is_zero());
            }
        }
        assert!(poly_eval(&rs_generator(8).unwrap(), Gf256::alpha_pow(5)).is_zero());
        assert!(rs_generator(9).is_err());
    }

    #[test]
    fn mother_zero_codeword() {
        let out = rs_encode(&[0u8; 239], RsProfile::MOTHER).unwrap();
        assert_eq!(out, vec![0u8; 255]);
    }

    #[test]
    fn mother_codeword_is_multiple_of_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let msg: Vec<u8> = (0..239).map(|_| rng.random()).collect();
        let cw = rs_encode(&msg, RsProfile::MOTHER).unwrap();
        let word: Vec<Gf256> = cw.iter().map(|&b| Gf256(b)).collect();
        assert!(compute_syndromes(&word).iter().all(|s| s.is_zero()));
    }

    #[test]
    fn table_row_sizes() {
        let p = RsProfile::new(40, 36, 2).unwrap();
        let out = rs_encode(&[7u8; 36], p).unwrap();
        assert_eq!(out.len(), 40);
        assert_eq!(&out[..36], &[7u8; 36]);

        let bypass = RsProfile::new(12, 12, 0).unwrap();
        let msg: Vec<u8> = (0..12).collect();
        assert_eq!(rs_encode(&msg, bypass).unwrap(), msg);
    }

    #[test]
    fn rejects_bad_sizes() {
        let p = RsProfile::new(32, 24, 4).unwrap();
        assert_eq!(
            rs_encode(&[0; 23], p),
            Err(PhyError::SizeMismatch {
                what: "rs_encode message",
                expected: 24,
                actual: 23
            })
        );
        assert!(rs_decode(&[0; 31], p).is_err());
        assert!(RsProfile::new(33, 24, 4).is_err());
    }

    #[test]
    fn punctured_parity_is_prefix_of_mother_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let msg: Vec<u8> = (0..24).map(|_| rng.random()).collect();
        let mut padded = vec![0u8; 239 - 24];
        padded.extend_from_slice(&msg);
        let mother = rs_encode(&padded, RsProfile::MOTHER).unwrap();
        let short = rs_encode(&msg, RsProfile::new(32, 24, 4).unwrap()).unwrap();
        assert_eq!(&short[24..], &mother[239..247]);
    }

    #[test]
    fn noiseless_round_trip_every_profile() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in RsProfile::TABLE.iter().chain([&RsProfile::MOTHER]) {
            let msg: Vec<u8> = (0..p.k_in).map(|_| rng.random()).collect();
            let cw = rs_encode(&msg, *p).unwrap();
            let dec = rs_decode(&cw, *p).unwrap();
            assert_eq!(dec.message, msg);
            assert_eq!(dec.outcome, RsOutcome::Corrected(0));
        }
    }

    #[test]
    fn corrects_up_to_t_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for p in RsProfile::TABLE.iter().chain([&RsProfile::MOTHER]) {
            for _ in 0..200 {
                let msg: Vec<u8> = (0..p.k_in).map(|_| rng.random()).collect();
                let mut cw = rs_encode(&msg, *p).unwrap();
                let n_err = rng.random_range(1..=p.t_corr.max(1));
                if p.is_bypass() {
                    continue;
                }
                let mut positions: Vec<usize> = (0..p.n_out).collect();
                for i in 0..n_err {
                    let j = rng.random_range(i..p.n_out);
                    positions.swap(i, j);
                    cw[positions[i]] ^= rng.random_range(1..=255u8);
                }
                let dec = rs_decode(&cw, *p).unwrap();
                assert_eq!(dec.outcome, RsOutcome::Corrected(n_err), "{p:?}");
                assert_eq!(dec.message, msg);
            }
        }
    }

    #[test]
    fn overload_is_never_reported_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let p = RsProfile::new(64, 48, 8).unwrap();
        for _ in 0..500 {
            let msg: Vec<u8> = (0..48).map(|_| rng.random()).collect();
            let mut cw = rs_encode(&msg, p).unwrap();
            let mut positions: Vec<usize> = (0..64).collect();
            for i in 0..11 {
                let j = rng.random_range(i..64);
                positions.swap(i, j);
                cw[positions[i]] ^= rng.random_range(1..=255u8);
            }
            let dec = rs_decode(&cw, p).unwrap();
            assert_ne!(dec.outcome, RsOutcome::Corrected(0));
            if dec.outcome != RsOutcome::Failed {
                // a miscorrection lands on a different codeword
                assert_ne!(dec.message, msg);
            }
        }
    }
}
