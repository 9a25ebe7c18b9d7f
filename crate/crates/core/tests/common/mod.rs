//! Oracles and fixtures shared by the integration suites.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wimax_phy::channel::{ChannelRealization, TapTable};
use wimax_phy::harness::{ChannelModel, Experiment, SnrAxis, StopRule};
use wimax_phy::link::{Coding, Estimation, Link, LinkProfile};
use wimax_phy::ofdm::{CpRatio, OfdmParams};

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Uncoded BPSK bit error probability over AWGN at `ebn0_db`.
pub fn bpsk_awgn_ber(ebn0_db: f64) -> f64 {
    q_function((2.0 * 10f64.powf(ebn0_db / 10.0)).sqrt())
}

/// Direct O(N^2) DFT, unitary scaling, the FFT oracle.
pub fn naive_dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, &v)| {
                    let ph = sign * 2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                    v * Complex64::from_polar(1.0, ph)
                })
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

pub fn profile(coding: Coding, cp: CpRatio, estimation: Estimation) -> LinkProfile {
    LinkProfile::new(coding, OfdmParams::new(cp, 5e6).unwrap(), estimation)
}

pub fn link(coding: Coding, cp: CpRatio, estimation: Estimation) -> Link {
    Link::new(profile(coding, cp, estimation)).unwrap()
}

pub fn random_bytes(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let mut v = vec![0u8; n];
    rng.fill(&mut v[..]);
    v
}

/// Three random complex taps with distinct delays, the largest `max_delay`.
pub fn random_three_tap(rng: &mut ChaCha8Rng, max_delay: usize) -> ChannelRealization {
    let mut delays = vec![0, rng.random_range(1..max_delay), max_delay];
    delays.sort_unstable();
    let gains = (0..3)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ChannelRealization::new(gains, delays).unwrap()
}

pub fn sui(id: u8) -> ChannelModel {
    ChannelModel::Sui(TapTable::builtin().model(id).unwrap().clone())
}

pub fn experiment(
    coding: Coding,
    cp: CpRatio,
    channel: ChannelModel,
    grid: Vec<f64>,
    stop: StopRule,
    seed: u64,
) -> Experiment {
    let mut e = Experiment::new(
        profile(coding, cp, Estimation::Perfect),
        channel,
        grid,
        seed,
    );
    e.stop = stop;
    e
}

pub fn bpsk_awgn_experiment(grid: Vec<f64>, max_bits: u64, seed: u64) -> Experiment {
    let mut e = experiment(
        Coding::Uncoded(wimax_phy::mapper::Modulation::Bpsk),
        CpRatio::G1_8,
        ChannelModel::Awgn,
        grid,
        StopRule {
            min_errors: u64::MAX,
            max_bits,
        },
        seed,
    );
    e.snr_axis = SnrAxis::Ebn0;
    e
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
