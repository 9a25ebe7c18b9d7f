//! End-to-end transmit/receive checks over deterministic channels.

mod common;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use wimax_phy::bits::byte_bit_errors;
use wimax_phy::channel::{apply_channel, convolve, ChannelRealization};
use wimax_phy::link::{Coding, Estimation};
use wimax_phy::mapper::Modulation;
use wimax_phy::ofdm::{CpRatio, N_FFT};
use wimax_phy::profile::CODING_TABLE;

#[test]
fn identity_channel_every_row_and_cp() {
    let mut r = rng(10);
    let id = ChannelRealization::identity();
    for p in CODING_TABLE {
        for cp in CpRatio::ALL {
            let l = link(Coding::Coded(p), cp, Estimation::Perfect);
            let m = random_bytes(&mut r, 5 * p.uncoded_bytes);
            let tx = l.transmit(&m).unwrap();
            assert_eq!(tx.len(), 5 * (N_FFT + cp.cp_len()));
            assert_eq!(l.receive(&tx, Some(&id), 0.0).unwrap(), m, "{p} at {cp}");
        }
    }
}

#[test]
fn three_tap_channels_inside_the_prefix() {
    let mut r = rng(11);
    for p in CODING_TABLE {
        for cp in CpRatio::ALL {
            for _ in 0..3 {
                let h = random_three_tap(&mut r, cp.cp_len() - 1);
                let l = link(Coding::Coded(p), cp, Estimation::Perfect);
                let m = random_bytes(&mut r, 3 * p.uncoded_bytes);
                let y = convolve(&l.transmit(&m).unwrap(), &h);
                assert_eq!(
                    l.receive(&y, Some(&h), 0.0).unwrap(),
                    m,
                    "{p} at {cp}, {h:?}"
                );
            }
        }
    }
}

#[test]
fn uncoded_modes_loop_back() {
    let mut r = rng(12);
    for m in Modulation::ALL {
        let l = link(Coding::Uncoded(m), CpRatio::G1_4, Estimation::Perfect);
        let h = random_three_tap(&mut r, 40);
        let data = random_bytes(&mut r, 4 * l.block_bytes());
        let y = convolve(&l.transmit(&data).unwrap(), &h);
        assert_eq!(l.receive(&y, Some(&h), 0.0).unwrap(), data, "{m}");
    }
}

#[test]
fn delay_beyond_prefix_leaves_an_error_floor() {
    let h = ChannelRealization::new(
        vec![Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)],
        vec![0, 40],
    )
    .unwrap();
    let mut r = rng(13);
    let coding = Coding::Uncoded(Modulation::Qam64);
    let data = random_bytes(&mut r, 20 * 144);

    let short = link(coding, CpRatio::G1_32, Estimation::Perfect);
    let y = convolve(&short.transmit(&data).unwrap(), &h);
    let errs = byte_bit_errors(&short.receive(&y, Some(&h), 0.0).unwrap(), &data);
    assert!(errs > 100, "noiseless ISI should cause errors, saw {errs}");

    let long = link(coding, CpRatio::G1_4, Estimation::Perfect);
    let y = convolve(&long.transmit(&data).unwrap(), &h);
    assert_eq!(long.receive(&y, Some(&h), 0.0).unwrap(), data);
}

#[test]
fn pilot_estimation_noiseless_on_smooth_channel() {
    // A single-tap channel is flat, so interpolating pilots is exact.
    let mut r = rng(14);
    for p in CODING_TABLE {
        let h = ChannelRealization::new(
            vec![Complex64::from_polar(0.9, r.random_range(-3.0..3.0))],
            vec![0],
        )
        .unwrap();
        let l = link(Coding::Coded(p), CpRatio::G1_8, Estimation::PilotLs);
        let m = random_bytes(&mut r, 2 * p.uncoded_bytes);
        let y = convolve(&l.transmit(&m).unwrap(), &h);
        assert_eq!(l.receive(&y, None, 0.0).unwrap(), m, "{p}");
    }
}

fn ber_pair(
    coding: Coding,
    h: &ChannelRealization,
    snr_ls: f64,
    snr_perfect: f64,
    seed: u64,
) -> (f64, f64) {
    let perfect = link(coding, CpRatio::G1_8, Estimation::Perfect);
    let ls = link(coding, CpRatio::G1_8, Estimation::PilotLs);
    let mut r = rng(seed);
    let (mut e_perfect, mut e_ls, mut bits) = (0u64, 0u64, 0u64);
    for _ in 0..300 {
        let m = random_bytes(&mut r, 10 * perfect.block_bytes());
        let tx = perfect.transmit(&m).unwrap();
        let (y, nv) = apply_channel(&tx, h, snr_perfect, &mut r).unwrap();
        e_perfect += byte_bit_errors(&perfect.receive(&y, Some(h), nv).unwrap(), &m);
        let (y, nv) = apply_channel(&tx, h, snr_ls, &mut r).unwrap();
        e_ls += byte_bit_errors(&ls.receive(&y, None, nv).unwrap(), &m);
        bits += m.len() as u64 * 8;
    }
    (e_perfect as f64 / bits as f64, e_ls as f64 / bits as f64)
}

/// Short delays: the response varies slowly between pilots.
fn smooth_channel() -> ChannelRealization {
    ChannelRealization::new(
        vec![
            Complex64::new(0.95, 0.0),
            Complex64::new(0.0, 0.25),
            Complex64::new(0.1, 0.0),
        ],
        vec![0, 1, 2],
    )
    .unwrap()
}

#[test]
fn pilot_estimation_matches_perfect_at_high_snr() {
    let (bp, bl) = ber_pair(
        Coding::Coded(CODING_TABLE[1]),
        &smooth_channel(),
        20.0,
        20.0,
        15,
    );
    assert!(
        bl <= 2.0 * bp && bp <= 2.0 * bl,
        "perfect {bp:e} vs pilot LS {bl:e}"
    );
}

#[test]
fn pilot_estimation_penalty_is_a_few_db() {
    // Single-pilot LS estimates carry as much noise as the data, which
    // costs about 3 dB; 4 dB more SNR must recover the perfect-CSI BER.
    let coding = Coding::Uncoded(Modulation::Qpsk);
    let (bp, bl) = ber_pair(coding, &smooth_channel(), 14.0, 10.0, 16);
    assert!(bp > 1e-3, "operating point should produce errors: {bp:e}");
    assert!(
        bl < bp,
        "perfect at 10 dB {bp:e} vs pilot LS at 14 dB {bl:e}"
    );
    let (bp, bl) = ber_pair(coding, &smooth_channel(), 10.0, 10.0, 17);
    assert!(
        bl > bp,
        "noisy estimates cannot beat perfect CSI: {bp:e} vs {bl:e}"
    );
}

#[test]
fn deep_nulls_are_erased_and_decoded_through() {
    // Equal taps four samples apart null offsets +-32 and +-96 exactly.
    let h = ChannelRealization::new(
        vec![Complex64::new(0.7, 0.0), Complex64::new(0.7, 0.0)],
        vec![0, 4],
    )
    .unwrap();
    let resp = h.frequency_response(N_FFT);
    assert_eq!(resp.iter().filter(|v| v.norm() < 1e-12).count(), 4);
    let mut r = rng(16);
    for p in [CODING_TABLE[0], CODING_TABLE[1], CODING_TABLE[3]] {
        let l = link(Coding::Coded(p), CpRatio::G1_8, Estimation::Perfect);
        let m = random_bytes(&mut r, 50 * p.uncoded_bytes);
        let (y, nv) = apply_channel(&l.transmit(&m).unwrap(), &h, 30.0, &mut r).unwrap();
        let errs = byte_bit_errors(&l.receive(&y, Some(&h), nv).unwrap(), &m);
        assert_eq!(errs, 0, "{p}: erasures should be absorbed by the code");
    }
}
