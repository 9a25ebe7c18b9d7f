//! Link-level bit error rate simulator for the fixed-WiMAX OFDM physical
//! layer: randomization, Reed-Solomon and punctured convolutional coding,
//! block interleaving, Gray-mapped QAM, 256-point OFDM with cyclic prefix,
//! SUI multipath channels and a seeded Monte-Carlo harness.

pub mod bits;
pub mod channel;
pub mod conv_codec;
pub mod error;
pub mod fft;
pub mod gf256;
pub mod harness;
pub mod interleaver;
pub mod link;
pub mod mapper;
pub mod ofdm;
pub mod profile;
pub mod rs_codec;
pub mod scrambler;

pub use error::{PhyError, Result};
