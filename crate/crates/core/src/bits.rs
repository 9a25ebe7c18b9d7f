//! Bit/byte conversion helpers.
//!
//! A bit block is a `Vec<u8>` holding one bit (0 or 1) per element. Bytes are
//! unpacked most-significant bit first everywhere in the crate.

/// An ordered sequence of bits, one per element, each 0 or 1.
pub type BitBlock = Vec<u8>;

pub fn bytes_to_bits(bytes: &[u8]) -> BitBlock {
    let mut bits = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        for i in (0..8).rev() {
            bits.push((b >> i) & 1);
        }
    }
    bits
}

/// Packs bits MSB-first. A trailing partial byte is zero-padded on the right.
pub fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b & 1) << (7 - i)))
        })
        .collect()
}

/// Number of positions where the two bit slices differ.
pub fn hamming_distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Counts differing bits between two byte slices of equal length.
pub fn byte_bit_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| u64::from((x ^ y).count_ones()))
        .sum()
}
