use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitVector};

use super::LinearCode;

/// Polar channel indices below 128 in ascending reliability, from the 5G
/// universal sequence (3GPP TS 38.212, Table 5.3.1.2-1).
#[rustfmt::skip]
pub const RELIABILITY_SEQUENCE_128: [u8; 128] = [
    0, 1, 2, 4, 8, 16, 32, 3, 5, 64, 9, 6, 17, 10, 18, 12,
    33, 65, 20, 34, 24, 36, 7, 66, 11, 40, 68, 19, 13, 48, 14, 72,
    21, 35, 26, 80, 37, 25, 22, 38, 96, 67, 41, 28, 69, 42, 49, 74,
    70, 44, 81, 50, 73, 15, 52, 23, 76, 82, 56, 27, 97, 39, 84, 29,
    43, 98, 88, 30, 71, 45, 100, 51, 46, 75, 104, 53, 77, 54, 83, 57,
    112, 78, 85, 58, 99, 86, 60, 89, 101, 31, 90, 102, 105, 92, 47, 106,
    55, 113, 79, 108, 59, 114, 87, 116, 61, 91, 120, 62, 103, 93, 107, 94,
    109, 115, 110, 117, 118, 121, 122, 63, 124, 95, 111, 119, 123, 125, 126, 127,
];

/// 5G CRC generator polynomials, including the leading term.
pub fn crc_polynomial(bits: usize) -> Option<u64> {
    match bits {
        // x^6 + x^5 + 1
        6 => Some(0x61),
        // x^11 + x^10 + x^9 + x^5 + 1
        11 => Some(0xe21),
        // x^24 + x^23 + x^21 + x^20 + x^17 + x^15 + x^13 + x^12 + x^8 + x^4 + x^2 + x + 1
        24 => Some(0x1b2_b117),
        _ => None,
    }
}

/// CRC remainder of the message, MSB first, zero initial state.
fn crc_bits(message: &[u8], poly: u64, width: usize) -> Vec<u8> {
    let top = 1u64 << width;
    let mut reg = 0u64;
    for &b in message {
        let fb = (reg >> (width - 1) & 1) ^ u64::from(b & 1);
        reg = (reg << 1) & (top - 1);
        if fb == 1 {
            reg ^= poly & (top - 1);
        }
    }
    (0..width).rev().map(|i| (reg >> i & 1) as u8).collect()
}

/// In-place `d · F^{⊗m}` with kernel `F = [[1,0],[1,1]]`.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    assert!(n.is_power_of_two(), "polar length must be a power of two");
    let mut stride = 1;
    while stride < n {
        for block in (0..n).step_by(2 * stride) {
            for i in block..block + stride {
                bits[i] ^= bits[i + stride];
            }
        }
        stride *= 2;
    }
}

struct PolarEncoder {
    n: usize,
    crc_bits: usize,
    crc_poly: u64,
    /// Information positions (ascending), k + crc_bits of them.
    info: Vec<usize>,
}

impl PolarEncoder {
    fn encode(&self, message: &[u8]) -> Vec<u8> {
        let mut payload = message.to_vec();
        if self.crc_bits > 0 {
            payload.extend(crc_bits(message, self.crc_poly, self.crc_bits));
        }
        let mut d = vec![0u8; self.n];
        for (&pos, &b) in self.info.iter().zip(&payload) {
            d[pos] = b;
        }
        polar_transform(&mut d);
        d
    }
}

/// The 5G polar code of length `n` carrying `k` message bits followed by a
/// `crc_bits`-bit CRC on the most reliable channels, without rate matching.
///
/// `n` must be a power of two no larger than 128. The generator rows are the
/// encodings of the unit messages; the parity matrix is their null space.
pub fn polar_5g_build(n: usize, k: usize, crc_bits_count: usize) -> Result<LinearCode> {
    if !n.is_power_of_two() || n < 2 || n > RELIABILITY_SEQUENCE_128.len() {
        return Err(Error::InvalidCode(format!(
            "polar length {n} must be a power of two in 2..=128"
        )));
    }
    if k == 0 || k + crc_bits_count > n {
        return Err(Error::InvalidCode(format!(
            "k + crc bits = {} must be in 1..={n}",
            k + crc_bits_count
        )));
    }
    let crc_poly = match crc_bits_count {
        0 => 0,
        b => crc_polynomial(b)
            .ok_or_else(|| Error::InvalidCode(format!("no 5G CRC of {b} bits")))?,
    };
    let payload = k + crc_bits_count;
    let mut info: Vec<usize> = RELIABILITY_SEQUENCE_128
        .iter()
        .map(|&c| usize::from(c))
        .filter(|&c| c < n)
        .skip(n - payload)
        .collect();
    info.sort_unstable();
    let enc = PolarEncoder {
        n,
        crc_bits: crc_bits_count,
        crc_poly,
        info,
    };
    let rows: Vec<BitVector> = (0..k)
        .map(|i| {
            let mut u = vec![0u8; k];
            u[i] = 1;
            BitVector::from_bits(&enc.encode(&u))
        })
        .collect();
    let generator = BinaryMatrix::from_rows(&rows)?;
    let name = if crc_bits_count > 0 {
        format!("PC({n},{k})+CRC({crc_bits_count})")
    } else {
        format!("PC({n},{k})")
    };
    LinearCode::from_generator(name, generator)
}
