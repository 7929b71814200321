//! Binary linear block codes and the reference constructions.

mod bch;
mod descriptor;
mod polar;

pub use bch::{bch_build, bch_generator_poly, GaloisField};
pub use descriptor::CodeDescriptor;
pub use polar::{crc_polynomial, polar_5g_build, polar_transform, RELIABILITY_SEQUENCE_128};

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitVector};

/// A binary linear block code given by its generator and parity-check
/// matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    name: String,
    generator: BinaryMatrix,
    parity: BinaryMatrix,
}

impl LinearCode {
    /// Validates `parity · generatorᵀ = 0` and both ranks.
    pub fn new(
        name: impl Into<String>,
        generator: BinaryMatrix,
        parity: BinaryMatrix,
    ) -> Result<Self> {
        let (k, n) = (generator.rows(), generator.cols());
        if parity.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: parity.cols(),
            });
        }
        if k > n {
            return Err(Error::InvalidCode(format!("k = {k} exceeds n = {n}")));
        }
        if parity.rows() != n - k {
            return Err(Error::InvalidCode(format!(
                "parity matrix has {} rows, expected n - k = {}",
                parity.rows(),
                n - k
            )));
        }
        let rank = generator.rank();
        if rank != k {
            return Err(Error::RankDeficient { rank, rows: k });
        }
        let rank = parity.rank();
        if rank != n - k {
            return Err(Error::RankDeficient { rank, rows: n - k });
        }
        if !generator.mul(&parity.transpose())?.is_zero() {
            return Err(Error::InvalidCode(
                "parity matrix does not annihilate the generator".into(),
            ));
        }
        Ok(LinearCode {
            name: name.into(),
            generator,
            parity,
        })
    }

    /// Derives the parity-check matrix from the generator.
    pub fn from_generator(name: impl Into<String>, generator: BinaryMatrix) -> Result<Self> {
        let parity = generator.null_space()?;
        Self::new(name, generator, parity)
    }

    /// BCH(127,113,2) over GF(2⁷) with field polynomial 0x91 and generator 0x7761.
    pub fn bch_127_113() -> Self {
        bch_build(7, 0x91, 0x7761).expect("reference BCH parameters are valid")
    }

    /// The 5G polar code PC(128,105) with an 11-bit CRC.
    pub fn polar_128_105() -> Self {
        polar_5g_build(128, 105, 11).expect("reference polar parameters are valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn generator(&self) -> &BinaryMatrix {
        &self.generator
    }

    pub fn parity(&self) -> &BinaryMatrix {
        &self.parity
    }

    /// `x = u · G`.
    pub fn encode(&self, u: &BitVector) -> Result<BitVector> {
        self.generator.vec_mul(u)
    }

    pub fn is_codeword(&self, x: &BitVector) -> Result<bool> {
        crate::gf2::is_codeword(&self.parity, x)
    }
}

pub fn encode(code: &LinearCode, u: &BitVector) -> Result<BitVector> {
    code.encode(u)
}
