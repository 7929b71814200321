use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

use super::{bch_build, polar_5g_build, LinearCode};

/// Serializable description of a code, as found in config files.
///
/// Matrix paths are resolved relative to the directory of the file that
/// holds the descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CodeDescriptor {
    Bch {
        m: u32,
        field_poly: u64,
        gen_poly: u64,
    },
    #[serde(rename = "polar5g")]
    Polar5g {
        n: usize,
        k: usize,
        #[serde(default = "default_crc_bits")]
        crc_bits: usize,
    },
    Matrix {
        generator: PathBuf,
        #[serde(default)]
        parity: Option<PathBuf>,
        #[serde(default)]
        name: Option<String>,
    },
}

fn default_crc_bits() -> usize {
    11
}

fn read_matrix(path: &Path) -> Result<BinaryMatrix> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    BinaryMatrix::read_text(BufReader::new(f))
}

impl CodeDescriptor {
    /// Shorthands: `bch127` and `polar128`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "bch127" | "bch" => Some(CodeDescriptor::Bch {
                m: 7,
                field_poly: 0x91,
                gen_poly: 0x7761,
            }),
            "polar128" | "polar" | "polar5g" => Some(CodeDescriptor::Polar5g {
                n: 128,
                k: 105,
                crc_bits: 11,
            }),
            _ => None,
        }
    }

    pub fn build(&self, base_dir: &Path) -> Result<LinearCode> {
        match self {
            CodeDescriptor::Bch {
                m,
                field_poly,
                gen_poly,
            } => bch_build(*m, *field_poly, *gen_poly),
            CodeDescriptor::Polar5g { n, k, crc_bits } => polar_5g_build(*n, *k, *crc_bits),
            CodeDescriptor::Matrix {
                generator,
                parity,
                name,
            } => {
                let g = read_matrix(&base_dir.join(generator))?;
                let name = name.clone().unwrap_or_else(|| {
                    format!("matrix({},{})", g.cols(), g.rows())
                });
                match parity {
                    Some(p) => LinearCode::new(name, g, read_matrix(&base_dir.join(p))?),
                    None => LinearCode::from_generator(name, g),
                }
            }
        }
    }
}
