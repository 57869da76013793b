//! Two-branch multiplicative-coset quantum LDPC codes: base construction,
//! coset certificates, circulant lifting, certification, joint decoding and
//! Monte Carlo evaluation.

use serde::{Deserialize, Serialize};

pub mod base;
pub mod binmat;
pub mod certify;
pub mod decode;
pub mod zmod;
pub mod error;
pub mod gf;
pub mod harness;
pub mod io;
pub mod lift;
pub mod replay;

pub use error::{Error, Result};

/// Check type, or equivalently the Pauli type of a logical operator:
/// an X-side logical lies in `ker H_Z`, a Z-side logical in `ker H_X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    X,
    Z,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::X => Side::Z,
            Side::Z => Side::X,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::X => "X",
            Side::Z => "Z",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s {
            "X" | "x" => Ok(Side::X),
            "Z" | "z" => Ok(Side::Z),
            _ => Err(Error::Invalid(format!("unknown side {s:?}"))),
        }
    }
}
