//! Offline analysis of saved decoder failures. Nothing here feeds back into
//! decoding or FER accounting; extracted logicals are only reported and
//! written out as witness candidates.

use crate::binmat::BitVec;
use crate::certify::{check_witness, CssCode, WitnessReport};
use crate::decode::syndromes;
use crate::error::{Error, Result};
use crate::io::FailureDump;
use crate::Side;

/// Classification of one dump.
#[derive(Clone, Debug, PartialEq)]
pub enum Replay {
    /// Both residuals are stabilizers: the decoder output was equivalent.
    Degenerate,
    /// Residual logicals, at most one per side, each checked as a witness.
    Logical(Vec<WitnessReport>),
}

fn vec_of(n: usize, idx: &[usize], what: &str) -> Result<BitVec> {
    if let Some(&i) = idx.iter().find(|&&i| i >= n) {
        return Err(Error::Dimension(format!("{what} index {i} outside 0..{n}")));
    }
    Ok(BitVec::from_indices(n, idx))
}

/// Residual `true + estimate` of a syndrome-valid dump. The Z residual is a
/// candidate Z-logical (in `ker H_X`), the X residual an X-logical.
pub fn extract_logical(code: &CssCode, dump: &FailureDump) -> Result<Replay> {
    let n = code.n();
    let ex = vec_of(n, &dump.true_x, "true X")?;
    let ez = vec_of(n, &dump.true_z, "true Z")?;
    let hx = vec_of(n, &dump.est_x, "estimated X")?;
    let hz = vec_of(n, &dump.est_z, "estimated Z")?;
    let (sx, sz) = syndromes(code, &ex, &ez)?;
    if sx.ones() != dump.syndrome_x || sz.ones() != dump.syndrome_z {
        return Err(Error::Invalid("stored syndromes do not match the stored true error".into()));
    }
    let (tx, tz) = syndromes(code, &hx, &hz)?;
    if tx != sx || tz != sz {
        return Err(Error::Invalid("decoder output is not syndrome-valid; nothing to extract".into()));
    }
    let mut found = Vec::new();
    for (side, r) in [(Side::X, ex.xor(&hx)), (Side::Z, ez.xor(&hz))] {
        let rep = check_witness(code, side, &r.ones())?;
        debug_assert!(rep.in_kernel);
        if !rep.in_row_space {
            found.push(rep);
        }
    }
    Ok(if found.is_empty() {
        Replay::Degenerate
    } else {
        Replay::Logical(found)
    })
}
