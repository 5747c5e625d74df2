//! Binary snapshot files.
//!
//! Layout: the magic bytes `DOA1`, then `M` and `N` as little-endian `u32`,
//! then `M·N` complex samples in column-major order, each stored as two
//! little-endian `f64` (real, imaginary).

use std::io::{Read, Write};

use crate::error::{DoaError, Result};
use crate::{CMatrix, C64};

pub const MAGIC: &[u8; 4] = b"DOA1";

pub fn write_snapshots<W: Write>(mut w: W, data: &CMatrix) -> Result<()> {
    let m = u32::try_from(data.nrows())
        .map_err(|_| DoaError::Format("too many rows for a snapshot file".into()))?;
    let n = u32::try_from(data.ncols())
        .map_err(|_| DoaError::Format("too many columns for a snapshot file".into()))?;
    w.write_all(MAGIC)?;
    w.write_all(&m.to_le_bytes())?;
    w.write_all(&n.to_le_bytes())?;
    // nalgebra storage is column-major
    for z in data.iter() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn encode_snapshots(data: &CMatrix) -> Vec<u8> {
    let mut buf = Vec::with_capacity(12 + 16 * data.len());
    write_snapshots(&mut buf, data).expect("writing to a Vec cannot fail");
    buf
}

/// Decodes an M×N matrix, rejecting bad magic, truncation and trailing bytes.
pub fn decode_snapshots(bytes: &[u8]) -> Result<CMatrix> {
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(DoaError::Format("missing DOA1 header".into()));
    }
    let m = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = m
        .checked_mul(n)
        .and_then(|c| c.checked_mul(16))
        .and_then(|c| c.checked_add(12))
        .ok_or_else(|| DoaError::Format("snapshot dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(DoaError::Format(format!(
            "snapshot file has {} bytes, expected {expected} for {m}×{n}",
            bytes.len()
        )));
    }
    let values: Vec<C64> = bytes[12..]
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok(CMatrix::from_vec(m, n, values))
}

pub fn read_snapshots<R: Read>(mut r: R) -> Result<CMatrix> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode_snapshots(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_layout() {
        let data = CMatrix::from_column_slice(2, 1, &[C64::new(1.0, -2.0), C64::new(0.5, 0.25)]);
        let bytes = encode_snapshots(&data);
        assert_eq!(&bytes[..4], b"DOA1");
        assert_eq!(&bytes[4..12], &[2, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&bytes[12..20], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[20..28], &(-2.0f64).to_le_bytes());
        assert_eq!(&bytes[28..36], &0.5f64.to_le_bytes());
        assert_eq!(bytes.len(), 12 + 32);
    }

    #[test]
    fn column_major_order() {
        let data = CMatrix::from_fn(2, 3, |i, j| C64::new((10 * j + i) as f64, 0.0));
        let bytes = encode_snapshots(&data);
        let second = f64::from_le_bytes(bytes[28..36].try_into().unwrap());
        assert_eq!(second, 1.0); // (row 1, col 0)
        assert_eq!(decode_snapshots(&bytes).unwrap(), data);
    }

    #[test]
    fn malformed_input() {
        assert!(decode_snapshots(b"DOA2\0\0\0\0\0\0\0\0").is_err());
        assert!(decode_snapshots(b"DOA1").is_err());
        let mut bytes = encode_snapshots(&CMatrix::identity(2, 2));
        bytes.pop();
        assert!(decode_snapshots(&bytes).is_err());
        bytes.extend_from_slice(&[0, 0]);
        assert!(decode_snapshots(&bytes).is_err());
    }
}
