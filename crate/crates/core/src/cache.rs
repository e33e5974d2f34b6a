//! Binary window cache.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size    | field                                           |
//! |--------|---------|-------------------------------------------------|
//! | 0      | 12      | magic `BFREE-WINDOW`                            |
//! | 12     | 4       | format version (u32, currently 1)               |
//! | 16     | 32      | config hash                                     |
//! | 48     | 4       | dimension d (u32)                               |
//! | 52     | 16·d    | box bounds: lo_t, hi_t as i64 pairs             |
//! | …      | 8       | truncation L (u64; `u64::MAX` when absent)      |
//! | …      | 8       | bit count (u64)                                 |
//! | …      | ⌈n/8⌉   | bits, row-major point order, LSB-first per byte |

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::sieve::{Bits, Window};

pub const MAGIC: &[u8; 12] = b"BFREE-WINDOW";
pub const VERSION: u32 = 1;

pub fn encode(window: &Window, config_hash: &[u8; 32]) -> Vec<u8> {
    let region = window.region();
    let mut out = Vec::with_capacity(80 + window.len() / 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(config_hash);
    out.extend_from_slice(&(region.dim() as u32).to_le_bytes());
    for (lo, hi) in region.lo().iter().zip(region.hi()) {
        out.extend_from_slice(&lo.to_le_bytes());
        out.extend_from_slice(&hi.to_le_bytes());
    }
    let l = window.truncation().map_or(u64::MAX, |l| l as u64);
    out.extend_from_slice(&l.to_le_bytes());
    out.extend_from_slice(&(window.len() as u64).to_le_bytes());
    let mut bits = window.bits().to_bitvec();
    bits.set_uninitialized(false);
    out.extend_from_slice(bits.as_raw_slice());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| Error::Cache("truncated file".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Parses a cache image, rejecting it unless its hash equals `expected`.
pub fn decode(buf: &[u8], expected: &[u8; 32]) -> Result<Window> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(12)? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    if r.take(32)? != expected {
        return Err(Error::CacheMismatch);
    }
    let d = r.u32()? as usize;
    if d == 0 || d > 64 {
        return Err(Error::Cache(format!("bad dimension {d}")));
    }
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    for _ in 0..d {
        lo.push(r.i64()?);
        hi.push(r.i64()?);
    }
    let region = Region::new(lo, hi).map_err(|e| Error::Cache(e.to_string()))?;
    let l = r.u64()?;
    let n = r.u64()?;
    if n as u128 != region.point_count() {
        return Err(Error::Cache("bit count does not match the box".into()));
    }
    let bytes = r.take(n.div_ceil(8) as usize)?;
    if r.pos != buf.len() {
        return Err(Error::Cache("trailing bytes".into()));
    }
    let mut bits = Bits::from_slice(bytes);
    bits.truncate(n as usize);
    let window = Window::new(region, bits)?;
    Ok(window.with_truncation((l != u64::MAX).then_some(l as usize)))
}

/// Writes atomically: a temporary file in the same directory is renamed
/// over the target.
pub fn write_window(path: &Path, window: &Window, config_hash: &[u8; 32]) -> Result<()> {
    let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&encode(window, config_hash)).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

pub fn read_window(path: &Path, expected: &[u8; 32]) -> Result<Window> {
    let buf = fs::read(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
    decode(&buf, expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_bfamily, make_order, FamilySpec};
    use crate::sieve::sieve_window;

    #[test]
    fn round_trip() {
        let g = make_order(&[1, 0, 1]).unwrap();
        let fam = build_bfamily(&g, FamilySpec::Explicit(vec![vec![g.from_int(3)]])).unwrap();
        let w = sieve_window(&fam, &Region::new(vec![-3, 0], vec![4, 2]).unwrap(), 1).unwrap();
        let hash = [7u8; 32];
        let buf = encode(&w, &hash);
        assert_eq!(&buf[..12], MAGIC);
        assert_eq!(buf.len(), 16 + 32 + 4 + 32 + 16 + 3);
        let back = decode(&buf, &hash).unwrap();
        assert_eq!(back, w);
        assert_eq!(back.truncation(), Some(1));
    }

    #[test]
    fn rejects_mismatch_and_corruption() {
        let w = Window::filled(Region::segment(0, 9).unwrap(), true, 100).unwrap();
        let buf = encode(&w, &[1; 32]);
        assert_eq!(decode(&buf, &[2; 32]).unwrap_err(), Error::CacheMismatch);
        assert!(matches!(decode(&buf[..buf.len() - 1], &[1; 32]), Err(Error::Cache(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad, &[1; 32]), Err(Error::Cache(_))));
        let back = decode(&buf, &[1; 32]).unwrap();
        assert_eq!(back.truncation(), None);
        assert_eq!(back.count_ones(), 10);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.bin");
        let w = Window::from_fn(Region::segment(-20, 20).unwrap(), 100, |x| x[0] % 3 == 0).unwrap();
        write_window(&path, &w, &[9; 32]).unwrap();
        assert_eq!(read_window(&path, &[9; 32]).unwrap(), w);
        assert_eq!(read_window(&path, &[0; 32]).unwrap_err(), Error::CacheMismatch);
        assert!(!path.with_extension("tmp").exists());
    }
}
