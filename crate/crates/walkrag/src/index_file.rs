//! Versioned binary vector-index file.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic      8 bytes   "WKRGIDX\0"
//! version    u32       1
//! dimension  u32
//! count      u64
//! mode       u8        0 = exact, 1 = approximate (IVF)
//! [mode 1]   nlist u32, nprobe u32, iterations u32, seed u64
//! ids        count × (u32 byte length, UTF-8 bytes)
//! vectors    count × dimension × f32, row-major
//! ```

use std::io::{Read, Write};

use walkrag_core::retrieval::{IndexError, IndexMode, IvfParams};
use walkrag_core::VectorIndex;

pub const MAGIC: &[u8; 8] = b"WKRGIDX\0";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IndexFileError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a walkrag index file")]
    BadMagic,
    #[error("unsupported index version {0}")]
    Version(u32),
    #[error("unknown index mode {0}")]
    Mode(u8),
    #[error("passage id is not UTF-8")]
    Utf8,
    #[error(transparent)]
    Index(#[from] IndexError),
}

pub fn write_index(index: &VectorIndex, mut out: impl Write) -> Result<(), IndexFileError> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(index.dimension() as u32).to_le_bytes())?;
    out.write_all(&(index.len() as u64).to_le_bytes())?;
    match index.mode() {
        IndexMode::Exact => out.write_all(&[0])?,
        IndexMode::Approximate(p) => {
            out.write_all(&[1])?;
            out.write_all(&p.nlist.to_le_bytes())?;
            out.write_all(&p.nprobe.to_le_bytes())?;
            out.write_all(&p.iterations.to_le_bytes())?;
            out.write_all(&p.seed.to_le_bytes())?;
        }
    }
    for id in index.ids() {
        out.write_all(&(id.len() as u32).to_le_bytes())?;
        out.write_all(id.as_bytes())?;
    }
    let mut row = Vec::with_capacity(index.dimension() * 4);
    for chunk in index.data().chunks(index.dimension().max(1)) {
        row.clear();
        for x in chunk {
            row.extend_from_slice(&x.to_le_bytes());
        }
        out.write_all(&row)?;
    }
    out.flush()?;
    Ok(())
}

fn read_array<const N: usize>(input: &mut impl Read) -> std::io::Result<[u8; N]> {
    let mut b = [0u8; N];
    input.read_exact(&mut b)?;
    Ok(b)
}

fn read_u32(input: &mut impl Read) -> std::io::Result<u32> {
    read_array::<4>(input).map(u32::from_le_bytes)
}

fn read_u64(input: &mut impl Read) -> std::io::Result<u64> {
    read_array::<8>(input).map(u64::from_le_bytes)
}

pub fn read_index(mut input: impl Read) -> Result<VectorIndex, IndexFileError> {
    if &read_array::<8>(&mut input)? != MAGIC {
        return Err(IndexFileError::BadMagic);
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(IndexFileError::Version(version));
    }
    let dimension = read_u32(&mut input)? as usize;
    let count = read_u64(&mut input)? as usize;
    let mode = match read_array::<1>(&mut input)?[0] {
        0 => IndexMode::Exact,
        1 => IndexMode::Approximate(IvfParams {
            nlist: read_u32(&mut input)?,
            nprobe: read_u32(&mut input)?,
            iterations: read_u32(&mut input)?,
            seed: read_u64(&mut input)?,
        }),
        other => return Err(IndexFileError::Mode(other)),
    };
    let mut ids = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let len = read_u32(&mut input)? as usize;
        let mut bytes = vec![0u8; len];
        input.read_exact(&mut bytes)?;
        ids.push(String::from_utf8(bytes).map_err(|_| IndexFileError::Utf8)?);
    }
    let mut raw = vec![0u8; count * dimension * 4];
    input.read_exact(&mut raw)?;
    let data = raw.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
    Ok(VectorIndex::from_parts(dimension, ids, data, mode)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use walkrag_core::retrieval::Embedder;
    use walkrag_core::HashingEncoder;

    fn sample(mode: IndexMode) -> VectorIndex {
        let enc = HashingEncoder::new(32);
        let texts = ["alpha beta", "gamma delta", "epsilon"];
        let vecs: Vec<_> = texts.iter().map(|t| enc.embed(t).unwrap()).collect();
        VectorIndex::build(32, vec!["x".into(), "yy".into(), "zzz".into()], &vecs, mode).unwrap()
    }

    #[test]
    fn exact_round_trip_and_header() {
        let idx = sample(IndexMode::Exact);
        let mut buf = Vec::new();
        write_index(&idx, &mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 32);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 3);
        assert_eq!(buf[24], 0);
        assert_eq!(buf.len(), 25 + (4 + 1) + (4 + 2) + (4 + 3) + 3 * 32 * 4);
        assert_eq!(read_index(buf.as_slice()).unwrap(), idx);
    }

    #[test]
    fn approximate_round_trip() {
        let idx = sample(IndexMode::Approximate(IvfParams { nlist: 2, nprobe: 1, iterations: 3, seed: 9 }));
        let mut buf = Vec::new();
        write_index(&idx, &mut buf).unwrap();
        assert_eq!(read_index(buf.as_slice()).unwrap(), idx);
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(matches!(read_index(&b"NOTANIDX\x01\0\0\0"[..]), Err(IndexFileError::BadMagic)));
        let mut buf = Vec::new();
        write_index(&sample(IndexMode::Exact), &mut buf).unwrap();
        buf[8] = 2;
        assert!(matches!(read_index(buf.as_slice()), Err(IndexFileError::Version(2))));
        buf[8] = 1;
        buf.truncate(buf.len() - 1);
        assert!(matches!(read_index(buf.as_slice()), Err(IndexFileError::Io(_))));
    }
}
