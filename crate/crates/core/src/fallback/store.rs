//! Binary persistence for [`FallbackModel`].
//!
//! The file layout is fixed and versioned: the magic `DSFM`, a version
//! byte, the shape (`n`, `k`, `hidden` as little-endian `u32`), the seed and
//! update count (`u64`), then every parameter followed by both Adam moment
//! sets as little-endian `f64`, and finally a CRC32 of everything before it.
//! Loading restores the model bit-for-bit, so training can resume exactly
//! where it stopped. Any size or checksum discrepancy is reported as
//! corruption.

use std::path::Path;

use super::network::{FallbackModel, Tensors};

const MAGIC: &[u8; 4] = b"DSFM";
const VERSION: u8 = 1;

/// Failures while saving or loading a model file.
#[derive(Debug, thiserror::Error)]
pub enum ModelIoError {
    #[error("model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a fallback-model file (bad magic)")]
    BadMagic,
    #[error("unsupported model file version {found}")]
    UnsupportedVersion { found: u8 },
    #[error("model file is corrupt (checksum mismatch)")]
    ChecksumMismatch,
}

fn push_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_tensors(buf: &mut Vec<u8>, t: &Tensors) {
    for field in [&t.w1, &t.b1, &t.w2, &t.b2] {
        for &v in field {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
}

/// Sequential little-endian reader over the validated byte buffer.
struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], ModelIoError> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(ModelIoError::ChecksumMismatch)?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32, ModelIoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ModelIoError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64_vec(&mut self, count: usize) -> Result<Vec<f64>, ModelIoError> {
        let raw = self.take(count * 8)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn tensors(&mut self, input: usize, hidden: usize) -> Result<Tensors, ModelIoError> {
        Ok(Tensors {
            w1: self.f64_vec(hidden * input)?,
            b1: self.f64_vec(hidden)?,
            w2: self.f64_vec(2 * hidden)?,
            b2: self.f64_vec(2)?,
        })
    }
}

impl FallbackModel {
    /// Serializes the model, including optimizer state, to the versioned
    /// checksummed byte format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.push(VERSION);
        push_u32(&mut buf, self.n as u32);
        push_u32(&mut buf, self.k as u32);
        push_u32(&mut buf, self.hidden as u32);
        push_u64(&mut buf, self.seed);
        push_u64(&mut buf, self.step);
        push_tensors(&mut buf, &self.params);
        push_tensors(&mut buf, &self.moment1);
        push_tensors(&mut buf, &self.moment2);
        let crc = crc32fast::hash(&buf);
        push_u32(&mut buf, crc);
        buf
    }

    /// Reconstructs a model from [`FallbackModel::to_bytes`] output,
    /// verifying magic, version and checksum. Truncated or altered bytes
    /// are rejected as corruption.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelIoError> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(ModelIoError::BadMagic);
        }
        let version = *bytes.get(4).ok_or(ModelIoError::ChecksumMismatch)?;
        if version != VERSION {
            return Err(ModelIoError::UnsupportedVersion { found: version });
        }
        if bytes.len() < 4 + 1 + 4 {
            return Err(ModelIoError::ChecksumMismatch);
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().unwrap());
        if crc32fast::hash(body) != stored {
            return Err(ModelIoError::ChecksumMismatch);
        }
        let mut reader = Reader {
            bytes: body,
            pos: 5,
        };
        let n = reader.u32()? as usize;
        let k = reader.u32()? as usize;
        let hidden = reader.u32()? as usize;
        let seed = reader.u64()?;
        let step = reader.u64()?;
        let input = n
            .checked_mul(k)
            .filter(|_| n >= 1 && k >= 1 && hidden >= 1)
            .ok_or(ModelIoError::ChecksumMismatch)?;
        let params = reader.tensors(input, hidden)?;
        let moment1 = reader.tensors(input, hidden)?;
        let moment2 = reader.tensors(input, hidden)?;
        if reader.pos != body.len() {
            return Err(ModelIoError::ChecksumMismatch);
        }
        Ok(FallbackModel {
            n,
            k,
            hidden,
            seed,
            step,
            params,
            moment1,
            moment2,
        })
    }

    /// Writes the model to a file.
    pub fn save(&self, path: &Path) -> Result<(), ModelIoError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    /// Reads a model previously written by [`FallbackModel::save`].
    pub fn load(path: &Path) -> Result<Self, ModelIoError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
