//! Key file layout, all integers little-endian:
//!
//! | bytes | field                                        |
//! |-------|----------------------------------------------|
//! | 4     | magic `CBRW`                                 |
//! | 1     | version, `1`                                 |
//! | 1     | generator id                                 |
//! | 1     | channel count                                |
//! | 4     | width (u32)                                  |
//! | 4     | height (u32)                                 |
//! | 8     | seed (u64)                                   |
//! | 4     | offset bound (u32)                           |
//! | 4·n   | offsets (i32), channel-major then row-major  |

use std::fs;
use std::hash::Hasher;
use std::path::Path;

use fnv::FnvHasher;

use crate::error::{Error, Result};
use crate::rwm::{KeyGenerator, OffsetGrid};

pub const KEY_MAGIC: &[u8; 4] = b"CBRW";
pub const KEY_VERSION: u8 = 1;
pub const KEY_HEADER_LEN: usize = 27;

pub fn encode_key(key: &OffsetGrid) -> Vec<u8> {
    let n: usize = key.offsets().iter().map(Vec::len).sum();
    let mut out = Vec::with_capacity(KEY_HEADER_LEN + 4 * n);
    out.extend_from_slice(KEY_MAGIC);
    out.push(KEY_VERSION);
    out.push(key.generator().id());
    out.push(key.channel_count() as u8);
    out.extend_from_slice(&(key.width() as u32).to_le_bytes());
    out.extend_from_slice(&(key.height() as u32).to_le_bytes());
    out.extend_from_slice(&key.seed().to_le_bytes());
    out.extend_from_slice(&key.offset_bound().to_le_bytes());
    for plane in key.offsets() {
        for o in plane {
            out.extend_from_slice(&o.to_le_bytes());
        }
    }
    out
}

fn le<const N: usize>(data: &[u8], at: usize) -> [u8; N] {
    data[at..at + N]
        .try_into()
        .expect("length checked by caller")
}

pub fn decode_key(data: &[u8]) -> Result<OffsetGrid> {
    if data.len() < KEY_HEADER_LEN {
        return Err(Error::format(
            data.len() as u64,
            format!(
                "key header truncated: {} of {KEY_HEADER_LEN} bytes",
                data.len()
            ),
        ));
    }
    if &data[..4] != KEY_MAGIC {
        return Err(Error::format(0, "bad magic, expected CBRW"));
    }
    if data[4] != KEY_VERSION {
        return Err(Error::format(
            4,
            format!("unsupported key version {}", data[4]),
        ));
    }
    let generator = KeyGenerator::from_id(data[5])
        .ok_or_else(|| Error::format(5, format!("unknown generator id {}", data[5])))?;
    let channels = usize::from(data[6]);
    if channels != 1 && channels != 3 {
        return Err(Error::format(
            6,
            format!("channel count {channels} is not 1 or 3"),
        ));
    }
    let width = u32::from_le_bytes(le(data, 7)) as usize;
    let height = u32::from_le_bytes(le(data, 11)) as usize;
    let seed = u64::from_le_bytes(le(data, 15));
    let bound = u32::from_le_bytes(le(data, 23));
    if width == 0 || height == 0 {
        return Err(Error::format(7, format!("zero-sized key {width}x{height}")));
    }
    if bound == 0 || bound > i32::MAX as u32 {
        return Err(Error::format(
            23,
            format!("offset bound {bound} out of range"),
        ));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::format(7, "key dimensions overflow"))?;
    let expected = n
        .checked_mul(channels)
        .and_then(|v| v.checked_mul(4))
        .and_then(|v| v.checked_add(KEY_HEADER_LEN))
        .ok_or_else(|| Error::format(7, "key dimensions overflow"))?;
    if data.len() < expected {
        return Err(Error::format(
            data.len() as u64,
            format!(
                "offsets truncated: file has {} of {expected} bytes",
                data.len()
            ),
        ));
    }
    if data.len() > expected {
        return Err(Error::format(
            expected as u64,
            format!("{} trailing bytes after offsets", data.len() - expected),
        ));
    }
    let mut offsets = Vec::with_capacity(channels);
    for c in 0..channels {
        let mut plane = Vec::with_capacity(n);
        for i in 0..n {
            let at = KEY_HEADER_LEN + 4 * (c * n + i);
            let o = i32::from_le_bytes(le(data, at));
            if o.unsigned_abs() > bound {
                return Err(Error::format(
                    at as u64,
                    format!("offset {o} exceeds bound {bound}"),
                ));
            }
            plane.push(o);
        }
        offsets.push(plane);
    }
    OffsetGrid::from_parts(width, height, seed, bound, generator, offsets)
}

/// 64-bit FNV-1a; stable across platforms and releases.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

/// [`stable_hash`] of the encoded key file.
pub fn key_fingerprint(key: &OffsetGrid) -> u64 {
    stable_hash(&encode_key(key))
}

pub fn write_key(key: &OffsetGrid, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_key(key))?;
    Ok(())
}

pub fn read_key(path: impl AsRef<Path>) -> Result<OffsetGrid> {
    decode_key(&fs::read(path)?)
}
