//! Binary PGM (P5) and PPM (P6) with maxval 255.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pixel::RasterImage;

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn offset(&self) -> u64 {
        self.pos as u64
    }

    /// Skips whitespace and `#` comments running to end of line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next decimal token and the offset it starts at.
    fn number(&mut self, what: &str) -> Result<(usize, u64)> {
        self.skip_separators();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.data.len() {
                Error::format(self.offset(), format!("header truncated before {what}"))
            } else {
                Error::format(self.offset(), format!("expected decimal {what}"))
            });
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map(|n| (n, start as u64))
            .ok_or_else(|| Error::format(start as u64, format!("{what} out of range")))
    }
}

/// Decodes a P5 or P6 byte stream.
pub fn decode_pnm(data: &[u8]) -> Result<RasterImage> {
    let channels = match data.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        Some(_) => return Err(Error::format(0, "expected magic P5 or P6")),
        None => return Err(Error::format(0, "file too short for a PNM magic number")),
    };
    let mut cur = Cursor { data, pos: 2 };
    if !data
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::format(2, "expected whitespace after magic number"));
    }
    let (width, width_at) = cur.number("width")?;
    let (height, _) = cur.number("height")?;
    let (maxval, maxval_at) = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::format(
            width_at,
            format!("zero-sized image {width}x{height}"),
        ));
    }
    if maxval != 255 {
        return Err(Error::format(
            maxval_at,
            format!("maxval {maxval} unsupported, need 255"),
        ));
    }
    match data.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        Some(_) => {
            return Err(Error::format(
                cur.offset(),
                "expected whitespace after maxval",
            ))
        }
        None => return Err(Error::format(cur.offset(), "header truncated after maxval")),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::format(width_at, "image dimensions overflow"))?;
    let payload = &data[cur.pos..];
    if payload.len() < expected {
        return Err(Error::format(
            data.len() as u64,
            format!("payload truncated: {} of {expected} bytes", payload.len()),
        ));
    }
    if payload.len() > expected {
        return Err(Error::format(
            (cur.pos + expected) as u64,
            format!("{} trailing bytes after payload", payload.len() - expected),
        ));
    }
    RasterImage::from_interleaved(width, height, channels, payload)
}

/// Encodes as P5 (gray) or P6 (color) with a minimal header.
pub fn encode_pnm(img: &RasterImage) -> Vec<u8> {
    let magic = if img.channel_count() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_interleaved());
    out
}

pub fn read_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    decode_pnm(&fs::read(path)?)
}

pub fn write_image(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pnm(img))?;
    Ok(())
}
