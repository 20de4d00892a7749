//! Random offset grids (the revocable key) and random walk matrices.
//!
//! Each pixel `p` of a plane walks `offset(p)` steps along the row-major
//! pixel sequence, wrapping at both ends, and lands on `q`. The walk matrix
//! holds `(S(p) + S(q)) mod 256`. Positive offsets walk forward, negative
//! ones backward, and a zero offset lands on `p` itself.

use std::fmt;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::pixel::{wrap_unchecked, ChannelPlane, RasterImage};

/// Offset bound used when none is given.
pub const DEFAULT_OFFSET_BOUND: u32 = 127;

/// The pseudo-random generator a key was drawn from. The discriminant is
/// persisted in key files, so existing values must never change meaning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum KeyGenerator {
    /// ChaCha20 seeded through `SeedableRng::seed_from_u64`.
    ChaCha20 = 1,
}

impl KeyGenerator {
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(KeyGenerator::ChaCha20),
            _ => None,
        }
    }
}

impl fmt::Display for KeyGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeyGenerator::ChaCha20 => f.write_str("chacha20"),
        }
    }
}

/// Signed per-pixel offsets, one plane per image channel.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OffsetGrid {
    width: usize,
    height: usize,
    seed: u64,
    offset_bound: u32,
    generator: KeyGenerator,
    offsets: Vec<Vec<i32>>,
}

/// Borrowed view of one channel of an [`OffsetGrid`].
#[derive(Clone, Copy, Debug)]
pub struct OffsetPlane<'a> {
    pub width: usize,
    pub height: usize,
    pub offsets: &'a [i32],
}

impl OffsetGrid {
    /// Assembles a grid from stored parts, validating every invariant.
    pub fn from_parts(
        width: usize,
        height: usize,
        seed: u64,
        offset_bound: u32,
        generator: KeyGenerator,
        offsets: Vec<Vec<i32>>,
    ) -> Result<Self> {
        validate_shape(width, height, offsets.len(), offset_bound)?;
        let n = width * height;
        let bound = i64::from(offset_bound);
        for (c, plane) in offsets.iter().enumerate() {
            if plane.len() != n {
                return Err(Error::arg(format!(
                    "offset channel {c} has {} entries, expected {n}",
                    plane.len()
                )));
            }
            if let Some(bad) = plane.iter().find(|&&o| i64::from(o).abs() > bound) {
                return Err(Error::arg(format!(
                    "offset {bad} in channel {c} exceeds bound {offset_bound}"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            seed,
            offset_bound,
            generator,
            offsets,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channel_count(&self) -> usize {
        self.offsets.len()
    }

    /// `(width, height, channels)`
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.offsets.len())
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn offset_bound(&self) -> u32 {
        self.offset_bound
    }

    pub fn generator(&self) -> KeyGenerator {
        self.generator
    }

    pub fn channel(&self, index: usize) -> Option<OffsetPlane<'_>> {
        self.offsets.get(index).map(|offsets| OffsetPlane {
            width: self.width,
            height: self.height,
            offsets,
        })
    }

    pub fn offsets(&self) -> &[Vec<i32>] {
        &self.offsets
    }

    /// Draws a fresh grid from the stored parameters; equal to `self` for
    /// any key produced by [`generate_offset_grid`].
    pub fn regenerate(&self) -> Result<OffsetGrid> {
        generate_offset_grid(
            self.width,
            self.height,
            self.offsets.len(),
            self.seed,
            self.offset_bound,
        )
    }
}

fn validate_shape(width: usize, height: usize, channels: usize, bound: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::arg(format!(
            "key dimensions must be non-zero, got {width}x{height}"
        )));
    }
    if u32::try_from(width).is_err() || u32::try_from(height).is_err() {
        return Err(Error::arg(format!(
            "key dimensions {width}x{height} exceed 32 bits"
        )));
    }
    if width.checked_mul(height).is_none() {
        return Err(Error::arg("key dimensions overflow"));
    }
    if channels != 1 && channels != 3 {
        return Err(Error::arg(format!(
            "a key has 1 or 3 channels, got {channels}"
        )));
    }
    if bound == 0 {
        return Err(Error::arg("offset bound must be at least 1"));
    }
    if bound > i32::MAX as u32 {
        return Err(Error::arg(format!(
            "offset bound {bound} does not fit a signed 32-bit offset"
        )));
    }
    Ok(())
}

/// Uniform integer in `[-bound, bound]` by rejection sampling, so the
/// result depends only on the generator's raw output stream.
fn uniform_offset(rng: &mut impl RngCore, bound: u32) -> i32 {
    let span = 2 * u64::from(bound) + 1;
    // 2^64 mod span; draws below this are rejected to remove modulo bias.
    let reject_below = span.wrapping_neg() % span;
    loop {
        let x = rng.next_u64();
        if x >= reject_below {
            return ((x % span) as i64 - i64::from(bound)) as i32;
        }
    }
}

/// Draws a key: independent uniform offsets in `[-offset_bound, offset_bound]`,
/// channel-major then row-major, from a ChaCha20 stream seeded by `seed`.
pub fn generate_offset_grid(
    width: usize,
    height: usize,
    channels: usize,
    seed: u64,
    offset_bound: u32,
) -> Result<OffsetGrid> {
    validate_shape(width, height, channels, offset_bound)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = width * height;
    let offsets = (0..channels)
        .map(|_| {
            (0..n)
                .map(|_| uniform_offset(&mut rng, offset_bound))
                .collect()
        })
        .collect();
    Ok(OffsetGrid {
        width,
        height,
        seed,
        offset_bound,
        generator: KeyGenerator::ChaCha20,
        offsets,
    })
}

/// Walk matrix of one channel. Values are already reduced mod 256.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RwmPlane(ChannelPlane);

impl RwmPlane {
    pub fn as_plane(&self) -> &ChannelPlane {
        &self.0
    }

    pub fn into_plane(self) -> ChannelPlane {
        self.0
    }
}

impl From<ChannelPlane> for RwmPlane {
    fn from(plane: ChannelPlane) -> Self {
        RwmPlane(plane)
    }
}

/// Computes the random walk matrix of one plane.
pub fn generate_rwm(secret: &ChannelPlane, offsets: OffsetPlane<'_>) -> Result<RwmPlane> {
    if secret.width() != offsets.width
        || secret.height() != offsets.height
        || offsets.offsets.len() != secret.len()
    {
        return Err(Error::DimensionMismatch {
            left_what: "image plane",
            left: (secret.width(), secret.height(), 1),
            right_what: "key plane",
            right: (offsets.width, offsets.height, 1),
        });
    }
    let s = secret.values();
    let n = s.len();
    let values = offsets
        .offsets
        .iter()
        .enumerate()
        .map(|(p, &offset)| {
            let q = wrap_unchecked(p, i64::from(offset), n);
            s[p].wrapping_add(s[q])
        })
        .collect();
    ChannelPlane::new(secret.width(), secret.height(), values).map(RwmPlane)
}

/// Channel-wise [`generate_rwm`]; channel `c` of the key drives channel `c`.
pub fn generate_rwm_image(secret: &RasterImage, key: &OffsetGrid) -> Result<RasterImage> {
    ensure_key_fits(secret, key)?;
    let planes = secret
        .channels()
        .iter()
        .enumerate()
        .map(|(c, plane)| {
            let offsets = key.channel(c).expect("channel count checked");
            generate_rwm(plane, offsets).map(RwmPlane::into_plane)
        })
        .collect::<Result<Vec<_>>>()?;
    RasterImage::new(planes)
}

pub(crate) fn ensure_key_fits(image: &RasterImage, key: &OffsetGrid) -> Result<()> {
    if image.dims() != key.dims() {
        return Err(Error::DimensionMismatch {
            left_what: "image",
            left: image.dims(),
            right_what: "key",
            right: key.dims(),
        });
    }
    Ok(())
}
