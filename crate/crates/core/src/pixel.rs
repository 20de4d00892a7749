//! Image grids and the wrap-around index arithmetic used by the walk.
//!
//! Planes are stored row-major: pixel `(row, col)` lives at
//! `row * width + col`. Every walk operates on that flattened sequence.

use crate::error::{Error, Result};

/// One 8-bit intensity grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChannelPlane {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl ChannelPlane {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::arg(format!(
                "plane dimensions must be non-zero, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::arg("plane dimensions overflow"))?;
        if values.len() != expected {
            return Err(Error::arg(format!(
                "plane {width}x{height} needs {expected} values, got {}",
                values.len()
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// A plane with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width.saturating_mul(height));
        for row in 0..height {
            for col in 0..width {
                values.push(f(row, col));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Row-major pixel values.
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u8> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u8> {
        if row < self.height && col < self.width {
            Some(self.values[row * self.width + col])
        } else {
            None
        }
    }

    /// Applies `f` pixel-wise to two planes of identical shape.
    pub fn zip_map(&self, other: &ChannelPlane, f: impl Fn(u8, u8) -> u8) -> Result<ChannelPlane> {
        ensure_same_plane(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ChannelPlane {
            width: self.width,
            height: self.height,
            values,
        })
    }

    pub fn map(&self, f: impl Fn(u8) -> u8) -> ChannelPlane {
        ChannelPlane {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

pub(crate) fn ensure_same_plane(a: &ChannelPlane, b: &ChannelPlane) -> Result<()> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch {
            left_what: "plane",
            left: (a.width, a.height, 1),
            right_what: "plane",
            right: (b.width, b.height, 1),
        });
    }
    Ok(())
}

/// A gray (1 channel) or color (3 channels, R-G-B order) image.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RasterImage {
    channels: Vec<ChannelPlane>,
}

impl RasterImage {
    pub fn new(channels: Vec<ChannelPlane>) -> Result<Self> {
        if channels.len() != 1 && channels.len() != 3 {
            return Err(Error::arg(format!(
                "an image has 1 or 3 channels, got {}",
                channels.len()
            )));
        }
        let (w, h) = (channels[0].width, channels[0].height);
        if let Some(bad) = channels.iter().find(|c| c.width != w || c.height != h) {
            return Err(Error::arg(format!(
                "channel planes disagree on size: {w}x{h} vs {}x{}",
                bad.width, bad.height
            )));
        }
        Ok(Self { channels })
    }

    pub fn gray(plane: ChannelPlane) -> Self {
        Self {
            channels: vec![plane],
        }
    }

    pub fn rgb(r: ChannelPlane, g: ChannelPlane, b: ChannelPlane) -> Result<Self> {
        Self::new(vec![r, g, b])
    }

    /// Builds an image from interleaved samples (`RGBRGB...` for color).
    pub fn from_interleaved(
        width: usize,
        height: usize,
        channels: usize,
        data: &[u8],
    ) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::arg(format!(
                "an image has 1 or 3 channels, got {channels}"
            )));
        }
        let n = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::arg("image dimensions overflow"))?;
        if data.len() != n {
            return Err(Error::arg(format!(
                "{width}x{height}x{channels} image needs {n} samples, got {}",
                data.len()
            )));
        }
        let planes = (0..channels)
            .map(|c| {
                let values = data.iter().skip(c).step_by(channels).copied().collect();
                ChannelPlane::new(width, height, values)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(planes)
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        let n = self.pixel_count();
        let c = self.channels.len();
        let mut out = Vec::with_capacity(n * c);
        for p in 0..n {
            out.extend(self.channels.iter().map(|plane| plane.values[p]));
        }
        out
    }

    pub fn width(&self) -> usize {
        self.channels[0].width
    }

    pub fn height(&self) -> usize {
        self.channels[0].height
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn pixel_count(&self) -> usize {
        self.width() * self.height()
    }

    /// `(width, height, channels)`
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width(), self.height(), self.channel_count())
    }

    pub fn channels(&self) -> &[ChannelPlane] {
        &self.channels
    }

    pub fn channel(&self, index: usize) -> Option<&ChannelPlane> {
        self.channels.get(index)
    }

    pub fn into_channels(self) -> Vec<ChannelPlane> {
        self.channels
    }

    pub fn map_channels(&self, f: impl Fn(&ChannelPlane) -> ChannelPlane) -> RasterImage {
        RasterImage {
            channels: self.channels.iter().map(f).collect(),
        }
    }
}

pub(crate) fn ensure_same_image(
    left_what: &'static str,
    a: &RasterImage,
    right_what: &'static str,
    b: &RasterImage,
) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            left_what,
            left: a.dims(),
            right_what,
            right: b.dims(),
        });
    }
    Ok(())
}

/// Row-major linear index of `(row, col)` on a `width x height` grid.
pub fn flatten_index(row: usize, col: usize, width: usize, height: usize) -> Result<usize> {
    if row >= height || col >= width {
        return Err(Error::arg(format!(
            "({row}, {col}) lies outside a {width}x{height} grid"
        )));
    }
    Ok(row * width + col)
}

/// Inverse of [`flatten_index`]: `(row, col)` for a linear index.
pub fn unflatten_index(index: usize, width: usize, height: usize) -> Result<(usize, usize)> {
    if width == 0 || index >= width.saturating_mul(height) {
        return Err(Error::arg(format!(
            "index {index} lies outside a {width}x{height} grid"
        )));
    }
    Ok((index / width, index % width))
}

/// Position reached by walking `offset` steps from `p` on a ring of `n`
/// pixels. Walking past the last pixel restarts at the first (overflow);
/// walking before the first restarts at the last (underflow).
pub fn wrap_target(p: usize, offset: i64, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::arg("cannot walk on an empty grid"));
    }
    if p >= n {
        return Err(Error::arg(format!(
            "position {p} outside a grid of {n} pixels"
        )));
    }
    Ok(wrap_unchecked(p, offset, n))
}

#[inline]
pub(crate) fn wrap_unchecked(p: usize, offset: i64, n: usize) -> usize {
    (p as i128 + offset as i128).rem_euclid(n as i128) as usize
}
