//! Shared inputs for the benchmarks.

use cbrw_core::io::decode_pnm;
use cbrw_core::{generate_offset_grid, OffsetGrid, RasterImage};

const CAMERA: &[u8] = include_bytes!("../../core/tests/fixtures/camera.pgm");

/// The 320x240 gray camera fixture.
pub fn camera() -> RasterImage {
    decode_pnm(CAMERA).expect("bundled fixture decodes")
}

/// A key sized for `image` with the default bound.
pub fn key_for(image: &RasterImage, seed: u64) -> OffsetGrid {
    let (w, h, c) = image.dims();
    generate_offset_grid(w, h, c, seed, cbrw_core::DEFAULT_OFFSET_BOUND).expect("valid shape")
}
