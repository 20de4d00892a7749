//! Cancelable biometric templates from a 1-D random walk over image pixels.
//!
//! A key ([`OffsetGrid`]) assigns every pixel a signed step count. Walking
//! that many pixels along the row-major sequence, with wrap-around, pairs
//! each pixel with a partner; their sum mod 256 forms the walk matrix. The
//! template is the image XORed with that matrix ([`Method::BitXor`]),
//! optionally complemented ([`Method::BitCmp`]). Issuing a new key revokes
//! the old template.
//!
//! [`metrics`] scores how little a template reveals about its source.

pub mod error;
pub mod io;
pub mod metrics;
pub mod pixel;
pub mod rwm;
pub mod template;

pub use error::{Error, Result};
pub use metrics::{evaluate_pair, histogram, HistogramSet, MetricsReport};
pub use pixel::{flatten_index, wrap_target, ChannelPlane, RasterImage};
pub use rwm::{
    generate_offset_grid, generate_rwm, generate_rwm_image, KeyGenerator, OffsetGrid, OffsetPlane,
    RwmPlane, DEFAULT_OFFSET_BOUND,
};
pub use template::{cbrw_bitcmp, cbrw_bitxor, enroll, CancelableTemplate, Method};
