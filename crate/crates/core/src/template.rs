//! Cancelable templates: the secret image masked with its own walk matrix.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::key::key_fingerprint;
use crate::pixel::{ChannelPlane, RasterImage};
use crate::rwm::{ensure_key_fits, generate_rwm, OffsetGrid, RwmPlane};

/// How the walk matrix is folded into the secret image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// `C = S xor R_w`
    BitXor,
    /// `C = !(S xor R_w)`
    BitCmp,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::BitXor => "xor",
            Method::BitCmp => "cmp",
        }
    }

    pub fn apply(self, secret: &ChannelPlane, rwm: &RwmPlane) -> Result<ChannelPlane> {
        match self {
            Method::BitXor => cbrw_bitxor(secret, rwm),
            Method::BitCmp => cbrw_bitcmp(secret, rwm),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xor" | "bitxor" => Ok(Method::BitXor),
            "cmp" | "bitcmp" => Ok(Method::BitCmp),
            other => Err(Error::arg(format!(
                "unknown method {other:?}, expected xor or cmp"
            ))),
        }
    }
}

pub fn cbrw_bitxor(secret: &ChannelPlane, rwm: &RwmPlane) -> Result<ChannelPlane> {
    secret.zip_map(rwm.as_plane(), |s, r| s ^ r)
}

pub fn cbrw_bitcmp(secret: &ChannelPlane, rwm: &RwmPlane) -> Result<ChannelPlane> {
    secret.zip_map(rwm.as_plane(), |s, r| !(s ^ r))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CancelableTemplate {
    pub image: RasterImage,
    pub method: Method,
    /// FNV-1a 64 of the encoded key file that produced this template.
    pub key_fingerprint: u64,
}

/// Generates the template of `image` under `key`, channel by channel.
pub fn enroll(image: &RasterImage, key: &OffsetGrid, method: Method) -> Result<CancelableTemplate> {
    ensure_key_fits(image, key)?;
    let planes = image
        .channels()
        .iter()
        .enumerate()
        .map(|(c, plane)| {
            let rwm = generate_rwm(plane, key.channel(c).expect("channel count checked"))?;
            method.apply(plane, &rwm)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CancelableTemplate {
        image: RasterImage::new(planes)?,
        method,
        key_fingerprint: key_fingerprint(key),
    })
}
