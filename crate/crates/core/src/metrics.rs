//! Dissimilarity measures between an original image and its template.
//!
//! Every measure is computed per channel over the whole plane and then
//! averaged arithmetically across channels. PSNR is the exception: it is
//! derived from the channel-averaged MSE. Pixel differences are taken in
//! signed integers and accumulated in `f64`.

use crate::error::Result;
use crate::pixel::{ensure_same_image, ChannelPlane, RasterImage};

/// Largest 8-bit intensity.
pub const PEAK: f64 = 255.0;
/// SSIM luminance stabilizer, `(0.01 * 255)^2`.
pub const SSIM_T1: f64 = (0.01 * PEAK) * (0.01 * PEAK);
/// SSIM contrast stabilizer, `(0.03 * 255)^2`.
pub const SSIM_T2: f64 = (0.03 * PEAK) * (0.03 * PEAK);

/// Pearson correlation, plus whether any channel had zero variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlation {
    pub value: f64,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub cr: f64,
    pub mae: f64,
    pub npcr_percent: f64,
    /// `f64::INFINITY` when the images are identical.
    pub psnr_db: f64,
    pub rmse: f64,
    pub ssim: f64,
    pub uaci_percent: f64,
    pub mse: f64,
    pub degenerate_cr: bool,
}

impl MetricsReport {
    pub fn psnr_is_infinite(&self) -> bool {
        self.psnr_db.is_infinite()
    }
}

/// Whole-plane statistics of one channel pair.
#[derive(Clone, Copy, Debug)]
struct PlaneStats {
    mean_a: f64,
    mean_b: f64,
    var_a: f64,
    var_b: f64,
    cov: f64,
    mse: f64,
    mae: f64,
    changed_fraction: f64,
}

impl PlaneStats {
    fn of(a: &ChannelPlane, b: &ChannelPlane) -> Self {
        let (a, b) = (a.values(), b.values());
        let n = a.len() as f64;
        let mean_a = a.iter().map(|&v| f64::from(v)).sum::<f64>() / n;
        let mean_b = b.iter().map(|&v| f64::from(v)).sum::<f64>() / n;

        let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
        let (mut sq, mut abs, mut changed) = (0.0, 0.0, 0usize);
        for (&x, &y) in a.iter().zip(b) {
            let da = f64::from(x) - mean_a;
            let db = f64::from(y) - mean_b;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
            let d = i32::from(x) - i32::from(y);
            sq += f64::from(d * d);
            abs += f64::from(d.abs());
            changed += usize::from(d != 0);
        }
        PlaneStats {
            mean_a,
            mean_b,
            var_a: saa / n,
            var_b: sbb / n,
            cov: sab / n,
            mse: sq / n,
            mae: abs / n,
            changed_fraction: changed as f64 / n,
        }
    }

    /// `None` when either plane is constant.
    fn correlation(&self) -> Option<f64> {
        if self.var_a == 0.0 || self.var_b == 0.0 {
            return None;
        }
        Some((self.cov / (self.var_a * self.var_b).sqrt()).clamp(-1.0, 1.0))
    }

    fn ssim(&self) -> f64 {
        let num = (2.0 * self.mean_a * self.mean_b + SSIM_T1) * (2.0 * self.cov + SSIM_T2);
        let den = (self.mean_a * self.mean_a + self.mean_b * self.mean_b + SSIM_T1)
            * (self.var_a + self.var_b + SSIM_T2);
        num / den
    }
}

fn per_channel(a: &RasterImage, b: &RasterImage) -> Result<Vec<PlaneStats>> {
    ensure_same_image("first image", a, "second image", b)?;
    Ok(a.channels()
        .iter()
        .zip(b.channels())
        .map(|(x, y)| PlaneStats::of(x, y))
        .collect())
}

fn channel_mean(stats: &[PlaneStats], f: impl FnMut(&PlaneStats) -> f64) -> f64 {
    stats.iter().map(f).sum::<f64>() / stats.len() as f64
}

fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (PEAK / mse.sqrt()).log10()
    }
}

fn correlation_of(stats: &[PlaneStats]) -> Correlation {
    let mut degenerate = false;
    let value = channel_mean(stats, |s| {
        s.correlation().unwrap_or_else(|| {
            degenerate = true;
            0.0
        })
    });
    Correlation { value, degenerate }
}

/// Pearson correlation coefficient. A constant channel contributes 0 and
/// sets the degenerate flag.
pub fn correlation(a: &RasterImage, b: &RasterImage) -> Result<Correlation> {
    Ok(correlation_of(&per_channel(a, b)?))
}

pub fn mse(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    Ok(channel_mean(&per_channel(a, b)?, |s| s.mse))
}

pub fn rmse(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    mse(a, b).map(f64::sqrt)
}

/// Peak signal-to-noise ratio in dB; infinite for identical images.
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    mse(a, b).map(psnr_from_mse)
}

/// SSIM from whole-plane means, variances and covariance.
pub fn ssim(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    Ok(channel_mean(&per_channel(a, b)?, PlaneStats::ssim))
}

pub fn mae(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    Ok(channel_mean(&per_channel(a, b)?, |s| s.mae))
}

/// Percentage of pixel positions whose values differ.
pub fn npcr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    Ok(100.0 * channel_mean(&per_channel(a, b)?, |s| s.changed_fraction))
}

/// Mean absolute difference as a percentage of 255.
pub fn uaci(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    mae(a, b).map(|m| 100.0 * m / PEAK)
}

/// All measures for one pair in a single pass per channel.
pub fn evaluate_pair(original: &RasterImage, template: &RasterImage) -> Result<MetricsReport> {
    let stats = per_channel(original, template)?;
    let Correlation {
        value: cr,
        degenerate,
    } = correlation_of(&stats);
    let mse = channel_mean(&stats, |s| s.mse);
    let mae = channel_mean(&stats, |s| s.mae);
    Ok(MetricsReport {
        cr,
        mae,
        npcr_percent: 100.0 * channel_mean(&stats, |s| s.changed_fraction),
        psnr_db: psnr_from_mse(mse),
        rmse: mse.sqrt(),
        ssim: channel_mean(&stats, PlaneStats::ssim),
        uaci_percent: 100.0 * mae / PEAK,
        mse,
        degenerate_cr: degenerate,
    })
}

/// Column means over a batch of reports. PSNR averages only the finite
/// values; the number of infinite ones is kept alongside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportAverage {
    pub count: usize,
    pub cr: f64,
    pub mae: f64,
    pub npcr_percent: f64,
    /// `f64::INFINITY` when every PSNR was infinite.
    pub psnr_db: f64,
    pub psnr_infinite_count: usize,
    pub rmse: f64,
    pub ssim: f64,
    pub uaci_percent: f64,
    pub mse: f64,
}

/// `None` for an empty batch.
pub fn average_reports<'a>(
    reports: impl IntoIterator<Item = &'a MetricsReport>,
) -> Option<ReportAverage> {
    let reports: Vec<&MetricsReport> = reports.into_iter().collect();
    if reports.is_empty() {
        return None;
    }
    let n = reports.len() as f64;
    let mean = |f: fn(&MetricsReport) -> f64| reports.iter().map(|r| f(r)).sum::<f64>() / n;
    let finite: Vec<f64> = reports
        .iter()
        .map(|r| r.psnr_db)
        .filter(|p| p.is_finite())
        .collect();
    let psnr_db = if finite.is_empty() {
        f64::INFINITY
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    Some(ReportAverage {
        count: reports.len(),
        cr: mean(|r| r.cr),
        mae: mean(|r| r.mae),
        npcr_percent: mean(|r| r.npcr_percent),
        psnr_db,
        psnr_infinite_count: reports.len() - finite.len(),
        rmse: mean(|r| r.rmse),
        ssim: mean(|r| r.ssim),
        uaci_percent: mean(|r| r.uaci_percent),
        mse: mean(|r| r.mse),
    })
}

/// 256 exact bin counts per channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HistogramSet {
    pub channels: Vec<[u64; 256]>,
}

impl HistogramSet {
    /// Largest bin count of each channel.
    pub fn peaks(&self) -> Vec<u64> {
        self.channels
            .iter()
            .map(|bins| bins.iter().copied().max().unwrap_or(0))
            .collect()
    }
}

pub fn histogram(img: &RasterImage) -> HistogramSet {
    let channels = img
        .channels()
        .iter()
        .map(|plane| {
            let mut bins = [0u64; 256];
            for &v in plane.values() {
                bins[usize::from(v)] += 1;
            }
            bins
        })
        .collect();
    HistogramSet { channels }
}
