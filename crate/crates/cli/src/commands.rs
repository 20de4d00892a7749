use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;

use cbrw_core::io::{read_image, read_key, write_image, write_key, write_report, ReportRow};
use cbrw_core::metrics::{evaluate_pair, histogram as histogram_of, HistogramSet};
use cbrw_core::{enroll as enroll_image, generate_offset_grid, Method};

use crate::{DiversityArgs, EnrollArgs, EvaluateArgs, HistogramArgs, KeygenArgs};

pub(crate) fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn keygen(args: &KeygenArgs) -> anyhow::Result<()> {
    let (width, height, channels) = match &args.like {
        Some(path) => read_image(path)
            .with_context(|| format!("reading {}", path.display()))?
            .dims(),
        None => (
            args.width.expect("required by clap") as usize,
            args.height.expect("required by clap") as usize,
            args.channels,
        ),
    };
    let key = generate_offset_grid(width, height, channels, args.seed, args.bound)?;
    write_key(&key, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

pub fn enroll(args: &EnrollArgs) -> anyhow::Result<()> {
    let image =
        read_image(&args.image).with_context(|| format!("reading {}", args.image.display()))?;
    let key = read_key(&args.key).with_context(|| format!("reading {}", args.key.display()))?;
    let template = enroll_image(&image, &key, Method::from(args.method)).with_context(|| {
        format!(
            "cannot enroll {} with key {}",
            args.image.display(),
            args.key.display()
        )
    })?;
    write_image(&template.image, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "{} key={:016x} method={}",
        args.out.display(),
        template.key_fingerprint,
        template.method
    );
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> anyhow::Result<()> {
    let original = read_image(&args.original)
        .with_context(|| format!("reading {}", args.original.display()))?;
    let template = read_image(&args.template)
        .with_context(|| format!("reading {}", args.template.display()))?;
    let report = evaluate_pair(&original, &template)?;
    let rows = [ReportRow::ok(file_label(&args.original), "-", report)];
    write_report(&rows, &args.out, args.format.into())
        .with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

pub fn diversity(args: &DiversityArgs) -> anyhow::Result<()> {
    let image =
        read_image(&args.image).with_context(|| format!("reading {}", args.image.display()))?;
    let (w, h, c) = image.dims();
    let method = Method::from(args.method);
    let a = enroll_image(
        &image,
        &generate_offset_grid(w, h, c, args.seed_a, args.bound)?,
        method,
    )?;
    let b = enroll_image(
        &image,
        &generate_offset_grid(w, h, c, args.seed_b, args.bound)?,
        method,
    )?;
    let report = evaluate_pair(&a.image, &b.image)?;
    let rows = [ReportRow::ok(
        file_label(&args.image),
        method.as_str(),
        report,
    )];
    write_report(&rows, &args.out, args.format.into())
        .with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

fn channel_names(count: usize) -> &'static [&'static str] {
    if count == 1 {
        &["gray"]
    } else {
        &["red", "green", "blue"]
    }
}

/// One `# channel <name>` section per channel, each a `bin,count` table.
pub fn render_histogram_csv(hist: &HistogramSet) -> String {
    let mut out = String::new();
    for (name, bins) in channel_names(hist.channels.len())
        .iter()
        .zip(&hist.channels)
    {
        let _ = writeln!(out, "# channel {name}");
        out.push_str("bin,count\n");
        for (bin, count) in bins.iter().enumerate() {
            let _ = writeln!(out, "{bin},{count}");
        }
    }
    out
}

pub fn histogram(args: &HistogramArgs) -> anyhow::Result<()> {
    let image =
        read_image(&args.image).with_context(|| format!("reading {}", args.image.display()))?;
    let hist = histogram_of(&image);
    fs::write(&args.out, render_histogram_csv(&hist))
        .with_context(|| format!("writing {}", args.out.display()))?;

    if let Some(path) = &args.template {
        let template = read_image(path).with_context(|| format!("reading {}", path.display()))?;
        let other = histogram_of(&template);
        let names = channel_names(hist.channels.len());
        for ((name, a), b) in names.iter().zip(hist.peaks()).zip(other.peaks()) {
            let verdict = if b <= a {
                "attenuated"
            } else {
                "not attenuated"
            };
            println!("{name}: image peak {a}, template peak {b}, {verdict}");
        }
    }
    Ok(())
}
