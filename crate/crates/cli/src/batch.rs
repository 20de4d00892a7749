//! Directory-wide enrollment and evaluation.
//!
//! Rows come out sorted by file name whatever order the directory lists
//! them in. Images are processed on a rayon pool capped by `CBRW_THREADS`
//! (unset or 0 means one thread per core).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use glob::Pattern;
use rayon::prelude::*;

use cbrw_core::io::{
    read_image, stable_hash, write_image, write_key, write_report, ReportFormat, ReportRow,
};
use cbrw_core::metrics::evaluate_pair;
use cbrw_core::{enroll, generate_offset_grid, Method};

use crate::BatchArgs;

pub const THREADS_ENV: &str = "CBRW_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedPolicy {
    /// Every image is keyed with the base seed.
    Single(u64),
    /// Each image gets `base ^ stable_hash(file name)`.
    PerImage(u64),
}

impl SeedPolicy {
    pub fn seed_for(&self, file_name: &str) -> u64 {
        match *self {
            SeedPolicy::Single(base) => base,
            SeedPolicy::PerImage(base) => base ^ stable_hash(file_name.as_bytes()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BatchManifest {
    pub input_dir: PathBuf,
    pub pattern: String,
    pub method: Method,
    pub seeds: SeedPolicy,
    pub offset_bound: u32,
    pub out_dir: PathBuf,
    pub save_keys: bool,
    pub report: PathBuf,
    pub format: ReportFormat,
}

impl From<&BatchArgs> for BatchManifest {
    fn from(args: &BatchArgs) -> Self {
        BatchManifest {
            input_dir: args.input_dir.clone(),
            pattern: args.pattern.clone(),
            method: args.method.into(),
            seeds: if args.single_key {
                SeedPolicy::Single(args.seed)
            } else {
                SeedPolicy::PerImage(args.seed)
            },
            offset_bound: args.bound,
            out_dir: args.out_dir.clone(),
            save_keys: args.save_keys,
            report: args.report.clone(),
            format: args.format.into(),
        }
    }
}

/// File names in `dir` matching `pattern`, sorted.
pub fn list_inputs(dir: &Path, pattern: &str) -> anyhow::Result<Vec<String>> {
    let pattern = Pattern::new(pattern).with_context(|| format!("bad pattern {pattern:?}"))?;
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let entry = entry?;
        if !entry.file_type()?.is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        if pattern.matches(&name) {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}

fn process(manifest: &BatchManifest, name: &str) -> anyhow::Result<ReportRow> {
    let image = read_image(manifest.input_dir.join(name))?;
    let (w, h, c) = image.dims();
    let key = generate_offset_grid(
        w,
        h,
        c,
        manifest.seeds.seed_for(name),
        manifest.offset_bound,
    )?;
    let template = enroll(&image, &key, manifest.method)?;

    let stem = Path::new(name)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.to_string());
    let ext = if c == 1 { "pgm" } else { "ppm" };
    let out = manifest
        .out_dir
        .join(format!("{stem}_{}.{ext}", manifest.method));
    write_image(&template.image, &out)?;
    if manifest.save_keys {
        write_key(&key, manifest.out_dir.join(format!("{stem}.cbrw")))?;
    }
    let report = evaluate_pair(&image, &template.image)?;
    Ok(ReportRow::ok(name, manifest.method.as_str(), report))
}

/// Processes every matching image; failures become error rows.
pub fn run_manifest(manifest: &BatchManifest) -> anyhow::Result<Vec<ReportRow>> {
    let names = list_inputs(&manifest.input_dir, &manifest.pattern)?;
    fs::create_dir_all(&manifest.out_dir)
        .with_context(|| format!("creating {}", manifest.out_dir.display()))?;

    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;

    let method = manifest.method.as_str();
    let rows = pool.install(|| {
        names
            .par_iter()
            .map(|name| {
                process(manifest, name)
                    .unwrap_or_else(|e| ReportRow::failed(name.as_str(), method, format!("{e:#}")))
            })
            .collect::<Vec<_>>()
    });
    Ok(rows)
}

pub fn run(args: &BatchArgs) -> anyhow::Result<ExitCode> {
    let manifest = BatchManifest::from(args);
    let rows = run_manifest(&manifest)?;
    write_report(&rows, &manifest.report, manifest.format)
        .with_context(|| format!("writing {}", manifest.report.display()))?;

    let failed: Vec<_> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().map(|e| (&r.image, e)))
        .collect();
    for (image, err) in &failed {
        eprintln!("cbrw: {image}: {err}");
    }
    eprintln!(
        "cbrw: {} images, {} failed, report written to {}",
        rows.len(),
        failed.len(),
        manifest.report.display()
    );
    Ok(if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
