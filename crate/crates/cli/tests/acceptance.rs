//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p cbrw-cli --test acceptance`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use cbrw_core::io::read_image;
use cbrw_core::{
    enroll, evaluate_pair, generate_offset_grid, generate_rwm, generate_rwm_image, ChannelPlane,
    KeyGenerator, Method, MetricsReport, OffsetGrid, OffsetPlane, RasterImage,
};

const PHOTOS: [&str; 4] = ["camera.pgm", "chelsea.pgm", "coffee.pgm", "gravel.pgm"];
const SEEDS: u64 = 20;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn within_limit(out: Outcome, took: Duration, limit: Duration) -> Outcome {
    let timing = format!(
        "; {:.3}s (limit {}s)",
        took.as_secs_f64(),
        limit.as_secs_f64()
    );
    let mut detail = out.detail;
    let at = detail.find('\n').unwrap_or(detail.len());
    detail.insert_str(at, &timing);
    Outcome::new(out.pass && took < limit, detail)
}

fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ChannelPlane {
    let mut values = vec![0u8; w * h];
    rng.fill_bytes(&mut values);
    ChannelPlane::new(w, h, values).unwrap()
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize, channels: usize) -> RasterImage {
    RasterImage::new((0..channels).map(|_| random_plane(rng, w, h)).collect()).unwrap()
}

fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

/// Walks one pixel at a time, stepping over the ends of the flattened image.
fn walk_oracle(secret: &ChannelPlane, offsets: &[i32]) -> Vec<u8> {
    let s = secret.values();
    let n = s.len();
    (0..n)
        .map(|p| {
            let mut q = p;
            for _ in 0..offsets[p].unsigned_abs() {
                q = if offsets[p] > 0 {
                    if q == n - 1 {
                        0
                    } else {
                        q + 1
                    }
                } else if q == 0 {
                    n - 1
                } else {
                    q - 1
                };
            }
            ((u16::from(s[p]) + u16::from(s[q])) % 256) as u8
        })
        .collect()
}

/// Per-channel statistics by explicit row/column loops; PSNR from the
/// channel-averaged MSE.
#[derive(Debug, Clone, Copy)]
struct OracleMetrics {
    cr: f64,
    mae: f64,
    npcr: f64,
    psnr: f64,
    rmse: f64,
    ssim: f64,
    uaci: f64,
    mse: f64,
}

fn metric_oracle(a: &RasterImage, b: &RasterImage) -> OracleMetrics {
    let (w, h, c) = a.dims();
    let n = (w * h) as f64;
    let (mut cr, mut mse, mut mae, mut npcr, mut ssim) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ch in 0..c {
        let (pa, pb) = (a.channel(ch).unwrap(), b.channel(ch).unwrap());
        let px = |p: &ChannelPlane, i: usize, j: usize| f64::from(p.get(i, j).unwrap());
        let (mut sa, mut sb) = (0.0, 0.0);
        for i in 0..h {
            for j in 0..w {
                sa += px(pa, i, j);
                sb += px(pb, i, j);
            }
        }
        let (ma, mb) = (sa / n, sb / n);
        let (mut va, mut vb, mut cov, mut sq, mut ab, mut diff) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..h {
            for j in 0..w {
                let (x, y) = (px(pa, i, j), px(pb, i, j));
                va += (x - ma).powi(2);
                vb += (y - mb).powi(2);
                cov += (x - ma) * (y - mb);
                sq += (x - y).powi(2);
                ab += (x - y).abs();
                if x != y {
                    diff += 1.0;
                }
            }
        }
        cr += if va == 0.0 || vb == 0.0 {
            0.0
        } else {
            cov / (va.sqrt() * vb.sqrt())
        };
        let (va, vb, cov) = (va / n, vb / n, cov / n);
        let (t1, t2) = (6.5025, 58.5225);
        ssim +=
            (2.0 * ma * mb + t1) * (2.0 * cov + t2) / ((ma * ma + mb * mb + t1) * (va + vb + t2));
        mse += sq / n;
        mae += ab / n;
        npcr += 100.0 * diff / n;
    }
    let k = c as f64;
    let (mse, mae) = (mse / k, mae / k);
    OracleMetrics {
        cr: cr / k,
        mae,
        npcr: npcr / k,
        psnr: if mse == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (255.0 * 255.0 / mse).log10()
        },
        rmse: mse.sqrt(),
        ssim: ssim / k,
        uaci: mae / 255.0 * 100.0,
        mse,
    }
}

/// Relative difference, scaled by max(|a|, |b|, 1) so values near zero
/// are compared absolutely.
fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn single_step(values: &[u8], offsets: &[i32], p: usize) -> u8 {
    let plane = ChannelPlane::new(values.len(), 1, values.to_vec()).unwrap();
    let rwm = generate_rwm(
        &plane,
        OffsetPlane {
            width: values.len(),
            height: 1,
            offsets,
        },
    )
    .unwrap();
    rwm.as_plane().values()[p]
}

fn worked_examples() -> Outcome {
    // 0-based indices throughout; the third case is 1-based position 98.
    let mut v = vec![0u8; 100];
    let mut o = vec![0i32; 100];
    v[0] = 151;
    v[20] = 100;
    o[0] = 20;
    let a = single_step(&v, &o, 0);

    let mut v = vec![0u8; 100];
    let mut o = vec![0i32; 100];
    v[3] = 219;
    v[22] = 100;
    o[3] = 19;
    let b = single_step(&v, &o, 3);

    let mut v = vec![0u8; 100];
    let mut o = vec![0i32; 100];
    v[97] = 88;
    v[2] = 148;
    o[97] = 5;
    let c = single_step(&v, &o, 97);

    Outcome::new(
        (a, b, c) == (251, 63, 236),
        format!("R_w values {a}, {b}, {c} (want 251, 63, 236)"),
    )
}

fn walk_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    let trials = 1200;
    let mut mismatches = 0;
    for t in 0..trials {
        let w = 1 + below(&mut rng, 8) as usize;
        let h = 1 + below(&mut rng, 8) as usize;
        let secret = random_plane(&mut rng, w, h);
        let key = if t % 2 == 0 {
            let bound = 1 + below(&mut rng, 300) as u32;
            generate_offset_grid(w, h, 1, rng.next_u64(), bound).unwrap()
        } else {
            let offsets = (0..w * h)
                .map(|_| below(&mut rng, 1201) as i32 - 600)
                .collect();
            OffsetGrid::from_parts(w, h, 0, 600, KeyGenerator::ChaCha20, vec![offsets]).unwrap()
        };
        let plane = key.channel(0).unwrap();
        let got = generate_rwm(&secret, plane).unwrap();
        if got.as_plane().values() != walk_oracle(&secret, plane.offsets).as_slice() {
            mismatches += 1;
        }
    }
    Outcome::new(
        mismatches == 0,
        format!("{trials} grids, {mismatches} mismatches"),
    )
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0B);
    let trials = 120;
    let mut failures = 0;
    for t in 0..trials {
        let channels = if t % 3 == 0 { 3 } else { 1 };
        let image = random_image(&mut rng, 32, 32, channels);
        let bound = 1 + below(&mut rng, 2000) as u32;
        let key = generate_offset_grid(32, 32, channels, rng.next_u64(), bound).unwrap();
        let rwm = generate_rwm_image(&image, &key).unwrap();
        let xor = enroll(&image, &key, Method::BitXor).unwrap().image;
        let cmp = enroll(&image, &key, Method::BitCmp).unwrap().image;
        let ok = (0..channels).all(|c| {
            let s = image.channel(c).unwrap().values();
            let r = rwm.channel(c).unwrap().values();
            let x = xor.channel(c).unwrap().values();
            let m = cmp.channel(c).unwrap().values();
            (0..s.len())
                .all(|i| x[i] ^ r[i] == s[i] && (255 - m[i]) ^ r[i] == s[i] && m[i] == 255 - x[i])
        });
        failures += usize::from(!ok);
    }
    Outcome::new(
        failures == 0,
        format!("{trials} images, {failures} failures"),
    )
}

fn identity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1D);
    let mut images: Vec<RasterImage> = (0..40)
        .map(|t| {
            let w = 2 + below(&mut rng, 40) as usize;
            let h = 2 + below(&mut rng, 40) as usize;
            random_image(&mut rng, w, h, if t % 2 == 0 { 1 } else { 3 })
        })
        .collect();
    images.extend(PHOTOS.iter().map(|p| read_image(fixture(p)).unwrap()));
    images.push(read_image(fixture("chelsea_small.ppm")).unwrap());

    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for img in &images {
        let r = evaluate_pair(img, img).unwrap();
        let exact = r.mae == 0.0
            && r.npcr_percent == 0.0
            && r.psnr_db == f64::INFINITY
            && r.rmse == 0.0
            && r.uaci_percent == 0.0
            && !r.degenerate_cr;
        let dev = (r.cr - 1.0).abs().max((r.ssim - 1.0).abs());
        worst = worst.max(dev);
        bad += usize::from(!exact || dev > 1e-12);
    }
    Outcome::new(
        bad == 0,
        format!(
            "{} images, {bad} failures, max |cr-1|,|ssim-1| = {worst:.1e}",
            images.len()
        ),
    )
}

fn metric_oracle_equivalence(seen: &mut Vec<MetricsReport>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4C4);
    let trials = 600;
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let channels = if t % 4 == 0 { 3 } else { 1 };
        let a = random_image(&mut rng, 4, 4, channels);
        let b = if t % 50 == 0 {
            a.clone()
        } else {
            random_image(&mut rng, 4, 4, channels)
        };
        let got = evaluate_pair(&a, &b).unwrap();
        let want = metric_oracle(&a, &b);
        let psnr = if got.psnr_db.is_infinite() && want.psnr.is_infinite() {
            0.0
        } else {
            rel_diff(got.psnr_db, want.psnr)
        };
        let devs = [
            rel_diff(got.cr, want.cr),
            rel_diff(got.mae, want.mae),
            rel_diff(got.npcr_percent, want.npcr),
            psnr,
            rel_diff(got.rmse, want.rmse),
            rel_diff(got.ssim, want.ssim),
            rel_diff(got.uaci_percent, want.uaci),
            rel_diff(got.mse, want.mse),
        ];
        worst = devs.iter().fold(worst, |m, &d| m.max(d));
        seen.push(got);
    }
    Outcome::new(
        worst <= 1e-9,
        format!("{trials} pairs, max relative deviation {worst:.1e} (limit 1e-9)"),
    )
}

fn definitional_identities(seen: &[MetricsReport]) -> Outcome {
    let mut worst: f64 = 0.0;
    for r in seen {
        worst = worst
            .max(rel_diff(r.uaci_percent, 100.0 * r.mae / 255.0))
            .max(rel_diff(r.rmse, r.mse.sqrt()));
    }
    Outcome::new(
        worst <= 1e-9,
        format!(
            "{} pairs, max relative deviation {worst:.1e} (limit 1e-9)",
            seen.len()
        ),
    )
}

#[derive(Default)]
struct Extremes {
    min_npcr: f64,
    max_abs_cr: f64,
    max_ssim: f64,
    min_uaci: f64,
    failures: usize,
}

impl Extremes {
    fn new() -> Self {
        Extremes {
            min_npcr: f64::INFINITY,
            max_abs_cr: 0.0,
            max_ssim: f64::NEG_INFINITY,
            min_uaci: f64::INFINITY,
            failures: 0,
        }
    }

    fn add(&mut self, r: &MetricsReport, ok: bool) {
        self.min_npcr = self.min_npcr.min(r.npcr_percent);
        self.max_abs_cr = self.max_abs_cr.max(r.cr.abs());
        self.max_ssim = self.max_ssim.max(r.ssim);
        self.min_uaci = self.min_uaci.min(r.uaci_percent);
        self.failures += usize::from(!ok);
    }
}

fn statistical_regime(seen: &mut Vec<MetricsReport>) -> Outcome {
    let mut overall = Extremes::new();
    let mut per_image = Vec::new();
    let mut runs = 0;
    for name in PHOTOS {
        let img = read_image(fixture(name)).unwrap();
        let (w, h, c) = img.dims();
        assert_eq!(
            (w, h, c),
            (320, 240, 1),
            "{name} must be a 320x240 gray image"
        );
        let mut ext = Extremes::new();
        for seed in 1..=SEEDS {
            let key = generate_offset_grid(w, h, c, seed, cbrw_core::DEFAULT_OFFSET_BOUND).unwrap();
            for method in [Method::BitXor, Method::BitCmp] {
                let t = enroll(&img, &key, method).unwrap();
                let r = evaluate_pair(&img, &t.image).unwrap();
                let ok = r.npcr_percent >= 99.0
                    && r.cr.abs() <= 0.05
                    && r.ssim <= 0.05
                    && r.uaci_percent >= 5.0;
                ext.add(&r, ok);
                overall.add(&r, ok);
                seen.push(r);
                runs += 1;
            }
        }
        per_image.push(format!(
            "{name}: {}/{} ok, min NPCR {:.2}, max |Cr| {:.4}, max SSIM {:.4}, min UACI {:.2}",
            2 * SEEDS as usize - ext.failures,
            2 * SEEDS,
            ext.min_npcr,
            ext.max_abs_cr,
            ext.max_ssim,
            ext.min_uaci
        ));
    }
    Outcome::new(
        overall.failures == 0,
        format!(
            "{runs} templates, {} outside NPCR>=99, |Cr|<=0.05, SSIM<=0.05, UACI>=5\n        {}",
            overall.failures,
            per_image.join("\n        ")
        ),
    )
}

fn diversity(seen: &mut Vec<MetricsReport>) -> Outcome {
    let mut overall = Extremes::new();
    let mut per_image = Vec::new();
    let mut runs = 0;
    for name in PHOTOS {
        let img = read_image(fixture(name)).unwrap();
        let (w, h, c) = img.dims();
        let mut ext = Extremes::new();
        for pair in 0..SEEDS {
            let ka = generate_offset_grid(w, h, c, 1000 + 2 * pair, 127).unwrap();
            let kb = generate_offset_grid(w, h, c, 1001 + 2 * pair, 127).unwrap();
            for method in [Method::BitXor, Method::BitCmp] {
                let a = enroll(&img, &ka, method).unwrap().image;
                let b = enroll(&img, &kb, method).unwrap().image;
                let r = evaluate_pair(&a, &b).unwrap();
                let ok = r.npcr_percent >= 99.0 && r.cr.abs() <= 0.05;
                ext.add(&r, ok);
                overall.add(&r, ok);
                seen.push(r);
                runs += 1;
            }
        }
        per_image.push(format!(
            "{name}: {}/{} ok, min NPCR {:.2}, max |Cr| {:.4}",
            2 * SEEDS as usize - ext.failures,
            2 * SEEDS,
            ext.min_npcr,
            ext.max_abs_cr
        ));
    }
    Outcome::new(
        overall.failures == 0,
        format!(
            "{runs} seed pairs, {} outside NPCR>=99, |Cr|<=0.05\n        {}",
            overall.failures,
            per_image.join("\n        ")
        ),
    )
}

fn cbrw(args: &[&str], envs: &[(&str, &str)]) -> bool {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cbrw"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().map(|o| o.status.success()).unwrap_or(false)
}

fn cli_pipeline(dir: &Path, threads: &str) -> Result<Vec<(String, Vec<u8>)>, String> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let camera = fixture("camera.pgm").to_string_lossy().into_owned();
    let small = fixture("chelsea_small.ppm").to_string_lossy().into_owned();
    let fixtures = fixture("").to_string_lossy().into_owned();
    let env = [("CBRW_THREADS", threads)];
    let steps: [Vec<String>; 6] = [
        [
            "keygen",
            "--like",
            &camera,
            "--seed",
            "99",
            "--out",
            &p("gray.cbrw"),
        ]
        .map(String::from)
        .into(),
        [
            "keygen",
            "--width",
            "52",
            "--height",
            "38",
            "--channels",
            "3",
            "--seed",
            "7",
            "--bound",
            "500",
            "--out",
            &p("rgb.cbrw"),
        ]
        .map(String::from)
        .into(),
        [
            "enroll",
            "--image",
            &camera,
            "--key",
            &p("gray.cbrw"),
            "--method",
            "xor",
            "--out",
            &p("camera_xor.pgm"),
        ]
        .map(String::from)
        .into(),
        [
            "enroll",
            "--image",
            &small,
            "--key",
            &p("rgb.cbrw"),
            "--method",
            "cmp",
            "--out",
            &p("small_cmp.ppm"),
        ]
        .map(String::from)
        .into(),
        [
            "evaluate",
            "--original",
            &camera,
            "--template",
            &p("camera_xor.pgm"),
            "--out",
            &p("eval.json"),
            "--format",
            "json",
        ]
        .map(String::from)
        .into(),
        [
            "batch",
            "--input-dir",
            &fixtures,
            "--method",
            "cmp",
            "--seed",
            "5",
            "--save-keys",
            "--out-dir",
            &p("batch"),
            "--report",
            &p("batch.csv"),
        ]
        .map(String::from)
        .into(),
    ];
    for step in &steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        if !cbrw(&args, &env) {
            return Err(format!("`cbrw {}` failed", step[0]));
        }
    }
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                files.push((rel, fs::read(&path).map_err(|e| e.to_string())?));
            }
        }
    }
    files.sort();
    Ok(files)
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = cli_pipeline(a.path(), "0");
    let second = cli_pipeline(b.path(), "1");
    match (first, second) {
        (Ok(x), Ok(y)) => {
            let differing: Vec<&str> = x
                .iter()
                .zip(&y)
                .filter(|(p, q)| p != q)
                .map(|(p, _)| p.0.as_str())
                .collect();
            let same = x.len() == y.len() && differing.is_empty();
            Outcome::new(
                same,
                format!(
                    "{} output files compared, {} differ{}",
                    x.len(),
                    differing.len(),
                    if differing.is_empty() {
                        String::new()
                    } else {
                        format!(": {}", differing.join(", "))
                    }
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => Outcome::new(false, e),
    }
}

fn throughput() -> Outcome {
    let img = read_image(fixture("camera.pgm")).unwrap();
    let (w, h, c) = img.dims();
    let key = generate_offset_grid(w, h, c, 3, 127).unwrap();
    let mut samples: Vec<Duration> = (0..9)
        .map(|_| {
            let start = Instant::now();
            let t = enroll(&img, &key, Method::BitXor).unwrap();
            let took = start.elapsed();
            std::hint::black_box(t);
            took
        })
        .collect();
    samples.sort();
    let median = samples[samples.len() / 2];
    Outcome::new(
        median < Duration::from_millis(50),
        format!(
            "median enroll of 320x240 gray {:.2} ms over 9 runs (limit 50 ms)",
            median.as_secs_f64() * 1e3
        ),
    )
}

fn main() -> ExitCode {
    let mut seen = Vec::new();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();

    let (o, t) = timed(worked_examples);
    results.push((
        1,
        "worked-example fidelity",
        within_limit(o, t, Duration::from_secs(1)),
    ));
    let (o, t) = timed(walk_oracle_equivalence);
    results.push((
        2,
        "walk oracle equivalence",
        within_limit(o, t, Duration::from_secs(10)),
    ));
    results.push((3, "round-trip correctness", round_trips()));
    results.push((4, "metric identity suite", identity_suite()));
    results.push((
        5,
        "metric oracle equivalence",
        metric_oracle_equivalence(&mut seen),
    ));
    let (o, t) = timed(|| statistical_regime(&mut seen));
    results.push((
        7,
        "statistical regime on natural photos",
        within_limit(o, t, Duration::from_secs(30)),
    ));
    results.push((8, "diversity across keys", diversity(&mut seen)));
    results.push((6, "definitional identities", definitional_identities(&seen)));
    results.push((9, "determinism across CLI runs", determinism()));
    results.push((10, "enrollment throughput", throughput()));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (id, name, outcome) in &results {
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} {id:>2} {name}: {}", outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
