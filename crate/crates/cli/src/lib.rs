//! Batch driver: runs the saliency pipeline over a directory of images,
//! writes grayscale maps and, where ground truth exists, metric reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use sbdsal_core::{aggregate, evaluate, run_pipeline, BinaryMask, EvalReport, PipelineConfig, RgbImage};
use serde::Serialize;

/// File extensions treated as input images.
pub const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

/// Reads a flat TOML file of [`PipelineConfig`] fields; missing keys keep
/// their defaults.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let cfg: PipelineConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    Ok(cfg)
}

/// Outcome for one input image.
#[derive(Debug, Clone, Serialize)]
pub struct ImageRecord {
    pub name: String,
    pub input: PathBuf,
    /// Written saliency map; `None` when the image failed.
    pub map: Option<PathBuf>,
    pub seconds: f64,
    pub report: Option<EvalReport>,
    pub error: Option<String>,
}

impl ImageRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Everything produced by [`run_dataset`].
#[derive(Debug, Clone, Serialize)]
pub struct DatasetRun {
    pub input_dir: PathBuf,
    pub gt_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub images: Vec<ImageRecord>,
    pub aggregate: Option<EvalReport>,
}

impl DatasetRun {
    pub fn failures(&self) -> usize {
        self.images.iter().filter(|r| r.failed()).count()
    }

    pub fn reports(&self) -> impl Iterator<Item = &EvalReport> {
        self.images.iter().filter_map(|r| r.report.as_ref())
    }
}

/// Image files directly inside `dir`, sorted by path.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))? {
        let path = entry?.path();
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if path.is_file() && is_image {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Ground-truth file sharing `name` as its stem.
fn find_mask(gt_dir: &Path, name: &str) -> Option<PathBuf> {
    IMAGE_EXTENSIONS
        .iter()
        .flat_map(|ext| [ext.to_string(), ext.to_ascii_uppercase()])
        .map(|ext| gt_dir.join(format!("{name}.{ext}")))
        .find(|p| p.is_file())
}

/// Runs the pipeline on every image in `input_dir`, writing
/// `<stem>.png` to `output_dir`. With `gt_dir`, images that have a mask of
/// the same stem are scored into `<stem>.json` and `<stem>_pr.csv`, and
/// `aggregate.json` / `aggregate_pr.csv` summarize them. `run.json` records
/// per-image timings and failures.
pub fn run_dataset(
    input_dir: &Path,
    gt_dir: Option<&Path>,
    output_dir: &Path,
    cfg: &PipelineConfig,
) -> Result<DatasetRun> {
    cfg.validate()?;
    let inputs = list_images(input_dir)?;
    if inputs.is_empty() {
        bail!("no images found in {}", input_dir.display());
    }
    fs::create_dir_all(output_dir).with_context(|| format!("creating {}", output_dir.display()))?;

    let images: Vec<ImageRecord> = inputs
        .par_iter()
        .map(|path| process_image(path, gt_dir, output_dir, cfg))
        .collect();
    if images.iter().all(|r| r.failed()) {
        bail!(
            "none of the {} images in {} could be processed",
            images.len(),
            input_dir.display()
        );
    }

    for r in &images {
        if let Some(report) = &r.report {
            write_report(report, output_dir, &r.name)?;
        }
    }
    let reports: Vec<EvalReport> = images.iter().filter_map(|r| r.report.clone()).collect();
    let aggregate = if reports.is_empty() {
        None
    } else {
        let agg = aggregate(&reports)?;
        write_report(&agg, output_dir, "aggregate")?;
        Some(agg)
    };

    let run = DatasetRun {
        input_dir: input_dir.to_path_buf(),
        gt_dir: gt_dir.map(Path::to_path_buf),
        output_dir: output_dir.to_path_buf(),
        images,
        aggregate,
    };
    let summary = fs::File::create(output_dir.join("run.json"))?;
    serde_json::to_writer_pretty(summary, &run)?;
    info!(
        "processed {} images, {} failed, {} scored",
        run.images.len(),
        run.failures(),
        run.reports().count()
    );
    Ok(run)
}

fn process_image(path: &Path, gt_dir: Option<&Path>, output_dir: &Path, cfg: &PipelineConfig) -> ImageRecord {
    let name = stem(path);
    let start = Instant::now();
    let mut record = ImageRecord {
        name: name.clone(),
        input: path.to_path_buf(),
        map: None,
        seconds: 0.0,
        report: None,
        error: None,
    };
    match compute(path, &name, gt_dir, output_dir, cfg) {
        Ok((map, report)) => {
            record.map = Some(map);
            record.report = report;
        }
        Err(e) => {
            warn!("skipping {}: {e:#}", path.display());
            record.error = Some(format!("{e:#}"));
        }
    }
    record.seconds = start.elapsed().as_secs_f64();
    record
}

fn compute(
    path: &Path,
    name: &str,
    gt_dir: Option<&Path>,
    output_dir: &Path,
    cfg: &PipelineConfig,
) -> Result<(PathBuf, Option<EvalReport>)> {
    let img = RgbImage::open(path).with_context(|| format!("reading {}", path.display()))?;
    let out = run_pipeline(&img, cfg)?;
    let map_path = output_dir.join(format!("{name}.png"));
    out.saliency.save_png(&map_path)?;
    if cfg.emit_intermediate {
        out.coarse.save_png(output_dir.join(format!("{name}_coarse.png")))?;
        out.posterior
            .save_png(output_dir.join(format!("{name}_posterior.png")))?;
    }

    let Some(mask_path) = gt_dir.and_then(|d| find_mask(d, name)) else {
        if gt_dir.is_some() {
            info!("no ground truth for {name}, not scored");
        }
        return Ok((map_path, None));
    };
    let gt = BinaryMask::open(&mask_path).with_context(|| format!("reading mask {}", mask_path.display()))?;
    let report = evaluate(&out.saliency, &gt).with_context(|| format!("scoring {name}"))?;
    Ok((map_path, Some(report)))
}

/// Writes `<name>.json` and `<name>_pr.csv`.
pub fn write_report(report: &EvalReport, dir: &Path, name: &str) -> Result<()> {
    let json = fs::File::create(dir.join(format!("{name}.json")))?;
    serde_json::to_writer_pretty(json, report)?;
    write_pr_csv(report, &dir.join(format!("{name}_pr.csv")))
}

/// One row per threshold: `threshold,precision,recall,f_measure`.
pub fn write_pr_csv(report: &EvalReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["threshold", "precision", "recall", "f_measure"])?;
    for (t, (p, f)) in report.pr_curve.iter().zip(&report.f_curve).enumerate() {
        w.serialize((t, p.precision, p.recall, f))?;
    }
    w.flush()?;
    Ok(())
}
