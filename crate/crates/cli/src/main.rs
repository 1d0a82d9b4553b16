use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use sbdsal_cli::{load_config, run_dataset};
use sbdsal_core::PipelineConfig;

/// Saliency maps from background-based distribution spaces.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    /// Directory of input images.
    #[arg(long)]
    input: PathBuf,
    /// Directory of ground-truth masks, paired with inputs by file stem.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Output directory for maps and reports.
    #[arg(long)]
    out: PathBuf,
    /// TOML file with pipeline settings; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated scale ratios, e.g. `1,0.5,0.25`.
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    #[arg(long)]
    patch_size: Option<usize>,
    /// Target superpixel count.
    #[arg(long)]
    superpixels: Option<usize>,
    /// Histogram bins per Lab channel.
    #[arg(long)]
    bins: Option<usize>,
    /// Also write the coarse and posterior maps.
    #[arg(long)]
    emit_intermediate: bool,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Args {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = &self.scales {
            cfg.scales = s.clone();
        }
        if let Some(p) = self.patch_size {
            cfg.patch_size = p;
        }
        if let Some(n) = self.superpixels {
            cfg.superpixel_target = n;
        }
        if let Some(b) = self.bins {
            cfg.histogram_bins = b;
        }
        cfg.emit_intermediate |= self.emit_intermediate;
        Ok(cfg)
    }
}

fn run(args: &Args) -> Result<bool> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring worker threads")?;
    }
    let cfg = args.config()?;
    let run = run_dataset(&args.input, args.gt.as_deref(), &args.out, &cfg)?;
    if let Some(agg) = &run.aggregate {
        println!(
            "{} images, {} scored: F(adaptive) {:.4}  AUC {:.4}  MAE {:.4}",
            run.images.len(),
            run.reports().count(),
            agg.adaptive.f_measure,
            agg.auc,
            agg.mae
        );
    } else {
        println!("{} images processed", run.images.len());
    }
    for r in run.images.iter().filter(|r| r.failed()) {
        eprintln!(
            "failed: {} ({})",
            r.input.display(),
            r.error.as_deref().unwrap_or_default()
        );
    }
    Ok(run.failures() == 0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
