use std::fs;
use std::path::Path;
use std::process::Command;

use sbdsal_cli::{load_config, run_dataset};
use sbdsal_core::{PipelineConfig, SaliencyMap};
use tempfile::TempDir;

const SIZE: u32 = 64;

fn square(x: u32, y: u32, lo: u32, hi: u32) -> bool {
    (lo..hi).contains(&x) && (lo..hi).contains(&y)
}

fn write_pair(images: &Path, masks: Option<&Path>, name: &str, lo: u32, hi: u32, fg: [u8; 3]) {
    let img = image::RgbImage::from_fn(SIZE, SIZE, |x, y| {
        image::Rgb(if square(x, y, lo, hi) { fg } else { [120, 125, 130] })
    });
    img.save(images.join(format!("{name}.png"))).unwrap();
    if let Some(dir) = masks {
        let mask = image::GrayImage::from_fn(SIZE, SIZE, |x, y| {
            image::Luma([if square(x, y, lo, hi) { 255 } else { 0 }])
        });
        mask.save(dir.join(format!("{name}.png"))).unwrap();
    }
}

struct Fixture {
    _root: TempDir,
    images: std::path::PathBuf,
    masks: std::path::PathBuf,
    out: std::path::PathBuf,
}

fn fixture(with_all_masks: bool) -> Fixture {
    let root = TempDir::new().unwrap();
    let images = root.path().join("images");
    let masks = root.path().join("masks");
    fs::create_dir_all(&images).unwrap();
    fs::create_dir_all(&masks).unwrap();
    write_pair(&images, Some(&masks), "a", 20, 44, [250, 10, 10]);
    write_pair(&images, Some(&masks), "b", 16, 40, [10, 200, 30]);
    write_pair(
        &images,
        with_all_masks.then_some(masks.as_path()),
        "c",
        24,
        48,
        [30, 30, 240],
    );
    let out = root.path().join("out");
    Fixture {
        _root: root,
        images,
        masks,
        out,
    }
}

fn small_config() -> PipelineConfig {
    PipelineConfig {
        superpixel_target: 60,
        ..PipelineConfig::default()
    }
}

#[test]
fn three_images_three_masks() {
    let f = fixture(true);
    let run = run_dataset(&f.images, Some(&f.masks), &f.out, &small_config()).unwrap();
    assert_eq!(run.images.len(), 3);
    assert_eq!(run.failures(), 0);
    assert_eq!(run.reports().count(), 3);
    assert!(run.aggregate.is_some());
    for name in ["a", "b", "c"] {
        assert!(f.out.join(format!("{name}.png")).is_file());
        assert!(f.out.join(format!("{name}.json")).is_file());
        assert!(f.out.join(format!("{name}_pr.csv")).is_file());
    }
    assert!(f.out.join("aggregate.json").is_file());
    assert!(f.out.join("run.json").is_file());
    assert!(run.images.iter().all(|r| r.seconds > 0.0));

    let csv = fs::read_to_string(f.out.join("aggregate_pr.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("threshold,precision,recall,f_measure"));
    assert_eq!(lines.count(), 256);

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(f.out.join("a.json")).unwrap()).unwrap();
    for key in ["pr_curve", "f_curve", "adaptive", "mae", "auc"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn missing_mask_is_processed_but_not_scored() {
    let f = fixture(false);
    let run = run_dataset(&f.images, Some(&f.masks), &f.out, &small_config()).unwrap();
    assert_eq!(run.failures(), 0);
    assert_eq!(run.reports().count(), 2);
    assert!(f.out.join("c.png").is_file());
    assert!(!f.out.join("c.json").exists());
    let c = run.images.iter().find(|r| r.name == "c").unwrap();
    assert!(c.report.is_none() && c.map.is_some());
}

#[test]
fn empty_directory_is_an_error() {
    let root = TempDir::new().unwrap();
    let err = run_dataset(root.path(), None, &root.path().join("out"), &PipelineConfig::default()).unwrap_err();
    assert!(err.to_string().contains("no images"));
}

#[test]
fn unreadable_image_is_skipped_and_counted() {
    let f = fixture(true);
    fs::write(f.images.join("broken.png"), b"not a png").unwrap();
    let run = run_dataset(&f.images, Some(&f.masks), &f.out, &small_config()).unwrap();
    assert_eq!(run.images.len(), 4);
    assert_eq!(run.failures(), 1);
    assert_eq!(run.reports().count(), 3);
    assert!(!f.out.join("broken.png").exists());
}

#[test]
fn intermediates_only_under_flag() {
    let f = fixture(true);
    run_dataset(&f.images, None, &f.out, &small_config()).unwrap();
    assert!(!f.out.join("a_coarse.png").exists());
    let cfg = PipelineConfig {
        emit_intermediate: true,
        ..small_config()
    };
    run_dataset(&f.images, None, &f.out, &cfg).unwrap();
    assert!(f.out.join("a_coarse.png").is_file());
    assert!(f.out.join("a_posterior.png").is_file());
}

#[test]
fn written_map_round_trips_within_one_level() {
    let f = fixture(true);
    let cfg = small_config();
    run_dataset(&f.images, None, &f.out, &cfg).unwrap();
    let img = sbdsal_core::RgbImage::open(f.images.join("a.png")).unwrap();
    let expected = sbdsal_core::run_pipeline(&img, &cfg).unwrap().saliency;
    let read = SaliencyMap::open(f.out.join("a.png")).unwrap();
    for (a, b) in expected.values().iter().zip(read.values()) {
        assert!((a - b).abs() <= 1.0 / 255.0 + 1e-12);
    }
}

#[test]
fn config_file_overrides_defaults() {
    let root = TempDir::new().unwrap();
    let path = root.path().join("cfg.toml");
    fs::write(&path, "patch_size = 5\nscales = [1.0, 0.5]\nhistogram_bins = 8\n").unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.patch_size, 5);
    assert_eq!(cfg.scales, vec![1.0, 0.5]);
    assert_eq!(cfg.histogram_bins, 8);
    assert_eq!(cfg.superpixel_target, 200);

    fs::write(&path, "patch_sise = 5\n").unwrap();
    assert!(load_config(&path).is_err());
}

#[test]
fn binary_exit_codes() {
    let f = fixture(true);
    let bin = env!("CARGO_BIN_EXE_sbdsal");
    let ok = Command::new(bin)
        .args(["--input", f.images.to_str().unwrap(), "--gt", f.masks.to_str().unwrap()])
        .args([
            "--out",
            f.out.to_str().unwrap(),
            "--superpixels",
            "60",
            "--scales",
            "1,0.5",
            "--jobs",
            "2",
        ])
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("3 scored"));

    fs::write(f.images.join("broken.png"), b"junk").unwrap();
    let partial = Command::new(bin)
        .args(["--input", f.images.to_str().unwrap(), "--out", f.out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!partial.status.success());

    let bad = Command::new(bin)
        .args([
            "--input",
            f.images.to_str().unwrap(),
            "--out",
            f.out.to_str().unwrap(),
            "--patch-size",
            "4",
        ])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
