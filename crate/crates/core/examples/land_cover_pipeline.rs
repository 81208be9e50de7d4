//! Scene to metrics: windows, balanced sampling, five approaches, seeds.
//!
//! `cargo run --release --example land_cover_pipeline [scene.ssc]`; with no
//! argument a synthetic field mosaic is used.

use spatial_c45::data::{extract_windows, load_scene};
use spatial_c45::experiment::{run_on_scenes, Approach, ExperimentConfig};
use spatial_c45::oracle::synthetic_scene;

fn main() -> spatial_c45::Result<()> {
    let scene = match std::env::args().nth(1) {
        Some(path) => load_scene(path)?,
        None => synthetic_scene(60, 60, 8, 5, 12, 1)?,
    };
    let windows = extract_windows(&scene, 3)?;
    println!(
        "{}: {} bands, {}x{}, {} labelled windows, per class {:?}",
        scene.name,
        scene.n_attributes(),
        scene.rows(),
        scene.cols(),
        windows.len(),
        windows.class_histogram()
    );

    let cfg = ExperimentConfig {
        p: 60,
        seeds: vec![1, 2, 3],
        approaches: Approach::STANDARD.to_vec(),
        ..ExperimentConfig::default()
    };
    let report = run_on_scenes(std::slice::from_ref(&scene), &cfg)?;
    print!("\n{}", report.metrics_csv());
    println!();
    for ((_, approach), acc) in report.mean_accuracy() {
        println!("{approach:<13} mean accuracy {acc:.2}%");
    }
    if let Some(ratio) = report.spatial_time_ratio() {
        println!("spatial / single-pixel training time: {ratio:.1}x");
    }
    for r in report.failures() {
        println!("failed: {} {} {}", r.dataset, r.approach, r.seed);
    }
    Ok(())
}
