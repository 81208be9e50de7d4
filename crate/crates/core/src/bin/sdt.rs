use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spatial_c45::data::{load_scene, scene_from_bytes, scene_from_csv, write_scene};
use spatial_c45::experiment::{run_experiment, ExperimentConfig};
use spatial_c45::{Error, RenderFormat, SpatialDecisionTree};

const CONFIG_ERROR: u8 = 1;
const DATA_ERROR: u8 = 2;
const RUN_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "sdt", version, about = "Spatial decision trees for multi-band images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a CSV pixel table (or re-validate an SSC1 file) to SSC1.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a multi-seed experiment described by a config file.
    Experiment { config: PathBuf },
    /// Render a saved tree as text, dot or rules.
    ExportTree {
        tree: PathBuf,
        #[arg(short, long, default_value = "text")]
        format: String,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("sdt: {msg}");
    ExitCode::from(code)
}

fn data_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => CONFIG_ERROR,
        _ => DATA_ERROR,
    }
}

fn convert(input: PathBuf, output: PathBuf) -> ExitCode {
    let name = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let bytes = match std::fs::read(&input) {
        Ok(b) => b,
        Err(e) => return fail(DATA_ERROR, format!("{}: {e}", input.display())),
    };
    let scene = if bytes.starts_with(b"SSC1\n") {
        scene_from_bytes(&bytes, &name)
    } else {
        match std::str::from_utf8(&bytes) {
            Ok(text) => scene_from_csv(text, &name),
            Err(_) => Err(Error::UnknownFormat("input is neither SSC1 nor UTF-8 CSV".into())),
        }
    };
    let scene = match scene {
        Ok(s) => s,
        Err(e) => return fail(DATA_ERROR, format!("{}: {e}", input.display())),
    };
    if let Err(e) = write_scene(&output, &scene) {
        return fail(DATA_ERROR, format!("{}: {e}", output.display()));
    }
    match load_scene(&output) {
        Ok(s) => {
            println!(
                "{}: attrs={} rows={} cols={} classes={} labeled={}",
                output.display(),
                s.n_attributes(),
                s.rows(),
                s.cols(),
                s.class_names().len(),
                s.labeled_count()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(DATA_ERROR, format!("{}: {e}", output.display())),
    }
}

fn experiment(config: PathBuf) -> ExitCode {
    let cfg = match ExperimentConfig::load(&config) {
        Ok(c) => c,
        Err(e) => return fail(CONFIG_ERROR, format!("{}: {e}", config.display())),
    };
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(data_code(&e), e),
    };
    let failed: Vec<_> = report.failures().collect();
    for r in &failed {
        if let Err(e) = &r.outcome {
            eprintln!("sdt: run {} {} seed {} failed: {e}", r.dataset, r.approach, r.seed);
        }
    }
    println!(
        "{} runs, {} failed; results in {}",
        report.runs.len(),
        failed.len(),
        cfg.output_dir.display()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(RUN_FAILURE)
    }
}

fn export_tree(path: PathBuf, format: String) -> ExitCode {
    let format: RenderFormat = match format.parse() {
        Ok(f) => f,
        Err(e) => return fail(CONFIG_ERROR, e),
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return fail(DATA_ERROR, format!("{}: {e}", path.display())),
    };
    match SpatialDecisionTree::from_text(&text) {
        Ok(tree) => {
            print!("{}", tree.render(format));
            ExitCode::SUCCESS
        }
        Err(e) => fail(DATA_ERROR, format!("{}: {e}", path.display())),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Convert { input, output } => convert(input, output),
        Command::Experiment { config } => experiment(config),
        Command::ExportTree { tree, format } => export_tree(tree, format),
    }
}
