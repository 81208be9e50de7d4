//! Multi-seed land-cover experiments: sample, split, train, evaluate.
//!
//! Config keys (one `key = value` per line, `#` starts a comment):
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `scenes` | required | comma-separated `SSC1` files, relative to the config file |
//! | `d` | 3 | window side |
//! | `P` | 100 | instances sampled per class |
//! | `approaches` | all five | `hs2_full`, `hs2_rcc8`, `hs2_rcc5`, `propositional`, `single_pixel`, `flattened`, `averaged` |
//! | `seeds` | `1-10` | list and ranges, e.g. `1-3,7` |
//! | `train_fraction` | 0.8 | per-class training share |
//! | `output_dir` | `out` | receives `metrics.csv`, `telemetry.csv`, `trees/` |
//!
//! plus every learner key (`gammas`, `comparators`, `min_samples_leaf`,
//! `min_info_gain`, `max_leaf_entropy`, `max_depth`, `threshold_policy`,
//! `r0`, `workers`, `accelerated`). `fragment` is taken from each approach.
//!
//! Each seed drives three generators on separate streams: class sampling,
//! the train/test split, and a reserve stream for the learner.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{
    balance_sample, baseline_transform, extract_windows, load_scene, train_test_split, BaselineMode, Scene,
    WindowedDataset,
};
use crate::error::{Error, Result};
use crate::learner::{learn_with_stats, LearnerConfig, SearchStats};
use crate::logic::FragmentId;
use crate::metrics::{confusion, csv_row, RunMetrics, CSV_HEADER};
use crate::model::AnchoredDataset;
use crate::tree::SpatialDecisionTree;

const SAMPLE_STREAM: u64 = 1;
const SPLIT_STREAM: u64 = 2;
const LEARN_STREAM: u64 = 3;

/// Generator for one stage of one seed.
pub fn stage_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Approach {
    Spatial(FragmentId),
    Baseline(BaselineMode),
}

impl Approach {
    pub const STANDARD: [Approach; 5] = [
        Approach::Spatial(FragmentId::Hs2Rcc8),
        Approach::Spatial(FragmentId::Hs2Rcc5),
        Approach::Baseline(BaselineMode::SinglePixel),
        Approach::Baseline(BaselineMode::Flattened),
        Approach::Baseline(BaselineMode::Averaged),
    ];

    pub fn is_spatial(self) -> bool {
        matches!(self, Approach::Spatial(f) if f != FragmentId::Propositional)
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Approach::Spatial(frag) => write!(f, "{frag}"),
            Approach::Baseline(BaselineMode::SinglePixel) => f.write_str("single_pixel"),
            Approach::Baseline(BaselineMode::Flattened) => f.write_str("flattened"),
            Approach::Baseline(BaselineMode::Averaged) => f.write_str("averaged"),
        }
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        s.parse::<FragmentId>()
            .map(Approach::Spatial)
            .or_else(|_| s.parse::<BaselineMode>().map(Approach::Baseline))
            .map_err(|_| Error::Config(format!("unknown approach `{s}`")))
    }
}

fn parse_seeds(v: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("bad seed list `{v}`"));
    let mut seeds = Vec::new();
    for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                );
                if a > b {
                    return Err(bad());
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenes: Vec<PathBuf>,
    pub d: usize,
    pub p: usize,
    pub approaches: Vec<Approach>,
    pub seeds: Vec<u64>,
    pub train_fraction: f64,
    pub output_dir: PathBuf,
    pub learner: LearnerConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenes: Vec::new(),
            d: 3,
            p: 100,
            approaches: Approach::STANDARD.to_vec(),
            seeds: (1..=10).collect(),
            train_fraction: 0.8,
            output_dir: PathBuf::from("out"),
            learner: LearnerConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut output_dir = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::Parse {
                line: i + 1,
                message: m,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (k, v) = (k.trim(), v.trim());
            let num = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| err(format!("bad value `{v}` for `{k}`")))
            };
            match k {
                "scenes" => {
                    cfg.scenes = v
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| base.join(s))
                        .collect()
                }
                "d" => cfg.d = num(v)?,
                "P" => cfg.p = num(v)?,
                "approaches" => {
                    cfg.approaches = v
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?
                }
                "seeds" => cfg.seeds = parse_seeds(v)?,
                "train_fraction" => {
                    cfg.train_fraction = v.parse().map_err(|_| err(format!("bad train_fraction `{v}`")))?
                }
                "output_dir" => output_dir = Some(base.join(v)),
                "fragment" => {}
                _ => {
                    if !cfg.learner.apply(k, v).map_err(|e| err(e.to_string()))? {
                        return Err(err(format!("unknown key `{k}`")));
                    }
                }
            }
        }
        cfg.output_dir = output_dir.unwrap_or_else(|| base.join("out"));
        cfg.learner = cfg.learner.normalized()?;
        if cfg.scenes.is_empty() {
            return Err(Error::Config("`scenes` is required".into()));
        }
        if cfg.d % 2 == 0 || cfg.p == 0 || !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
            return Err(Error::Config("need odd d, P >= 1 and train_fraction in (0, 1)".into()));
        }
        if cfg.approaches.is_empty() {
            return Err(Error::Config("`approaches` is empty".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub dataset: String,
    pub approach: Approach,
    pub seed: u64,
    pub outcome: std::result::Result<RunOutput, String>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub metrics: RunMetrics,
    pub tree: SpatialDecisionTree,
    pub train_seconds: f64,
    pub candidates: u64,
    pub nodes: u64,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub runs: Vec<RunRecord>,
}

impl ExperimentReport {
    pub fn failures(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter(|r| r.outcome.is_err())
    }

    /// One row per successful run, in config order.
    pub fn metrics_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.runs {
            if let Ok(o) = &r.outcome {
                out += &csv_row(&r.dataset, &r.approach.to_string(), r.seed, &o.metrics);
                out.push('\n');
            }
        }
        out
    }

    /// Timing and work counters; failed runs carry their error.
    pub fn telemetry_csv(&self) -> String {
        let mut out = String::from("dataset,approach,seed,train_seconds,candidates,nodes,error\n");
        for r in &self.runs {
            match &r.outcome {
                Ok(o) => {
                    out += &format!(
                        "{},{},{},{:.3},{},{},\n",
                        r.dataset, r.approach, r.seed, o.train_seconds, o.candidates, o.nodes
                    )
                }
                Err(e) => {
                    out += &format!(
                        "{},{},{},,,,\"{}\"\n",
                        r.dataset,
                        r.approach,
                        r.seed,
                        e.replace('"', "'")
                    )
                }
            }
        }
        out
    }

    /// Mean test accuracy per (dataset, approach).
    pub fn mean_accuracy(&self) -> BTreeMap<(String, String), f64> {
        let mut acc: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
        for r in &self.runs {
            if let Ok(o) = &r.outcome {
                let e = acc.entry((r.dataset.clone(), r.approach.to_string())).or_default();
                e.0 += o.metrics.accuracy;
                e.1 += 1;
            }
        }
        acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
    }

    /// Total training time of spatial runs over single-pixel runs.
    pub fn spatial_time_ratio(&self) -> Option<f64> {
        let (mut spatial, mut prop) = (0.0, 0.0);
        for r in &self.runs {
            if let Ok(o) = &r.outcome {
                if r.approach.is_spatial() {
                    spatial += o.train_seconds;
                } else if r.approach == Approach::Baseline(BaselineMode::SinglePixel) {
                    prop += o.train_seconds;
                }
            }
        }
        (spatial > 0.0 && prop > 0.0).then(|| spatial / prop)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("trees"))?;
        fs::write(dir.join("metrics.csv"), self.metrics_csv())?;
        fs::write(dir.join("telemetry.csv"), self.telemetry_csv())?;
        for r in &self.runs {
            if let Ok(o) = &r.outcome {
                let name = format!("{}_{}_seed{}.sdt", r.dataset, r.approach, r.seed);
                fs::write(dir.join("trees").join(name), o.tree.to_text())?;
            }
        }
        Ok(())
    }
}

/// Sampled and split data for one (scene, seed).
struct Prepared {
    train: WindowedDataset,
    test: WindowedDataset,
}

fn prepare(windows: &WindowedDataset, cfg: &ExperimentConfig, seed: u64) -> Result<Prepared> {
    let mut sampled = balance_sample(windows, cfg.p, &mut stage_rng(seed, SAMPLE_STREAM))?;
    sampled.seed = Some(seed);
    let (train, test) = train_test_split(&sampled, cfg.train_fraction, &mut stage_rng(seed, SPLIT_STREAM))?;
    Ok(Prepared { train, test })
}

/// Trains one approach on `train` and scores it on `test`.
pub fn run_once(
    train: &WindowedDataset,
    test: &WindowedDataset,
    approach: Approach,
    learner: &LearnerConfig,
    seed: u64,
) -> Result<RunOutput> {
    let mut cfg = learner.clone();
    cfg.seed = stage_rng(seed, LEARN_STREAM).random();
    let (train, test) = match approach {
        Approach::Spatial(f) => {
            cfg.fragment = f;
            (train.clone(), test.clone())
        }
        Approach::Baseline(mode) => {
            cfg.fragment = FragmentId::Propositional;
            (baseline_transform(train, mode), baseline_transform(test, mode))
        }
    };
    let anchored = AnchoredDataset::anchor(train.instances.clone(), train.classes.clone(), &cfg.r0_policy)?;
    let stats = SearchStats::default();
    let start = Instant::now();
    let tree = learn_with_stats(&anchored, &cfg, &stats)?;
    let train_seconds = start.elapsed().as_secs_f64();
    let pred = tree.classify_batch(&test.instances)?;
    let m = confusion(&test.labels(), &pred, test.classes.len())?;
    Ok(RunOutput {
        metrics: RunMetrics::of(&m)?,
        tree,
        train_seconds,
        candidates: stats.candidates(),
        nodes: stats.nodes(),
    })
}

/// Runs every (scene, approach, seed) combination. Per-run errors are
/// recorded rather than propagated.
pub fn run_on_scenes(scenes: &[Scene], cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let windows: Vec<WindowedDataset> = scenes
        .iter()
        .map(|s| extract_windows(s, cfg.d))
        .collect::<Result<_>>()?;
    let mut jobs = Vec::new();
    for (si, scene) in scenes.iter().enumerate() {
        for &approach in &cfg.approaches {
            for &seed in &cfg.seeds {
                jobs.push((si, scene.name.clone(), approach, seed));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.learner.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let runs = pool.install(|| {
        jobs.into_par_iter()
            .map(|(si, dataset, approach, seed)| {
                let outcome = prepare(&windows[si], cfg, seed)
                    .and_then(|p| run_once(&p.train, &p.test, approach, &cfg.learner, seed))
                    .map_err(|e| e.to_string());
                RunRecord {
                    dataset,
                    approach,
                    seed,
                    outcome,
                }
            })
            .collect()
    });
    Ok(ExperimentReport { runs })
}

/// Loads the configured scenes, runs everything and writes the outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let scenes: Vec<Scene> = cfg.scenes.iter().map(load_scene).collect::<Result<_>>()?;
    let report = run_on_scenes(&scenes, cfg)?;
    report.write(&cfg.output_dir)?;
    Ok(report)
}
