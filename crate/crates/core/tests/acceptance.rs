//! One line per acceptance criterion. Criteria that need the public
//! hyperspectral scenes read them from `$SDT_SCENES_DIR` (SSC1 files
//! made with `sdt convert`) and report BLOCKED when it is unset.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{anchored, random_images};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spatial_c45::data::{load_scene, train_test_split, BaselineMode, Scene, WindowedDataset};
use spatial_c45::experiment::{run_on_scenes, run_once, Approach, ExperimentConfig, ExperimentReport};
use spatial_c45::geometry::{classify_pair, enumerate_rectangles, tuple_holds, GridBounds, RelationTuple};
use spatial_c45::learner::{entropy, find_best_decision, learn, ClassCounts, LearnerConfig, ThresholdPolicy};
use spatial_c45::logic::{derive_rcc8_tuples, operator_set, DerivedOperator, FragmentId, Rcc8};
use spatial_c45::metrics::{accuracy, kappa, ConfusionMatrix};
use spatial_c45::model::SpatialInstance;
use spatial_c45::oracle::{
    brute_force_best_decision, generate_containment_task, rcc8_classify, reference_c45, synthetic_scene,
    ContainmentTask,
};

enum Verdict {
    Pass(String),
    Fail(String),
    Blocked(String),
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn within(start: Instant, budget: Duration) -> bool {
    start.elapsed() < budget
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .unwrap()
        .install(f)
}

fn relation_counts() -> Verdict {
    let start = Instant::now();
    let counts = [FragmentId::Hs2Full, FragmentId::Hs2Rcc8, FragmentId::Hs2Rcc5].map(|f| operator_set(f).len());
    check(
        counts == [168, 7, 4] && within(start, Duration::from_secs(1)),
        format!(
            "full {}, rcc8 {}, rcc5 {} in {:.1?}",
            counts[0],
            counts[1],
            counts[2],
            start.elapsed()
        ),
    )
}

fn jepd() -> Verdict {
    let start = Instant::now();
    let tuples: Vec<RelationTuple> = (0..169).map(|c| RelationTuple::from_code(c, 2)).collect();
    let identity = RelationTuple::identity(2);
    let mut pairs = 0u64;
    let mut bad = 0u64;
    for cols in 1..=4 {
        for rows in 1..=4 {
            let b = GridBounds::planar(cols, rows).unwrap();
            let rects: Vec<_> = enumerate_rectangles(&b).collect();
            for r in &rects {
                for s in &rects {
                    pairs += 1;
                    let holding = tuples.iter().filter(|t| tuple_holds(t, r, s).unwrap()).count();
                    let t = classify_pair(r, s).unwrap();
                    let owners = Rcc8::MODAL
                        .iter()
                        .filter(|&&rel| DerivedOperator::Rcc8(rel).tuples().contains(&t))
                        .count()
                        + usize::from(t == identity);
                    let rel = rcc8_classify(s, r);
                    let agrees = if rel == Rcc8::Eq {
                        t == identity
                    } else {
                        DerivedOperator::Rcc8(rel).tuples().contains(&t)
                    };
                    if holding != 1 || owners != 1 || !agrees {
                        bad += 1;
                    }
                }
            }
        }
    }
    let covered: usize = Rcc8::MODAL
        .iter()
        .map(|&r| DerivedOperator::Rcc8(r).tuples().len())
        .sum::<usize>()
        + 1;
    let stable = derive_rcc8_tuples(4) == derive_rcc8_tuples(5);
    check(
        bad == 0 && covered == 169 && stable && within(start, Duration::from_secs(10)),
        format!(
            "{pairs} pairs, {bad} violations, {covered} tuples covered in {:.1?}",
            start.elapsed()
        ),
    )
}

fn oracle_dataset(seed: u64) -> WindowedDataset {
    let n = 12 + (seed as usize * 7) % 19;
    random_images(seed, n, 3, 4, 2 + seed as usize % 2, 5)
}

fn oracle_config() -> LearnerConfig {
    LearnerConfig {
        fragment: FragmentId::Hs2Rcc8,
        threshold_policy: ThresholdPolicy::AllMidpoints,
        ..LearnerConfig::default()
    }
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let cfg = oracle_config();
    let mut mismatches = Vec::new();
    let mut found = 0;
    for seed in 0..20 {
        let ds = anchored(&oracle_dataset(seed));
        let fast = find_best_decision(&ds, &cfg);
        let brute = brute_force_best_decision(&ds, &cfg);
        let same = match (&fast, &brute) {
            (None, None) => true,
            (Some(f), Some(b)) => {
                found += 1;
                f.decision == b.decision && f.key == b.key && (f.gain - b.gain).abs() <= 1e-12
            }
            _ => false,
        };
        if !same {
            mismatches.push(seed);
        }
    }
    check(
        mismatches.is_empty() && within(start, Duration::from_secs(120)),
        format!(
            "20 datasets, {found} with a split, mismatching seeds {mismatches:?}, {:.1?}",
            start.elapsed()
        ),
    )
}

fn tabular(seed: u64) -> WindowedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let rows = rng.random_range(30..=100);
    let attrs = rng.random_range(1..=5);
    let classes = rng.random_range(2..=3);
    let instances = (0..rows)
        .map(|i| {
            let values: Vec<f32> = (0..attrs).map(|_| rng.random_range(0..40) as f32 / 4.0).collect();
            let label = if i < classes {
                i
            } else if values[0] > 6.0 && rng.random_bool(0.8) {
                0
            } else {
                rng.random_range(0..classes)
            };
            Arc::new(SpatialInstance::tabular(values, label).unwrap())
        })
        .collect();
    WindowedDataset::new(instances, (0..classes).map(|c| format!("k{c}")).collect()).unwrap()
}

fn c45_config() -> LearnerConfig {
    LearnerConfig {
        fragment: FragmentId::Propositional,
        ..LearnerConfig::default()
    }
}

fn c45_degeneration() -> Verdict {
    let start = Instant::now();
    let cfg = c45_config();
    let mut differing = Vec::new();
    let mut nodes = 0;
    for seed in 0..10 {
        let ds = tabular(seed);
        let ours = learn(&anchored(&ds), &cfg).unwrap();
        let reference = reference_c45(&ds, &cfg).unwrap();
        nodes += ours.root().internal_count();
        if ours.root() != reference.root() {
            differing.push(seed);
        }
    }
    check(
        differing.is_empty() && within(start, Duration::from_secs(30)),
        format!(
            "10 datasets, {nodes} internal nodes, differing seeds {differing:?}, {:.1?}",
            start.elapsed()
        ),
    )
}

struct Containment {
    spatial: f64,
    single: f64,
    tree_text: String,
}

fn containment_run(workers: usize) -> Containment {
    let task = generate_containment_task(200, 8, 1).unwrap();
    let (train, test) = train_test_split(&task.dataset, 0.7, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let cfg = LearnerConfig {
        fragment: FragmentId::Hs2Full,
        workers,
        ..LearnerConfig::default()
    };
    let tree = learn(&anchored(&train), &cfg).unwrap();
    let pred = tree.classify_batch(&test.instances).unwrap();
    let truth = test.labels();
    let spatial = 100.0 * pred.iter().zip(&truth).filter(|(p, t)| p == t).count() as f64 / truth.len() as f64;
    let single = run_once(&train, &test, Approach::Baseline(BaselineMode::SinglePixel), &cfg, 1)
        .unwrap()
        .metrics
        .accuracy;
    Containment {
        spatial,
        single,
        tree_text: tree.to_text(),
    }
}

fn containment() -> Verdict {
    let start = Instant::now();
    let task = generate_containment_task(200, 8, 1).unwrap();
    let truthful =
        (0..200).all(|i| task.is_positive(i) == (task.dataset.instances[i].class_label() == ContainmentTask::POSITIVE));
    let r = containment_run(0);
    check(
        truthful && r.spatial >= 90.0 && r.single <= 65.0 && within(start, Duration::from_secs(900)),
        format!(
            "HS2_FULL {:.2}%, single pixel {:.2}%, {:.1?}",
            r.spatial,
            r.single,
            start.elapsed()
        ),
    )
}

fn scenes_dir() -> Option<PathBuf> {
    std::env::var_os("SDT_SCENES_DIR")
        .map(PathBuf::from)
        .filter(|p| p.is_dir())
}

fn scene_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map(|rd| {
            rd.flatten()
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "ssc"))
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn paper_config(workers: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        d: 3,
        p: 100,
        approaches: vec![
            Approach::Spatial(FragmentId::Hs2Rcc8),
            Approach::Baseline(BaselineMode::SinglePixel),
            Approach::Baseline(BaselineMode::Flattened),
        ],
        seeds: (1..=5).collect(),
        train_fraction: 0.8,
        ..ExperimentConfig::default()
    };
    cfg.learner.workers = workers;
    cfg
}

fn means(report: &ExperimentReport) -> BTreeMap<(String, String), f64> {
    report.mean_accuracy()
}

fn paper_scale(reports: &BTreeMap<String, ExperimentReport>) -> Verdict {
    let Some(report) = reports.get("indian_pines") else {
        return Verdict::Blocked(
            "needs $SDT_SCENES_DIR/indian_pines.ssc (the public scenes could not be fetched here)".into(),
        );
    };
    let m = means(report);
    let get = |a: &str| {
        m.get(&("indian_pines".to_string(), a.to_string()))
            .copied()
            .unwrap_or(f64::NAN)
    };
    let (spatial, single) = (get("hs2_rcc8"), get("single_pixel"));
    let ratio = report.spatial_time_ratio().unwrap_or(f64::NAN);
    check(
        report.failures().count() == 0 && spatial - single >= 3.0 && (5.0..=200.0).contains(&ratio),
        format!("hs2_rcc8 {spatial:.2}% vs single pixel {single:.2}%, search time ratio {ratio:.1}x"),
    )
}

fn flattened_sanity(reports: &BTreeMap<String, ExperimentReport>) -> Verdict {
    if reports.is_empty() {
        return Verdict::Blocked("needs converted scenes in $SDT_SCENES_DIR".into());
    }
    let mut lines = Vec::new();
    let mut any = false;
    for (name, report) in reports {
        let m = means(report);
        let get = |a: &str| m.get(&(name.clone(), a.to_string())).copied().unwrap_or(f64::NAN);
        let (flat, single) = (get("flattened"), get("single_pixel"));
        any |= flat <= single;
        lines.push(format!("{name}: flattened {flat:.2}% vs single pixel {single:.2}%"));
    }
    check(any, lines.join("; "))
}

fn metric_spot_values() -> Verdict {
    let h = entropy(&ClassCounts::new(vec![10, 10])).unwrap();
    let k = kappa(&ConfusionMatrix::from_rows(vec![vec![45, 5], vec![15, 35]]).unwrap()).unwrap();
    let a = accuracy(&ConfusionMatrix::from_rows(vec![vec![1, 1], vec![0, 2]]).unwrap()).unwrap();
    let shown = format!("entropy {h:.2} bit, kappa {k:.2}, accuracy {a:.2}");
    check(shown == "entropy 1.00 bit, kappa 60.00, accuracy 75.00", shown)
}

fn report_files(report: &ExperimentReport) -> Vec<(String, Vec<u8>)> {
    let dir = tempfile::tempdir().unwrap();
    report.write(dir.path()).unwrap();
    let mut files = vec![(
        "metrics.csv".to_string(),
        fs::read(dir.path().join("metrics.csv")).unwrap(),
    )];
    let mut trees: Vec<_> = fs::read_dir(dir.path().join("trees"))
        .unwrap()
        .flatten()
        .map(|e| e.path())
        .collect();
    trees.sort();
    for t in trees {
        files.push((
            t.file_name().unwrap().to_string_lossy().into_owned(),
            fs::read(&t).unwrap(),
        ));
    }
    files
}

fn determinism(scenes: &[Scene], report: Option<&ExperimentReport>) -> Verdict {
    let mut differing = Vec::new();
    let runs = |workers: usize| {
        in_pool(workers, || {
            let best: Vec<String> = (0..20)
                .map(|s| {
                    format!(
                        "{:?}",
                        find_best_decision(&anchored(&oracle_dataset(s)), &oracle_config())
                    )
                })
                .collect();
            let c45: Vec<String> = (0..10)
                .map(|s| learn(&anchored(&tabular(s)), &c45_config()).unwrap().to_text())
                .collect();
            (best, c45)
        })
    };
    let (one, eight) = (runs(1), runs(8));
    if one.0 != eight.0 {
        differing.push("oracle search".to_string());
    }
    if one.1 != eight.1 {
        differing.push("c45 trees".to_string());
    }
    if containment_run(1).tree_text != containment_run(8).tree_text {
        differing.push("containment tree".to_string());
    }

    let synthetic = vec![synthetic_scene(40, 40, 4, 4, 8, 3).unwrap()];
    let small = |workers| ExperimentConfig {
        p: 40,
        seeds: vec![1, 2],
        ..paper_config(workers)
    };
    let a = report_files(&run_on_scenes(&synthetic, &small(1)).unwrap());
    let b = report_files(&run_on_scenes(&synthetic, &small(8)).unwrap());
    if a != b {
        differing.push("synthetic experiment files".to_string());
    }
    let mut checked = a.len();
    if let Some(report) = report {
        let first = report_files(report);
        let second = report_files(&run_on_scenes(scenes, &paper_config(8)).unwrap());
        checked += first.len();
        if first != second {
            differing.push("scene experiment files".to_string());
        }
    }
    check(
        differing.is_empty(),
        format!("1 vs 8 workers over {checked} output files plus search and trees; differing: {differing:?}"),
    )
}

fn main() {
    let scenes: Vec<Scene> = scenes_dir()
        .map(|d| scene_files(&d).iter().map(|p| load_scene(p).unwrap()).collect())
        .unwrap_or_default();
    let report = (!scenes.is_empty()).then(|| run_on_scenes(&scenes, &paper_config(1)).unwrap());
    // split per scene so each criterion can look at its own dataset
    let mut reports = BTreeMap::new();
    if let Some(r) = &report {
        for s in &scenes {
            let runs = r.runs.iter().filter(|x| x.dataset == s.name).cloned().collect();
            reports.insert(s.name.clone(), ExperimentReport { runs });
        }
    }

    let verdicts = [
        relation_counts(),
        jepd(),
        oracle_equivalence(),
        c45_degeneration(),
        containment(),
        paper_scale(&reports),
        flattened_sanity(&reports),
        metric_spot_values(),
        determinism(&scenes, report.as_ref()),
    ];
    let mut failed = 0;
    for (i, v) in verdicts.iter().enumerate() {
        let (tag, detail) = match v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Blocked(d) => ("BLOCKED", d),
        };
        println!("criterion {}: {tag}: {detail}", i + 1);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
