//! Entropy-based greedy induction of spatial decision trees.
//!
//! The search space at a node is the product of operators (the fragment's
//! modal operators, then the propositional case), attributes, thresholds,
//! comparators and γ values, enumerated in that canonical order. The best
//! decision maximises information gain; ties go to the earliest candidate,
//! which keeps parallel search reproducible.

mod engine;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::logic::{operator_set, Comparator, Decision, FragmentId, Gamma, OperatorSpec};
use crate::model::{split, AnchoredDataset, R0Policy};
use crate::tree::{Node, SpatialDecisionTree, StopReason};

pub use engine::Catalog;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdPolicy {
    /// Midpoints between consecutive distinct pooled values.
    AllMidpoints,
    /// `q` equally spaced sample quantiles of the pooled values.
    Quantiles(usize),
}

impl fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdPolicy::AllMidpoints => f.write_str("midpoints"),
            ThresholdPolicy::Quantiles(q) => write!(f, "quantiles:{q}"),
        }
    }
}

impl FromStr for ThresholdPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "midpoints" || s == "all-midpoints" {
            return Ok(ThresholdPolicy::AllMidpoints);
        }
        s.strip_prefix("quantiles:")
            .and_then(|q| q.trim().parse::<usize>().ok())
            .filter(|&q| q >= 1)
            .map(ThresholdPolicy::Quantiles)
            .ok_or_else(|| Error::Config(format!("bad threshold policy `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerConfig {
    pub fragment: FragmentId,
    /// Kept sorted in canonical comparator order.
    pub comparators: Vec<Comparator>,
    /// Kept sorted ascending.
    pub gammas: Vec<Gamma>,
    pub threshold_policy: ThresholdPolicy,
    pub min_samples_leaf: usize,
    /// Bits.
    pub min_info_gain: f64,
    /// Bits.
    pub max_leaf_entropy: f64,
    pub max_depth: Option<usize>,
    pub r0_policy: R0Policy,
    pub seed: u64,
    /// Worker threads for split search; 0 uses the ambient pool.
    pub workers: usize,
    /// Use the precomputed split-search engine. Semantics-neutral.
    pub accelerated: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            fragment: FragmentId::Hs2Rcc8,
            comparators: vec![Comparator::Le, Comparator::Ge],
            gammas: ["0.6", "0.7", "0.8", "0.9", "1"]
                .iter()
                .map(|g| g.parse().expect("valid gamma"))
                .collect(),
            threshold_policy: ThresholdPolicy::Quantiles(20),
            min_samples_leaf: 4,
            min_info_gain: 0.01,
            max_leaf_entropy: 0.3,
            max_depth: None,
            r0_policy: R0Policy::Center,
            seed: 1,
            workers: 0,
            accelerated: true,
        }
    }
}

fn parse_list<T: FromStr<Err = Error>>(value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

impl LearnerConfig {
    /// Sorts and deduplicates comparators and γ values, and checks ranges.
    pub fn normalized(mut self) -> Result<Self> {
        self.comparators.sort();
        self.comparators.dedup();
        self.gammas.sort();
        self.gammas.dedup();
        if self.min_samples_leaf < 1 {
            return Err(Error::Config("min_samples_leaf must be at least 1".into()));
        }
        if self.comparators.is_empty() || self.gammas.is_empty() {
            return Err(Error::Config("comparators and gammas must be non-empty".into()));
        }
        Ok(self)
    }

    /// Applies one `key = value` setting; returns `false` for keys this
    /// config does not own.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<bool> {
        match key {
            "fragment" => self.fragment = value.parse()?,
            "comparators" => self.comparators = parse_list(value)?,
            "gammas" => self.gammas = parse_list(value)?,
            "threshold_policy" => self.threshold_policy = value.parse()?,
            "min_samples_leaf" => self.min_samples_leaf = parse_num(key, value)?,
            "min_info_gain" => self.min_info_gain = parse_num(key, value)?,
            "max_leaf_entropy" => self.max_leaf_entropy = parse_num(key, value)?,
            "max_depth" => {
                self.max_depth = match value.trim() {
                    "none" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "r0" => self.r0_policy = value.parse()?,
            "seed" => self.seed = parse_num(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            "accelerated" => self.accelerated = parse_num(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Plain-text `key = value` form, one setting per line.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut out = String::new();
        out += &format!("fragment = {}\n", self.fragment);
        out += &format!(
            "comparators = {}\n",
            join(self.comparators.iter().map(|c| c.to_string()).collect())
        );
        out += &format!(
            "gammas = {}\n",
            join(self.gammas.iter().map(|g| g.to_string()).collect())
        );
        out += &format!("threshold_policy = {}\n", self.threshold_policy);
        out += &format!("min_samples_leaf = {}\n", self.min_samples_leaf);
        out += &format!("min_info_gain = {}\n", self.min_info_gain);
        out += &format!("max_leaf_entropy = {}\n", self.max_leaf_entropy);
        out += &format!(
            "max_depth = {}\n",
            self.max_depth.map_or("none".to_string(), |d| d.to_string())
        );
        out += &format!("r0 = {}\n", self.r0_policy);
        out += &format!("seed = {}\n", self.seed);
        out += &format!("workers = {}\n", self.workers);
        out += &format!("accelerated = {}\n", self.accelerated);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = LearnerConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            if !cfg.apply(k.trim(), v.trim())? {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("unknown key `{}`", k.trim()),
                });
            }
        }
        cfg.normalized()
    }
}

/// Per-class instance counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCounts {
    counts: Vec<u64>,
    total: u64,
}

impl ClassCounts {
    pub fn new(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        ClassCounts { counts, total }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Most frequent class; ties go to the lowest index.
    pub fn majority(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        best
    }
}

/// Base-2 entropy of a count vector; assumes a positive total.
pub(crate) fn entropy_of(counts: &[u64], total: u64) -> f64 {
    let n = total as f64;
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

/// Information of a dataset with the given class counts, in bits.
pub fn entropy(c: &ClassCounts) -> Result<f64> {
    if c.total == 0 {
        return Err(Error::Empty("class counts"));
    }
    Ok(entropy_of(&c.counts, c.total))
}

/// Weighted entropy of a two-way partition; an empty part contributes 0.
pub(crate) fn split_information(yes: &[u64], no: &[u64]) -> f64 {
    let ne: u64 = yes.iter().sum();
    let nu: u64 = no.iter().sum();
    let n = (ne + nu) as f64;
    let mut info = 0.0;
    if ne > 0 {
        info += ne as f64 / n * entropy_of(yes, ne);
    }
    if nu > 0 {
        info += nu as f64 / n * entropy_of(no, nu);
    }
    info
}

fn partition_counts(ds: &AnchoredDataset, d: &Decision) -> Result<(Vec<u64>, Vec<u64>)> {
    let (e, u) = split(ds, d)?;
    Ok((e.class_counts(), u.class_counts()))
}

pub fn info_split(ds: &AnchoredDataset, d: &Decision) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let (yes, no) = partition_counts(ds, d)?;
    Ok(split_information(&yes, &no))
}

pub fn info_gain(ds: &AnchoredDataset, d: &Decision) -> Result<f64> {
    let parent = entropy(&ClassCounts::new(ds.class_counts()))?;
    Ok(parent - info_split(ds, d)?)
}

/// Candidate thresholds for one attribute from its pooled values.
pub fn thresholds_from_values(mut values: Vec<f64>, policy: ThresholdPolicy) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    match policy {
        ThresholdPolicy::AllMidpoints => {
            values.dedup();
            values.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect()
        }
        ThresholdPolicy::Quantiles(q) => {
            if values.is_empty() {
                return Vec::new();
            }
            let last = (values.len() - 1) as f64;
            let mut out: Vec<f64> = (1..=q)
                .map(|j| {
                    let h = last * j as f64 / (q + 1) as f64;
                    let lo = h.floor() as usize;
                    let frac = h - lo as f64;
                    if lo + 1 < values.len() && frac > 0.0 {
                        values[lo] + frac * (values[lo + 1] - values[lo])
                    } else {
                        values[lo]
                    }
                })
                .collect();
            out.dedup();
            out
        }
    }
}

/// Pooled pixel values of `attr` over every instance of `ds`.
pub fn attribute_thresholds(ds: &AnchoredDataset, attr: usize, policy: ThresholdPolicy) -> Vec<f64> {
    let values: Vec<f64> = ds
        .items()
        .iter()
        .flat_map(|i| i.instance.channel(attr).iter().map(|&v| v as f64))
        .collect();
    thresholds_from_values(values, policy)
}

/// Position of a candidate in canonical order. The propositional case
/// takes operator index `operator_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateKey {
    pub operator: usize,
    pub attribute: usize,
    pub threshold: usize,
    pub comparator: usize,
    pub gamma: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitScore {
    pub decision: Decision,
    pub gain: f64,
    pub sizes: (usize, usize),
    pub key: CandidateKey,
}

impl SplitScore {
    /// `self` ranks ahead of `other`: higher gain, then earlier candidate.
    pub fn beats(&self, other: &SplitScore) -> bool {
        self.gain > other.gain || (self.gain == other.gain && self.key < other.key)
    }
}

fn better(a: Option<SplitScore>, b: Option<SplitScore>) -> Option<SplitScore> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.beats(&a) { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Every candidate decision at a node with its canonical key, in
/// canonical order.
pub fn keyed_candidates(ds: &AnchoredDataset, cfg: &LearnerConfig) -> Vec<(CandidateKey, Decision)> {
    let ops: Vec<Option<OperatorSpec>> = operator_set(cfg.fragment)
        .into_iter()
        .map(Some)
        .chain(std::iter::once(None))
        .collect();
    let thresholds: Vec<Vec<f64>> = (0..ds.n_attributes())
        .map(|a| attribute_thresholds(ds, a, cfg.threshold_policy))
        .collect();
    let mut out = Vec::new();
    for (oi, op) in ops.iter().enumerate() {
        for (ai, ts) in thresholds.iter().enumerate() {
            for (ti, &t) in ts.iter().enumerate() {
                for (ci, &c) in cfg.comparators.iter().enumerate() {
                    for (gi, &g) in cfg.gammas.iter().enumerate() {
                        out.push((
                            CandidateKey {
                                operator: oi,
                                attribute: ai,
                                threshold: ti,
                                comparator: ci,
                                gamma: gi,
                            },
                            Decision {
                                operator: op.clone(),
                                attribute: ai,
                                comparator: c,
                                threshold: t,
                                gamma: g,
                            },
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Candidate decisions in canonical order: operator (fragment order, then
/// propositional), attribute, threshold, comparator, γ.
pub fn candidate_decisions(ds: &AnchoredDataset, cfg: &LearnerConfig) -> Vec<Decision> {
    keyed_candidates(ds, cfg).into_iter().map(|(_, d)| d).collect()
}

/// Work counters for telemetry.
#[derive(Debug, Default)]
pub struct SearchStats {
    pub candidates: AtomicU64,
    pub nodes: AtomicU64,
}

impl SearchStats {
    pub fn candidates(&self) -> u64 {
        self.candidates.load(Ordering::Relaxed)
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}

/// State computed once before learning. With acceleration enabled it
/// holds the rectangle catalog of the image grid; without it, split search
/// evaluates each candidate through [`split`].
#[derive(Clone, Debug)]
pub struct Prepared {
    catalog: Option<Arc<Catalog>>,
}

impl Prepared {
    pub fn is_accelerated(&self) -> bool {
        self.catalog.is_some()
    }
}

pub fn preprocess(ds: &AnchoredDataset, cfg: &LearnerConfig) -> Prepared {
    let catalog = match (cfg.accelerated, ds.bounds()) {
        (true, Some(b)) => Some(Arc::new(Catalog::new(&b, cfg.fragment))),
        _ => None,
    };
    Prepared { catalog }
}

fn admissible(score: &SplitScore, cfg: &LearnerConfig) -> bool {
    score.sizes.0 >= cfg.min_samples_leaf && score.sizes.1 >= cfg.min_samples_leaf
}

fn finalize(best: Option<SplitScore>, cfg: &LearnerConfig) -> Option<SplitScore> {
    best.filter(|s| s.gain >= cfg.min_info_gain)
}

/// Direct search: evaluates each candidate through [`split`].
fn search_direct(ds: &AnchoredDataset, cfg: &LearnerConfig, stats: Option<&SearchStats>) -> Option<SplitScore> {
    let parent = entropy_of(&ds.class_counts(), ds.len() as u64);
    let candidates = keyed_candidates(ds, cfg);
    if let Some(s) = stats {
        s.candidates.fetch_add(candidates.len() as u64, Ordering::Relaxed);
    }
    let best = candidates
        .into_par_iter()
        .map(|(key, decision)| {
            let (yes, no) = partition_counts(ds, &decision).expect("attribute in range");
            let sizes = (yes.iter().sum::<u64>() as usize, no.iter().sum::<u64>() as usize);
            let gain = parent - split_information(&yes, &no);
            SplitScore {
                decision,
                gain,
                sizes,
                key,
            }
        })
        .filter(|s| admissible(s, cfg))
        .map(Some)
        .reduce(|| None, better);
    finalize(best, cfg)
}

/// Best admissible decision at a node, or `None` when no candidate leaves
/// both parts with at least `min_samples_leaf` instances and gains at
/// least `min_info_gain` bits.
pub fn find_best_decision(ds: &AnchoredDataset, cfg: &LearnerConfig) -> Option<SplitScore> {
    let prep = preprocess(ds, cfg);
    find_best_decision_with(ds, cfg, &prep, None)
}

pub fn find_best_decision_with(
    ds: &AnchoredDataset,
    cfg: &LearnerConfig,
    prep: &Prepared,
    stats: Option<&SearchStats>,
) -> Option<SplitScore> {
    if ds.is_empty() {
        return None;
    }
    match &prep.catalog {
        Some(catalog) => {
            let best = engine::search(catalog, ds, cfg, stats);
            finalize(best, cfg)
        }
        None => search_direct(ds, cfg, stats),
    }
}

fn run_in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Learns a tree from a dataset whose instances are anchored at `r0`.
pub fn learn(ds: &AnchoredDataset, cfg: &LearnerConfig) -> Result<SpatialDecisionTree> {
    learn_with_stats(ds, cfg, &SearchStats::default())
}

pub fn learn_with_stats(ds: &AnchoredDataset, cfg: &LearnerConfig, stats: &SearchStats) -> Result<SpatialDecisionTree> {
    if ds.is_empty() {
        return Err(Error::Empty("training dataset"));
    }
    let cfg = cfg.clone().normalized()?;
    let prep = preprocess(ds, &cfg);
    let root = run_in_pool(cfg.workers, || grow(ds, &cfg, &prep, stats, 0))?;
    Ok(SpatialDecisionTree::new(
        root,
        ds.classes().to_vec(),
        ds.n_attributes(),
        cfg.r0_policy.clone(),
    ))
}

fn grow(ds: &AnchoredDataset, cfg: &LearnerConfig, prep: &Prepared, stats: &SearchStats, depth: usize) -> Result<Node> {
    stats.nodes.fetch_add(1, Ordering::Relaxed);
    let counts = ClassCounts::new(ds.class_counts());
    let leaf = |reason| Node::Leaf {
        class: counts.majority(),
        counts: counts.counts().to_vec(),
        reason,
    };
    if entropy(&counts)? <= cfg.max_leaf_entropy {
        return Ok(leaf(StopReason::Pure));
    }
    if ds.len() < 2 * cfg.min_samples_leaf {
        return Ok(leaf(StopReason::TooSmall));
    }
    if cfg.max_depth.is_some_and(|m| depth >= m) {
        return Ok(leaf(StopReason::MaxDepth));
    }
    let Some(best) = find_best_decision_with(ds, cfg, prep, Some(stats)) else {
        return Ok(leaf(StopReason::NoSplit));
    };
    let (yes, no) = match &prep.catalog {
        Some(catalog) => engine::split_with(catalog, ds, &best.decision)?,
        None => split(ds, &best.decision)?,
    };
    let (left, right) = rayon::join(
        || grow(&yes, cfg, prep, stats, depth + 1),
        || grow(&no, cfg, prep, stats, depth + 1),
    );
    Ok(Node::Internal {
        decision: best.decision,
        counts: counts.counts().to_vec(),
        yes: Box::new(left?),
        no: Box::new(right?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SpatialInstance;

    fn tabular(rows: &[(&[f32], usize)], classes: usize) -> AnchoredDataset {
        let items = rows
            .iter()
            .map(|(v, c)| Arc::new(SpatialInstance::tabular(v.to_vec(), *c).unwrap()))
            .collect();
        let names = (0..classes).map(|i| format!("C{}", i + 1)).collect();
        AnchoredDataset::anchor(items, names, &R0Policy::Center).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&ClassCounts::new(vec![10, 10])).unwrap(), 1.0);
        assert_eq!(entropy(&ClassCounts::new(vec![7, 0])).unwrap(), 0.0);
        assert_eq!(entropy(&ClassCounts::new(vec![1, 1, 1, 1])).unwrap(), 2.0);
        assert!(entropy(&ClassCounts::new(vec![0, 0])).is_err());
    }

    #[test]
    fn info_split_and_gain_examples() {
        let rows: Vec<(&[f32], usize)> = (0..10)
            .map(|i| (if i < 5 { &[0.0f32][..] } else { &[1.0f32][..] }, usize::from(i >= 5)))
            .collect();
        let ds = tabular(&rows, 2);
        let sep = Decision::propositional(0, Comparator::Le, 0.5, Gamma::ONE);
        assert_eq!(info_split(&ds, &sep).unwrap(), 0.0);
        assert_eq!(info_gain(&ds, &sep).unwrap(), 1.0);
        let taut = Decision::propositional(0, Comparator::Ge, -1.0, Gamma::ONE);
        assert_eq!(info_split(&ds, &taut).unwrap(), 1.0);
        assert_eq!(info_gain(&ds, &taut).unwrap(), 0.0);
    }

    #[test]
    fn proportion_preserving_split_has_zero_gain() {
        let rows: Vec<(Vec<f32>, usize)> = (0..8).map(|i| (vec![(i / 2) as f32], i % 2)).collect();
        let rows: Vec<(&[f32], usize)> = rows.iter().map(|(v, c)| (&v[..], *c)).collect();
        let ds = tabular(&rows, 2);
        let d = Decision::propositional(0, Comparator::Le, 1.5, Gamma::ONE);
        assert!(info_gain(&ds, &d).unwrap().abs() < 1e-12);
    }

    #[test]
    fn candidate_generation() {
        let ds = tabular(&[(&[1.0], 0), (&[2.0], 1)], 2);
        let cfg = LearnerConfig {
            fragment: FragmentId::Propositional,
            comparators: vec![Comparator::Le],
            gammas: vec![Gamma::ONE],
            threshold_policy: ThresholdPolicy::AllMidpoints,
            ..LearnerConfig::default()
        };
        assert_eq!(
            candidate_decisions(&ds, &cfg),
            vec![Decision::propositional(0, Comparator::Le, 1.5, Gamma::ONE)]
        );
    }

    #[test]
    fn candidate_count_is_product() {
        // 2 attributes with exactly 4 distinct values each -> 3 midpoints
        let rows: Vec<(Vec<f32>, usize)> = (0..4).map(|i| (vec![i as f32, 10.0 + i as f32], i % 2)).collect();
        let rows: Vec<(&[f32], usize)> = rows.iter().map(|(v, c)| (&v[..], *c)).collect();
        let ds = tabular(&rows, 2);
        let cfg = LearnerConfig {
            threshold_policy: ThresholdPolicy::AllMidpoints,
            ..LearnerConfig::default()
        };
        assert_eq!(candidate_decisions(&ds, &cfg).len(), (7 + 1) * 2 * 3 * 2 * 5);
        let first = candidate_decisions(&ds, &cfg);
        assert_eq!(first, candidate_decisions(&ds, &cfg));
    }

    #[test]
    fn threshold_policies() {
        let vals = vec![3.0, 1.0, 2.0, 2.0, 5.0];
        assert_eq!(
            thresholds_from_values(vals.clone(), ThresholdPolicy::AllMidpoints),
            vec![1.5, 2.5, 4.0]
        );
        assert_eq!(
            thresholds_from_values(vals.clone(), ThresholdPolicy::Quantiles(1)),
            vec![2.0]
        );
        assert_eq!(
            thresholds_from_values(vec![1.0, 2.0], ThresholdPolicy::Quantiles(1)),
            vec![1.5]
        );
        let q = thresholds_from_values((0..101).map(f64::from).collect(), ThresholdPolicy::Quantiles(4));
        assert_eq!(q, vec![20.0, 40.0, 60.0, 80.0]);
        assert!(thresholds_from_values(vec![4.0; 10], ThresholdPolicy::AllMidpoints).is_empty());
        assert_eq!(
            thresholds_from_values(vec![4.0; 10], ThresholdPolicy::Quantiles(3)),
            vec![4.0]
        );
    }

    #[test]
    fn best_decision_basics() {
        let cfg = LearnerConfig {
            fragment: FragmentId::Propositional,
            threshold_policy: ThresholdPolicy::AllMidpoints,
            ..LearnerConfig::default()
        };
        let pure: Vec<(&[f32], usize)> = (0..8).map(|_| (&[1.0f32][..], 0)).collect();
        assert!(find_best_decision(&tabular(&pure, 2), &cfg).is_none());

        let rows: Vec<(Vec<f32>, usize)> = (0..10).map(|i| (vec![i as f32], usize::from(i >= 5))).collect();
        let rows: Vec<(&[f32], usize)> = rows.iter().map(|(v, c)| (&v[..], *c)).collect();
        let best = find_best_decision(&tabular(&rows, 2), &cfg).unwrap();
        assert_eq!(best.gain, 1.0);
        assert_eq!(
            best.decision,
            Decision::propositional(0, Comparator::Le, 4.5, "0.6".parse().unwrap())
        );
    }

    #[test]
    fn learn_pure_is_leaf() {
        let rows: Vec<(&[f32], usize)> = (0..6)
            .map(|i| (if i % 2 == 0 { &[1.0f32][..] } else { &[2.0f32][..] }, 1))
            .collect();
        let tree = learn(&tabular(&rows, 2), &LearnerConfig::default()).unwrap();
        assert!(matches!(
            tree.root(),
            Node::Leaf {
                class: 1,
                reason: StopReason::Pure,
                ..
            }
        ));
        let empty = AnchoredDataset::from_parts(Vec::new(), 1, vec!["a".into()]);
        assert!(learn(&empty, &LearnerConfig::default()).is_err());
    }

    #[test]
    fn config_text_round_trip() {
        let cfg = LearnerConfig {
            max_depth: Some(3),
            fragment: FragmentId::Hs2Full,
            r0_policy: R0Policy::Explicit("[1,3]x[1,2]".parse().unwrap()),
            threshold_policy: ThresholdPolicy::AllMidpoints,
            ..LearnerConfig::default()
        };
        let back = LearnerConfig::from_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert!(LearnerConfig::from_text("bogus = 1").is_err());
        assert!(LearnerConfig::from_text("min_samples_leaf = 0").is_err());
    }

    #[test]
    fn majority_ties_to_lowest() {
        assert_eq!(ClassCounts::new(vec![2, 3, 3]).majority(), 1);
        assert_eq!(ClassCounts::new(vec![0, 0]).majority(), 0);
    }
}
