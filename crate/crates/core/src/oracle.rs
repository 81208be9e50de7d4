//! Naive reference implementations used to check the optimised paths.
//!
//! Nothing here uses the learner's search engine, threshold generation or
//! entropy code; each piece is written out by the most direct route.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Scene, WindowedDataset};
use crate::error::{Error, Result};
use crate::geometry::{classify_pair, enumerate_rectangles, tuple_holds, HyperRectangle, Interval};
use crate::learner::{CandidateKey, LearnerConfig, SplitScore, ThresholdPolicy};
use crate::logic::{expand_operator, operator_set, Decision, OperatorSpec, Rcc8};
use crate::model::{AnchoredDataset, AnchoredInstance, R0Policy, SpatialInstance};
use crate::tree::{Node, SpatialDecisionTree, StopReason};

/// Points of the doubled lattice covered by the closure of `r`, split into
/// interior and boundary.
fn lattice_parts(r: &HyperRectangle, p: &[i64]) -> (bool, bool) {
    let mut closed = true;
    let mut interior = true;
    for (axis, &z) in p.iter().enumerate() {
        let iv = r.axis(axis);
        let (lo, hi) = (2 * iv.lo() as i64, 2 * iv.hi() as i64);
        if z < lo || z > hi {
            closed = false;
        }
        if z <= lo || z >= hi {
            interior = false;
        }
    }
    (interior, closed && !interior)
}

/// RCC8 relation of `r` to `s`, from the four boundary/interior
/// intersection tests evaluated on a half-unit lattice.
pub fn rcc8_classify(r: &HyperRectangle, s: &HyperRectangle) -> Rcc8 {
    let k = r.dims();
    let lo: Vec<i64> = (0..k).map(|a| 2 * r.axis(a).lo().min(s.axis(a).lo()) as i64).collect();
    let hi: Vec<i64> = (0..k).map(|a| 2 * r.axis(a).hi().max(s.axis(a).hi()) as i64).collect();
    let (mut bb, mut ii, mut bi, mut ib) = (false, false, false, false);
    let mut p = lo.clone();
    loop {
        let (ri, rb) = lattice_parts(r, &p);
        let (si, sb) = lattice_parts(s, &p);
        bb |= rb && sb;
        ii |= ri && si;
        bi |= rb && si;
        ib |= ri && sb;
        let mut axis = k;
        loop {
            if axis == 0 {
                return match (bb, ii, bi, ib) {
                    (false, false, false, false) => Rcc8::Dc,
                    (true, false, false, false) => Rcc8::Ec,
                    (true, true, false, false) => Rcc8::Eq,
                    (_, true, true, false) if bb => Rcc8::Tpp,
                    (_, true, true, false) => Rcc8::Ntpp,
                    (_, true, false, true) if bb => Rcc8::TppInv,
                    (_, true, false, true) => Rcc8::NtppInv,
                    _ => Rcc8::Po,
                };
            }
            axis -= 1;
            if p[axis] < hi[axis] {
                p[axis] += 1;
                break;
            }
            p[axis] = lo[axis];
        }
    }
}

fn oracle_thresholds(values: &[f64], policy: ThresholdPolicy) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    match policy {
        ThresholdPolicy::AllMidpoints => {
            let mut out = Vec::new();
            for i in 1..sorted.len() {
                if sorted[i] != sorted[i - 1] {
                    out.push((sorted[i - 1] + sorted[i]) / 2.0);
                }
            }
            out
        }
        ThresholdPolicy::Quantiles(q) => {
            let mut out: Vec<f64> = Vec::new();
            if sorted.is_empty() {
                return out;
            }
            for j in 1..=q {
                let h = (sorted.len() - 1) as f64 * j as f64 / (q + 1) as f64;
                let i = h.floor() as usize;
                let v = if i + 1 < sorted.len() && h > i as f64 {
                    sorted[i] + (h - i as f64) * (sorted[i + 1] - sorted[i])
                } else {
                    sorted[i]
                };
                if out.last() != Some(&v) {
                    out.push(v);
                }
            }
            out
        }
    }
}

fn oracle_entropy(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

fn oracle_holds(inst: &SpatialInstance, s: &HyperRectangle, d: &Decision) -> bool {
    let (mut count, mut total) = (0u64, 0u64);
    for y in s.axis(1).lo()..s.axis(1).hi() {
        for x in s.axis(0).lo()..s.axis(0).hi() {
            total += 1;
            if d.comparator.holds(inst.value(d.attribute, x, y) as f64, d.threshold) {
                count += 1;
            }
        }
    }
    d.gamma.admits(count, total)
}

/// `new_refs` by scanning every rectangle of the grid.
pub fn brute_force_new_refs(item: &AnchoredInstance, d: &Decision) -> Vec<HyperRectangle> {
    let inst = &*item.instance;
    match &d.operator {
        None => item.refs.iter().filter(|r| oracle_holds(inst, r, d)).cloned().collect(),
        Some(op) => {
            let tuples = expand_operator(op);
            enumerate_rectangles(&inst.bounds())
                .filter(|s| {
                    item.refs
                        .iter()
                        .any(|r| tuples.iter().any(|t| tuple_holds(t, r, s).expect("same dims")))
                })
                .filter(|s| oracle_holds(inst, s, d))
                .collect()
        }
    }
}

fn class_counts(items: &[&AnchoredInstance], classes: usize) -> Vec<u64> {
    let mut c = vec![0u64; classes];
    for i in items {
        c[i.class_label()] += 1;
    }
    c
}

/// Exhaustive split search: every candidate, every rectangle.
pub fn brute_force_best_decision(ds: &AnchoredDataset, cfg: &LearnerConfig) -> Option<SplitScore> {
    let l = ds.n_classes();
    let all: Vec<&AnchoredInstance> = ds.items().iter().collect();
    let parent = oracle_entropy(&class_counts(&all, l));
    let mut comparators = cfg.comparators.clone();
    comparators.sort();
    comparators.dedup();
    let mut gammas = cfg.gammas.clone();
    gammas.sort();
    gammas.dedup();
    let mut ops: Vec<Option<OperatorSpec>> = operator_set(cfg.fragment).into_iter().map(Some).collect();
    ops.push(None);
    let mut best: Option<SplitScore> = None;
    for (oi, op) in ops.iter().enumerate() {
        for attr in 0..ds.n_attributes() {
            let pooled: Vec<f64> = ds
                .items()
                .iter()
                .flat_map(|i| i.instance.channel(attr).iter().map(|&v| v as f64))
                .collect();
            for (ti, &t) in oracle_thresholds(&pooled, cfg.threshold_policy).iter().enumerate() {
                for (ci, &c) in comparators.iter().enumerate() {
                    for (gi, &g) in gammas.iter().enumerate() {
                        let d = Decision {
                            operator: op.clone(),
                            attribute: attr,
                            comparator: c,
                            threshold: t,
                            gamma: g,
                        };
                        let (yes, no): (Vec<&AnchoredInstance>, Vec<&AnchoredInstance>) =
                            all.iter().partition(|i| !brute_force_new_refs(i, &d).is_empty());
                        if yes.len() < cfg.min_samples_leaf || no.len() < cfg.min_samples_leaf {
                            continue;
                        }
                        let n = all.len() as f64;
                        let info = yes.len() as f64 / n * oracle_entropy(&class_counts(&yes, l))
                            + no.len() as f64 / n * oracle_entropy(&class_counts(&no, l));
                        let gain = parent - info;
                        if best.as_ref().is_none_or(|b| gain > b.gain) {
                            best = Some(SplitScore {
                                decision: d,
                                gain,
                                sizes: (yes.len(), no.len()),
                                key: CandidateKey {
                                    operator: oi,
                                    attribute: attr,
                                    threshold: ti,
                                    comparator: ci,
                                    gamma: gi,
                                },
                            });
                        }
                    }
                }
            }
        }
    }
    best.filter(|b| b.gain >= cfg.min_info_gain)
}

/// Binary C4.5 over tabular (1×1) instances with numeric thresholds.
pub fn reference_c45(ds: &WindowedDataset, cfg: &LearnerConfig) -> Result<SpatialDecisionTree> {
    if ds.is_empty() {
        return Err(Error::Empty("training dataset"));
    }
    if let Some(bad) = ds.instances.iter().find(|i| i.rows() != 1 || i.cols() != 1) {
        return Err(Error::InvalidBounds(format!(
            "reference C4.5 needs 1x1 instances, got {}x{}",
            bad.rows(),
            bad.cols()
        )));
    }
    let rows: Vec<&SpatialInstance> = ds.instances.iter().map(|i| &**i).collect();
    let root = c45_grow(&rows, ds.classes.len(), ds.n_attributes(), cfg, 0);
    Ok(SpatialDecisionTree::new(
        root,
        ds.classes.clone(),
        ds.n_attributes(),
        cfg.r0_policy.clone(),
    ))
}

fn c45_grow(rows: &[&SpatialInstance], l: usize, n_attr: usize, cfg: &LearnerConfig, depth: usize) -> Node {
    let mut counts = vec![0u64; l];
    for r in rows {
        counts[r.class_label()] += 1;
    }
    let mut majority = 0;
    for c in 0..l {
        if counts[c] > counts[majority] {
            majority = c;
        }
    }
    let h = oracle_entropy(&counts);
    let leaf = |reason| Node::Leaf {
        class: majority,
        counts: counts.clone(),
        reason,
    };
    if h <= cfg.max_leaf_entropy {
        return leaf(StopReason::Pure);
    }
    if rows.len() < 2 * cfg.min_samples_leaf {
        return leaf(StopReason::TooSmall);
    }
    if cfg.max_depth.is_some_and(|m| depth >= m) {
        return leaf(StopReason::MaxDepth);
    }
    let mut comparators = cfg.comparators.clone();
    comparators.sort();
    comparators.dedup();
    let mut gammas = cfg.gammas.clone();
    gammas.sort();
    gammas.dedup();
    let mut best: Option<(f64, Decision)> = None;
    for attr in 0..n_attr {
        let values: Vec<f64> = rows.iter().map(|r| r.values()[attr] as f64).collect();
        for t in oracle_thresholds(&values, cfg.threshold_policy) {
            for &c in &comparators {
                for &g in &gammas {
                    let mut yes = vec![0u64; l];
                    let mut no = vec![0u64; l];
                    for (r, &v) in rows.iter().zip(&values) {
                        let count = u64::from(c.holds(v, t));
                        if g.admits(count, 1) {
                            yes[r.class_label()] += 1;
                        } else {
                            no[r.class_label()] += 1;
                        }
                    }
                    let (ny, nn): (u64, u64) = (yes.iter().sum(), no.iter().sum());
                    if (ny as usize) < cfg.min_samples_leaf || (nn as usize) < cfg.min_samples_leaf {
                        continue;
                    }
                    let n = rows.len() as f64;
                    let gain = h - (ny as f64 / n * oracle_entropy(&yes) + nn as f64 / n * oracle_entropy(&no));
                    if best.as_ref().is_none_or(|(b, _)| gain > *b) {
                        best = Some((gain, Decision::propositional(attr, c, t, g)));
                    }
                }
            }
        }
    }
    let Some((gain, decision)) = best.filter(|(g, _)| *g >= cfg.min_info_gain) else {
        return leaf(StopReason::NoSplit);
    };
    let _ = gain;
    let (yes, no): (Vec<&SpatialInstance>, Vec<&SpatialInstance>) = rows.iter().partition(|r| {
        let v = r.values()[decision.attribute] as f64;
        decision
            .gamma
            .admits(u64::from(decision.comparator.holds(v, decision.threshold)), 1)
    });
    Node::Internal {
        counts,
        yes: Box::new(c45_grow(&yes, l, n_attr, cfg, depth + 1)),
        no: Box::new(c45_grow(&no, l, n_attr, cfg, depth + 1)),
        decision,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlantKind {
    /// The high region strictly contains the low region.
    Contained,
    /// The high region is a one-pixel-thick strip, so it cannot strictly
    /// contain anything.
    Strip,
    /// The low region lies outside the high region.
    Apart,
}

/// The two planted regions of one generated image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plant {
    pub kind: PlantKind,
    /// Channel 0 set to [`ContainmentTask::HIGH`].
    pub high: HyperRectangle,
    /// Channel 1 set to [`ContainmentTask::LOW`].
    pub low: HyperRectangle,
}

#[derive(Clone, Debug)]
pub struct ContainmentTask {
    pub dataset: WindowedDataset,
    pub plants: Vec<Plant>,
}

impl ContainmentTask {
    pub const POSITIVE: usize = 0;
    pub const NEGATIVE: usize = 1;
    pub const HIGH: f32 = 9.0;
    pub const LOW: f32 = 0.0;

    /// Whether image `i` has a channel-0 region at `HIGH` strictly
    /// containing a channel-1 region at `LOW`, checked on its plants.
    pub fn is_positive(&self, i: usize) -> bool {
        let p = &self.plants[i];
        let inst = &self.dataset.instances[i];
        let strictly_inside = classify_pair(&p.high, &p.low)
            .map(|t| t.to_string() == "(D,D)")
            .unwrap_or(false);
        let all = |r: &HyperRectangle, attr: usize, v: f32| {
            (r.axis(1).lo()..r.axis(1).hi())
                .all(|y| (r.axis(0).lo()..r.axis(0).hi()).all(|x| inst.value(attr, x, y) == v))
        };
        strictly_inside && all(&p.high, 0, Self::HIGH) && all(&p.low, 1, Self::LOW)
    }
}

fn pick(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> u32 {
    rng.random_range(lo..=hi)
}

fn rect(x: (u32, u32), y: (u32, u32)) -> HyperRectangle {
    HyperRectangle::from_pairs(&[x, y]).expect("generated in bounds")
}

fn covers(r: &HyperRectangle, x: u32, y: u32) -> bool {
    let (a, b) = (r.axis(0), r.axis(1));
    a.lo() <= x && x < a.hi() && b.lo() <= y && y < b.hi()
}

fn disjoint(a: Interval, b: Interval) -> bool {
    a.hi() <= b.lo() || b.hi() <= a.lo()
}

/// A high region whose extent strictly contains centre `c` on both axes.
fn proper_high(rng: &mut ChaCha8Rng, size: u32, c: u32) -> HyperRectangle {
    let mut side = || (pick(rng, 1, c - 1), pick(rng, c + 2, size + 1));
    let x = side();
    let y = side();
    rect(x, y)
}

/// A `w`×`h` low region placed uniformly at random.
fn low_region(rng: &mut ChaCha8Rng, size: u32) -> HyperRectangle {
    let w = pick(rng, 1, 2);
    let h = pick(rng, 1, 2);
    let x = pick(rng, 1, size + 1 - w);
    let y = pick(rng, 1, size + 1 - h);
    rect((x, x + w), (y, y + h))
}

fn plant(rng: &mut ChaCha8Rng, kind: PlantKind, size: u32) -> Plant {
    let c = size.div_ceil(2);
    loop {
        let (high, low) = match kind {
            PlantKind::Contained | PlantKind::Apart => (proper_high(rng, size, c), low_region(rng, size)),
            PlantKind::Strip => {
                let len = pick(rng, 3, size);
                let start = pick(rng, c.saturating_sub(len - 1).max(1), c.min(size + 1 - len));
                let along = (start, start + len);
                let across = (c, c + 1);
                let high = if rng.random_bool(0.5) {
                    rect(along, across)
                } else {
                    rect(across, along)
                };
                (high, low_region(rng, size))
            }
        };
        if covers(&low, c, c) {
            continue;
        }
        let ok = match kind {
            PlantKind::Contained => (0..2).all(|a| {
                let (h, l) = (high.axis(a), low.axis(a));
                h.lo() < l.lo() && l.hi() < h.hi()
            }),
            PlantKind::Apart => (0..2).any(|a| disjoint(high.axis(a), low.axis(a))),
            PlantKind::Strip => true,
        };
        if ok {
            return Plant { kind, high, low };
        }
    }
}

/// Two-channel `size`×`size` images, alternating positive and negative.
///
/// Every image has a channel-0 region at `HIGH` over its centre pixel and
/// a small channel-1 region at `LOW` away from the centre; backgrounds
/// draw channel 0 from {0..3} and channel 1 from {6..9}. Positives nest
/// the low region strictly inside the high one. Negatives alternate
/// between a one-pixel-thick high strip and a low region outside the high
/// region. The centre pixel therefore has the same distribution in both
/// classes.
pub fn generate_containment_task(n: usize, size: usize, seed: u64) -> Result<ContainmentTask> {
    if n < 2 || size < 4 {
        return Err(Error::Config(format!(
            "containment task needs n >= 2 and size >= 4, got {n}, {size}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = size as u32;
    let plane = size * size;
    let mut instances = Vec::with_capacity(n);
    let mut plants = Vec::with_capacity(n);
    for i in 0..n {
        let kind = match (i % 2, (i / 2) % 2) {
            (0, _) => PlantKind::Contained,
            (_, 0) => PlantKind::Strip,
            _ => PlantKind::Apart,
        };
        let p = plant(&mut rng, kind, s);
        let mut values = vec![0f32; 2 * plane];
        for y in 1..=s {
            for x in 1..=s {
                let k = (y as usize - 1) * size + (x as usize - 1);
                values[k] = if covers(&p.high, x, y) {
                    ContainmentTask::HIGH
                } else {
                    rng.random_range(0..=3) as f32
                };
                values[plane + k] = if covers(&p.low, x, y) {
                    ContainmentTask::LOW
                } else {
                    rng.random_range(6..=9) as f32
                };
            }
        }
        let class = if kind == PlantKind::Contained {
            ContainmentTask::POSITIVE
        } else {
            ContainmentTask::NEGATIVE
        };
        instances.push(Arc::new(SpatialInstance::new(2, size, size, values, class)?));
        plants.push(p);
    }
    let mut dataset = WindowedDataset::new(instances, vec!["contained".into(), "not_contained".into()])?;
    dataset.seed = Some(seed);
    Ok(ContainmentTask { dataset, plants })
}

/// A toy land-cover scene: the grid is tiled with rectangular fields of
/// side 3 to 8, each given a random class. Class `k` has band means
/// `20k + 7a` (band `a`), pixel noise of ±`noise`, and odd classes add a
/// checkerboard texture of the same amplitude to band 0. About one pixel
/// in ten is left unlabelled. Values are whole numbers.
pub fn synthetic_scene(
    rows: usize,
    cols: usize,
    n_attributes: usize,
    classes: usize,
    noise: u32,
    seed: u64,
) -> Result<Scene> {
    if classes == 0 || n_attributes == 0 {
        return Err(Error::Config(
            "synthetic scene needs at least one class and band".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = vec![0usize; rows * cols];
    let mut r = 0;
    while r < rows {
        let h = rng.random_range(3..=8).min(rows - r);
        let mut c = 0;
        while c < cols {
            let w = rng.random_range(3..=8).min(cols - c);
            let k = rng.random_range(0..classes);
            for y in r..r + h {
                field[y * cols + c..y * cols + c + w].fill(k);
            }
            c += w;
        }
        r += h;
    }
    let plane = rows * cols;
    let mut values = vec![0f32; n_attributes * plane];
    let mut mask = vec![0i32; plane];
    for p in 0..plane {
        let k = field[p];
        for a in 0..n_attributes {
            let mut v = (20 * k + 7 * a) as i64 + rng.random_range(-(noise as i64)..=noise as i64);
            if a == 0 && k % 2 == 1 && (p / cols + p % cols).is_multiple_of(2) {
                v += noise as i64;
            }
            values[a * plane + p] = v as f32;
        }
        if rng.random_range(0..10) > 0 {
            mask[p] = k as i32 + 1;
        }
    }
    let names = (1..=classes).map(|k| format!("class{k}")).collect();
    Scene::new(
        format!("synthetic{seed}"),
        n_attributes,
        rows,
        cols,
        values,
        mask,
        names,
    )
}

/// Anchors a windowed dataset at `r0` for the learner.
pub fn anchor(ds: &WindowedDataset, r0: &R0Policy) -> Result<AnchoredDataset> {
    AnchoredDataset::anchor(ds.instances.clone(), ds.classes.clone(), r0)
}
