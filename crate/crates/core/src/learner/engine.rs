//! Split search over a precomputed rectangle catalog.
//!
//! For a fixed attribute, operator and γ, whether `⟨X⟩(A ≤_γ a)` holds at
//! an instance is monotone in `a`: it holds exactly when `a` reaches the
//! smallest γ-order statistic over the accessible rectangles. Each
//! instance therefore contributes a contiguous range of thresholds to
//! every candidate family, and class counts for all thresholds come out
//! of one prefix sum.

use std::sync::atomic::Ordering;

use rayon::prelude::*;

use super::{
    attribute_thresholds, better, entropy_of, split_information, CandidateKey, LearnerConfig, SearchStats, SplitScore,
};
use crate::error::Result;
use crate::geometry::{allen_relation, enumerate_rectangles, intervals, GridBounds, HyperRectangle, RectangleIndex};
use crate::logic::{expand_operator, operator_set, Comparator, Decision, FragmentId, OperatorSpec};
use crate::model::{gamma_satisfies, AnchoredDataset, AnchoredInstance};

const ALLEN: usize = 13;

/// Every rectangle of a grid with its per-axis interval indices, the
/// pairwise Allen relation of intervals on each axis, and the tuple masks
/// of a fragment's operators.
#[derive(Debug)]
pub struct Catalog {
    index: RectangleIndex,
    rects: Vec<HyperRectangle>,
    dims: usize,
    /// `axis_idx[s * dims + axis]`.
    axis_idx: Vec<u32>,
    interval_counts: Vec<usize>,
    /// `axis_rel[axis][i * n + j]` = relation code of interval i to j.
    axis_rel: Vec<Vec<u8>>,
    words: usize,
    op_masks: Vec<Vec<u64>>,
}

impl Catalog {
    pub fn new(bounds: &GridBounds, fragment: FragmentId) -> Self {
        let index = RectangleIndex::new(bounds);
        let rects: Vec<HyperRectangle> = enumerate_rectangles(bounds).collect();
        let dims = bounds.dims();
        let mut axis_idx = Vec::with_capacity(rects.len() * dims);
        for r in &rects {
            for (axis, &iv) in r.axes().iter().enumerate() {
                axis_idx.push(index.interval_index(axis, iv) as u32);
            }
        }
        let mut interval_counts = Vec::new();
        let mut axis_rel = Vec::new();
        for axis in 0..dims {
            let ivs: Vec<_> = intervals(bounds.extent(axis)).collect();
            interval_counts.push(ivs.len());
            let mut table = Vec::with_capacity(ivs.len() * ivs.len());
            for &a in &ivs {
                for &b in &ivs {
                    table.push(allen_relation(a, b).index() as u8);
                }
            }
            axis_rel.push(table);
        }
        let codes = ALLEN.pow(dims as u32);
        let words = codes.div_ceil(64);
        let op_masks = operator_set(fragment).iter().map(|op| mask_of(op, words)).collect();
        Catalog {
            index,
            rects,
            dims,
            axis_idx,
            interval_counts,
            axis_rel,
            words,
            op_masks,
        }
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn operator_count(&self) -> usize {
        self.op_masks.len()
    }

    /// Tuple code of `rects[r]` to `rects[s]`.
    fn code(&self, r: usize, s: usize) -> usize {
        let mut code = 0;
        for axis in 0..self.dims {
            let n = self.interval_counts[axis];
            let i = self.axis_idx[r * self.dims + axis] as usize;
            let j = self.axis_idx[s * self.dims + axis] as usize;
            code = code * ALLEN + self.axis_rel[axis][i * n + j] as usize;
        }
        code
    }

    fn ref_indices(&self, item: &AnchoredInstance) -> Vec<u32> {
        let mut v: Vec<u32> = item.refs.iter().map(|r| self.index.index_of(r) as u32).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Bitset of the tuple codes relating some ref to `s`.
    fn reach_into(&self, refs: &[u32], s: usize, bits: &mut [u64]) {
        bits.fill(0);
        for &r in refs {
            let c = self.code(r as usize, s);
            bits[c / 64] |= 1 << (c % 64);
        }
    }

    fn access(&self, item: &AnchoredInstance) -> Access {
        let refs = self.ref_indices(item);
        let mut offsets = Vec::with_capacity(self.rects.len() + 1);
        let mut ops = Vec::new();
        let mut bits = vec![0u64; self.words];
        offsets.push(0u32);
        for s in 0..self.rects.len() {
            self.reach_into(&refs, s, &mut bits);
            for (oi, mask) in self.op_masks.iter().enumerate() {
                if intersects(mask, &bits) {
                    ops.push(oi as u16);
                }
            }
            offsets.push(ops.len() as u32);
        }
        Access { offsets, ops, refs }
    }
}

fn mask_of(op: &OperatorSpec, words: usize) -> Vec<u64> {
    let mut mask = vec![0u64; words];
    for t in expand_operator(op) {
        let c = t.code();
        mask[c / 64] |= 1 << (c % 64);
    }
    mask
}

fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// Operators through which each rectangle is reachable from an
/// instance's refs, in compressed rows.
struct Access {
    offsets: Vec<u32>,
    ops: Vec<u16>,
    refs: Vec<u32>,
}

impl Access {
    fn ops_of(&self, s: usize) -> &[u16] {
        &self.ops[self.offsets[s] as usize..self.offsets[s + 1] as usize]
    }
}

/// Class-count accumulator over `(family, threshold)` cells, kept as
/// differences along the threshold axis.
struct Tally {
    cells: Vec<i64>,
    thresholds: usize,
    classes: usize,
}

impl Tally {
    fn new(families: usize, thresholds: usize, classes: usize) -> Self {
        Tally {
            cells: vec![0; families * (thresholds + 1) * classes],
            thresholds,
            classes,
        }
    }

    fn add_range(&mut self, family: usize, start: usize, end: usize, class: usize) {
        if start >= end {
            return;
        }
        let base = family * (self.thresholds + 1);
        self.cells[(base + start) * self.classes + class] += 1;
        self.cells[(base + end) * self.classes + class] -= 1;
    }
}

/// Yes-branch threshold range of a monotone comparator given the critical
/// order statistics of an instance.
fn monotone_range(cmp: Comparator, ts: &[f64], lo: f64, hi: f64) -> (usize, usize) {
    let n = ts.len();
    match cmp {
        Comparator::Le => (ts.partition_point(|&x| x < lo), n),
        Comparator::Lt => (ts.partition_point(|&x| x <= lo), n),
        Comparator::Ge => (0, ts.partition_point(|&x| x <= hi)),
        Comparator::Gt => (0, ts.partition_point(|&x| x < hi)),
        Comparator::Eq | Comparator::Ne => unreachable!("not monotone"),
    }
}

pub(super) fn search(
    cat: &Catalog,
    ds: &AnchoredDataset,
    cfg: &LearnerConfig,
    stats: Option<&SearchStats>,
) -> Option<SplitScore> {
    let access: Vec<Access> = ds.items().par_iter().map(|it| cat.access(it)).collect();
    (0..ds.n_attributes())
        .into_par_iter()
        .map(|a| search_attribute(cat, ds, cfg, &access, a, stats))
        .reduce(|| None, better)
}

#[allow(clippy::needless_range_loop)]
fn search_attribute(
    cat: &Catalog,
    ds: &AnchoredDataset,
    cfg: &LearnerConfig,
    access: &[Access],
    attr: usize,
    stats: Option<&SearchStats>,
) -> Option<SplitScore> {
    let ts = attribute_thresholds(ds, attr, cfg.threshold_policy);
    if ts.is_empty() {
        return None;
    }
    let n_thr = ts.len();
    let prop = cat.operator_count();
    let n_ops = prop + 1;
    let cmps = &cfg.comparators;
    let gammas = &cfg.gammas;
    let (nc, ng) = (cmps.len(), gammas.len());
    let classes = ds.n_classes();
    let families = n_ops * nc * ng;
    if let Some(s) = stats {
        s.candidates.fetch_add((families * n_thr) as u64, Ordering::Relaxed);
    }
    let pointwise: Vec<usize> = (0..nc)
        .filter(|&c| matches!(cmps[c], Comparator::Eq | Comparator::Ne))
        .collect();

    let mut tally = Tally::new(families, n_thr, classes);
    let mut lo = vec![f64::INFINITY; n_ops * ng];
    let mut hi = vec![f64::NEG_INFINITY; n_ops * ng];
    let mut marks = vec![false; if pointwise.is_empty() { 0 } else { families * n_thr }];
    let mut vals: Vec<f64> = Vec::new();
    let mut reached: Vec<u16> = Vec::new();

    for (item, acc) in ds.items().iter().zip(access) {
        let class = item.class_label();
        lo.fill(f64::INFINITY);
        hi.fill(f64::NEG_INFINITY);
        marks.fill(false);
        let mut next_ref = 0;
        for s in 0..cat.len() {
            reached.clear();
            reached.extend_from_slice(acc.ops_of(s));
            if next_ref < acc.refs.len() && acc.refs[next_ref] as usize == s {
                reached.push(prop as u16);
                next_ref += 1;
            }
            if reached.is_empty() {
                continue;
            }
            vals.clear();
            vals.extend(item.instance.pixels(attr, &cat.rects[s]).map(f64::from));
            vals.sort_by(f64::total_cmp);
            let total = vals.len();
            for (g, gamma) in gammas.iter().enumerate() {
                let need = gamma.required(total as u64) as usize;
                let (lk, hk) = (vals[need - 1], vals[total - need]);
                for &op in &reached {
                    let cell = op as usize * ng + g;
                    lo[cell] = lo[cell].min(lk);
                    hi[cell] = hi[cell].max(hk);
                }
            }
            if !pointwise.is_empty() {
                for (t, &a) in ts.iter().enumerate() {
                    let eq = vals.partition_point(|&v| v <= a) - vals.partition_point(|&v| v < a);
                    for &c in &pointwise {
                        let count = if cmps[c] == Comparator::Eq { eq } else { total - eq };
                        for (g, gamma) in gammas.iter().enumerate() {
                            if gamma.admits(count as u64, total as u64) {
                                for &op in &reached {
                                    let fam = (op as usize * nc + c) * ng + g;
                                    marks[fam * n_thr + t] = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        for op in 0..n_ops {
            for (c, &cmp) in cmps.iter().enumerate() {
                for g in 0..ng {
                    let fam = (op * nc + c) * ng + g;
                    if matches!(cmp, Comparator::Eq | Comparator::Ne) {
                        for t in 0..n_thr {
                            if marks[fam * n_thr + t] {
                                tally.add_range(fam, t, t + 1, class);
                            }
                        }
                    } else {
                        let cell = op * ng + g;
                        let (start, end) = monotone_range(cmp, &ts, lo[cell], hi[cell]);
                        tally.add_range(fam, start, end, class);
                    }
                }
            }
        }
    }

    let node_counts = ds.class_counts();
    let n = ds.len() as u64;
    let parent = entropy_of(&node_counts, n);
    let ops = operator_set(cfg.fragment);
    let mut best: Option<SplitScore> = None;
    let mut yes = vec![0i64; classes];
    let mut yes_u = vec![0u64; classes];
    let mut no_u = vec![0u64; classes];
    for op in 0..n_ops {
        for c in 0..nc {
            for g in 0..ng {
                let fam = (op * nc + c) * ng + g;
                yes.fill(0);
                for t in 0..n_thr {
                    let row = (fam * (n_thr + 1) + t) * classes;
                    for k in 0..classes {
                        yes[k] += tally.cells[row + k];
                        yes_u[k] = yes[k] as u64;
                        no_u[k] = node_counts[k] - yes_u[k];
                    }
                    let ne: u64 = yes_u.iter().sum();
                    let nu = n - ne;
                    if (ne as usize) < cfg.min_samples_leaf || (nu as usize) < cfg.min_samples_leaf {
                        continue;
                    }
                    let gain = parent - split_information(&yes_u, &no_u);
                    let key = CandidateKey {
                        operator: op,
                        attribute: attr,
                        threshold: t,
                        comparator: c,
                        gamma: g,
                    };
                    let beats = match &best {
                        None => true,
                        Some(b) => gain > b.gain || (gain == b.gain && key < b.key),
                    };
                    if beats {
                        best = Some(SplitScore {
                            decision: Decision {
                                operator: ops.get(op).cloned(),
                                attribute: attr,
                                comparator: cmps[c],
                                threshold: ts[t],
                                gamma: gammas[g],
                            },
                            gain,
                            sizes: (ne as usize, nu as usize),
                            key,
                        });
                    }
                }
            }
        }
    }
    best
}

/// Same partition as [`crate::model::split`], with reachability read from
/// the catalog.
pub(super) fn split_with(
    cat: &Catalog,
    ds: &AnchoredDataset,
    d: &Decision,
) -> Result<(AnchoredDataset, AnchoredDataset)> {
    let mask = d.operator.as_ref().map(|op| mask_of(op, cat.words));
    let refs: Vec<Result<Vec<HyperRectangle>>> = ds
        .items()
        .par_iter()
        .map(|item| {
            let inst = &*item.instance;
            let holds = |s: &HyperRectangle| gamma_satisfies(inst, s, d.attribute, d.comparator, d.threshold, d.gamma);
            let mut out = Vec::new();
            match &mask {
                None => {
                    for r in &item.refs {
                        if holds(r)? {
                            out.push(r.clone());
                        }
                    }
                }
                Some(mask) => {
                    let refs = cat.ref_indices(item);
                    let mut bits = vec![0u64; cat.words];
                    for s in 0..cat.len() {
                        cat.reach_into(&refs, s, &mut bits);
                        if intersects(mask, &bits) && holds(&cat.rects[s])? {
                            out.push(cat.rects[s].clone());
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut yes = Vec::new();
    let mut no = Vec::new();
    for (item, r) in ds.items().iter().zip(refs) {
        let r = r?;
        if r.is_empty() {
            no.push(item.clone());
        } else {
            yes.push(AnchoredInstance {
                instance: item.instance.clone(),
                refs: r,
            });
        }
    }
    Ok((ds.with_items(yes), ds.with_items(no)))
}
