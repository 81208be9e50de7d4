//! Spatial instances, anchoring, γ-relaxed evaluation of decisions on
//! rectangles, and the dataset split entailed by a decision.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{enumerate_related, GridBounds, HyperRectangle};
use crate::logic::{expand_operator, Comparator, Decision, Gamma};

/// A multi-channel image with a class label. Values are stored
/// `[attribute][row][col]`; pixel `(x, y)` is column `x`, row `y`, both
/// 1-based, and axis 0 of every rectangle runs along columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialInstance {
    n_attributes: usize,
    rows: usize,
    cols: usize,
    values: Vec<f32>,
    class_label: usize,
}

impl SpatialInstance {
    pub fn new(n_attributes: usize, rows: usize, cols: usize, values: Vec<f32>, class_label: usize) -> Result<Self> {
        if n_attributes == 0 || rows == 0 || cols == 0 {
            return Err(Error::Empty("instance shape"));
        }
        let expected = n_attributes * rows * cols;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                left: expected,
                right: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { offset: i * 4 });
        }
        Ok(SpatialInstance {
            n_attributes,
            rows,
            cols,
            values,
            class_label,
        })
    }

    /// A 1×1 instance: one value per attribute.
    pub fn tabular(values: Vec<f32>, class_label: usize) -> Result<Self> {
        let n = values.len();
        Self::new(n, 1, 1, values, class_label)
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn class_label(&self) -> usize {
        self.class_label
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn bounds(&self) -> GridBounds {
        GridBounds::planar(self.cols as u32, self.rows as u32).expect("non-empty shape")
    }

    /// Channel `attr` as a row-major `rows × cols` slice.
    pub fn channel(&self, attr: usize) -> &[f32] {
        let plane = self.rows * self.cols;
        &self.values[attr * plane..(attr + 1) * plane]
    }

    /// Value at pixel `(x, y)`, 1-based.
    pub fn value(&self, attr: usize, x: u32, y: u32) -> f32 {
        self.channel(attr)[(y as usize - 1) * self.cols + (x as usize - 1)]
    }

    /// Values of the pixels covered by `r` (`lo <= z < hi` on each axis),
    /// row-major.
    pub fn pixels<'a>(&'a self, attr: usize, r: &HyperRectangle) -> impl Iterator<Item = f32> + 'a {
        let plane = self.channel(attr);
        let (xs, ys) = (r.axis(0), r.axis(1));
        let cols = self.cols;
        (ys.lo()..ys.hi())
            .flat_map(move |y| (xs.lo()..xs.hi()).map(move |x| plane[(y as usize - 1) * cols + (x as usize - 1)]))
    }

    fn check_attr(&self, attr: usize) -> Result<()> {
        if attr >= self.n_attributes {
            return Err(Error::AttributeOutOfRange {
                index: attr,
                count: self.n_attributes,
            });
        }
        Ok(())
    }
}

/// Exact count ratio of satisfying pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PixelFraction {
    pub count: u64,
    pub total: u64,
}

impl PixelFraction {
    pub fn as_f64(self) -> f64 {
        self.count as f64 / self.total as f64
    }
}

/// Fraction of the pixels of `r` whose `attr` value satisfies `cmp a`,
/// by direct scan.
pub fn satisfying_fraction(
    inst: &SpatialInstance,
    r: &HyperRectangle,
    attr: usize,
    cmp: Comparator,
    a: f64,
) -> Result<PixelFraction> {
    inst.check_attr(attr)?;
    let mut count = 0u64;
    let mut total = 0u64;
    for v in inst.pixels(attr, r) {
        total += 1;
        if cmp.holds(v as f64, a) {
            count += 1;
        }
    }
    Ok(PixelFraction { count, total })
}

/// `S, r ⊩ A ⋈_γ a`.
pub fn gamma_satisfies(
    inst: &SpatialInstance,
    r: &HyperRectangle,
    attr: usize,
    cmp: Comparator,
    a: f64,
    gamma: Gamma,
) -> Result<bool> {
    let f = satisfying_fraction(inst, r, attr, cmp, a)?;
    Ok(gamma.admits(f.count, f.total))
}

/// Where the initial reference rectangle sits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum R0Policy {
    /// Unit square over the central pixel (`(N+1)/2` on each axis, rounded down).
    Center,
    /// Unit square over pixel `(1, 1)`.
    Corner,
    Explicit(HyperRectangle),
}

impl R0Policy {
    pub fn resolve(&self, bounds: &GridBounds) -> Result<HyperRectangle> {
        match self {
            R0Policy::Center => Ok(HyperRectangle::unit_2d(
                bounds.extent(0).div_ceil(2),
                bounds.extent(1).div_ceil(2),
            )),
            R0Policy::Corner => Ok(HyperRectangle::unit_2d(1, 1)),
            R0Policy::Explicit(r) => HyperRectangle::new(r.axes().to_vec(), bounds),
        }
    }
}

impl fmt::Display for R0Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            R0Policy::Center => f.write_str("center"),
            R0Policy::Corner => f.write_str("corner"),
            R0Policy::Explicit(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for R0Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "center" => Ok(R0Policy::Center),
            "corner" => Ok(R0Policy::Corner),
            other => other
                .parse::<HyperRectangle>()
                .map(R0Policy::Explicit)
                .map_err(|_| Error::Config(format!("bad r0 policy `{other}`"))),
        }
    }
}

/// An instance together with its current reference rectangles, kept
/// sorted in canonical order and free of duplicates.
#[derive(Clone, Debug)]
pub struct AnchoredInstance {
    pub instance: Arc<SpatialInstance>,
    pub refs: Vec<HyperRectangle>,
}

impl AnchoredInstance {
    pub fn new(instance: Arc<SpatialInstance>, r0: HyperRectangle) -> Self {
        AnchoredInstance {
            instance,
            refs: vec![r0],
        }
    }

    pub fn class_label(&self) -> usize {
        self.instance.class_label
    }
}

#[derive(Clone, Debug)]
pub struct AnchoredDataset {
    items: Vec<AnchoredInstance>,
    n_attributes: usize,
    classes: Vec<String>,
}

impl AnchoredDataset {
    /// Anchors every instance to `{r0}`. Instances must share the number
    /// of attributes and the image shape.
    pub fn anchor(instances: Vec<Arc<SpatialInstance>>, classes: Vec<String>, r0: &R0Policy) -> Result<Self> {
        let first = instances.first().ok_or(Error::Empty("dataset"))?;
        let (n, rows, cols) = (first.n_attributes, first.rows, first.cols);
        let r0 = r0.resolve(&first.bounds())?;
        for inst in &instances {
            if inst.n_attributes != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: inst.n_attributes,
                });
            }
            if (inst.rows, inst.cols) != (rows, cols) {
                return Err(Error::DimensionMismatch {
                    expected: rows * cols,
                    found: inst.rows * inst.cols,
                });
            }
            if inst.class_label >= classes.len() {
                return Err(Error::ClassOutOfRange {
                    index: inst.class_label,
                    count: classes.len(),
                });
            }
        }
        let items = instances
            .into_iter()
            .map(|i| AnchoredInstance::new(i, r0.clone()))
            .collect();
        Ok(AnchoredDataset {
            items,
            n_attributes: n,
            classes,
        })
    }

    pub fn from_parts(items: Vec<AnchoredInstance>, n_attributes: usize, classes: Vec<String>) -> Self {
        AnchoredDataset {
            items,
            n_attributes,
            classes,
        }
    }

    /// Same schema, different items.
    pub fn with_items(&self, items: Vec<AnchoredInstance>) -> Self {
        AnchoredDataset {
            items,
            n_attributes: self.n_attributes,
            classes: self.classes.clone(),
        }
    }

    pub fn items(&self) -> &[AnchoredInstance] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn bounds(&self) -> Option<GridBounds> {
        self.items.first().map(|i| i.instance.bounds())
    }

    pub fn class_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.classes.len()];
        for item in &self.items {
            counts[item.class_label()] += 1;
        }
        counts
    }
}

/// `f(S.refs, W)`: for a propositional decision the refs where the test
/// holds; for a modal one every rectangle reachable from some ref through
/// the operator where the test holds. Sorted, deduplicated.
pub fn new_refs(anchored: &AnchoredInstance, d: &Decision) -> Result<Vec<HyperRectangle>> {
    refs_after(&anchored.instance, &anchored.refs, d)
}

/// [`new_refs`] for a bare instance and ref list.
pub fn refs_after(inst: &SpatialInstance, refs: &[HyperRectangle], d: &Decision) -> Result<Vec<HyperRectangle>> {
    let holds = |s: &HyperRectangle| gamma_satisfies(inst, s, d.attribute, d.comparator, d.threshold, d.gamma);
    match &d.operator {
        None => {
            let mut out = Vec::new();
            for r in refs {
                if holds(r)? {
                    out.push(r.clone());
                }
            }
            Ok(out)
        }
        Some(op) => {
            let bounds = inst.bounds();
            let tuples = expand_operator(op);
            let mut reachable = BTreeSet::new();
            for r in refs {
                for t in &tuples {
                    reachable.extend(enumerate_related(r, t, &bounds));
                }
            }
            let mut out = Vec::new();
            for s in reachable {
                if holds(&s)? {
                    out.push(s);
                }
            }
            Ok(out)
        }
    }
}

/// Partition into `(S_e, S_u)`. Members of `S_e` are re-anchored to their
/// new refs; members of `S_u` keep their refs. Input order is preserved.
pub fn split(ds: &AnchoredDataset, d: &Decision) -> Result<(AnchoredDataset, AnchoredDataset)> {
    let mut yes = Vec::new();
    let mut no = Vec::new();
    for item in ds.items() {
        let refs = new_refs(item, d)?;
        if refs.is_empty() {
            no.push(item.clone());
        } else {
            yes.push(AnchoredInstance {
                instance: Arc::clone(&item.instance),
                refs,
            });
        }
    }
    Ok((ds.with_items(yes), ds.with_items(no)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{enumerate_rectangles, tuple_holds, AllenRelation, RelationTuple};
    use crate::logic::OperatorSpec;

    fn rect(p: &[(u32, u32)]) -> HyperRectangle {
        HyperRectangle::from_pairs(p).unwrap()
    }

    fn grid(rows: usize, cols: usize, vals: &[f32]) -> Arc<SpatialInstance> {
        Arc::new(SpatialInstance::new(1, rows, cols, vals.to_vec(), 0).unwrap())
    }

    #[test]
    fn fraction_examples() {
        let inst = grid(2, 2, &[5.0, 5.0, 5.0, 1.0]);
        let unit = HyperRectangle::unit_2d(1, 1);
        let f = satisfying_fraction(&inst, &unit, 0, Comparator::Ge, 5.0).unwrap();
        assert_eq!((f.count, f.total), (1, 1));
        let all = rect(&[(1, 3), (1, 3)]);
        let f = satisfying_fraction(&inst, &all, 0, Comparator::Ge, 5.0).unwrap();
        assert_eq!((f.count, f.total), (3, 4));
        let f = satisfying_fraction(&inst, &all, 0, Comparator::Ge, f64::NEG_INFINITY).unwrap();
        assert_eq!(f.count, f.total);
        assert!(satisfying_fraction(&inst, &all, 1, Comparator::Ge, 0.0).is_err());
    }

    #[test]
    fn gamma_boundary_inclusive() {
        let inst = grid(2, 2, &[5.0, 5.0, 5.0, 1.0]);
        let all = rect(&[(1, 3), (1, 3)]);
        let sat = |g: &str| gamma_satisfies(&inst, &all, 0, Comparator::Ge, 5.0, g.parse().unwrap()).unwrap();
        assert!(sat("0.7"));
        assert!(!sat("1"));
        assert!(sat("0.75"));
    }

    #[test]
    fn pixel_addressing() {
        // row-major 2 rows × 3 cols
        let inst = grid(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(inst.value(0, 3, 1), 3.0);
        assert_eq!(inst.value(0, 1, 2), 4.0);
        let r = rect(&[(2, 4), (2, 3)]);
        assert_eq!(inst.pixels(0, &r).collect::<Vec<_>>(), vec![5.0, 6.0]);
    }

    #[test]
    fn propositional_refs() {
        let inst = grid(1, 1, &[3.0]);
        let a = AnchoredInstance::new(inst, HyperRectangle::unit_2d(1, 1));
        let yes = Decision::propositional(0, Comparator::Le, 3.0, Gamma::ONE);
        let no = Decision::propositional(0, Comparator::Lt, 3.0, Gamma::ONE);
        assert_eq!(new_refs(&a, &yes).unwrap(), a.refs);
        assert!(new_refs(&a, &no).unwrap().is_empty());
    }

    #[test]
    fn modal_refs_strict_containers_of_center() {
        let inst = grid(3, 3, &[1.0; 9]);
        let center = HyperRectangle::unit_2d(2, 2);
        let a = AnchoredInstance::new(inst, center.clone());
        let t = RelationTuple::new(vec![AllenRelation::DuringInv, AllenRelation::DuringInv]);
        let d = Decision::modal(OperatorSpec::Direct(t.clone()), 0, Comparator::Ge, 0.0, Gamma::ONE);
        let bounds = GridBounds::planar(3, 3).unwrap();
        let expected: Vec<_> = enumerate_rectangles(&bounds)
            .filter(|s| tuple_holds(&t, &center, s).unwrap())
            .collect();
        assert_eq!(new_refs(&a, &d).unwrap(), expected);
        assert_eq!(expected, vec![rect(&[(1, 4), (1, 4)])]);
    }

    #[test]
    fn split_extremes() {
        let items: Vec<_> = (0..4).map(|i| grid(1, 1, &[i as f32])).collect();
        let ds = AnchoredDataset::anchor(items, vec!["c".into()], &R0Policy::Center).unwrap();
        let taut = Decision::propositional(0, Comparator::Ge, f64::NEG_INFINITY, Gamma::ONE);
        let (e, u) = split(&ds, &taut).unwrap();
        assert_eq!((e.len(), u.len()), (4, 0));
        let unsat = Decision::propositional(0, Comparator::Lt, 0.0, Gamma::ONE);
        let (e, u) = split(&ds, &unsat).unwrap();
        assert_eq!((e.len(), u.len()), (0, 4));
        let mid = Decision::propositional(0, Comparator::Le, 1.5, Gamma::ONE);
        let (e, u) = split(&ds, &mid).unwrap();
        let vals = |d: &AnchoredDataset| d.items().iter().map(|i| i.instance.values()[0]).collect::<Vec<_>>();
        assert_eq!(vals(&e), vec![0.0, 1.0]);
        assert_eq!(vals(&u), vec![2.0, 3.0]);
    }

    #[test]
    fn r0_policies() {
        let b = GridBounds::planar(3, 3).unwrap();
        assert_eq!(R0Policy::Center.resolve(&b).unwrap(), HyperRectangle::unit_2d(2, 2));
        let b8 = GridBounds::planar(8, 8).unwrap();
        assert_eq!(R0Policy::Center.resolve(&b8).unwrap(), HyperRectangle::unit_2d(4, 4));
        assert_eq!(R0Policy::Corner.resolve(&b).unwrap(), HyperRectangle::unit_2d(1, 1));
        let p: R0Policy = "[1,3]x[2,4]".parse().unwrap();
        assert!(p.resolve(&b).is_ok());
        assert!("[1,5]x[1,2]".parse::<R0Policy>().unwrap().resolve(&b).is_err());
    }
}
