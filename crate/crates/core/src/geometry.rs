//! Intervals and hyperrectangles on a finite discrete grid, and the
//! thirteen Allen relations that relate them axis by axis.
//!
//! Pixels sit at integer coordinates `1..=N` on an axis of extent `N`;
//! interval endpoints range over `1..=N+1`, and an interval `[lo,hi]`
//! covers the pixels `lo <= z < hi`. The unit interval over pixel `z` is
//! therefore `[z,z+1]`.
//!
//! Relations follow the convention `a R_X b`: the tag names where `b`
//! lies relative to `a`. For example `a R_D b` means `b` is strictly
//! inside `a`, and `a R_A b` means `b` starts where `a` ends.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Pixel counts per axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridBounds {
    extents: Vec<u32>,
}

impl GridBounds {
    pub fn new(extents: Vec<u32>) -> Result<Self> {
        if extents.is_empty() {
            return Err(Error::InvalidBounds("at least one axis is required".into()));
        }
        if let Some(axis) = extents.iter().position(|&e| e == 0) {
            return Err(Error::InvalidBounds(format!("axis {axis} has extent 0")));
        }
        Ok(GridBounds { extents })
    }

    /// Two-dimensional bounds; axis 0 runs along columns, axis 1 along rows.
    pub fn planar(cols: u32, rows: u32) -> Result<Self> {
        Self::new(vec![cols, rows])
    }

    pub fn dims(&self) -> usize {
        self.extents.len()
    }

    pub fn extent(&self, axis: usize) -> u32 {
        self.extents[axis]
    }

    pub fn extents(&self) -> &[u32] {
        &self.extents
    }

    /// Number of intervals on one axis: `N(N+1)/2`.
    pub fn interval_count(&self, axis: usize) -> usize {
        let n = self.extents[axis] as usize;
        n * (n + 1) / 2
    }

    pub fn rectangle_count(&self) -> usize {
        (0..self.dims()).map(|a| self.interval_count(a)).product()
    }

    pub fn contains(&self, r: &HyperRectangle) -> bool {
        r.dims() == self.dims() && r.axes().iter().zip(&self.extents).all(|(iv, &e)| iv.hi <= e + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    lo: u32,
    hi: u32,
}

impl Interval {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo < 1 || lo >= hi {
            return Err(Error::InvalidInterval {
                axis: 0,
                lo,
                hi,
                extent: 0,
            });
        }
        Ok(Interval { lo, hi })
    }

    /// The unit interval covering pixel `z`.
    pub fn unit(z: u32) -> Self {
        debug_assert!(z >= 1);
        Interval { lo: z, hi: z + 1 }
    }

    pub(crate) const fn raw(lo: u32, hi: u32) -> Self {
        Interval { lo, hi }
    }

    pub fn lo(&self) -> u32 {
        self.lo
    }

    pub fn hi(&self) -> u32 {
        self.hi
    }

    /// Pixels covered.
    pub fn len(&self) -> u32 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Axis-aligned product of intervals. The derived ordering is the
/// canonical one: lexicographic on `(lo1, hi1, lo2, hi2, ...)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperRectangle {
    axes: Vec<Interval>,
}

impl HyperRectangle {
    pub fn new(axes: Vec<Interval>, bounds: &GridBounds) -> Result<Self> {
        if axes.len() != bounds.dims() {
            return Err(Error::DimensionMismatch {
                expected: bounds.dims(),
                found: axes.len(),
            });
        }
        for (axis, (iv, &extent)) in axes.iter().zip(bounds.extents()).enumerate() {
            if iv.hi > extent + 1 {
                return Err(Error::InvalidInterval {
                    axis,
                    lo: iv.lo,
                    hi: iv.hi,
                    extent,
                });
            }
        }
        Ok(HyperRectangle { axes })
    }

    /// Rectangle from `(lo, hi)` pairs without a bounds check.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Result<Self> {
        let axes = pairs
            .iter()
            .enumerate()
            .map(|(axis, &(lo, hi))| {
                Interval::new(lo, hi).map_err(|_| Error::InvalidInterval {
                    axis,
                    lo,
                    hi,
                    extent: 0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HyperRectangle { axes })
    }

    pub(crate) fn from_axes_unchecked(axes: Vec<Interval>) -> Self {
        HyperRectangle { axes }
    }

    /// The unit square over pixel `(x, y)` (1-based column, row).
    pub fn unit_2d(x: u32, y: u32) -> Self {
        HyperRectangle {
            axes: vec![Interval::unit(x), Interval::unit(y)],
        }
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> Interval {
        self.axes[i]
    }

    /// Number of pixels covered.
    pub fn area(&self) -> u64 {
        self.axes.iter().map(|iv| iv.len() as u64).product()
    }
}

impl fmt::Display for HyperRectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.axes.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl FromStr for HyperRectangle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            message: format!("bad rectangle `{s}`"),
        };
        let pairs = s
            .trim()
            .split('x')
            .map(|part| {
                let inner = part
                    .trim()
                    .strip_prefix('[')
                    .and_then(|p| p.strip_suffix(']'))
                    .ok_or_else(bad)?;
                let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
                let lo = lo.trim().parse().map_err(|_| bad())?;
                let hi = hi.trim().parse().map_err(|_| bad())?;
                Ok((lo, hi))
            })
            .collect::<Result<Vec<_>>>()?;
        HyperRectangle::from_pairs(&pairs)
    }
}

/// The thirteen Allen relations, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AllenRelation {
    After,
    Later,
    Begins,
    Ends,
    During,
    Overlaps,
    AfterInv,
    LaterInv,
    BeginsInv,
    EndsInv,
    DuringInv,
    OverlapsInv,
    Equal,
}

impl AllenRelation {
    pub const ALL: [AllenRelation; 13] = [
        AllenRelation::After,
        AllenRelation::Later,
        AllenRelation::Begins,
        AllenRelation::Ends,
        AllenRelation::During,
        AllenRelation::Overlaps,
        AllenRelation::AfterInv,
        AllenRelation::LaterInv,
        AllenRelation::BeginsInv,
        AllenRelation::EndsInv,
        AllenRelation::DuringInv,
        AllenRelation::OverlapsInv,
        AllenRelation::Equal,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn inverse(self) -> Self {
        use AllenRelation::*;
        match self {
            After => AfterInv,
            Later => LaterInv,
            Begins => BeginsInv,
            Ends => EndsInv,
            During => DuringInv,
            Overlaps => OverlapsInv,
            AfterInv => After,
            LaterInv => Later,
            BeginsInv => Begins,
            EndsInv => Ends,
            DuringInv => During,
            OverlapsInv => Overlaps,
            Equal => Equal,
        }
    }

    /// ASCII tag; inverses carry an `i` suffix.
    pub fn tag(self) -> &'static str {
        use AllenRelation::*;
        match self {
            After => "A",
            Later => "L",
            Begins => "B",
            Ends => "E",
            During => "D",
            Overlaps => "O",
            AfterInv => "Ai",
            LaterInv => "Li",
            BeginsInv => "Bi",
            EndsInv => "Ei",
            DuringInv => "Di",
            OverlapsInv => "Oi",
            Equal => "=",
        }
    }

    /// Tag with a combining overline on inverses (`Ā`).
    pub fn symbol(self) -> String {
        if self.index() >= 6 && self != AllenRelation::Equal {
            format!("{}\u{0304}", self.inverse().tag())
        } else {
            self.tag().to_string()
        }
    }
}

impl fmt::Display for AllenRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for AllenRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AllenRelation::ALL
            .into_iter()
            .find(|r| r.tag() == s.trim())
            .ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unknown Allen relation `{s}`"),
            })
    }
}

/// Whether `a R_rel b` holds.
pub fn allen_holds(rel: AllenRelation, a: Interval, b: Interval) -> bool {
    use AllenRelation::*;
    let (x, y, x2, y2) = (a.lo, a.hi, b.lo, b.hi);
    match rel {
        After => y == x2,
        Later => y < x2,
        Begins => x == x2 && y2 < y,
        Ends => y == y2 && x < x2,
        During => x < x2 && y2 < y,
        Overlaps => x < x2 && x2 < y && y < y2,
        Equal => x == x2 && y == y2,
        inv => allen_holds(inv.inverse(), b, a),
    }
}

/// The unique Allen relation `X` with `a R_X b`.
pub fn allen_relation(a: Interval, b: Interval) -> AllenRelation {
    use std::cmp::Ordering::{Equal as Eq, Greater as Gt, Less as Lt};
    use AllenRelation::*;
    let (x, y, x2, y2) = (a.lo, a.hi, b.lo, b.hi);
    match (x.cmp(&x2), y.cmp(&y2)) {
        (Eq, Eq) => Equal,
        (Eq, Gt) => Begins,
        (Eq, Lt) => BeginsInv,
        (Lt, Eq) => Ends,
        (Gt, Eq) => EndsInv,
        (Lt, Gt) => During,
        (Gt, Lt) => DuringInv,
        (Lt, Lt) => {
            if y < x2 {
                Later
            } else if y == x2 {
                After
            } else {
                Overlaps
            }
        }
        (Gt, Gt) => {
            if y2 < x {
                LaterInv
            } else if y2 == x {
                AfterInv
            } else {
                OverlapsInv
            }
        }
    }
}

/// One Allen relation per axis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationTuple(Vec<AllenRelation>);

impl RelationTuple {
    pub fn new(rels: Vec<AllenRelation>) -> Self {
        RelationTuple(rels)
    }

    pub fn identity(k: usize) -> Self {
        RelationTuple(vec![AllenRelation::Equal; k])
    }

    pub fn rels(&self) -> &[AllenRelation] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&r| r == AllenRelation::Equal)
    }

    pub fn inverse(&self) -> Self {
        RelationTuple(self.0.iter().map(|r| r.inverse()).collect())
    }

    /// Mixed-radix code `sum rel_i * 13^(k-1-i)`; for `k = 2` the codes
    /// `0..168` are exactly the non-identity tuples in canonical order.
    pub fn code(&self) -> usize {
        self.0.iter().fold(0, |acc, r| acc * 13 + r.index())
    }

    pub fn from_code(mut code: usize, k: usize) -> Self {
        let mut rels = vec![AllenRelation::Equal; k];
        for slot in rels.iter_mut().rev() {
            *slot = AllenRelation::ALL[code % 13];
            code /= 13;
        }
        RelationTuple(rels)
    }

    pub fn symbol(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|r| r.symbol()).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for RelationTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(r.tag())?;
        }
        f.write_str(")")
    }
}

impl FromStr for RelationTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("bad relation tuple `{s}`"),
            })?;
        let rels = inner.split(',').map(str::parse).collect::<Result<Vec<_>>>()?;
        Ok(RelationTuple(rels))
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn classify_pair(r: &HyperRectangle, s: &HyperRectangle) -> Result<RelationTuple> {
    check_dims(r.dims(), s.dims())?;
    Ok(RelationTuple(
        r.axes
            .iter()
            .zip(&s.axes)
            .map(|(&a, &b)| allen_relation(a, b))
            .collect(),
    ))
}

pub fn tuple_holds(t: &RelationTuple, r: &HyperRectangle, s: &HyperRectangle) -> Result<bool> {
    check_dims(r.dims(), s.dims())?;
    check_dims(r.dims(), t.dims())?;
    Ok(t.0
        .iter()
        .zip(r.axes.iter().zip(&s.axes))
        .all(|(&rel, (&a, &b))| allen_holds(rel, a, b)))
}

/// All intervals on an axis of the given extent, in `(lo, hi)` order.
pub fn intervals(extent: u32) -> impl Iterator<Item = Interval> {
    (1..=extent).flat_map(move |lo| (lo + 1..=extent + 1).map(move |hi| Interval::raw(lo, hi)))
}

/// Every hyperrectangle within `bounds`, each once, in canonical order.
pub fn enumerate_rectangles(bounds: &GridBounds) -> Rectangles {
    let per_axis: Vec<Vec<Interval>> = bounds.extents().iter().map(|&e| intervals(e).collect()).collect();
    Rectangles {
        cursor: vec![0; per_axis.len()],
        per_axis,
        done: false,
    }
}

/// Odometer over per-axis interval lists; the last axis turns fastest.
pub struct Rectangles {
    per_axis: Vec<Vec<Interval>>,
    cursor: Vec<usize>,
    done: bool,
}

impl Iterator for Rectangles {
    type Item = HyperRectangle;

    fn next(&mut self) -> Option<HyperRectangle> {
        if self.done {
            return None;
        }
        let item = HyperRectangle::from_axes_unchecked(
            self.cursor
                .iter()
                .zip(&self.per_axis)
                .map(|(&i, list)| list[i])
                .collect(),
        );
        let mut axis = self.cursor.len();
        loop {
            if axis == 0 {
                self.done = true;
                break;
            }
            axis -= 1;
            self.cursor[axis] += 1;
            if self.cursor[axis] < self.per_axis[axis].len() {
                break;
            }
            self.cursor[axis] = 0;
        }
        Some(item)
    }
}

/// Intervals `b` on an axis of the given extent with `a R_rel b`, in
/// `(lo, hi)` order. Generated directly from the relation's endpoint
/// constraints.
pub fn related_intervals(rel: AllenRelation, a: Interval, extent: u32) -> Vec<Interval> {
    use AllenRelation::*;
    let (x, y) = (a.lo, a.hi);
    let top = extent + 1;
    let mut out = Vec::new();
    let mut push_range = |lo: u32, his: std::ops::RangeInclusive<u32>| {
        for hi in his {
            out.push(Interval::raw(lo, hi));
        }
    };
    match rel {
        After => push_range(y, y + 1..=top),
        Later => {
            for lo in y + 1..top {
                push_range(lo, lo + 1..=top);
            }
        }
        Begins => push_range(x, x + 1..=y - 1),
        Ends => {
            for lo in x + 1..y {
                push_range(lo, y..=y);
            }
        }
        During => {
            for lo in x + 1..y {
                push_range(lo, lo + 1..=y - 1);
            }
        }
        Overlaps => {
            for lo in x + 1..y {
                push_range(lo, y + 1..=top);
            }
        }
        AfterInv => {
            for lo in 1..x {
                push_range(lo, x..=x);
            }
        }
        LaterInv => {
            for lo in 1..x {
                push_range(lo, lo + 1..=x - 1);
            }
        }
        BeginsInv => push_range(x, y + 1..=top),
        EndsInv => {
            for lo in 1..x {
                push_range(lo, y..=y);
            }
        }
        DuringInv => {
            for lo in 1..x {
                push_range(lo, y + 1..=top);
            }
        }
        OverlapsInv => {
            for lo in 1..x {
                push_range(lo, x + 1..=y - 1);
            }
        }
        Equal => out.push(a),
    }
    out
}

/// Every `s` within `bounds` with `tuple_holds(t, r, s)`, in canonical
/// order. Built as a product of per-axis interval ranges, so the cost is
/// proportional to the output.
pub fn enumerate_related(r: &HyperRectangle, t: &RelationTuple, bounds: &GridBounds) -> Vec<HyperRectangle> {
    if r.dims() != bounds.dims() || t.dims() != bounds.dims() {
        return Vec::new();
    }
    let per_axis: Vec<Vec<Interval>> = t
        .rels()
        .iter()
        .zip(r.axes())
        .zip(bounds.extents())
        .map(|((&rel, &iv), &extent)| related_intervals(rel, iv, extent))
        .collect();
    if per_axis.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let total: usize = per_axis.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    let mut cursor = vec![0usize; per_axis.len()];
    loop {
        out.push(HyperRectangle::from_axes_unchecked(
            cursor.iter().zip(&per_axis).map(|(&i, l)| l[i]).collect(),
        ));
        let mut axis = cursor.len();
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            cursor[axis] += 1;
            if cursor[axis] < per_axis[axis].len() {
                break;
            }
            cursor[axis] = 0;
        }
    }
}

/// Dense index of the rectangles of a grid: position in canonical order.
#[derive(Clone, Debug)]
pub struct RectangleIndex {
    bounds: GridBounds,
    /// `offsets[axis][lo]` = index of the first interval starting at `lo`.
    offsets: Vec<Vec<usize>>,
    strides: Vec<usize>,
}

impl RectangleIndex {
    pub fn new(bounds: &GridBounds) -> Self {
        let offsets: Vec<Vec<usize>> = bounds
            .extents()
            .iter()
            .map(|&n| {
                let mut acc = 0usize;
                let mut v = vec![0usize; n as usize + 2];
                for lo in 1..=n {
                    v[lo as usize] = acc;
                    acc += (n + 1 - lo) as usize;
                }
                v
            })
            .collect();
        let mut strides = vec![1usize; bounds.dims()];
        for axis in (0..bounds.dims().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * bounds.interval_count(axis + 1);
        }
        RectangleIndex {
            bounds: bounds.clone(),
            offsets,
            strides,
        }
    }

    pub fn bounds(&self) -> &GridBounds {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.bounds.rectangle_count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interval_index(&self, axis: usize, iv: Interval) -> usize {
        self.offsets[axis][iv.lo as usize] + (iv.hi - iv.lo - 1) as usize
    }

    pub fn index_of(&self, r: &HyperRectangle) -> usize {
        r.axes()
            .iter()
            .enumerate()
            .map(|(axis, &iv)| self.interval_index(axis, iv) * self.strides[axis])
            .sum()
    }
}
