//! Scenes, windowed datasets, sampling and the on-disk formats.
//!
//! Scene file (`SSC1`):
//!
//! ```text
//! SSC1\n
//! attrs=<n> rows=<r> cols=<c> classes=<l>\n
//! f32 LE tensor [attr][row][col]
//! i32 LE mask [row][col]        (0 = unlabeled, k >= 1 = class k)
//! <l> class names, one per line
//! ```
//!
//! Windowed dataset file (`SWD1`):
//!
//! ```text
//! SWD1\n
//! n=<m> attrs=<n> d=<d> classes=<l>\n
//! m x (i32 LE label, f32 LE tensor [attr][row][col])
//! <l> class names, one per line
//! ```
//!
//! Labels in `SWD1` are 0-based class indices.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::SpatialInstance;

const SCENE_MAGIC: &[u8] = b"SSC1\n";
const DATASET_MAGIC: &[u8] = b"SWD1\n";

/// A labelled multi-band image.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub name: String,
    n_attributes: usize,
    rows: usize,
    cols: usize,
    values: Vec<f32>,
    mask: Vec<i32>,
    class_names: Vec<String>,
}

impl Scene {
    pub fn new(
        name: impl Into<String>,
        n_attributes: usize,
        rows: usize,
        cols: usize,
        values: Vec<f32>,
        mask: Vec<i32>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if n_attributes == 0 || rows == 0 || cols == 0 {
            return Err(Error::InvalidBounds(format!(
                "scene shape {n_attributes}x{rows}x{cols}"
            )));
        }
        let plane = rows * cols;
        if values.len() != n_attributes * plane {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: n_attributes * plane,
            });
        }
        if mask.len() != plane {
            return Err(Error::LengthMismatch {
                left: mask.len(),
                right: plane,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { offset: i * 4 });
        }
        for &m in &mask {
            if m < 0 || m as usize > class_names.len() {
                return Err(Error::ClassOutOfRange {
                    index: m.max(0) as usize,
                    count: class_names.len(),
                });
            }
        }
        Ok(Scene {
            name: name.into(),
            n_attributes,
            rows,
            cols,
            values,
            mask,
            class_names,
        })
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

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn mask(&self) -> &[i32] {
        &self.mask
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// 0-based row and column.
    pub fn value(&self, attr: usize, row: usize, col: usize) -> f32 {
        self.values[(attr * self.rows + row) * self.cols + col]
    }

    pub fn label(&self, row: usize, col: usize) -> i32 {
        self.mask[row * self.cols + col]
    }

    pub fn labeled_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m > 0).count()
    }
}

/// Where a windowed instance came from. Coordinates are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub scene: String,
    pub row: usize,
    pub col: usize,
}

/// Equally sized square instances with shared class names.
#[derive(Clone, Debug)]
pub struct WindowedDataset {
    pub instances: Vec<Arc<SpatialInstance>>,
    pub classes: Vec<String>,
    /// Empty when unknown, e.g. after reading a file.
    pub provenance: Vec<Provenance>,
    /// Seed of the sampling that produced this dataset, if any.
    pub seed: Option<u64>,
}

impl WindowedDataset {
    pub fn new(instances: Vec<Arc<SpatialInstance>>, classes: Vec<String>) -> Result<Self> {
        if let Some(first) = instances.first() {
            for inst in &instances {
                if inst.n_attributes() != first.n_attributes()
                    || inst.rows() != first.rows()
                    || inst.cols() != first.cols()
                {
                    return Err(Error::DimensionMismatch {
                        expected: first.n_attributes(),
                        found: inst.n_attributes(),
                    });
                }
                if inst.class_label() >= classes.len() {
                    return Err(Error::ClassOutOfRange {
                        index: inst.class_label(),
                        count: classes.len(),
                    });
                }
            }
        }
        Ok(WindowedDataset {
            instances,
            classes,
            provenance: Vec::new(),
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.instances.first().map_or(0, |i| i.n_attributes())
    }

    /// Window side, for square instances.
    pub fn window(&self) -> usize {
        self.instances.first().map_or(0, |i| i.rows())
    }

    pub fn labels(&self) -> Vec<usize> {
        self.instances.iter().map(|i| i.class_label()).collect()
    }

    pub fn class_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.classes.len()];
        for i in &self.instances {
            h[i.class_label()] += 1;
        }
        h
    }

    fn subset(&self, idx: &[usize]) -> WindowedDataset {
        WindowedDataset {
            instances: idx.iter().map(|&i| Arc::clone(&self.instances[i])).collect(),
            classes: self.classes.clone(),
            provenance: if self.provenance.is_empty() {
                Vec::new()
            } else {
                idx.iter().map(|&i| self.provenance[i].clone()).collect()
            },
            seed: self.seed,
        }
    }
}

/// One instance per labelled pixel whose `d`×`d` window fits inside the
/// scene, in row-major order of window centres.
pub fn extract_windows(scene: &Scene, d: usize) -> Result<WindowedDataset> {
    if d == 0 || d.is_multiple_of(2) {
        return Err(Error::Config(format!("window side must be odd, got {d}")));
    }
    let h = d / 2;
    let n = scene.n_attributes;
    let rows: Vec<Vec<(Arc<SpatialInstance>, Provenance)>> = (0..scene.rows)
        .into_par_iter()
        .map(|row| {
            let mut out = Vec::new();
            if row < h || row + h >= scene.rows {
                return out;
            }
            for col in h..scene.cols.saturating_sub(h) {
                let label = scene.label(row, col);
                if label <= 0 {
                    continue;
                }
                let mut values = Vec::with_capacity(n * d * d);
                for a in 0..n {
                    for r in row - h..=row + h {
                        for c in col - h..=col + h {
                            values.push(scene.value(a, r, c));
                        }
                    }
                }
                let inst = SpatialInstance::new(n, d, d, values, label as usize - 1).expect("window shape");
                out.push((
                    Arc::new(inst),
                    Provenance {
                        scene: scene.name.clone(),
                        row,
                        col,
                    },
                ));
            }
            out
        })
        .collect();
    let (instances, provenance) = rows.into_iter().flatten().unzip();
    Ok(WindowedDataset {
        instances,
        classes: scene.class_names.clone(),
        provenance,
        seed: None,
    })
}

fn by_class(ds: &WindowedDataset) -> BTreeMap<usize, Vec<usize>> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, inst) in ds.instances.iter().enumerate() {
        groups.entry(inst.class_label()).or_default().push(i);
    }
    groups
}

fn relabel(inst: &SpatialInstance, class: usize) -> Arc<SpatialInstance> {
    Arc::new(
        SpatialInstance::new(
            inst.n_attributes(),
            inst.rows(),
            inst.cols(),
            inst.values().to_vec(),
            class,
        )
        .expect("same shape"),
    )
}

/// Exactly `p` instances per class, sampled without replacement; classes
/// with fewer than `p` instances are dropped and the survivors re-indexed
/// in their original order.
pub fn balance_sample<R: Rng + ?Sized>(ds: &WindowedDataset, p: usize, rng: &mut R) -> Result<WindowedDataset> {
    if p == 0 {
        return Err(Error::Config("P must be at least 1".into()));
    }
    let groups = by_class(ds);
    let mut instances = Vec::new();
    let mut provenance = Vec::new();
    let mut classes = Vec::new();
    for (class, members) in groups.iter().filter(|(_, m)| m.len() >= p) {
        let new_class = classes.len();
        classes.push(ds.classes[*class].clone());
        let mut picked: Vec<usize> = index::sample(rng, members.len(), p)
            .into_iter()
            .map(|k| members[k])
            .collect();
        picked.sort_unstable();
        for i in picked {
            instances.push(relabel(&ds.instances[i], new_class));
            if !ds.provenance.is_empty() {
                provenance.push(ds.provenance[i].clone());
            }
        }
    }
    if classes.is_empty() {
        return Err(Error::Empty("no class has at least P instances"));
    }
    Ok(WindowedDataset {
        instances,
        classes,
        provenance,
        seed: ds.seed,
    })
}

/// Stratified split: `round(n·fraction)` instances of each class go to
/// training, clamped so that both sides keep at least one.
pub fn train_test_split<R: Rng + ?Sized>(
    ds: &WindowedDataset,
    train_fraction: f64,
    rng: &mut R,
) -> Result<(WindowedDataset, WindowedDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!("train fraction {train_fraction} not in (0, 1)")));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut members) in by_class(ds) {
        if members.len() < 2 {
            return Err(Error::Config(format!("class {class} has fewer than 2 instances")));
        }
        members.shuffle(rng);
        let k = ((members.len() as f64 * train_fraction).round() as usize).clamp(1, members.len() - 1);
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.subset(&train), ds.subset(&test)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineMode {
    SinglePixel,
    Flattened,
    Averaged,
}

impl std::str::FromStr for BaselineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single_pixel" => Ok(BaselineMode::SinglePixel),
            "flattened" => Ok(BaselineMode::Flattened),
            "averaged" => Ok(BaselineMode::Averaged),
            _ => Err(Error::Config(format!("unknown baseline `{s}`"))),
        }
    }
}

/// Tabular (1×1) view of a windowed dataset.
pub fn baseline_transform(ds: &WindowedDataset, mode: BaselineMode) -> WindowedDataset {
    let instances = ds
        .instances
        .iter()
        .map(|inst| {
            let (n, rows, cols) = (inst.n_attributes(), inst.rows(), inst.cols());
            // same pixel as the centre r0 policy, also for even sides
            let (cr, cc) = ((rows - 1) / 2, (cols - 1) / 2);
            let plane = rows * cols;
            let v = inst.values();
            let values: Vec<f32> = match mode {
                BaselineMode::SinglePixel => (0..n).map(|a| v[a * plane + cr * cols + cc]).collect(),
                BaselineMode::Flattened => (0..plane).flat_map(|p| (0..n).map(move |a| v[a * plane + p])).collect(),
                BaselineMode::Averaged => (0..n)
                    .map(|a| {
                        let sum: f64 = v[a * plane..(a + 1) * plane].iter().map(|&x| x as f64).sum();
                        (sum / plane as f64) as f32
                    })
                    .collect(),
            };
            Arc::new(SpatialInstance::tabular(values, inst.class_label()).expect("finite values"))
        })
        .collect();
    WindowedDataset {
        instances,
        classes: ds.classes.clone(),
        provenance: ds.provenance.clone(),
        seed: ds.seed,
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn expect_magic(&mut self, magic: &[u8]) -> Result<()> {
        if !self.bytes.starts_with(magic) {
            return Err(Error::MalformedHeader(format!(
                "expected magic {:?}",
                String::from_utf8_lossy(magic).trim_end()
            )));
        }
        self.pos = magic.len();
        Ok(())
    }

    fn line(&mut self) -> Result<&'a str> {
        let rest = &self.bytes[self.pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::MalformedHeader("unterminated header line".into()))?;
        let line =
            std::str::from_utf8(&rest[..end]).map_err(|_| Error::MalformedHeader("header is not UTF-8".into()))?;
        self.pos += end + 1;
        Ok(line)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let left = self.bytes.len() - self.pos;
        if left < n {
            return Err(Error::SizeMismatch {
                offset: self.pos,
                expected: n,
                found: left,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let start = self.pos;
        let raw = self.take(n * 4)?;
        raw.chunks_exact(4)
            .enumerate()
            .map(|(i, c)| {
                let v = f32::from_le_bytes(c.try_into().expect("4 bytes"));
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite { offset: start + i * 4 })
                }
            })
            .collect()
    }

    fn i32s(&mut self, n: usize) -> Result<Vec<i32>> {
        let raw = self.take(n * 4)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| i32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }

    fn names(&mut self, l: usize) -> Result<Vec<String>> {
        let mut names = Vec::with_capacity(l);
        for _ in 0..l {
            let offset = self.pos;
            let line = self.line().map_err(|_| Error::SizeMismatch {
                offset,
                expected: 1,
                found: 0,
            })?;
            names.push(line.to_string());
        }
        if self.pos != self.bytes.len() {
            return Err(Error::SizeMismatch {
                offset: self.pos,
                expected: 0,
                found: self.bytes.len() - self.pos,
            });
        }
        Ok(names)
    }
}

fn header_fields(line: &str, keys: &[&str]) -> Result<Vec<usize>> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != keys.len() {
        return Err(Error::MalformedHeader(line.to_string()));
    }
    keys.iter()
        .zip(parts)
        .map(|(k, p)| {
            p.strip_prefix(k)
                .and_then(|r| r.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::MalformedHeader(line.to_string()))
        })
        .collect()
}

fn push_names(out: &mut Vec<u8>, names: &[String]) {
    for n in names {
        out.extend_from_slice(n.as_bytes());
        out.push(b'\n');
    }
}

pub fn scene_to_bytes(scene: &Scene) -> Vec<u8> {
    let mut out = Vec::with_capacity(scene.values.len() * 4 + scene.mask.len() * 4 + 64);
    out.extend_from_slice(SCENE_MAGIC);
    out.extend_from_slice(
        format!(
            "attrs={} rows={} cols={} classes={}\n",
            scene.n_attributes,
            scene.rows,
            scene.cols,
            scene.class_names.len()
        )
        .as_bytes(),
    );
    for v in &scene.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for m in &scene.mask {
        out.extend_from_slice(&m.to_le_bytes());
    }
    push_names(&mut out, &scene.class_names);
    out
}

pub fn scene_from_bytes(bytes: &[u8], name: &str) -> Result<Scene> {
    let mut r = Reader { bytes, pos: 0 };
    r.expect_magic(SCENE_MAGIC)?;
    let h = header_fields(r.line()?, &["attrs", "rows", "cols", "classes"])?;
    let (n, rows, cols, l) = (h[0], h[1], h[2], h[3]);
    let values = r.f32s(n * rows * cols)?;
    let mask = r.i32s(rows * cols)?;
    let names = r.names(l)?;
    Scene::new(name, n, rows, cols, values, mask, names)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    scene_from_bytes(&fs::read(path)?, &stem(path))
}

pub fn write_scene(path: impl AsRef<Path>, scene: &Scene) -> Result<()> {
    fs::write(path, scene_to_bytes(scene))?;
    Ok(())
}

pub fn dataset_to_bytes(ds: &WindowedDataset) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(DATASET_MAGIC);
    out.extend_from_slice(
        format!(
            "n={} attrs={} d={} classes={}\n",
            ds.len(),
            ds.n_attributes(),
            ds.window(),
            ds.classes.len()
        )
        .as_bytes(),
    );
    for inst in &ds.instances {
        out.extend_from_slice(&(inst.class_label() as i32).to_le_bytes());
        for v in inst.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    push_names(&mut out, &ds.classes);
    out
}

pub fn dataset_from_bytes(bytes: &[u8]) -> Result<WindowedDataset> {
    let mut r = Reader { bytes, pos: 0 };
    r.expect_magic(DATASET_MAGIC)?;
    let h = header_fields(r.line()?, &["n", "attrs", "d", "classes"])?;
    let (m, n, d, l) = (h[0], h[1], h[2], h[3]);
    let mut instances = Vec::with_capacity(m);
    for _ in 0..m {
        let label = r.i32s(1)?[0];
        if label < 0 || label as usize >= l {
            return Err(Error::ClassOutOfRange {
                index: label.max(0) as usize,
                count: l,
            });
        }
        let values = r.f32s(n * d * d)?;
        instances.push(Arc::new(SpatialInstance::new(n, d, d, values, label as usize)?));
    }
    let names = r.names(l)?;
    WindowedDataset::new(instances, names)
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<WindowedDataset> {
    dataset_from_bytes(&fs::read(path)?)
}

pub fn write_dataset(path: impl AsRef<Path>, ds: &WindowedDataset) -> Result<()> {
    fs::write(path, dataset_to_bytes(ds))?;
    Ok(())
}

/// Builds a scene from CSV text with one pixel per line:
/// `row,col,label,a1,...,an` (0-based coordinates, label 0 = unlabeled).
/// Optional lines: a header starting with `row`, `# classes: a,b,...`,
/// and other `#` comments. Unnamed classes are called `class<k>`.
pub fn scene_from_csv(text: &str, name: &str) -> Result<Scene> {
    let mut names: Option<Vec<String>> = None;
    let mut pixels: Vec<(usize, usize, i32, Vec<f32>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let parse_err = |message: String| Error::Parse { line: i + 1, message };
        if line.is_empty() || line.starts_with("row") {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if let Some(list) = c.trim().strip_prefix("classes:") {
                names = Some(list.split(',').map(|s| s.trim().to_string()).collect());
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 4 {
            return Err(parse_err(format!("expected row,col,label,a1..an; got `{line}`")));
        }
        let row = fields[0]
            .parse()
            .map_err(|_| parse_err(format!("bad row `{}`", fields[0])))?;
        let col = fields[1]
            .parse()
            .map_err(|_| parse_err(format!("bad col `{}`", fields[1])))?;
        let label: i32 = fields[2]
            .parse()
            .map_err(|_| parse_err(format!("bad label `{}`", fields[2])))?;
        let values = fields[3..]
            .iter()
            .map(|f| {
                f.parse::<f32>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(format!("bad value `{f}`")))
            })
            .collect::<Result<Vec<f32>>>()?;
        if let Some(first) = pixels.first() {
            if first.3.len() != values.len() {
                return Err(parse_err(format!(
                    "expected {} values, got {}",
                    first.3.len(),
                    values.len()
                )));
            }
        }
        pixels.push((row, col, label, values));
    }
    if pixels.is_empty() {
        return Err(Error::Empty("csv scene"));
    }
    let rows = pixels.iter().map(|p| p.0).max().unwrap_or(0) + 1;
    let cols = pixels.iter().map(|p| p.1).max().unwrap_or(0) + 1;
    let n = pixels[0].3.len();
    if pixels.len() != rows * cols {
        return Err(Error::SizeMismatch {
            offset: 0,
            expected: rows * cols,
            found: pixels.len(),
        });
    }
    let mut values = vec![0f32; n * rows * cols];
    let mut mask = vec![0i32; rows * cols];
    let mut seen = vec![false; rows * cols];
    for (row, col, label, v) in pixels {
        let p = row * cols + col;
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::Config(format!("pixel ({row},{col}) listed twice")));
        }
        mask[p] = label;
        for (a, x) in v.into_iter().enumerate() {
            values[a * rows * cols + p] = x;
        }
    }
    let l = mask.iter().copied().max().unwrap_or(0).max(0) as usize;
    let names = match names {
        Some(n) => n,
        None => (1..=l).map(|k| format!("class{k}")).collect(),
    };
    Scene::new(name, n, rows, cols, values, mask, names)
}
