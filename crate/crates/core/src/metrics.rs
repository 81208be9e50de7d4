//! Confusion matrices and percentage metrics.

use crate::error::{Error, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn zeros(l: usize) -> Self {
        ConfusionMatrix {
            counts: vec![vec![0; l]; l],
        }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let l = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != l) {
            return Err(Error::LengthMismatch {
                left: r.len(),
                right: l,
            });
        }
        Ok(ConfusionMatrix { counts: rows })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, truth: usize, pred: usize) -> u64 {
        self.counts[truth][pred]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    /// Element-wise sum.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.n_classes() != self.n_classes() {
            return Err(Error::LengthMismatch {
                left: self.n_classes(),
                right: other.n_classes(),
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(())
    }

    fn nonempty(&self) -> Result<f64> {
        match self.total() {
            0 => Err(Error::Empty("confusion matrix")),
            n => Ok(n as f64),
        }
    }
}

pub fn confusion(truth: &[usize], pred: &[usize], l: usize) -> Result<ConfusionMatrix> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: pred.len(),
        });
    }
    let mut m = ConfusionMatrix::zeros(l);
    for (&t, &p) in truth.iter().zip(pred) {
        for c in [t, p] {
            if c >= l {
                return Err(Error::ClassOutOfRange { index: c, count: l });
            }
        }
        m.counts[t][p] += 1;
    }
    Ok(m)
}

/// Percentage of correct predictions.
pub fn accuracy(m: &ConfusionMatrix) -> Result<f64> {
    Ok(100.0 * m.trace() as f64 / m.nonempty()?)
}

/// Cohen's κ in percent. When chance agreement is certain the value is
/// 100 for perfect agreement and 0 otherwise.
pub fn kappa(m: &ConfusionMatrix) -> Result<f64> {
    let n = m.nonempty()?;
    let l = m.n_classes();
    let po = m.trace() as f64 / n;
    let pe: f64 = (0..l)
        .map(|k| {
            let row: u64 = m.counts[k].iter().sum();
            let col: u64 = m.counts.iter().map(|r| r[k]).sum();
            (row as f64 / n) * (col as f64 / n)
        })
        .sum();
    if pe >= 1.0 {
        return Ok(if po >= 1.0 { 100.0 } else { 0.0 });
    }
    Ok(100.0 * (po - pe) / (1.0 - pe))
}

/// One-vs-rest rates in percent; `None` where the denominator is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassMetrics {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

pub fn per_class_metrics(m: &ConfusionMatrix, c: usize) -> Result<ClassMetrics> {
    let l = m.n_classes();
    if c >= l {
        return Err(Error::ClassOutOfRange { index: c, count: l });
    }
    let tp = m.counts[c][c];
    let fn_: u64 = m.counts[c].iter().sum::<u64>() - tp;
    let fp: u64 = m.counts.iter().map(|r| r[c]).sum::<u64>() - tp;
    let tn = m.total() - tp - fn_ - fp;
    Ok(ClassMetrics {
        sensitivity: ratio(tp, tp + fn_),
        specificity: ratio(tn, tn + fp),
        precision: ratio(tp, tp + fp),
    })
}

fn mean_defined(v: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = v.flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Means over the classes where each rate is defined.
pub fn macro_metrics(m: &ConfusionMatrix) -> ClassMetrics {
    let per: Vec<ClassMetrics> = (0..m.n_classes())
        .map(|c| per_class_metrics(m, c).expect("class in range"))
        .collect();
    ClassMetrics {
        sensitivity: mean_defined(per.iter().map(|p| p.sensitivity)),
        specificity: mean_defined(per.iter().map(|p| p.specificity)),
        precision: mean_defined(per.iter().map(|p| p.precision)),
    }
}

/// The five reported figures of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunMetrics {
    pub kappa: f64,
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
}

impl RunMetrics {
    pub fn of(m: &ConfusionMatrix) -> Result<Self> {
        let mm = macro_metrics(m);
        Ok(RunMetrics {
            kappa: kappa(m)?,
            accuracy: accuracy(m)?,
            sensitivity: mm.sensitivity,
            specificity: mm.specificity,
            precision: mm.precision,
        })
    }
}

/// Two decimals; absent values print as an empty field.
pub fn fmt_pct(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

pub const CSV_HEADER: &str = "dataset,approach,seed,kappa,accuracy,sens_macro,spec_macro,prec_macro";

pub fn csv_row(dataset: &str, approach: &str, seed: u64, r: &RunMetrics) -> String {
    format!(
        "{dataset},{approach},{seed},{},{},{},{},{}",
        fmt_pct(Some(r.kappa)),
        fmt_pct(Some(r.accuracy)),
        fmt_pct(r.sensitivity),
        fmt_pct(r.specificity),
        fmt_pct(r.precision)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u64]]) -> ConfusionMatrix {
        ConfusionMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn confusion_examples() {
        let c = confusion(&[0, 0, 1, 1], &[0, 1, 1, 1], 2).unwrap();
        assert_eq!(c, m(&[&[1, 1], &[0, 2]]));
        assert_eq!(confusion(&[], &[], 3).unwrap().total(), 0);
        assert!(confusion(&[0], &[], 2).is_err());
        let diag = confusion(&[0, 1, 2, 0, 1, 2, 0, 1, 2, 0], &[0, 1, 2, 0, 1, 2, 0, 1, 2, 0], 3).unwrap();
        assert_eq!(diag.trace(), 10);
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&m(&[&[3, 0], &[0, 4]])).unwrap(), 100.0);
        assert_eq!(accuracy(&m(&[&[1, 1], &[0, 2]])).unwrap(), 75.0);
        assert_eq!(accuracy(&m(&[&[0, 3], &[2, 0]])).unwrap(), 0.0);
        assert!(accuracy(&ConfusionMatrix::zeros(2)).is_err());
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&m(&[&[5, 0], &[0, 5]])).unwrap(), 100.0);
        assert_eq!(kappa(&m(&[&[5, 0], &[5, 0]])).unwrap(), 0.0);
        assert!((kappa(&m(&[&[45, 5], &[15, 35]])).unwrap() - 60.0).abs() < 1e-9);
        assert_eq!(kappa(&m(&[&[4, 0], &[0, 0]])).unwrap(), 100.0);
        assert!(kappa(&ConfusionMatrix::zeros(2)).is_err());
    }

    #[test]
    fn per_class_examples() {
        let c = m(&[&[1, 1], &[0, 2]]);
        let p = per_class_metrics(&c, 0).unwrap();
        assert_eq!(
            (p.sensitivity, p.specificity, p.precision),
            (Some(50.0), Some(100.0), Some(100.0))
        );
        let absent = m(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 0]]);
        let p = per_class_metrics(&absent, 2).unwrap();
        assert_eq!(p.sensitivity, None);
        assert_eq!(p.precision, None);
        assert_eq!(p.specificity, Some(100.0));
        assert_eq!(macro_metrics(&c).sensitivity, Some(75.0));
        let perfect = macro_metrics(&m(&[&[3, 0], &[0, 3]]));
        assert_eq!(perfect.precision, Some(100.0));
    }

    #[test]
    fn csv_formatting() {
        let r = RunMetrics::of(&m(&[&[45, 5], &[15, 35]])).unwrap();
        assert_eq!(
            csv_row("ip", "hs2_rcc8", 3, &r),
            "ip,hs2_rcc8,3,60.00,80.00,80.00,80.00,81.25"
        );
    }
}
