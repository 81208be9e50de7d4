//! Confusion matrix and the reported figures.

use spatial_c45::metrics::{confusion, csv_row, fmt_pct, per_class_metrics, RunMetrics, CSV_HEADER};

fn main() -> spatial_c45::Result<()> {
    let truth = [0, 0, 0, 1, 1, 1, 2, 2, 2, 2];
    let pred = [0, 0, 1, 1, 1, 1, 2, 2, 0, 2];
    let m = confusion(&truth, &pred, 3)?;
    for row in m.rows() {
        println!("{row:?}");
    }
    for c in 0..3 {
        let p = per_class_metrics(&m, c)?;
        println!(
            "class {c}: sens {} spec {} prec {}",
            fmt_pct(p.sensitivity),
            fmt_pct(p.specificity),
            fmt_pct(p.precision)
        );
    }
    let run = RunMetrics::of(&m)?;
    println!("\n{CSV_HEADER}\n{}", csv_row("toy", "hs2_rcc8", 1, &run));
    Ok(())
}
