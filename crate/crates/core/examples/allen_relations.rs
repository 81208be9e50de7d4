//! Allen relations between intervals and their products on a grid.

use spatial_c45::geometry::{allen_relation, classify_pair, enumerate_related, GridBounds, Interval};
use spatial_c45::{HyperRectangle, RelationTuple};

fn main() -> spatial_c45::Result<()> {
    let a = Interval::new(2, 5)?;
    for b in [
        Interval::new(1, 2)?,
        Interval::new(5, 7)?,
        Interval::new(3, 4)?,
        Interval::new(2, 5)?,
    ] {
        let rel = allen_relation(a, b);
        println!(
            "{a} {} {b}   (tag {}, inverse {})",
            rel.symbol(),
            rel.tag(),
            rel.inverse().tag()
        );
    }

    let r: HyperRectangle = "[2,5]x[2,5]".parse()?;
    let s: HyperRectangle = "[5,7]x[1,6]".parse()?;
    let t = classify_pair(&r, &s)?;
    println!("\n{s} lies at {t} = {} from {r}, code {}", t.symbol(), t.code());

    // every rectangle of a 6x6 grid met on the x axis and strictly inside on y
    let bounds = GridBounds::planar(6, 6)?;
    let meets_during: RelationTuple = "(A,D)".parse()?;
    let hits = enumerate_related(&r, &meets_during, &bounds);
    println!("\n{} rectangles at {meets_during} from {r}:", hits.len());
    for h in hits {
        println!("  {h}");
    }
    Ok(())
}
