//! Topological operators as unions of relation tuples.

use spatial_c45::logic::{operator_set, DerivedOperator, FragmentId, Rcc5, Rcc8};
use spatial_c45::oracle::rcc8_classify;
use spatial_c45::HyperRectangle;

fn main() -> spatial_c45::Result<()> {
    for f in [
        FragmentId::Hs2Full,
        FragmentId::Hs2Rcc8,
        FragmentId::Hs2Rcc5,
        FragmentId::Propositional,
    ] {
        println!("{f}: {} modal operators", operator_set(f).len());
    }

    println!();
    for r in Rcc8::MODAL {
        let tuples = DerivedOperator::Rcc8(r).tuples();
        let head: Vec<String> = tuples.iter().take(4).map(|t| t.to_string()).collect();
        println!("{:<7} {:>2} tuples  {} ...", r.symbol(), tuples.len(), head.join(" "));
    }
    for r in Rcc5::MODAL {
        let parts: Vec<&str> = r.parts().iter().map(|p| p.symbol()).collect();
        println!("{:<5} = {}", r.symbol(), parts.join(" ∪ "));
    }

    let field: HyperRectangle = "[1,7]x[1,7]".parse()?;
    println!();
    for s in [
        "[3,5]x[3,5]",
        "[1,3]x[2,4]",
        "[7,9]x[1,3]",
        "[9,10]x[9,10]",
        "[5,9]x[5,9]",
    ] {
        let s: HyperRectangle = s.parse()?;
        println!("{s} is {} of {field}", rcc8_classify(&s, &field).name());
    }
    Ok(())
}
