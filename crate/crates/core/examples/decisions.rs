//! Evaluating relaxed propositional and modal decisions on one image.

use std::sync::Arc;

use spatial_c45::logic::{DerivedOperator, Notation, Rcc8};
use spatial_c45::model::{new_refs, satisfying_fraction, AnchoredInstance};
use spatial_c45::{Comparator, Decision, Gamma, OperatorSpec, R0Policy, SpatialInstance};

fn main() -> spatial_c45::Result<()> {
    #[rustfmt::skip]
    let band = vec![
        1., 1., 1., 1., 1.,
        1., 8., 9., 8., 1.,
        1., 9., 2., 9., 1.,
        1., 8., 9., 9., 1.,
        1., 1., 1., 1., 1.,
    ];
    let inst = Arc::new(SpatialInstance::new(1, 5, 5, band, 0)?);
    let r0 = R0Policy::Center.resolve(&inst.bounds())?;
    let item = AnchoredInstance::new(inst.clone(), r0.clone());
    println!("r0 = {r0}");

    let ring: spatial_c45::HyperRectangle = "[2,5]x[2,5]".parse()?;
    let f = satisfying_fraction(&inst, &ring, 0, Comparator::Ge, 8.0)?;
    println!("{ring}: {} of {} pixels have A1 >= 8", f.count, f.total);

    let gamma: Gamma = "0.8".parse()?;
    let d = Decision::modal(
        OperatorSpec::Derived(DerivedOperator::Rcc8(Rcc8::NtppInv)),
        0,
        Comparator::Ge,
        8.0,
        gamma,
    );
    println!("\n{}", d.display(Notation::Unicode));
    println!("  dual form {}", d.negated_display(Notation::Unicode));
    println!("  ascii     {d}");
    let refs = new_refs(&item, &d)?;
    println!("  holds at r0: {}; new references:", !refs.is_empty());
    for r in &refs {
        println!("    {r}");
    }

    let centre = Decision::propositional(0, Comparator::Le, 4.0, Gamma::ONE);
    println!(
        "\n{} at r0: {}",
        centre.display(Notation::Unicode),
        !new_refs(&item, &centre)?.is_empty()
    );
    Ok(())
}
