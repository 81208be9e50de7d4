//! Trains a small spatial tree, saves it, and prints it as text, rules
//! and Graphviz.

use spatial_c45::learner::learn;
use spatial_c45::logic::Notation;
use spatial_c45::oracle::{anchor, generate_containment_task};
use spatial_c45::tree::parse_rules;
use spatial_c45::{FragmentId, LearnerConfig, R0Policy, RenderFormat, SpatialDecisionTree};

fn main() -> spatial_c45::Result<()> {
    let task = generate_containment_task(80, 6, 7)?;
    let cfg = LearnerConfig {
        fragment: FragmentId::Hs2Rcc8,
        max_depth: Some(3),
        ..LearnerConfig::default()
    };
    let tree = learn(&anchor(&task.dataset, &R0Policy::Center)?, &cfg)?;
    print!("{}", tree.render(RenderFormat::Text));

    let rules = tree.extract_rules();
    println!("\n{} rules:", rules.len());
    for r in &rules {
        println!("  {} => {}", r.formula(Notation::Unicode), tree.classes()[r.consequent]);
    }
    assert_eq!(parse_rules(&tree.render(RenderFormat::Rules))?, rules);

    let saved = tree.to_text();
    let back = SpatialDecisionTree::from_text(&saved)?;
    let first = &task.dataset.instances[0];
    println!(
        "\nreloaded tree says image 0 is {}",
        back.classes()[back.classify(first)?]
    );

    println!("\n{}", tree.render(RenderFormat::Dot));
    Ok(())
}
