//! Learns "a high region strictly containing a low region" on synthetic
//! two-channel images and compares against a single-pixel tree.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spatial_c45::data::{baseline_transform, train_test_split, BaselineMode};
use spatial_c45::learner::learn;
use spatial_c45::metrics::{accuracy, confusion};
use spatial_c45::oracle::{anchor, generate_containment_task};
use spatial_c45::{FragmentId, LearnerConfig, R0Policy, RenderFormat};

fn main() -> spatial_c45::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let task = generate_containment_task(n, 8, 1)?;
    let (train, test) = train_test_split(&task.dataset, 0.7, &mut ChaCha8Rng::seed_from_u64(1))?;

    let cfg = LearnerConfig {
        fragment: FragmentId::Hs2Full,
        ..LearnerConfig::default()
    };
    let start = Instant::now();
    let tree = learn(&anchor(&train, &R0Policy::Center)?, &cfg)?;
    let pred = tree.classify_batch(&test.instances)?;
    let spatial = accuracy(&confusion(&test.labels(), &pred, 2)?)?;
    println!("spatial tree ({:.1?}):", start.elapsed());
    print!("{}", tree.render(RenderFormat::Text));

    let flat_train = baseline_transform(&train, BaselineMode::SinglePixel);
    let flat_test = baseline_transform(&test, BaselineMode::SinglePixel);
    let cfg = LearnerConfig {
        fragment: FragmentId::Propositional,
        ..LearnerConfig::default()
    };
    let tree = learn(&anchor(&flat_train, &R0Policy::Center)?, &cfg)?;
    let pred = tree.classify_batch(&flat_test.instances)?;
    let single = accuracy(&confusion(&flat_test.labels(), &pred, 2)?)?;

    println!("test accuracy: spatial {spatial:.2}%, single pixel {single:.2}%");
    Ok(())
}
