//! The split search against exhaustive enumeration on random images.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spatial_c45::learner::{find_best_decision, ThresholdPolicy};
use spatial_c45::oracle::brute_force_best_decision;
use spatial_c45::{AnchoredDataset, FragmentId, LearnerConfig, R0Policy, SpatialInstance};

fn main() -> spatial_c45::Result<()> {
    let cfg = LearnerConfig {
        fragment: FragmentId::Hs2Rcc8,
        threshold_policy: ThresholdPolicy::AllMidpoints,
        ..LearnerConfig::default()
    };
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let images = (0..24)
            .map(|i| {
                let v = (0..4 * 9).map(|_| rng.random_range(0..5) as f32).collect();
                Ok(Arc::new(SpatialInstance::new(4, 3, 3, v, i % 2)?))
            })
            .collect::<spatial_c45::Result<Vec<_>>>()?;
        let ds = AnchoredDataset::anchor(images, vec!["a".into(), "b".into()], &R0Policy::Center)?;
        let fast = find_best_decision(&ds, &cfg);
        let slow = brute_force_best_decision(&ds, &cfg);
        let show = |s: &Option<spatial_c45::learner::SplitScore>| match s {
            Some(s) => format!("{} gain {:.6}", s.decision, s.gain),
            None => "no split".into(),
        };
        println!(
            "seed {seed}: {}  |  {}  {}",
            show(&fast),
            show(&slow),
            if fast == slow { "same" } else { "DIFFERENT" }
        );
    }
    Ok(())
}
