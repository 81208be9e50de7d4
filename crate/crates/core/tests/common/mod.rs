#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spatial_c45::data::WindowedDataset;
use spatial_c45::model::{AnchoredDataset, R0Policy, SpatialInstance};

/// Small integer-valued images so that ties are common.
pub fn random_images(seed: u64, n: usize, side: usize, attrs: usize, classes: usize, levels: u32) -> WindowedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances = (0..n)
        .map(|i| {
            let values = (0..attrs * side * side)
                .map(|_| rng.random_range(0..levels) as f32)
                .collect();
            // every class shows up at least once
            let label = if i < classes { i } else { rng.random_range(0..classes) };
            Arc::new(SpatialInstance::new(attrs, side, side, values, label).unwrap())
        })
        .collect();
    let names = (0..classes).map(|c| format!("c{c}")).collect();
    WindowedDataset::new(instances, names).unwrap()
}

pub fn anchored(ds: &WindowedDataset) -> AnchoredDataset {
    AnchoredDataset::anchor(ds.instances.clone(), ds.classes.clone(), &R0Policy::Center).unwrap()
}
