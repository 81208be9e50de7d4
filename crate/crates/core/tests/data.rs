use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spatial_c45::data::{
    balance_sample, baseline_transform, dataset_from_bytes, dataset_to_bytes, extract_windows, load_scene,
    read_dataset, scene_from_bytes, scene_from_csv, scene_to_bytes, train_test_split, write_dataset, write_scene,
    BaselineMode, Scene,
};

fn scene_strategy() -> impl Strategy<Value = Scene> {
    (1usize..=3, 1usize..=7, 1usize..=7, 1usize..=4).prop_flat_map(|(n, rows, cols, l)| {
        (
            proptest::collection::vec(-1000i32..1000, n * rows * cols),
            proptest::collection::vec(0..=l as i32, rows * cols),
        )
            .prop_map(move |(v, mask)| {
                let values = v.into_iter().map(|x| x as f32 / 8.0).collect();
                let names = (1..=l).map(|k| format!("land{k}")).collect();
                Scene::new("s", n, rows, cols, values, mask, names).unwrap()
            })
    })
}

fn to_csv(s: &Scene) -> String {
    let mut out = format!("# classes: {}\nrow,col,label,values\n", s.class_names().join(","));
    for row in 0..s.rows() {
        for col in 0..s.cols() {
            let vals: Vec<String> = (0..s.n_attributes())
                .map(|a| s.value(a, row, col).to_string())
                .collect();
            out += &format!("{row},{col},{},{}\n", s.label(row, col), vals.join(","));
        }
    }
    out
}

proptest! {
    #[test]
    fn scene_bytes_round_trip(s in scene_strategy()) {
        let back = scene_from_bytes(&scene_to_bytes(&s), "s").unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn csv_matches_scene(s in scene_strategy()) {
        prop_assert_eq!(scene_from_csv(&to_csv(&s), "s").unwrap(), s);
    }

    #[test]
    fn truncated_scene_bytes_fail(s in scene_strategy(), cut in 1usize..16) {
        let bytes = scene_to_bytes(&s);
        let cut = cut.min(bytes.len());
        prop_assert!(scene_from_bytes(&bytes[..bytes.len() - cut], "s").is_err());
    }

    #[test]
    fn windows_follow_the_mask(s in scene_strategy(), half in 0usize..=2) {
        let d = 2 * half + 1;
        let ds = extract_windows(&s, d).unwrap();
        let mut expected = Vec::new();
        for row in half..s.rows().saturating_sub(half) {
            for col in half..s.cols().saturating_sub(half) {
                if s.label(row, col) > 0 {
                    expected.push((row, col));
                }
            }
        }
        prop_assert_eq!(ds.len(), expected.len());
        for (i, &(row, col)) in expected.iter().enumerate() {
            let inst = &ds.instances[i];
            prop_assert_eq!((ds.provenance[i].row, ds.provenance[i].col), (row, col));
            prop_assert_eq!(inst.class_label() as i32, s.label(row, col) - 1);
            prop_assert_eq!((inst.rows(), inst.cols()), (d, d));
            for a in 0..s.n_attributes() {
                // window pixel (x, y) is 1-based, centred on (row, col)
                let c = half as u32 + 1;
                prop_assert_eq!(inst.value(a, c, c), s.value(a, row, col));
                prop_assert_eq!(inst.value(a, 1, 1), s.value(a, row - half, col - half));
            }
        }
        if !ds.is_empty() {
            let bytes = dataset_to_bytes(&ds);
            let back = dataset_from_bytes(&bytes).unwrap();
            prop_assert_eq!(back.classes, ds.classes.clone());
            prop_assert_eq!(back.instances.len(), ds.instances.len());
            for (a, b) in back.instances.iter().zip(&ds.instances) {
                prop_assert_eq!(&**a, &**b);
            }
            for mode in [BaselineMode::SinglePixel, BaselineMode::Flattened, BaselineMode::Averaged] {
                let t = baseline_transform(&ds, mode);
                let width = match mode {
                    BaselineMode::Flattened => s.n_attributes() * d * d,
                    _ => s.n_attributes(),
                };
                prop_assert!(t.instances.iter().all(|i| i.rows() == 1 && i.cols() == 1 && i.n_attributes() == width));
                prop_assert_eq!(t.labels(), ds.labels());
            }
            let single = baseline_transform(&ds, BaselineMode::SinglePixel);
            let (row, col) = expected[0];
            prop_assert_eq!(single.instances[0].values()[0], s.value(0, row, col));
        }
    }

    #[test]
    fn sampling_and_split_are_balanced(seed in any::<u64>(), p in 2usize..6, fraction in 0.1f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..2 * 9 * 9).map(|i| (i % 17) as f32).collect();
        let mask = (0..81).map(|i| i % 4).collect();
        let s = Scene::new("g", 2, 9, 9, values, mask, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let ds = extract_windows(&s, 3).unwrap();
        let sampled = balance_sample(&ds, p, &mut rng).unwrap();
        let hist = sampled.class_histogram();
        prop_assert!(hist.iter().all(|&h| h == p));
        let again = balance_sample(&ds, p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let first = balance_sample(&ds, p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(first.provenance, again.provenance);

        let (train, test) = train_test_split(&sampled, fraction, &mut rng).unwrap();
        prop_assert_eq!(train.len() + test.len(), sampled.len());
        for (tr, te) in train.class_histogram().iter().zip(test.class_histogram()) {
            prop_assert_eq!(tr + te, p);
            prop_assert!(*tr >= 1 && te >= 1);
        }
        for pv in &train.provenance {
            prop_assert!(!test.provenance.contains(pv));
        }
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scene::new(
        "f",
        1,
        3,
        3,
        (0..9).map(|v| v as f32).collect(),
        vec![1; 9],
        vec!["only".into()],
    )
    .unwrap();
    let path = dir.path().join("f.ssc");
    write_scene(&path, &s).unwrap();
    let back = load_scene(&path).unwrap();
    assert_eq!(back.values(), s.values());
    assert_eq!(back.mask(), s.mask());
    let ds = extract_windows(&s, 3).unwrap();
    let dpath = dir.path().join("f.swd");
    write_dataset(&dpath, &ds).unwrap();
    assert_eq!(read_dataset(&dpath).unwrap().len(), 1);
    assert!(load_scene(dir.path().join("missing")).is_err());
    assert!(read_dataset(&path).is_err());
}

#[test]
fn csv_errors() {
    assert!(scene_from_csv("", "x").is_err());
    assert!(scene_from_csv("0,0,1,2\n0,1,1\n", "x").is_err());
    assert!(scene_from_csv("0,0,1,2\n0,0,1,3\n", "x").is_err());
    assert!(scene_from_csv("0,0,1,nan\n", "x").is_err());
    assert!(scene_from_csv("0,0,1,1\n1,1,1,1\n", "x").is_err());
    let s = scene_from_csv("0,0,2,1.5\n", "x").unwrap();
    assert_eq!(s.class_names(), &["class1".to_string(), "class2".to_string()]);
}
