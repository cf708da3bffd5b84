use wiou::benchmark::{
    default_scenes, generate_dataset, generate_equal_error_triplet, kitti_palette, read_dataset,
    run_benchmark, write_dataset, BenchmarkConfig, Variant, DEFAULT_ERROR_COUNT, DEFAULT_LEVELS,
    DEFAULT_SEED, IOU_LABEL,
};
use wiou::metrics::{confusion, iou};

#[test]
fn dataset_order_and_round_trip() {
    let scenes = default_scenes();
    let pairs = generate_dataset(&scenes, DEFAULT_LEVELS, DEFAULT_SEED).unwrap();
    assert_eq!(pairs.len(), 33);
    let order = Variant::sequence(DEFAULT_LEVELS);
    for (i, p) in pairs.iter().enumerate() {
        assert_eq!(p.scene, scenes[i / 11].name);
        assert_eq!(p.variant, order[i % 11]);
    }
    assert_eq!(pairs, generate_dataset(&scenes, DEFAULT_LEVELS, DEFAULT_SEED).unwrap());

    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), &scenes, &pairs, &kitti_palette(), DEFAULT_LEVELS, DEFAULT_SEED)
        .unwrap();
    let loaded = read_dataset(dir.path()).unwrap();
    assert_eq!(loaded.manifest.scenes, scenes);
    assert_eq!(loaded.pairs.len(), 33);
    for (a, b) in pairs.iter().zip(&loaded.pairs) {
        assert_eq!((&a.scene, a.variant), (&b.scene, b.variant));
        assert_eq!(a.gt.labels(), b.gt.labels());
        assert_eq!(a.pred.labels(), b.pred.labels());
    }
}

#[test]
fn iou_column_matches_direct_computation() {
    let scenes = default_scenes();
    let pairs = generate_dataset(&scenes, 2, 11).unwrap();
    let config = BenchmarkConfig {
        error_count: 0,
        ..BenchmarkConfig::default()
    };
    let result = run_benchmark(&pairs, &scenes, &config).unwrap();
    assert!(result.triplets.is_empty());
    let column = &result.series.iter().find(|s| s.name == IOU_LABEL).unwrap().values;
    for (p, &v) in pairs.iter().zip(column) {
        let classes = p.gt.classes_present();
        let sum: f64 = classes
            .iter()
            .map(|&c| iou(&confusion(&p.gt, &p.pred, c).unwrap()).unwrap())
            .sum();
        assert_eq!(v, sum / classes.len() as f64);
    }
}

#[test]
fn reports_are_deterministic() {
    let scenes = default_scenes();
    let pairs = generate_dataset(&scenes, 1, 5).unwrap();
    let config = BenchmarkConfig {
        error_count: 60,
        ..BenchmarkConfig::default()
    };
    let a = run_benchmark(&pairs, &scenes, &config).unwrap();
    let b = run_benchmark(&pairs, &scenes, &config).unwrap();
    assert_eq!(a.comparison.to_json(), b.comparison.to_json());
    assert_eq!(a.per_image_csv(), b.per_image_csv());
    assert_eq!(a.triplet_csv(), b.triplet_csv());
}

#[test]
fn triplet_counts_are_identical() {
    for spec in default_scenes() {
        let t = generate_equal_error_triplet(&spec, DEFAULT_ERROR_COUNT).unwrap();
        for class in 0..spec.num_classes as u8 {
            let c0 = confusion(&t.gt, &t.members[0].1, class).unwrap();
            for (_, pred) in &t.members[1..] {
                assert_eq!(confusion(&t.gt, pred, class).unwrap(), c0);
            }
        }
    }
}
