mod common;

use std::fs;

use common::*;
use ndarray::{array, Array2};
use proptest::prelude::*;

use sec_gfd::data::{
    anomaly_side_heterophily, encode_binary_features, generate_synthetic, load_dataset,
    load_graph_and_labels, load_report, make_split, save_dataset, save_report, to_json, Dataset,
    SplitMasks, SyntheticConfig,
};
use sec_gfd::graph::{Label, LabelVector, SparseGraph};
use sec_gfd::model::ModelConfig;
use sec_gfd::train::{train, TrainConfig};
use sec_gfd::Error;

fn write_fixture(dir: &std::path::Path, edges: &str, features: &str, labels: &str) {
    fs::write(dir.join("edges.csv"), edges).unwrap();
    fs::write(dir.join("features.csv"), features).unwrap();
    fs::write(dir.join("labels.csv"), labels).unwrap();
}

fn load(dir: &std::path::Path) -> sec_gfd::Result<Dataset> {
    load_dataset(&dir.join("edges.csv"), &dir.join("features.csv"), &dir.join("labels.csv"))
}

#[test]
fn three_node_fixture() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(
        dir.path(),
        "# path with a duplicate\n0,1\n1,2\n2,1\n",
        "1.0,0.5\n-2,0\n0.25,3e2\n",
        "0,0\n1,1\n",
    );
    let d = load(dir.path()).unwrap();
    assert_eq!(d.graph.to_dense_adjacency(), array![[0., 1., 0.], [1., 0., 1.], [0., 1., 0.]]);
    assert_eq!(d.features, array![[1.0, 0.5], [-2.0, 0.0], [0.25, 300.0]]);
    assert_eq!(d.labels.0, vec![Label::Normal, Label::Anomaly, Label::Unknown]);
}

#[test]
fn malformed_lines_report_their_number() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), "0,1\n# fine\n1;2\n", "1\n2\n3\n", "0,0\n");
    match load(dir.path()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
    write_fixture(dir.path(), "0,1\n", "1,2\n3\n", "0,0\n");
    assert!(matches!(load(dir.path()), Err(Error::Parse { line: 2, .. })));
    write_fixture(dir.path(), "0,1\n", "1\n2\n", "0,0\n1,2\n");
    assert!(matches!(load(dir.path()), Err(Error::Parse { line: 2, .. })));
}

#[test]
fn count_mismatches_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), "0,1\n", "1\n2\n", "0,0\n1,1\n2,0\n");
    assert!(matches!(load(dir.path()), Err(Error::Schema(_))));
    write_fixture(dir.path(), "0,5\n", "1\n2\n", "0,0\n");
    assert!(matches!(load(dir.path()), Err(Error::Schema(_))));
    fs::write(dir.path().join("features.csv"), b"SGFD\x02\0\0\0\0\0\0\0\x01\0\0\0\0\0\0\0\0\0").unwrap();
    assert!(matches!(load(dir.path()), Err(Error::Schema(_))));
}

#[test]
fn missing_files_are_not_found() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load(dir.path()), Err(Error::NotFound(_))));
    assert!(matches!(load_report(&dir.path().join("nope.json")), Err(Error::NotFound(_))));
}

#[test]
fn binary_features_parse_like_their_csv_twin() {
    let dir = tempfile::tempdir().unwrap();
    // values exactly representable in f32
    let f = array![[0.5, -1.25, 3.0], [1e3, 0.0, -0.375]];
    write_fixture(dir.path(), "0,1\n", "0.5,-1.25,3\n1000,0,-0.375\n", "0,0\n1,1\n");
    fs::write(dir.path().join("features.bin"), encode_binary_features(&f)).unwrap();
    let csv = load(dir.path()).unwrap();
    let bin = load_dataset(
        &dir.path().join("edges.csv"),
        &dir.path().join("features.bin"),
        &dir.path().join("labels.csv"),
    )
    .unwrap();
    assert_eq!(csv.features, f);
    assert_eq!(bin.features, csv.features);
}

#[test]
fn save_then_load_is_bitwise_identical() {
    let d = generate_synthetic(&SyntheticConfig {
        num_nodes: 200,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_dataset(&d, dir.path(), false).unwrap();
    let back = load(dir.path()).unwrap();
    assert_eq!(back.graph, d.graph);
    assert_eq!(back.labels, d.labels);
    assert!(back.features.iter().zip(&d.features).all(|(a, b)| a.to_bits() == b.to_bits()));

    let f32_features = d.features.mapv(|v| v as f32 as f64);
    let d32 = Dataset::new(d.name.clone(), d.graph.clone(), f32_features, d.labels.clone()).unwrap();
    save_dataset(&d32, dir.path(), true).unwrap();
    let back = load_dataset(
        &dir.path().join("edges.csv"),
        &dir.path().join("features.bin"),
        &dir.path().join("labels.csv"),
    )
    .unwrap();
    assert!(back.features.iter().zip(&d32.features).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn graph_only_loading_infers_node_count() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), "0,1\n1,2\n", "", "3,1\n");
    let (g, labels) =
        load_graph_and_labels(&dir.path().join("edges.csv"), &dir.path().join("labels.csv"), None).unwrap();
    assert_eq!(g.num_nodes(), 4);
    assert_eq!(labels.get(3), Label::Anomaly);
    assert!(matches!(
        load_graph_and_labels(&dir.path().join("edges.csv"), &dir.path().join("labels.csv"), Some(3)),
        Err(Error::Schema(_))
    ));
}

#[test]
fn report_round_trip_and_nan_rejection() {
    let d = generate_synthetic(&SyntheticConfig {
        num_nodes: 120,
        anomaly_rate: 0.1,
        mean_degree: 4.0,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let split = make_split(&d.labels, (0.4, 0.2, 0.4), 1, true).unwrap();
    let model = ModelConfig {
        hidden_dim: 8,
        ..ModelConfig::default()
    };
    let (_, report) = train(&d, &split, &model, &TrainConfig { epochs: 5, ..TrainConfig::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    save_report(&report, &path).unwrap();
    assert_eq!(load_report(&path).unwrap(), report);

    let mut bad = report.clone();
    bad.auc = f64::NAN;
    assert!(matches!(to_json(&bad), Err(Error::InvalidValue(_))));
    assert!(matches!(save_report(&bad, &path), Err(Error::InvalidValue(_))));
    // the earlier file is untouched by the rejected write
    assert_eq!(load_report(&path).unwrap(), report);
}

#[test]
fn generator_meets_heterophily_target() {
    for seed in 0..10 {
        let cfg = SyntheticConfig {
            seed,
            ..SyntheticConfig::default()
        };
        let d = generate_synthetic(&cfg).unwrap();
        assert_eq!(d.labels.class_counts().1, 100);
        let h = anomaly_side_heterophily(&d.graph, &d.labels).unwrap();
        assert!((h - cfg.anomaly_heterophily).abs() <= 0.1, "seed {seed}: {h}");
    }
    let a = generate_synthetic(&SyntheticConfig::default()).unwrap();
    let b = generate_synthetic(&SyntheticConfig::default()).unwrap();
    assert_eq!(a.graph, b.graph);
    assert!(a.features.iter().zip(&b.features).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn generator_rejects_infeasible_settings() {
    let base = SyntheticConfig::default();
    for bad in [
        SyntheticConfig { anomaly_rate: 0.5, ..base.clone() },
        SyntheticConfig { anomaly_rate: 0.0, ..base.clone() },
        SyntheticConfig { mean_degree: 1.5, ..base.clone() },
        SyntheticConfig { num_nodes: 10, mean_degree: 9.0, ..base.clone() },
        SyntheticConfig { anomaly_heterophily: 1.2, ..base.clone() },
    ] {
        assert!(matches!(generate_synthetic(&bad), Err(Error::InvalidInput(_))), "{bad:?}");
    }
}

#[test]
fn split_is_seeded() {
    let labels = LabelVector::from_flags(&(0..100).map(|i| i % 10 == 0).collect::<Vec<_>>());
    assert_eq!(
        make_split(&labels, (0.4, 0.2, 0.4), 3, true).unwrap(),
        make_split(&labels, (0.4, 0.2, 0.4), 3, true).unwrap()
    );
    assert_ne!(
        make_split(&labels, (0.4, 0.2, 0.4), 3, true).unwrap(),
        make_split(&labels, (0.4, 0.2, 0.4), 4, true).unwrap()
    );
}

fn labeled_population() -> impl Strategy<Value = Vec<Label>> {
    proptest::collection::vec(
        prop_oneof![6 => Just(Label::Normal), 2 => Just(Label::Anomaly), 1 => Just(Label::Unknown)],
        10..300,
    )
    .prop_filter("each class needs three members", |ls| {
        let lv = LabelVector(ls.clone());
        let (n, a) = lv.class_counts();
        n >= 3 && a >= 3
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stratified_split_partitions_labeled_nodes(
        labels in labeled_population(),
        seed in any::<u64>(),
        train_frac in 0.1..0.8f64,
    ) {
        let val_frac = (1.0 - train_frac) / 3.0;
        let fractions = (train_frac, val_frac, 1.0 - train_frac - val_frac);
        let lv = LabelVector(labels.clone());
        let s = make_split(&lv, fractions, seed, true).unwrap();
        for (v, l) in labels.iter().enumerate() {
            let hits = [s.train[v], s.val[v], s.test[v]].iter().filter(|&&b| b).count();
            prop_assert_eq!(hits, usize::from(l.is_known()));
        }
        for class in [Label::Normal, Label::Anomaly] {
            let total = labels.iter().filter(|&&l| l == class).count() as f64;
            for (mask, frac) in [(&s.train, fractions.0), (&s.val, fractions.1), (&s.test, fractions.2)] {
                let got = labels.iter().zip(mask.iter()).filter(|&(&l, &m)| m && l == class).count() as f64;
                prop_assert!((got - frac * total).abs() <= 1.0, "{class:?}: {got} vs {}", frac * total);
            }
        }
        prop_assert_eq!(
            SplitMasks::count(&s.train) + SplitMasks::count(&s.val) + SplitMasks::count(&s.test),
            labels.iter().filter(|l| l.is_known()).count()
        );
    }

    #[test]
    fn csv_round_trip_is_bitwise(seed in any::<u64>(), rows in 1usize..20, cols in 1usize..6) {
        let f: Array2<f64> = random_matrix(&mut rng(seed), rows, cols).mapv(|v| v * 1e3);
        let g = SparseGraph::from_edges(rows, &[]).unwrap();
        let d = Dataset::new("t", g, f.clone(), LabelVector(vec![Label::Unknown; rows])).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&d, dir.path(), false).unwrap();
        let back = load(dir.path()).unwrap();
        prop_assert!(back.features.iter().zip(&f).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
