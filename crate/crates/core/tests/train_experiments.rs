use proptest::prelude::*;

use sec_gfd::data::{generate_synthetic, make_split, Dataset, SyntheticConfig};
use sec_gfd::experiments::{
    clip_edges, csv_string, run_ablation, run_clip_experiment, run_order_sweep, ClipExperimentConfig,
    ClipMode, ClipVariant, ExperimentConfig,
};
use sec_gfd::graph::{heterophily, LabelVector, SparseGraph};
use sec_gfd::model::ModelConfig;
use sec_gfd::train::{evaluate, score_probs, train, TrainConfig};

fn small() -> Dataset {
    generate_synthetic(&SyntheticConfig {
        num_nodes: 300,
        anomaly_rate: 0.1,
        mean_degree: 6.0,
        ..SyntheticConfig::default()
    })
    .unwrap()
}

fn quick() -> ExperimentConfig {
    ExperimentConfig {
        seeds: vec![0, 1],
        model: ModelConfig {
            hidden_dim: 8,
            ..ModelConfig::default()
        },
        train: TrainConfig {
            epochs: 8,
            learning_rate: 0.01,
            ..TrainConfig::default()
        },
        ..ExperimentConfig::default()
    }
}

#[test]
fn default_synthetic_training_lowers_the_loss() {
    let d = generate_synthetic(&SyntheticConfig::default()).unwrap();
    let split = make_split(&d.labels, (0.4, 0.2, 0.4), 0, true).unwrap();
    let (model, report) = train(&d, &split, &ModelConfig::default(), &TrainConfig::default()).unwrap();
    assert_eq!(report.history.len(), 100);
    assert!(report.history[99].loss < report.history[0].loss);
    assert!(report.history.iter().all(|r| r.loss.is_finite() && r.env_loss.is_some()));
    assert!(model.params.is_finite());
    assert!((0.0..=1.0).contains(&report.auc) && (0.0..=1.0).contains(&report.f1_macro));
    assert_eq!(evaluate(&model, &d, &split.test, 0.5).unwrap().auc, report.auc);
}

#[test]
fn oracle_and_inverted_scores() {
    let d = small();
    let truth: Vec<f64> = d.anomaly_flags().iter().map(|&a| f64::from(u8::from(a))).collect();
    let all = vec![true; d.num_nodes()];
    let (f1, auc, count) = score_probs(&truth, &d, &all, 0.5).unwrap();
    assert_eq!((f1, auc, count), (1.0, 1.0, d.num_nodes()));
    let inverted: Vec<f64> = truth.iter().map(|p| 1.0 - p).collect();
    assert_eq!(score_probs(&inverted, &d, &all, 0.5).unwrap().1, 0.0);
}

#[test]
fn sweep_of_one_order_equals_a_plain_train_call() {
    let d = small();
    let cfg = quick();
    let rows = run_order_sweep(&d, &[2], &cfg).unwrap();
    assert_eq!(rows.len(), 2);
    let rows3 = run_order_sweep(&d, &[1, 2, 3], &cfg).unwrap();
    assert_eq!(rows3.len(), 6);
    for row in &rows {
        let split = make_split(&d.labels, cfg.split, row.seed, true).unwrap();
        let tc = TrainConfig {
            seed: row.seed,
            ..cfg.train.clone()
        };
        let (_, report) = train(&d, &split, &cfg.model, &tc).unwrap();
        assert_eq!(row.auc, report.auc);
        assert_eq!(row.f1_macro, report.f1_macro);
    }
    let ablation = run_ablation(&d, &cfg).unwrap();
    assert_eq!(ablation.len(), 8);
    let full: Vec<_> = ablation.iter().filter(|r| r.variant == "full").collect();
    assert_eq!(full[0].auc, rows[0].auc);
    assert_eq!(full[1].auc, rows[1].auc);
}

#[test]
fn clip_experiment_shape_and_rerun_equality() {
    let d = small();
    let cfg = ClipExperimentConfig {
        ratios: vec![0.0, 0.5, 1.0],
        base: quick(),
        ..ClipExperimentConfig::default()
    };
    let a = run_clip_experiment(&d, &cfg).unwrap();
    assert_eq!(a.len(), 3 * 3 * 2);
    let b = run_clip_experiment(&d, &cfg).unwrap();
    assert_eq!(csv_string(&a).unwrap(), csv_string(&b).unwrap());
    let header = csv_string(&a).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "variant,ratio,C,flags,seed,f1_macro,auc,wall_ms");

    let baseline = ClipExperimentConfig {
        ratios: vec![0.0],
        variants: ClipVariant::ALL.to_vec(),
        mode: ClipMode::TrainGraph,
        ..cfg
    };
    assert_eq!(run_clip_experiment(&d, &baseline).unwrap().len(), 3 * 2);
}

#[test]
fn full_clip_removes_all_heterophily() {
    let d = small();
    let clipped = clip_edges(&d.graph, &d.labels, ClipMode::FullGraph, 1.0, 4, None).unwrap();
    assert_eq!(heterophily(&clipped, &d.labels).unwrap().graph, 0.0);
    assert_eq!(clip_edges(&d.graph, &d.labels, ClipMode::FullGraph, 0.0, 4, None).unwrap(), d.graph);
}

fn arb_clip_case() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<bool>, Vec<bool>)> {
    (2usize..40).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec((0..n, 0..n), 0..4 * n),
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(any::<bool>(), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn train_graph_clipping_stays_inside_the_train_split(
        (n, edges, flags, mask) in arb_clip_case(),
        ratio in 0.0..=1.0f64,
        seed in any::<u64>(),
    ) {
        let g = SparseGraph::from_edges(n, &edges).unwrap();
        let labels = LabelVector::from_flags(&flags);
        let clipped = clip_edges(&g, &labels, ClipMode::TrainGraph, ratio, seed, Some(&mask)).unwrap();
        let candidates = g
            .edges()
            .filter(|&(u, v)| flags[u] != flags[v] && mask[u] && mask[v])
            .count();
        prop_assert_eq!(g.num_edges() - clipped.num_edges(), (ratio * candidates as f64).floor() as usize);
        for (u, v) in g.edges() {
            if !clipped.has_edge(u, v) {
                prop_assert!(mask[u] && mask[v] && flags[u] != flags[v]);
            }
        }
        for (u, v) in clipped.edges() {
            prop_assert!(g.has_edge(u, v));
        }
    }
}
