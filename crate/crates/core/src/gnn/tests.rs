use super::*;
use crate::distill::{distill, DistillConfig};
use crate::graph_io::{Dataset, Graph};
use rand::SeedableRng;

fn path(id: i64, label: usize, n: usize, x: Vec<f64>) -> Graph {
    let edges = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(id, label, vec![x; n], edges).unwrap()
}

fn toy() -> Dataset {
    let graphs = (0..12)
        .map(|i| {
            let label = i % 2;
            let x = if label == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] };
            path(i as i64, label, 3 + (i / 2) % 3, x)
        })
        .collect();
    Dataset::new(graphs, None).unwrap()
}

fn triangles(n: usize) -> Dataset {
    let graphs = (0..n)
        .map(|i| {
            let label = i % 2;
            let x = vec![1.0 + label as f64];
            Graph::new(i as i64, label, vec![x; 3], vec![(0, 1), (1, 2), (0, 2)]).unwrap()
        })
        .collect();
    Dataset::new(graphs, None).unwrap()
}

#[test]
fn zero_epochs_return_initialization() {
    let ds = toy();
    let mut cfg = ModelConfig::new(Arch::Gcn, 2, 8, Pool::Sum);
    cfg.seed = 7;
    let opts = TrainOptions {
        epochs: 0,
        ..Default::default()
    };
    let (p, h) = train(TrainData::Full(&ds), None, &cfg, &opts).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    assert_eq!(p, Parameters::init(&cfg, 2, 2, &mut rng));
    assert!(h.records.is_empty());
}

#[test]
fn separable_toy_is_learned() {
    let ds = toy();
    for arch in [Arch::Gcn, Arch::Gin] {
        let mut cfg = ModelConfig::new(arch, 2, 16, Pool::Mean);
        cfg.seed = 3;
        let opts = TrainOptions {
            epochs: 150,
            batch_size: ds.len(),
            patience: 15,
            lr: 1e-2,
        };
        let (p, h) = train(TrainData::Full(&ds), None, &cfg, &opts).unwrap();
        for w in h.records[..10].windows(2) {
            assert!(w[1].train_loss < w[0].train_loss, "{arch:?}: {:?}", h.records);
        }
        assert_eq!(accuracy(&p, &cfg, &ds).unwrap(), 1.0);
    }
}

#[test]
fn seeded_training_is_bit_identical() {
    let ds = toy();
    let mut cfg = ModelConfig::new(Arch::Gin, 2, 8, Pool::Sum);
    cfg.dropout = 0.3;
    cfg.seed = 11;
    let opts = TrainOptions {
        epochs: 5,
        batch_size: 4,
        ..Default::default()
    };
    let a = train(TrainData::Full(&ds), Some(&ds), &cfg, &opts).unwrap();
    let b = train(TrainData::Full(&ds), Some(&ds), &cfg, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.1.to_csv(), b.1.to_csv());
    cfg.seed = 12;
    let c = train(TrainData::Full(&ds), Some(&ds), &cfg, &opts).unwrap();
    assert_ne!(a.0, c.0);
}

#[test]
fn early_stopping_keeps_best_validation_epoch() {
    let ds = toy();
    let cfg = ModelConfig::new(Arch::Gcn, 1, 4, Pool::Sum);
    let opts = TrainOptions {
        epochs: 30,
        batch_size: 4,
        patience: 2,
        lr: 0.5,
    };
    let (p, h) = train(TrainData::Full(&ds), Some(&ds), &cfg, &opts).unwrap();
    let best = h
        .records
        .iter()
        .min_by(|a, b| a.val_loss.unwrap().total_cmp(&b.val_loss.unwrap()))
        .unwrap();
    assert_eq!(best.epoch, h.best_epoch);
    let loss = dataset_loss(&p, &cfg, &ds).unwrap();
    assert_eq!(loss, best.val_loss.unwrap());
    let last = h.records.last().unwrap().epoch;
    assert!(last == 30 || last == h.best_epoch + 3);
}

#[test]
fn distilled_training_runs_and_checks_depth() {
    let ds = triangles(10);
    let dd = distill(&ds, &DistillConfig::new(1, vec![0.5, 0.5])).unwrap();
    let cfg = ModelConfig::new(Arch::Gin, 2, 4, Pool::Sum);
    let err = train(TrainData::Distilled(&dd), Some(&ds), &cfg, &TrainOptions::default()).unwrap_err();
    assert_eq!(err.kind(), "ConfigError");

    let cfg = ModelConfig::new(Arch::Gin, 1, 8, Pool::Sum);
    let opts = TrainOptions {
        epochs: 60,
        batch_size: 4,
        patience: 100,
        lr: 1e-2,
    };
    let (p, h) = train(TrainData::Distilled(&dd), Some(&ds), &cfg, &opts).unwrap();
    assert_eq!(h.records.len(), 60);
    assert_eq!(evaluate_auc(&p, &cfg, &ds).unwrap(), 1.0);
}

#[test]
fn triangle_loss_gap_vanishes_under_mean_pooling() {
    let ds = triangles(8);
    let dd = distill(&ds, &DistillConfig::new(1, vec![0.1, 0.1])).unwrap();
    let cfg = ModelConfig::new(Arch::Gcn, 1, 6, Pool::Mean);
    let opts = TrainOptions {
        epochs: 4,
        batch_size: 4,
        lr: 1e-2,
        ..Default::default()
    };
    let gaps = loss_gap_experiment(&ds, &dd, &cfg, &opts).unwrap();
    assert_eq!(gaps.len(), 5);
    assert_eq!(gaps[0].epoch, 0);
    for g in &gaps {
        assert!(g.gap < 1e-12, "{g:?}");
    }
}

#[test]
fn degenerate_test_set() {
    let ds = triangles(4);
    let one = Dataset::new(ds.graphs().iter().filter(|g| g.label() == 0).cloned().collect(), Some(2)).unwrap();
    let cfg = ModelConfig::new(Arch::Gcn, 1, 2, Pool::Sum);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let p = Parameters::init(&cfg, 1, 2, &mut rng);
    assert_eq!(evaluate_auc(&p, &cfg, &one).unwrap_err().kind(), "DegenerateError");
}

#[test]
fn history_csv_layout() {
    let h = History {
        records: vec![EpochRecord {
            epoch: 1,
            train_loss: 0.5,
            val_loss: Some(0.25),
            val_auc: None,
        }],
        best_epoch: 1,
    };
    assert_eq!(h.to_csv(), "epoch,train_loss,val_loss,val_auc\n1,0.5,0.25,\n");
}
