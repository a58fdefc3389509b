use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ModelConfig;
use super::model::{backward, forward, relu_pattern, weighted_ce};
use super::params::Parameters;
use super::plan::Plan;
use crate::distill::DistilledDataset;
use crate::error::{Error, Result};
use crate::graph_io::Graph;

const STEP: f64 = 1e-5;
const FLOOR: f64 = 1e-6;
pub const DEFAULT_COORDS: usize = 200;

/// A labelled mini-batch with per-sample loss weights.
#[derive(Debug, Clone)]
pub struct Batch {
    pub plan: Plan,
    pub labels: Vec<usize>,
    pub weights: Vec<f64>,
}

impl Batch {
    pub fn from_graphs(graphs: &[&Graph], layers: usize, in_dim: usize) -> Result<Batch> {
        let plans = graphs
            .iter()
            .map(|g| Plan::for_graph(g, layers, in_dim))
            .collect::<Result<Vec<_>>>()?;
        let parts: Vec<Vec<&Plan>> = plans.iter().map(|p| vec![p]).collect();
        let n = graphs.len().max(1) as f64;
        Ok(Batch {
            plan: Plan::concat(&parts),
            labels: graphs.iter().map(|g| g.label()).collect(),
            weights: vec![1.0 / n; graphs.len()],
        })
    }

    /// One sample per `(class, itemset index)` of `dd`.
    pub fn from_itemsets(
        dd: &DistilledDataset,
        picks: &[(usize, usize)],
        layers: usize,
    ) -> Result<Batch> {
        let plans = dd
            .trees
            .iter()
            .map(|t| Plan::for_tree(t, layers, &dd.feature_dict, dd.feature_dim))
            .collect::<Result<Vec<_>>>()?;
        let mut parts = Vec::with_capacity(picks.len());
        for &(c, i) in picks {
            let set = dd
                .per_class
                .get(c)
                .and_then(|s| s.get(i))
                .ok_or_else(|| Error::Argument(format!("no itemset {i} in class {c}")))?;
            parts.push(set.trees.iter().map(|&t| &plans[t]).collect::<Vec<_>>());
        }
        let n = picks.len().max(1) as f64;
        Ok(Batch {
            plan: Plan::concat(&parts),
            labels: picks.iter().map(|&(c, _)| c).collect(),
            weights: vec![1.0 / n; picks.len()],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub checked: usize,
    /// Coordinates passed over because a ReLU changed sign within ±h.
    pub skipped_kinks: usize,
}

/// Max relative error between analytic and central-difference gradients
/// over [`DEFAULT_COORDS`] coordinates sampled with `cfg.seed`.
pub fn gradient_check(cfg: &ModelConfig, params: &Parameters, batch: &Batch) -> Result<f64> {
    Ok(gradient_check_with(cfg, params, batch, DEFAULT_COORDS, cfg.seed)?.max_relative_error)
}

/// Relative error is `|a - n| / max(|a|, |n|, 1e-6)`. Coordinates whose
/// perturbation crosses a ReLU kink are skipped and replaced.
pub fn gradient_check_with(
    cfg: &ModelConfig,
    params: &Parameters,
    batch: &Batch,
    coords: usize,
    seed: u64,
) -> Result<GradCheckReport> {
    params.check(cfg)?;
    if batch.plan.input_dim() != params.in_dim() || batch.plan.num_layers() != cfg.layers {
        return Err(Error::Shape("batch was built for a different model".into()));
    }
    let eval_cfg = ModelConfig {
        dropout: 0.0,
        ..cfg.clone()
    };
    let fw = forward(&batch.plan, &eval_cfg, params, None);
    let pattern = relu_pattern(&fw);
    let analytic = backward(&batch.plan, &eval_cfg, params, &fw, &batch.labels, &batch.weights).to_flat();

    let base = params.to_flat();
    let mut order: Vec<usize> = (0..base.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut probe = params.clone();
    let mut eval_at = |flat: &[f64]| {
        probe.set_flat(flat);
        let f = forward(&batch.plan, &eval_cfg, &probe, None);
        (weighted_ce(&f.logits, &batch.labels, &batch.weights), relu_pattern(&f))
    };

    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        checked: 0,
        skipped_kinks: 0,
    };
    let mut flat = base.clone();
    for &k in &order {
        if report.checked == coords {
            break;
        }
        flat[k] = base[k] + STEP;
        let (plus, pp) = eval_at(&flat);
        flat[k] = base[k] - STEP;
        let (minus, pm) = eval_at(&flat);
        flat[k] = base[k];
        if pp != pattern || pm != pattern {
            report.skipped_kinks += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * STEP);
        let a = analytic[k];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FLOOR);
        report.max_relative_error = report.max_relative_error.max(rel);
        report.checked += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::{Arch, Pool};
    use rand::Rng;

    fn graphs(seed: u64) -> Vec<Graph> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..4)
            .map(|i| {
                let n = rng.gen_range(3..8);
                let mut edges = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        if rng.gen::<f64>() < 0.4 {
                            edges.push((a, b));
                        }
                    }
                }
                let feats = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0)]).collect();
                Graph::new(i, (i % 2) as usize, feats, edges).unwrap()
            })
            .collect()
    }

    #[test]
    fn random_models_pass() {
        let gs = graphs(1);
        let refs: Vec<&Graph> = gs.iter().collect();
        for arch in [Arch::Gcn, Arch::Gin] {
            for pool in [Pool::Sum, Pool::Mean] {
                let cfg = ModelConfig::new(arch, 2, 12, pool);
                let mut rng = ChaCha8Rng::seed_from_u64(9);
                let p = Parameters::init(&cfg, 2, 2, &mut rng);
                let batch = Batch::from_graphs(&refs, 2, 2).unwrap();
                let r = gradient_check_with(&cfg, &p, &batch, 200, 3).unwrap();
                assert_eq!(r.checked, 200, "{r:?}");
                assert!(r.max_relative_error < 1e-4, "{arch:?} {pool:?} {r:?}");
            }
        }
    }

    #[test]
    fn near_zero_weights_with_bias_jitter() {
        let gs = graphs(2);
        let refs: Vec<&Graph> = gs.iter().collect();
        let cfg = ModelConfig::new(Arch::Gcn, 2, 4, Pool::Mean);
        let mut p = Parameters::zeros(&cfg, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for layer in &mut p.layers {
            if let crate::gnn::Layer::Gcn(d) = layer {
                d.b.mapv_inplace(|_| rng.gen_range(0.05..0.1));
            }
        }
        p.classifier.b.mapv_inplace(|_| rng.gen_range(-0.1..0.1));
        let batch = Batch::from_graphs(&refs, 2, 2).unwrap();
        let r = gradient_check_with(&cfg, &p, &batch, 200, 1).unwrap();
        assert!(r.max_relative_error < 1e-6, "{r:?}");
    }
}
