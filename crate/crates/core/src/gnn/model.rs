use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::Rng;

use super::config::{ModelConfig, Pool};
use super::params::{Dense, Layer, Parameters};
use super::plan::{LayerPlan, Plan};
use crate::ctree::ComputationTree;
use crate::error::{Error, Result};
use crate::graph_io::{FeatureDictionary, Graph};

/// Node representations `h^0 .. h^layers`, one row per node (or per tree
/// slot for tree passes, where deeper layers keep fewer rows).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub layers: Vec<Array2<f64>>,
}

impl EmbeddingTable {
    pub fn last(&self) -> &Array2<f64> {
        self.layers.last().expect("table holds h^0")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphOutput {
    pub embedding: Array1<f64>,
    pub logits: Array1<f64>,
    pub table: EmbeddingTable,
}

struct LayerCache {
    agg: Array2<f64>,
    z1: Array2<f64>,
    /// GIN only: `relu(z1)` and the second pre-activation.
    u: Option<Array2<f64>>,
    z2: Option<Array2<f64>>,
    mask: Option<Array2<f64>>,
}

pub(crate) struct Forward {
    hs: Vec<Array2<f64>>,
    caches: Vec<LayerCache>,
    pooled: Array2<f64>,
    pub(crate) logits: Array2<f64>,
}

fn relu(z: &Array2<f64>) -> Array2<f64> {
    z.mapv(|x| x.max(0.0))
}

fn affine(x: &Array2<f64>, d: &Dense) -> Array2<f64> {
    let mut z = x.dot(&d.w);
    z += &d.b;
    z
}

fn aggregate(prev: &Array2<f64>, lp: &LayerPlan, layer: &Layer) -> Array2<f64> {
    let mut out = Array2::zeros((lp.len(), prev.ncols()));
    for (i, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        let (lo, hi) = (lp.offsets[i] as usize, lp.offsets[i + 1] as usize);
        let s = lp.self_src[i] as usize;
        match layer {
            Layer::Gcn(_) => {
                row.scaled_add(lp.self_coef[i], &prev.row(s));
                for k in lo..hi {
                    row.scaled_add(lp.coef[k], &prev.row(lp.src[k] as usize));
                }
            }
            Layer::Gin { eps, .. } => {
                row.scaled_add(1.0 + eps, &prev.row(s));
                for k in lo..hi {
                    row += &prev.row(lp.src[k] as usize);
                }
            }
        }
    }
    out
}

/// Adds the aggregation's adjoint into `d_prev`; returns d/d eps for GIN.
fn aggregate_back(
    d_agg: &Array2<f64>,
    prev: &Array2<f64>,
    lp: &LayerPlan,
    layer: &Layer,
    d_prev: Option<&mut Array2<f64>>,
) -> f64 {
    let mut d_eps = 0.0;
    if let Layer::Gin { .. } = layer {
        for (i, row) in d_agg.axis_iter(Axis(0)).enumerate() {
            d_eps += row.dot(&prev.row(lp.self_src[i] as usize));
        }
    }
    let Some(d_prev) = d_prev else {
        return d_eps;
    };
    for (i, row) in d_agg.axis_iter(Axis(0)).enumerate() {
        let (lo, hi) = (lp.offsets[i] as usize, lp.offsets[i + 1] as usize);
        let s = lp.self_src[i] as usize;
        match layer {
            Layer::Gcn(_) => {
                d_prev.row_mut(s).scaled_add(lp.self_coef[i], &row);
                for k in lo..hi {
                    d_prev.row_mut(lp.src[k] as usize).scaled_add(lp.coef[k], &row);
                }
            }
            Layer::Gin { eps, .. } => {
                d_prev.row_mut(s).scaled_add(1.0 + eps, &row);
                for k in lo..hi {
                    let mut r = d_prev.row_mut(lp.src[k] as usize);
                    r += &row;
                }
            }
        }
    }
    d_eps
}

fn group_scale(pool: Pool, len: usize) -> f64 {
    match pool {
        Pool::Sum => 1.0,
        Pool::Mean if len == 0 => 0.0,
        Pool::Mean => 1.0 / len as f64,
    }
}

fn check_plan(plan: &Plan, cfg: &ModelConfig, params: &Parameters) -> Result<()> {
    params.check(cfg)?;
    if plan.num_layers() != cfg.layers {
        return Err(Error::Shape(format!(
            "plan built for {} layers, model has {}",
            plan.num_layers(),
            cfg.layers
        )));
    }
    if plan.input_dim() != params.in_dim() {
        return Err(Error::Shape(format!(
            "input dimension {}, model expects {}",
            plan.input_dim(),
            params.in_dim()
        )));
    }
    Ok(())
}

/// Runs `plan` through the network. Dropout is applied only when `rng` is
/// given and `cfg.dropout > 0`.
pub(crate) fn forward(
    plan: &Plan,
    cfg: &ModelConfig,
    params: &Parameters,
    mut rng: Option<&mut dyn rand::RngCore>,
) -> Forward {
    let mut hs = Vec::with_capacity(cfg.layers + 1);
    let mut caches = Vec::with_capacity(cfg.layers);
    hs.push(plan.input.clone());
    for (lp, layer) in plan.layers.iter().zip(&params.layers) {
        let prev = hs.last().unwrap();
        let agg = aggregate(prev, lp, layer);
        let (z1, u, z2, mut h) = match layer {
            Layer::Gcn(d) => {
                let z1 = affine(&agg, d);
                let h = relu(&z1);
                (z1, None, None, h)
            }
            Layer::Gin { mlp1, mlp2, .. } => {
                let z1 = affine(&agg, mlp1);
                let u = relu(&z1);
                let z2 = affine(&u, mlp2);
                let h = relu(&z2);
                (z1, Some(u), Some(z2), h)
            }
        };
        let mask = match rng.as_deref_mut() {
            Some(r) if cfg.dropout > 0.0 => {
                let keep = 1.0 - cfg.dropout;
                let m = Array2::from_shape_fn(h.raw_dim(), |_| {
                    if r.gen::<f64>() < keep {
                        1.0 / keep
                    } else {
                        0.0
                    }
                });
                h *= &m;
                Some(m)
            }
            _ => None,
        };
        caches.push(LayerCache { agg, z1, u, z2, mask });
        hs.push(h);
    }
    let last = hs.last().unwrap();
    let mut pooled = Array2::zeros((plan.groups.len(), last.ncols()));
    for (g, mut row) in plan.groups.iter().zip(pooled.axis_iter_mut(Axis(0))) {
        for &s in g {
            row += &last.row(s as usize);
        }
        row *= group_scale(cfg.pool, g.len());
    }
    let logits = affine(&pooled, &params.classifier);
    Forward {
        hs,
        caches,
        pooled,
        logits,
    }
}

fn log_softmax(row: ArrayView1<f64>) -> Array1<f64> {
    let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let lse = m + row.iter().map(|&x| (x - m).exp()).sum::<f64>().ln();
    row.mapv(|x| x - lse)
}

pub(crate) fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut p = logits.clone();
    for mut row in p.axis_iter_mut(Axis(0)) {
        let ls = log_softmax(row.view());
        row.assign(&ls.mapv(f64::exp));
    }
    p
}

/// `sum_g weights[g] * CE(logits[g], labels[g])`.
pub(crate) fn weighted_ce(logits: &Array2<f64>, labels: &[usize], weights: &[f64]) -> f64 {
    logits
        .axis_iter(Axis(0))
        .zip(labels.iter().zip(weights))
        .map(|(row, (&y, &w))| -w * log_softmax(row)[y])
        .sum()
}

/// Gradient of [`weighted_ce`] with respect to every parameter.
pub(crate) fn backward(
    plan: &Plan,
    cfg: &ModelConfig,
    params: &Parameters,
    fw: &Forward,
    labels: &[usize],
    weights: &[f64],
) -> Parameters {
    let mut grads = params.zeros_like();
    let mut d_logits = softmax_rows(&fw.logits);
    for (g, mut row) in d_logits.axis_iter_mut(Axis(0)).enumerate() {
        row[labels[g]] -= 1.0;
        row *= weights[g];
    }
    grads.classifier.w = fw.pooled.t().dot(&d_logits);
    grads.classifier.b = d_logits.sum_axis(Axis(0));
    let d_pooled = d_logits.dot(&params.classifier.w.t());

    let last = fw.hs.last().unwrap();
    let mut d_h = Array2::zeros(last.raw_dim());
    for (g, grp) in plan.groups.iter().enumerate() {
        let c = group_scale(cfg.pool, grp.len());
        for &s in grp {
            d_h.row_mut(s as usize).scaled_add(c, &d_pooled.row(g));
        }
    }

    for l in (0..cfg.layers).rev() {
        let cache = &fw.caches[l];
        if let Some(m) = &cache.mask {
            d_h *= m;
        }
        let prev = &fw.hs[l];
        let layer = &params.layers[l];
        let d_agg = match (layer, &mut grads.layers[l]) {
            (Layer::Gcn(d), Layer::Gcn(gd)) => {
                let dz = &d_h * &cache.z1.mapv(|z| if z > 0.0 { 1.0 } else { 0.0 });
                gd.w = cache.agg.t().dot(&dz);
                gd.b = dz.sum_axis(Axis(0));
                dz.dot(&d.w.t())
            }
            (Layer::Gin { mlp1, mlp2, .. }, Layer::Gin { mlp1: g1, mlp2: g2, .. }) => {
                let z2 = cache.z2.as_ref().unwrap();
                let u = cache.u.as_ref().unwrap();
                let dz2 = &d_h * &z2.mapv(|z| if z > 0.0 { 1.0 } else { 0.0 });
                g2.w = u.t().dot(&dz2);
                g2.b = dz2.sum_axis(Axis(0));
                let du = dz2.dot(&mlp2.w.t());
                let dz1 = du * &cache.z1.mapv(|z| if z > 0.0 { 1.0 } else { 0.0 });
                g1.w = cache.agg.t().dot(&dz1);
                g1.b = dz1.sum_axis(Axis(0));
                dz1.dot(&mlp1.w.t())
            }
            _ => unreachable!("gradient buffer mirrors parameters"),
        };
        let mut d_prev = (l > 0).then(|| Array2::zeros(prev.raw_dim()));
        let d_eps = aggregate_back(&d_agg, prev, &plan.layers[l], layer, d_prev.as_mut());
        if let Layer::Gin { eps, .. } = &mut grads.layers[l] {
            *eps = d_eps;
        }
        if let Some(dp) = d_prev {
            d_h = dp;
        }
    }
    grads
}

/// Sign pattern of every ReLU input; equal patterns mean a finite
/// difference stays on one linear piece.
pub(crate) fn relu_pattern(fw: &Forward) -> Vec<bool> {
    let mut out = Vec::new();
    for c in &fw.caches {
        out.extend(c.z1.iter().map(|&z| z > 0.0));
        if let Some(z2) = &c.z2 {
            out.extend(z2.iter().map(|&z| z > 0.0));
        }
    }
    out
}

/// Loss and gradient of one batch. `rng` enables dropout.
pub(crate) fn loss_and_grad(
    plan: &Plan,
    cfg: &ModelConfig,
    params: &Parameters,
    labels: &[usize],
    weights: &[f64],
    rng: Option<&mut dyn rand::RngCore>,
) -> (f64, Parameters) {
    let fw = forward(plan, cfg, params, rng);
    let loss = weighted_ce(&fw.logits, labels, weights);
    let grads = backward(plan, cfg, params, &fw, labels, weights);
    (loss, grads)
}

/// Whole-graph pass: pooled embedding, class logits and every layer's node
/// table.
pub fn forward_graph(g: &Graph, cfg: &ModelConfig, params: &Parameters) -> Result<GraphOutput> {
    let plan = Plan::for_graph(g, cfg.layers, params.in_dim())?;
    check_plan(&plan, cfg, params)?;
    let fw = forward(&plan, cfg, params, None);
    Ok(GraphOutput {
        embedding: fw.pooled.row(0).to_owned(),
        logits: fw.logits.row(0).to_owned(),
        table: EmbeddingTable { layers: fw.hs },
    })
}

/// Root embedding `h^layers` of a computation tree.
pub fn forward_tree(
    t: &ComputationTree,
    features: &FeatureDictionary,
    cfg: &ModelConfig,
    params: &Parameters,
) -> Result<Array1<f64>> {
    let plan = Plan::for_tree(t, cfg.layers, features, params.in_dim())?;
    check_plan(&plan, cfg, params)?;
    let fw = forward(&plan, cfg, params, None);
    Ok(fw.hs.last().unwrap().row(0).to_owned())
}

/// Pools root embeddings of a set of trees and classifies the result.
pub fn embed_tree_set(
    trees: &[&ComputationTree],
    features: &FeatureDictionary,
    cfg: &ModelConfig,
    params: &Parameters,
) -> Result<(Array1<f64>, Array1<f64>)> {
    if trees.is_empty() {
        return Err(Error::Argument("tree set is empty".into()));
    }
    let plans = trees
        .iter()
        .map(|t| Plan::for_tree(t, cfg.layers, features, params.in_dim()))
        .collect::<Result<Vec<_>>>()?;
    let plan = Plan::concat(&[plans.iter().collect()]);
    check_plan(&plan, cfg, params)?;
    let fw = forward(&plan, cfg, params, None);
    Ok((fw.pooled.row(0).to_owned(), fw.logits.row(0).to_owned()))
}

/// Log class probabilities for every readout group of `plan`. Logs keep
/// rankings intact where probabilities would saturate to 0 or 1.
pub(crate) fn predict_log(plan: &Plan, cfg: &ModelConfig, params: &Parameters) -> Result<Array2<f64>> {
    check_plan(plan, cfg, params)?;
    let mut out = forward(plan, cfg, params, None).logits;
    for mut row in out.axis_iter_mut(Axis(0)) {
        let ls = log_softmax(row.view());
        row.assign(&ls);
    }
    Ok(out)
}
