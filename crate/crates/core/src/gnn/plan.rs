use std::collections::VecDeque;

use ndarray::Array2;

use crate::ctree::ComputationTree;
use crate::error::{Error, Result};
use crate::graph_io::{FeatureDictionary, Graph};

/// One message-passing step: slot `i` of the output reads `self_src[i]` and
/// `src[offsets[i]..offsets[i + 1]]` from the previous layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerPlan {
    pub(crate) self_src: Vec<u32>,
    /// GCN weight on the self term, `1 / d̂_v`.
    pub(crate) self_coef: Vec<f64>,
    pub(crate) offsets: Vec<u32>,
    pub(crate) src: Vec<u32>,
    /// GCN weight on each neighbor, `1 / sqrt(d̂_u d̂_v)`.
    pub(crate) coef: Vec<f64>,
}

impl LayerPlan {
    pub fn len(&self) -> usize {
        self.self_src.len()
    }

    fn empty() -> Self {
        LayerPlan {
            self_src: Vec::new(),
            self_coef: Vec::new(),
            offsets: vec![0],
            src: Vec::new(),
            coef: Vec::new(),
        }
    }
}

/// Architecture-independent description of a forward pass over one or more
/// graphs or trees, ending in readout groups over the last layer's slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub(crate) input: Array2<f64>,
    pub(crate) layers: Vec<LayerPlan>,
    pub(crate) groups: Vec<Vec<u32>>,
}

fn gcn_norm(d: usize) -> f64 {
    (d + 1) as f64
}

impl Plan {
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn input_dim(&self) -> usize {
        self.input.ncols()
    }

    /// Full-graph propagation; one readout group over all nodes.
    pub fn for_graph(g: &Graph, layers: usize, in_dim: usize) -> Result<Plan> {
        let n = g.num_nodes();
        let dim = g.feature_dim().unwrap_or(in_dim);
        if dim != in_dim {
            return Err(Error::Shape(format!(
                "graph {} has feature dimension {dim}, model expects {in_dim}",
                g.id()
            )));
        }
        let mut input = Array2::zeros((n, in_dim));
        for (v, x) in g.features().iter().enumerate() {
            for (j, &val) in x.iter().enumerate() {
                input[[v, j]] = val;
            }
        }
        let mut lp = LayerPlan::empty();
        for v in 0..n {
            let dv = gcn_norm(g.degree(v));
            lp.self_src.push(v as u32);
            lp.self_coef.push(1.0 / dv);
            for &u in g.neighbors(v) {
                lp.src.push(u as u32);
                lp.coef.push(1.0 / (dv * gcn_norm(g.degree(u))).sqrt());
            }
            lp.offsets.push(lp.src.len() as u32);
        }
        Ok(Plan {
            input,
            layers: vec![lp; layers],
            groups: vec![(0..n as u32).collect()],
        })
    }

    /// Propagation restricted to a computation tree: layer `l` keeps the
    /// nodes within `layers - l` hops of the root and each node aggregates
    /// only its children. The single readout group is the root.
    pub fn for_tree(
        t: &ComputationTree,
        layers: usize,
        features: &FeatureDictionary,
        in_dim: usize,
    ) -> Result<Plan> {
        if layers > t.depth() {
            return Err(Error::Depth {
                layers,
                depth: t.depth(),
            });
        }
        let nodes = t.nodes();
        // breadth-first positions, so every depth bound is a prefix
        let mut order = Vec::with_capacity(nodes.len());
        let mut level = vec![0usize; nodes.len()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in &nodes[v].children {
                level[c as usize] = level[v] + 1;
                queue.push_back(c as usize);
            }
        }
        let mut pos = vec![0u32; nodes.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i as u32;
        }
        let within = |h: usize| order.iter().take_while(|&&v| level[v] <= h).count();

        let n0 = within(layers);
        let mut input = Array2::zeros((n0, in_dim));
        for (i, &v) in order[..n0].iter().enumerate() {
            let fid = nodes[v].feature;
            if fid as usize >= features.len() {
                return Err(Error::Shape(format!("feature id {fid} missing from dictionary")));
            }
            let x = features.entry(fid);
            if x.len() != in_dim {
                return Err(Error::Shape(format!(
                    "tree feature dimension {}, model expects {in_dim}",
                    x.len()
                )));
            }
            for (j, &val) in x.iter().enumerate() {
                input[[i, j]] = val;
            }
        }
        let mut plans = Vec::with_capacity(layers);
        for l in 1..=layers {
            let m = within(layers - l);
            let mut lp = LayerPlan::empty();
            for &v in &order[..m] {
                let dv = gcn_norm(nodes[v].degree as usize);
                lp.self_src.push(pos[v]);
                lp.self_coef.push(1.0 / dv);
                for &c in &nodes[v].children {
                    let du = gcn_norm(nodes[c as usize].degree as usize);
                    lp.src.push(pos[c as usize]);
                    lp.coef.push(1.0 / (dv * du).sqrt());
                }
                lp.offsets.push(lp.src.len() as u32);
            }
            plans.push(lp);
        }
        Ok(Plan {
            input,
            layers: plans,
            groups: vec![vec![0]],
        })
    }

    /// Stacks plans side by side. Each entry of `parts` becomes one readout
    /// group holding the union of its plans' groups.
    pub fn concat(parts: &[Vec<&Plan>]) -> Plan {
        let all: Vec<&Plan> = parts.iter().flatten().copied().collect();
        let num_layers = all.first().map_or(0, |p| p.layers.len());
        let dim = all.first().map_or(0, |p| p.input.ncols());
        debug_assert!(all.iter().all(|p| p.layers.len() == num_layers));

        let rows: usize = all.iter().map(|p| p.input.nrows()).sum();
        let mut input = Array2::zeros((rows, dim));
        let mut at = 0;
        for p in &all {
            let r = p.input.nrows();
            input
                .slice_mut(ndarray::s![at..at + r, ..])
                .assign(&p.input);
            at += r;
        }

        let mut layers = Vec::with_capacity(num_layers);
        // offset of each plan within the previous layer
        let mut prev_base: Vec<u32> = Vec::with_capacity(all.len());
        let mut acc = 0u32;
        for p in &all {
            prev_base.push(acc);
            acc += p.input.nrows() as u32;
        }
        for l in 0..num_layers {
            let mut lp = LayerPlan::empty();
            let mut base = Vec::with_capacity(all.len());
            let mut here = 0u32;
            for (k, p) in all.iter().enumerate() {
                base.push(here);
                let q = &p.layers[l];
                let shift = prev_base[k];
                let edge_shift = lp.src.len() as u32;
                lp.self_src.extend(q.self_src.iter().map(|&s| s + shift));
                lp.self_coef.extend_from_slice(&q.self_coef);
                lp.src.extend(q.src.iter().map(|&s| s + shift));
                lp.coef.extend_from_slice(&q.coef);
                lp.offsets.extend(q.offsets[1..].iter().map(|&o| o + edge_shift));
                here += q.len() as u32;
            }
            layers.push(lp);
            prev_base = base;
        }

        let mut groups = Vec::with_capacity(parts.len());
        let mut k = 0;
        for part in parts {
            let mut grp = Vec::new();
            for p in part {
                let shift = prev_base[k];
                for g in &p.groups {
                    grp.extend(g.iter().map(|&s| s + shift));
                }
                k += 1;
            }
            groups.push(grp);
        }
        Plan {
            input,
            layers,
            groups,
        }
    }
}
