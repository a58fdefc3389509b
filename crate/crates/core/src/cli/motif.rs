use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph_io::{Dataset, Graph};

pub const MOTIF_MIN_PER_CLASS: usize = 10;
const EDGE_P: f64 = 0.2;
const BASE_FEATURE: [f64; 2] = [1.0, 0.0];
const STAR_FEATURE: [f64; 2] = [0.0, 1.0];
const STAR_LEAVES: usize = 4;

/// Erdős–Rényi `G(n, 0.2)` with `n` uniform in 12..=20 and one shared
/// feature on every node.
fn base_graph(rng: &mut ChaCha8Rng) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(12..=20);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(EDGE_P) {
                edges.push((u, v));
            }
        }
    }
    (n, edges)
}

/// Two-class planted-motif dataset. Class 1 graphs carry an extra 5-node
/// star (center plus four leaves) with a distinct feature, hooked to a
/// random base node through one of its leaves. Labels alternate 0, 1, ...
pub fn gen_motif(n_per_class: usize, seed: u64) -> Result<Dataset> {
    if n_per_class < MOTIF_MIN_PER_CLASS {
        return Err(Error::Argument(format!(
            "need at least {MOTIF_MIN_PER_CLASS} graphs per class, got {n_per_class}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::with_capacity(2 * n_per_class);
    for i in 0..2 * n_per_class {
        let label = i % 2;
        let (n, mut edges) = base_graph(&mut rng);
        let mut features = vec![BASE_FEATURE.to_vec(); n];
        if label == 1 {
            let center = n;
            for leaf in 1..=STAR_LEAVES {
                edges.push((center, n + leaf));
            }
            features.extend(std::iter::repeat_n(STAR_FEATURE.to_vec(), STAR_LEAVES + 1));
            let anchor = rng.gen_range(0..n);
            edges.push((anchor, n + 1));
        }
        graphs.push(Graph::new(i as i64, label, features, edges)?);
    }
    Dataset::new(graphs, Some(2))
}
