//! Reader for the TU graph-classification text format.
//!
//! A dataset directory `DS/` holds `DS_A.txt` (one `u, v` edge per line over
//! 1-based global node ids), `DS_graph_indicator.txt` (graph id of each node),
//! `DS_graph_labels.txt` (one label per graph) and optionally
//! `DS_node_labels.txt`, which is one-hot encoded into node features.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::graph::{Dataset, Graph};
use crate::error::{Error, Result};

pub fn load_tu(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let prefix = find_prefix(dir)?;
    let file = |suffix: &str| dir.join(format!("{prefix}_{suffix}.txt"));

    let indicator = read_ints(&file("graph_indicator"))?;
    let graph_labels = read_ints(&file("graph_labels"))?;
    let node_labels_path = file("node_labels");
    let node_labels = if node_labels_path.exists() {
        Some(read_ints(&node_labels_path)?)
    } else {
        None
    };
    let edges = read_edges(&file("A"))?;

    let num_graphs = graph_labels.len();
    let num_nodes = indicator.len();

    // Local node ids follow global order within each graph.
    let mut local = vec![0usize; num_nodes];
    let mut sizes = vec![0usize; num_graphs];
    for (v, &gid) in indicator.iter().enumerate() {
        let g = to_index(gid, num_graphs, "graph id", v + 1)?;
        local[v] = sizes[g];
        sizes[g] += 1;
    }

    if let Some(nl) = &node_labels {
        if nl.len() != num_nodes {
            return Err(Error::Inconsistency(format!(
                "{} node labels for {num_nodes} nodes",
                nl.len()
            )));
        }
    }
    let node_vocab: Vec<i64> = node_labels
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut features: Vec<Vec<Vec<f64>>> = sizes.iter().map(|&n| vec![Vec::new(); n]).collect();
    for v in 0..num_nodes {
        let g = (indicator[v] - 1) as usize;
        if let Some(nl) = &node_labels {
            let mut row = vec![0.0; node_vocab.len()];
            let slot = node_vocab.binary_search(&nl[v]).expect("label in vocabulary");
            row[slot] = 1.0;
            features[g][local[v]] = row;
        }
    }

    // TU lists each undirected edge in both directions.
    let mut edge_sets: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); num_graphs];
    for (line, (a, b)) in edges {
        let a = to_index(a, num_nodes, "node id", line)?;
        let b = to_index(b, num_nodes, "node id", line)?;
        if indicator[a] != indicator[b] {
            return Err(Error::Inconsistency(format!(
                "edge on line {line} joins nodes of graphs {} and {}",
                indicator[a], indicator[b]
            )));
        }
        if a == b {
            return Err(Error::Schema(format!("self-loop on line {line}")));
        }
        let g = (indicator[a] - 1) as usize;
        let (u, w) = (local[a], local[b]);
        edge_sets[g].insert((u.min(w), u.max(w)));
    }

    let class_ids: BTreeMap<i64, usize> = graph_labels
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();

    let graphs = features
        .into_iter()
        .zip(edge_sets)
        .enumerate()
        .map(|(g, (feats, es))| {
            Graph::new(g as i64, class_ids[&graph_labels[g]], feats, es.into_iter().collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(graphs, Some(class_ids.len()))
}

fn find_prefix(dir: &Path) -> Result<String> {
    let mut prefixes = Vec::new();
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if let Some(p) = name.strip_suffix("_A.txt") {
            prefixes.push(p.to_string());
        }
    }
    prefixes.sort();
    match prefixes.len() {
        1 => Ok(prefixes.remove(0)),
        0 => Err(Error::Schema(format!("no *_A.txt file in {}", dir.display()))),
        _ => Err(Error::Schema(format!(
            "several datasets in {}: {}",
            dir.display(),
            prefixes.join(", ")
        ))),
    }
}

fn to_index(id: i64, count: usize, what: &str, line: usize) -> Result<usize> {
    if id < 1 || id as usize > count {
        return Err(Error::Inconsistency(format!(
            "{what} {id} on line {line} outside 1..={count}"
        )));
    }
    Ok(id as usize - 1)
}

fn read_lines(path: &PathBuf) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .collect())
}

fn parse_int(s: &str, line: usize) -> Result<i64> {
    let s = s.trim();
    // Some TU label files store integers as floats.
    s.parse::<i64>()
        .or_else(|_| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.fract() == 0.0)
                .map(|x| x as i64)
                .ok_or(())
        })
        .map_err(|_| Error::Parse {
            line,
            message: format!("expected an integer, found `{s}`"),
        })
}

fn read_ints(path: &PathBuf) -> Result<Vec<i64>> {
    read_lines(path)?
        .into_iter()
        .map(|(line, text)| parse_int(&text, line))
        .collect()
}

fn read_edges(path: &PathBuf) -> Result<Vec<(usize, (i64, i64))>> {
    read_lines(path)?
        .into_iter()
        .map(|(line, text)| {
            let mut parts = text.split(',');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => Ok((line, (parse_int(a, line)?, parse_int(b, line)?))),
                _ => Err(Error::Parse {
                    line,
                    message: format!("expected `u, v`, found `{text}`"),
                }),
            }
        })
        .collect()
}
