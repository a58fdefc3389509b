use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::graph::{Dataset, Graph};
use crate::error::{Error, Result};

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Dataset> {
    parse_jsonl(&fs::read_to_string(path)?)
}

/// Parses one graph object per non-blank line.
pub fn parse_jsonl(text: &str) -> Result<Dataset> {
    let mut graphs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let value: Value = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        graphs.push(graph_from_value(&value, line_no)?);
    }
    Dataset::new(graphs, None)
}

fn field<'a>(obj: &'a Value, key: &str, line: usize) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Schema(format!("line {line}: missing key `{key}`")))
}

fn schema(line: usize, what: &str) -> Error {
    Error::Schema(format!("line {line}: {what}"))
}

fn graph_from_value(obj: &Value, line: usize) -> Result<Graph> {
    if !obj.is_object() {
        return Err(schema(line, "expected a JSON object"));
    }
    let id = field(obj, "id", line)?
        .as_i64()
        .ok_or_else(|| schema(line, "`id` must be an integer"))?;
    let label = field(obj, "label", line)?
        .as_u64()
        .ok_or_else(|| schema(line, "`label` must be a non-negative integer"))?
        as usize;

    let nodes = field(obj, "nodes", line)?
        .as_array()
        .ok_or_else(|| schema(line, "`nodes` must be a list"))?;
    let mut features = Vec::with_capacity(nodes.len());
    for node in nodes {
        let row = node
            .as_array()
            .ok_or_else(|| schema(line, "each node must be a list of numbers"))?;
        let row = row
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| schema(line, "feature values must be numbers")))
            .collect::<Result<Vec<f64>>>()?;
        features.push(row);
    }

    let edge_list = field(obj, "edges", line)?
        .as_array()
        .ok_or_else(|| schema(line, "`edges` must be a list"))?;
    let mut edges = Vec::with_capacity(edge_list.len());
    for e in edge_list {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| schema(line, "each edge must be a pair of node indices"))?;
        let endpoint = |x: &Value| {
            x.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| schema(line, "edge endpoints must be non-negative integers"))
        };
        edges.push((endpoint(&pair[0])?, endpoint(&pair[1])?));
    }

    Graph::new(id, label, features, edges).map_err(|e| match e {
        Error::Schema(msg) => Error::Schema(format!("line {line}: {msg}")),
        other => other,
    })
}

#[derive(Serialize)]
struct GraphRecord<'a> {
    id: i64,
    label: usize,
    nodes: &'a [Vec<f64>],
    edges: Vec<[usize; 2]>,
}

/// Canonical single-line JSON encoding of a graph.
pub fn graph_to_json(g: &Graph) -> String {
    let record = GraphRecord {
        id: g.id(),
        label: g.label(),
        nodes: g.features(),
        edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
    };
    serde_json::to_string(&record).expect("graph records always serialize")
}

/// JSONL text for every graph in order, newline-terminated.
pub fn to_jsonl(ds: &Dataset) -> String {
    let mut out = String::new();
    for g in ds.graphs() {
        out.push_str(&graph_to_json(g));
        out.push('\n');
    }
    out
}

pub fn write_jsonl(ds: &Dataset, path: impl AsRef<Path>) -> Result<usize> {
    let text = to_jsonl(ds);
    fs::write(path, &text)?;
    Ok(text.len())
}
