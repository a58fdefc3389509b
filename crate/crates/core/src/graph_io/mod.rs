//! Graph model, dataset readers/writers and train/val/test splitting.

mod features;
mod graph;
mod jsonl;
mod split;
mod tu;

pub use features::{encode_featureless, FeatureDictionary, FeatureEncoding};
pub use graph::{Dataset, Graph, SplitPart};
pub use jsonl::{graph_to_json, load_jsonl, parse_jsonl, to_jsonl, write_jsonl};
pub use split::split_dataset;
pub use tu::load_tu;

use std::path::Path;

use crate::error::Result;

/// Loads a TU directory or a JSONL file, depending on what `path` is.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    if path.is_dir() {
        load_tu(path)
    } else {
        load_jsonl(path)
    }
}
