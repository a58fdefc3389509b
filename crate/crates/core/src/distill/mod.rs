//! End-to-end distillation and the distilled-dataset file format.

mod dataset;
mod pipeline;

pub use dataset::{deserialize, serialize, DistilledDataset, DistilledItemset};
pub use pipeline::{compression_report, distill, fingerprint, CompressionReport, DistillConfig};
