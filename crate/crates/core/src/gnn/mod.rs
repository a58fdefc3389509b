//! Message-passing networks (GCN, GIN) with hand-written gradients, trained
//! on whole graphs or on sampled sets of computation trees.

mod checkpoint;
mod config;
mod gradcheck;
mod metrics;
mod model;
mod params;
mod plan;
mod train;

pub use checkpoint::Checkpoint;
pub use config::{Arch, ModelConfig, Pool};
pub use gradcheck::{gradient_check, gradient_check_with, Batch, GradCheckReport, DEFAULT_COORDS};
pub use metrics::{auc_from_scores, roc_auc};
pub use model::{embed_tree_set, forward_graph, forward_tree, EmbeddingTable, GraphOutput};
pub use params::{Dense, Layer, Parameters};
pub use plan::Plan;
pub use train::{
    accuracy, dataset_loss, distilled_loss, evaluate_auc, loss_gap_experiment, predict_dataset,
    train, EpochRecord, GapRecord, History, TrainData, TrainOptions,
};

#[cfg(test)]
mod tests;
