pub mod cli;
pub mod ctree;
pub mod distill;
pub mod error;
pub mod gnn;
pub mod graph_io;
pub mod mining;

pub use error::{Error, Result};
