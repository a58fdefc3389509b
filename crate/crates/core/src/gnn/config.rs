use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arch {
    Gcn,
    Gin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pool {
    Sum,
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub arch: Arch,
    pub layers: usize,
    pub hidden_dim: usize,
    pub pool: Pool,
    pub dropout: f64,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(arch: Arch, layers: usize, hidden_dim: usize, pool: Pool) -> Self {
        ModelConfig {
            arch,
            layers,
            hidden_dim,
            pool,
            dropout: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::Config("at least one message-passing layer is required".into()));
        }
        if self.hidden_dim == 0 {
            return Err(Error::Config("hidden dimension must be positive".into()));
        }
        if !(0.0..=0.6).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout {} outside [0, 0.6]",
                self.dropout
            )));
        }
        Ok(())
    }
}
