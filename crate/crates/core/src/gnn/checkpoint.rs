use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ModelConfig;
use super::params::{Parameters, ParametersRecord};
use crate::error::{Error, Result};
use crate::graph_io::FeatureEncoding;

/// A trained model as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: ModelConfig,
    pub feature_dim: usize,
    pub num_classes: usize,
    /// Encoding applied to featureless inputs at training time.
    pub feature_encoding: FeatureEncoding,
    pub params: Parameters,
}

#[derive(Serialize, Deserialize)]
struct Record {
    config: ModelConfig,
    feature_dim: usize,
    feature_encoding: FeatureEncoding,
    num_classes: usize,
    params: ParametersRecord,
    seed: u64,
}

impl Checkpoint {
    /// Canonical JSON: sorted keys, shortest round-trip floats.
    pub fn to_json_string(&self) -> String {
        let rec = Record {
            config: self.config.clone(),
            feature_dim: self.feature_dim,
            feature_encoding: self.feature_encoding,
            num_classes: self.num_classes,
            params: (&self.params).into(),
            seed: self.config.seed,
        };
        let value = serde_json::to_value(rec).expect("checkpoint serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Checkpoint> {
        let rec: Record = serde_json::from_str(text)?;
        let params = rec.params.into_parameters()?;
        params.check(&rec.config)?;
        if params.in_dim() != rec.feature_dim || params.num_classes() != rec.num_classes {
            return Err(Error::Shape("checkpoint header disagrees with its weights".into()));
        }
        if !params.is_finite() {
            return Err(Error::Shape("checkpoint holds non-finite weights".into()));
        }
        Ok(Checkpoint {
            config: rec.config,
            feature_dim: rec.feature_dim,
            num_classes: rec.num_classes,
            feature_encoding: rec.feature_encoding,
            params,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Checkpoint> {
        Checkpoint::from_json_str(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::{Arch, Pool};
    use rand::SeedableRng;

    #[test]
    fn round_trip_is_exact() {
        let mut cfg = ModelConfig::new(Arch::Gin, 2, 3, Pool::Mean);
        cfg.seed = 42;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let ck = Checkpoint {
            params: Parameters::init(&cfg, 2, 3, &mut rng),
            config: cfg,
            feature_dim: 2,
            num_classes: 3,
            feature_encoding: FeatureEncoding::Constant,
        };
        let text = ck.to_json_string();
        let back = Checkpoint::from_json_str(&text).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.to_json_string(), text);
    }
}
