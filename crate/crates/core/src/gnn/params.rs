use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{Arch, ModelConfig};
use crate::error::{Error, Result};

/// Affine map `x W + b` with `W` of shape (in, out).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Dense {
    fn glorot(rng: &mut impl Rng, fan_in: usize, fan_out: usize) -> Dense {
        let limit = (6.0 / (fan_in + fan_out).max(1) as f64).sqrt();
        Dense {
            w: Array2::from_shape_fn((fan_in, fan_out), |_| rng.gen_range(-limit..limit)),
            b: Array1::zeros(fan_out),
        }
    }

    fn zeros(fan_in: usize, fan_out: usize) -> Dense {
        Dense {
            w: Array2::zeros((fan_in, fan_out)),
            b: Array1::zeros(fan_out),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn out_dim(&self) -> usize {
        self.w.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Gcn(Dense),
    /// Two-layer ReLU MLP over `(1 + eps) h_v + sum of neighbors`.
    Gin { mlp1: Dense, mlp2: Dense, eps: f64 },
}

/// Weights of a message-passing network plus its linear classifier. Also
/// used to hold gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    pub layers: Vec<Layer>,
    pub classifier: Dense,
}

impl Parameters {
    /// Glorot-uniform weights, zero biases, `eps = 0`.
    pub fn init(cfg: &ModelConfig, in_dim: usize, num_classes: usize, rng: &mut impl Rng) -> Self {
        let h = cfg.hidden_dim;
        let layers = (0..cfg.layers)
            .map(|l| {
                let fan_in = if l == 0 { in_dim } else { h };
                match cfg.arch {
                    Arch::Gcn => Layer::Gcn(Dense::glorot(rng, fan_in, h)),
                    Arch::Gin => Layer::Gin {
                        mlp1: Dense::glorot(rng, fan_in, h),
                        mlp2: Dense::glorot(rng, h, h),
                        eps: 0.0,
                    },
                }
            })
            .collect();
        Parameters {
            layers,
            classifier: Dense::glorot(rng, h, num_classes),
        }
    }

    pub fn zeros(cfg: &ModelConfig, in_dim: usize, num_classes: usize) -> Self {
        let h = cfg.hidden_dim;
        let layers = (0..cfg.layers)
            .map(|l| {
                let fan_in = if l == 0 { in_dim } else { h };
                match cfg.arch {
                    Arch::Gcn => Layer::Gcn(Dense::zeros(fan_in, h)),
                    Arch::Gin => Layer::Gin {
                        mlp1: Dense::zeros(fan_in, h),
                        mlp2: Dense::zeros(h, h),
                        eps: 0.0,
                    },
                }
            })
            .collect();
        Parameters {
            layers,
            classifier: Dense::zeros(h, num_classes),
        }
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.for_each_mut(|x| *x = 0.0);
        z
    }

    pub fn in_dim(&self) -> usize {
        match &self.layers[0] {
            Layer::Gcn(d) => d.in_dim(),
            Layer::Gin { mlp1, .. } => mlp1.in_dim(),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.classifier.out_dim()
    }

    pub fn arch(&self) -> Arch {
        match self.layers[0] {
            Layer::Gcn(_) => Arch::Gcn,
            Layer::Gin { .. } => Arch::Gin,
        }
    }

    /// Checks that these weights fit `cfg`.
    pub fn check(&self, cfg: &ModelConfig) -> Result<()> {
        if self.layers.len() != cfg.layers || self.arch() != cfg.arch {
            return Err(Error::Shape(format!(
                "parameters hold {} {:?} layers, config asks for {} {:?}",
                self.layers.len(),
                self.arch(),
                cfg.layers,
                cfg.arch
            )));
        }
        if self.classifier.in_dim() != cfg.hidden_dim {
            return Err(Error::Shape(format!(
                "classifier expects width {}, config hidden_dim is {}",
                self.classifier.in_dim(),
                cfg.hidden_dim
            )));
        }
        Ok(())
    }

    /// Visits every scalar in a fixed order.
    pub fn for_each(&self, mut f: impl FnMut(f64)) {
        fn dense(d: &Dense, f: &mut impl FnMut(f64)) {
            d.w.iter().for_each(|&x| f(x));
            d.b.iter().for_each(|&x| f(x));
        }
        for layer in &self.layers {
            match layer {
                Layer::Gcn(d) => dense(d, &mut f),
                Layer::Gin { mlp1, mlp2, eps } => {
                    dense(mlp1, &mut f);
                    dense(mlp2, &mut f);
                    f(*eps);
                }
            }
        }
        dense(&self.classifier, &mut f);
    }

    pub fn for_each_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        fn dense(d: &mut Dense, f: &mut impl FnMut(&mut f64)) {
            d.w.iter_mut().for_each(&mut *f);
            d.b.iter_mut().for_each(&mut *f);
        }
        for layer in &mut self.layers {
            match layer {
                Layer::Gcn(d) => dense(d, &mut f),
                Layer::Gin { mlp1, mlp2, eps } => {
                    dense(mlp1, &mut f);
                    dense(mlp2, &mut f);
                    f(eps);
                }
            }
        }
        dense(&mut self.classifier, &mut f);
    }

    pub fn num_scalars(&self) -> usize {
        let mut n = 0;
        self.for_each(|_| n += 1);
        n
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_scalars());
        self.for_each(|x| out.push(x));
        out
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let mut i = 0;
        self.for_each_mut(|x| {
            *x = flat[i];
            i += 1;
        });
        debug_assert_eq!(i, flat.len());
    }

    pub fn is_finite(&self) -> bool {
        let mut ok = true;
        self.for_each(|x| ok &= x.is_finite());
        ok
    }
}

/// Plain nested-list form used by checkpoints.
#[derive(Serialize, Deserialize)]
pub(crate) struct DenseRecord {
    b: Vec<f64>,
    w: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub(crate) enum LayerRecord {
    Gcn { linear: DenseRecord },
    Gin { eps: f64, mlp1: DenseRecord, mlp2: DenseRecord },
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ParametersRecord {
    classifier: DenseRecord,
    layers: Vec<LayerRecord>,
}

impl From<&Dense> for DenseRecord {
    fn from(d: &Dense) -> Self {
        DenseRecord {
            b: d.b.to_vec(),
            w: d.w.rows().into_iter().map(|r| r.to_vec()).collect(),
        }
    }
}

impl DenseRecord {
    fn into_dense(self) -> Result<Dense> {
        let rows = self.w.len();
        let cols = self.b.len();
        if self.w.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged weight matrix in checkpoint".into()));
        }
        let flat: Vec<f64> = self.w.into_iter().flatten().collect();
        Ok(Dense {
            w: Array2::from_shape_vec((rows, cols), flat)
                .map_err(|e| Error::Shape(e.to_string()))?,
            b: Array1::from(self.b),
        })
    }
}

impl From<&Parameters> for ParametersRecord {
    fn from(p: &Parameters) -> Self {
        ParametersRecord {
            classifier: (&p.classifier).into(),
            layers: p
                .layers
                .iter()
                .map(|l| match l {
                    Layer::Gcn(d) => LayerRecord::Gcn { linear: d.into() },
                    Layer::Gin { mlp1, mlp2, eps } => LayerRecord::Gin {
                        eps: *eps,
                        mlp1: mlp1.into(),
                        mlp2: mlp2.into(),
                    },
                })
                .collect(),
        }
    }
}

impl ParametersRecord {
    pub(crate) fn into_parameters(self) -> Result<Parameters> {
        let layers = self
            .layers
            .into_iter()
            .map(|l| {
                Ok(match l {
                    LayerRecord::Gcn { linear } => Layer::Gcn(linear.into_dense()?),
                    LayerRecord::Gin { eps, mlp1, mlp2 } => Layer::Gin {
                        mlp1: mlp1.into_dense()?,
                        mlp2: mlp2.into_dense()?,
                        eps,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if layers.is_empty() {
            return Err(Error::Shape("checkpoint has no layers".into()));
        }
        Ok(Parameters {
            layers,
            classifier: self.classifier.into_dense()?,
        })
    }
}
