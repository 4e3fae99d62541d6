use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::substream;
use crate::trace::FEATURE_DIM;

/// Layer widths and activation placement of the autoencoder.
///
/// Seven layers `L1 → H1 → H2 → H3 → H4 → H5 → L2`; ReLU after every hidden
/// layer except the bottleneck `H3`, and none on the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    widths: Vec<usize>,
}

pub const BOTTLENECK_WIDTH: usize = 20;

impl Default for Architecture {
    fn default() -> Self {
        Self {
            widths: vec![FEATURE_DIM, 128, 64, BOTTLENECK_WIDTH, 64, 128, FEATURE_DIM],
        }
    }
}

impl Architecture {
    /// Symmetric architecture from the two hidden widths around the bottleneck.
    pub fn with_hidden(h1: usize, h2: usize) -> Result<Self> {
        Self::new(vec![FEATURE_DIM, h1, h2, BOTTLENECK_WIDTH, h2, h1, FEATURE_DIM])
    }

    pub fn new(widths: Vec<usize>) -> Result<Self> {
        let arch = Self { widths };
        arch.validate()?;
        Ok(arch)
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.widths;
        if w.len() != 7 {
            return Err(Error::Config(format!("autoencoder needs 7 layers, got {}", w.len())));
        }
        if w[0] != FEATURE_DIM || w[6] != FEATURE_DIM {
            return Err(Error::Config(format!(
                "input and output widths must be {FEATURE_DIM}, got {} and {}",
                w[0], w[6]
            )));
        }
        if w[1] <= w[0] {
            return Err(Error::Config(format!(
                "first hidden layer must be wider than the input ({} <= {})",
                w[1], w[0]
            )));
        }
        if w[3] != BOTTLENECK_WIDTH {
            return Err(Error::Config(format!(
                "bottleneck width must be {BOTTLENECK_WIDTH}, got {}",
                w[3]
            )));
        }
        if w.contains(&0) {
            return Err(Error::Config("layer widths must be positive".into()));
        }
        Ok(())
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn bottleneck(&self) -> usize {
        self.widths[3]
    }

    /// Whether the activation is applied after each of the six dense layers.
    pub fn activation_mask(&self) -> Vec<bool> {
        (1..self.widths.len())
            .map(|layer| layer != 3 && layer != self.widths.len() - 1)
            .collect()
    }
}

/// Fully-connected layer. `weights` is stored input-major: the weight from
/// input `j` to output `i` is `weights[j * outputs + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub relu: bool,
}

impl Dense {
    pub fn weight(&self, input: usize, output: usize) -> f64 {
        self.weights[input * self.outputs + output]
    }
}

/// Autoencoder parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DaeModel {
    pub arch: Architecture,
    pub layers: Vec<Dense>,
}

/// Weights ~ N(0, 1/fan_in), biases zero.
pub fn init_model(arch: &Architecture, seed: u64) -> Result<DaeModel> {
    arch.validate()?;
    let mask = arch.activation_mask();
    let layers = arch
        .widths
        .windows(2)
        .enumerate()
        .map(|(l, w)| {
            let (inputs, outputs) = (w[0], w[1]);
            let mut rng = substream(seed, &[0x4441_4500, l as u64]);
            let scale = 1.0 / (inputs as f64).sqrt();
            let weights = (0..inputs * outputs)
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            Dense {
                inputs,
                outputs,
                weights,
                bias: vec![0.0; outputs],
                relu: mask[l],
            }
        })
        .collect();
    Ok(DaeModel {
        arch: arch.clone(),
        layers,
    })
}

/// Activations recorded by a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    /// `values[0]` is the input; `values[l + 1]` is the output of layer `l`
    /// after its activation.
    pub values: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn new(model: &DaeModel) -> Self {
        let mut values = vec![vec![0.0; model.layers[0].inputs]];
        values.extend(model.layers.iter().map(|l| vec![0.0; l.outputs]));
        Self { values }
    }

    pub fn output(&self) -> &[f64] {
        self.values.last().unwrap()
    }
}

/// Per-parameter gradients, shaped like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros(model: &DaeModel) -> Self {
        Self {
            weights: model.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            bias: model.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    pub fn clear(&mut self) {
        self.weights.iter_mut().for_each(|g| g.fill(0.0));
        self.bias.iter_mut().for_each(|g| g.fill(0.0));
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

/// Euclidean norm of the residual `x − x′` (not squared).
pub fn loss(x: &[f64], x_hat: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), x_hat.len());
    x.iter()
        .zip(x_hat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

impl DaeModel {
    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Forward pass into a reusable cache.
    pub fn forward_into(&self, x: &[f64], cache: &mut ForwardCache) {
        cache.values[0].copy_from_slice(x);
        for (l, layer) in self.layers.iter().enumerate() {
            let (before, after) = cache.values.split_at_mut(l + 1);
            let input = &before[l];
            let out = &mut after[0];
            out.copy_from_slice(&layer.bias);
            for (j, &a) in input.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let row = &layer.weights[j * layer.outputs..(j + 1) * layer.outputs];
                for (o, &w) in out.iter_mut().zip(row) {
                    *o += a * w;
                }
            }
            if layer.relu {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
    }

    /// Reconstruction of `x` together with the activation cache.
    pub fn forward(&self, x: &[f64; FEATURE_DIM]) -> Result<([f64; FEATURE_DIM], ForwardCache)> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite autoencoder input {x:?}")));
        }
        let mut cache = ForwardCache::new(self);
        self.forward_into(x, &mut cache);
        let mut out = [0.0; FEATURE_DIM];
        out.copy_from_slice(cache.output());
        Ok((out, cache))
    }

    /// Adds `scale · ∂‖x − x′‖₂/∂Θ` to `grads`, reusing `delta` buffers.
    ///
    /// At a zero residual the norm is not differentiable; the subgradient 0 is used.
    pub fn backward_into(
        &self,
        cache: &ForwardCache,
        x: &[f64],
        scale: f64,
        grads: &mut Gradients,
        delta: &mut Vec<f64>,
        delta_prev: &mut Vec<f64>,
    ) -> f64 {
        let out = cache.output();
        let norm = loss(x, out);
        if norm == 0.0 {
            return 0.0;
        }
        delta.clear();
        delta.extend(out.iter().zip(x).map(|(o, t)| scale * (o - t) / norm));
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let input = &cache.values[l];
            let gw = &mut grads.weights[l];
            for (g, d) in grads.bias[l].iter_mut().zip(delta.iter()) {
                *g += d;
            }
            for (j, &a) in input.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let row = &mut gw[j * layer.outputs..(j + 1) * layer.outputs];
                for (g, d) in row.iter_mut().zip(delta.iter()) {
                    *g += a * d;
                }
            }
            if l == 0 {
                break;
            }
            let below_relu = self.layers[l - 1].relu;
            delta_prev.clear();
            delta_prev.extend((0..layer.inputs).map(|j| {
                if below_relu && input[j] <= 0.0 {
                    0.0
                } else {
                    dot(&layer.weights[j * layer.outputs..(j + 1) * layer.outputs], delta)
                }
            }));
            std::mem::swap(delta, delta_prev);
        }
        norm
    }

    /// Exact gradients of the per-sample loss `‖x − x′‖₂` for a cached forward pass.
    pub fn backward(&self, cache: &ForwardCache, x: &[f64; FEATURE_DIM]) -> Gradients {
        let mut grads = Gradients::zeros(self);
        let (mut d, mut dp) = (Vec::new(), Vec::new());
        self.backward_into(cache, x, 1.0, &mut grads, &mut d, &mut dp);
        grads
    }

    /// Anomaly score: reconstruction error `‖y − y′‖₂`.
    pub fn score(&self, y: &[f64; FEATURE_DIM]) -> f64 {
        let mut cache = ForwardCache::new(self);
        self.forward_into(y, &mut cache);
        loss(y, cache.output())
    }

    pub fn score_all(&self, ys: &[[f64; FEATURE_DIM]]) -> Vec<f64> {
        let mut cache = ForwardCache::new(self);
        ys.iter()
            .map(|y| {
                self.forward_into(y, &mut cache);
                loss(y, cache.output())
            })
            .collect()
    }

    /// Applies `Θ ← Θ − lr · g`.
    pub fn apply_gradients(&mut self, grads: &Gradients, lr: f64) {
        for (l, layer) in self.layers.iter_mut().enumerate() {
            for (w, g) in layer.weights.iter_mut().zip(&grads.weights[l]) {
                *w -= lr * g;
            }
            for (b, g) in layer.bias.iter_mut().zip(&grads.bias[l]) {
                *b -= lr * g;
            }
        }
    }
}
