//! Linear one-class SVM baseline solved in the primal.
//!
//! Minimizes `½‖w‖² + 1/(νn)·Σ max(0, ρ − w·xᵢ) − ρ` by subgradient descent,
//! then sets ρ to its exact minimizer for the final `w` (the ν-quantile of the
//! training margins).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;
use crate::trace::FEATURE_DIM;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OcsvmParams {
    pub nu: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for OcsvmParams {
    fn default() -> Self {
        Self {
            nu: 0.1,
            epochs: 500,
            learning_rate: 0.01,
            seed: 0,
        }
    }
}

impl OcsvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::Config(format!("ocsvm.nu must lie in (0, 1], got {}", self.nu)));
        }
        if self.epochs == 0 || !(self.learning_rate > 0.0) {
            return Err(Error::Config(
                "ocsvm.epochs and ocsvm.learning_rate must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcsvmModel {
    pub w: [f64; FEATURE_DIM],
    pub rho: f64,
    pub nu: f64,
}

fn margin(w: &[f64; FEATURE_DIM], x: &[f64; FEATURE_DIM]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Primal objective value.
pub fn objective(w: &[f64; FEATURE_DIM], rho: f64, nu: f64, data: &[[f64; FEATURE_DIM]]) -> f64 {
    let hinge: f64 = data.iter().map(|x| (rho - margin(w, x)).max(0.0)).sum();
    0.5 * margin(w, w) + hinge / (nu * data.len() as f64) - rho
}

/// Exact minimizer of the objective in ρ for fixed `w`: the ⌈νn⌉-th smallest margin.
fn optimal_rho(w: &[f64; FEATURE_DIM], nu: f64, data: &[[f64; FEATURE_DIM]]) -> f64 {
    let mut m: Vec<f64> = data.iter().map(|x| margin(w, x)).collect();
    m.sort_by(f64::total_cmp);
    let k = ((nu * m.len() as f64).ceil() as usize).clamp(1, m.len());
    m[k - 1]
}

pub fn train_ocsvm(train: &[[f64; FEATURE_DIM]], params: &OcsvmParams) -> Result<OcsvmModel> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::InvalidInput("one-class SVM needs training data".into()));
    }
    let nu = params.nu;
    let n = train.len() as f64;
    let mut rng = substream(params.seed, &[0x004f_4353_564d]);
    let mut w: [f64; FEATURE_DIM] = std::array::from_fn(|_| 0.01 * (rng.random::<f64>() - 0.5));
    let mut rho = optimal_rho(&w, nu, train);
    let initial = objective(&w, rho, nu, train);
    let mut best = (initial, w, rho);

    for epoch in 0..params.epochs {
        let step = params.learning_rate / ((epoch + 1) as f64).sqrt();
        let mut gw = w;
        let mut violators = 0usize;
        for x in train {
            if rho - margin(&w, x) > 0.0 {
                violators += 1;
                for (g, v) in gw.iter_mut().zip(x) {
                    *g -= v / (nu * n);
                }
            }
        }
        let g_rho = violators as f64 / (nu * n) - 1.0;
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= step * g;
        }
        rho -= step * g_rho;
        let f = objective(&w, rho, nu, train);
        // divergence: objective climbs more than ten times its initial magnitude
        if !f.is_finite() || f - initial > 10.0 * initial.abs().max(1.0) {
            return Err(Error::Divergence {
                epoch,
                loss: f,
                initial,
            });
        }
        if f < best.0 {
            best = (f, w, rho);
        }
    }
    let w = best.1;
    let rho = optimal_rho(&w, nu, train);
    Ok(OcsvmModel { w, rho, nu })
}

impl OcsvmModel {
    /// `ρ − w·y`; positive outside the learned half-space.
    pub fn score(&self, y: &[f64; FEATURE_DIM]) -> f64 {
        self.rho - margin(&self.w, y)
    }

    pub fn score_all(&self, ys: &[[f64; FEATURE_DIM]]) -> Vec<f64> {
        ys.iter().map(|y| self.score(y)).collect()
    }

    /// Signed decision of the primal solution: `+1` inlier, `-1` outlier.
    pub fn decision(&self, y: &[f64; FEATURE_DIM]) -> i8 {
        if margin(&self.w, y) >= self.rho {
            1
        } else {
            -1
        }
    }

    pub fn objective(&self, data: &[[f64; FEATURE_DIM]]) -> f64 {
        objective(&self.w, self.rho, self.nu, data)
    }
}

pub fn score_ocsvm(model: &OcsvmModel, y: &[f64; FEATURE_DIM]) -> f64 {
    model.score(y)
}
