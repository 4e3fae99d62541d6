use std::collections::HashMap;
use std::hash::Hash;

use rand::seq::index;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::substream;

fn encode<T: Eq + Hash>(labels: &[T]) -> (Vec<usize>, usize) {
    let mut ids: HashMap<&T, usize> = HashMap::new();
    let codes = labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(l).or_insert(next)
        })
        .collect();
    (codes, ids.len())
}

fn entropy(counts: &[usize], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn ln_factorial(k: usize) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// Expected mutual information of two random labelings with the given
/// marginals under the hypergeometric model.
fn expected_mutual_info(a: &[usize], b: &[usize], n: usize) -> f64 {
    let nf = n as f64;
    let ln_n_fact = ln_factorial(n);
    let mut emi = 0.0;
    for &ai in a {
        for &bj in b {
            let lo = (ai + bj).saturating_sub(n).max(1);
            let hi = ai.min(bj);
            let fixed = ln_factorial(ai) + ln_factorial(bj) + ln_factorial(n - ai)
                + ln_factorial(n - bj)
                - ln_n_fact;
            for nij in lo..=hi {
                let nijf = nij as f64;
                let term = nijf / nf * (nf * nijf / (ai as f64 * bj as f64)).ln();
                let ln_p = fixed
                    - ln_factorial(nij)
                    - ln_factorial(ai - nij)
                    - ln_factorial(bj - nij)
                    - ln_factorial(n - ai - bj + nij);
                emi += term * ln_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information with arithmetic-mean normalization:
/// `(MI − E[MI]) / (mean(H_a, H_b) − E[MI])`.
///
/// If either labeling has zero entropy the score is 0, unless both are
/// single-cluster labelings, which count as identical (1).
pub fn ami<T: Eq + Hash>(labels_a: &[T], labels_b: &[T]) -> Result<f64> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::InvalidInput(format!(
            "AMI needs equal-length labelings, got {} and {}",
            labels_a.len(),
            labels_b.len()
        )));
    }
    let n = labels_a.len();
    if n < 2 {
        return Err(Error::InvalidInput("AMI needs at least two samples".into()));
    }
    let (ca, ka) = encode(labels_a);
    let (cb, kb) = encode(labels_b);
    if ka == 1 && kb == 1 {
        return Ok(1.0);
    }
    if ka == 1 || kb == 1 {
        return Ok(0.0);
    }
    let mut table = vec![0usize; ka * kb];
    let mut a_counts = vec![0usize; ka];
    let mut b_counts = vec![0usize; kb];
    for (&i, &j) in ca.iter().zip(&cb) {
        table[i * kb + j] += 1;
        a_counts[i] += 1;
        b_counts[j] += 1;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            let c = table[i * kb + j];
            if c > 0 {
                let cf = c as f64;
                mi += cf / nf * (nf * cf / (a_counts[i] as f64 * b_counts[j] as f64)).ln();
            }
        }
    }
    let h_a = entropy(&a_counts, nf);
    let h_b = entropy(&b_counts, nf);
    let emi = expected_mutual_info(&a_counts, &b_counts, n);
    let mut denom = 0.5 * (h_a + h_b) - emi;
    if denom.abs() < f64::EPSILON {
        denom = f64::EPSILON.copysign(denom);
    }
    Ok((mi - emi) / denom)
}

/// Agreement between the training and validation loss distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossComparison {
    pub ami: f64,
    pub mean_train: f64,
    pub mean_val: f64,
    pub var_train: f64,
    pub var_val: f64,
}

/// Number of quantile bins used to label losses.
pub const LOSS_BINS: usize = 10;

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Compares two loss samples through AMI of rank-paired decile labels.
///
/// The larger sample is subsampled (seeded) to the size of the smaller; both
/// are sorted and paired by rank; each value is labeled by its decile among the
/// training losses; AMI is taken between the two label sequences. Means and
/// (population) variances are computed on the full samples.
pub fn compare_loss_distributions(
    train_losses: &[f64],
    val_losses: &[f64],
    seed: u64,
) -> Result<LossComparison> {
    if train_losses.is_empty() || val_losses.is_empty() {
        return Err(Error::InvalidInput("loss comparison needs non-empty samples".into()));
    }
    let m = train_losses.len().min(val_losses.len());
    let subsample = |v: &[f64], tag: u64| -> Vec<f64> {
        let mut out: Vec<f64> = if v.len() > m {
            index::sample(&mut substream(seed, &[tag]), v.len(), m)
                .into_iter()
                .map(|i| v[i])
                .collect()
        } else {
            v.to_vec()
        };
        out.sort_by(f64::total_cmp);
        out
    };
    let train = subsample(train_losses, 1);
    let val = subsample(val_losses, 2);
    let decile = |x: f64| -> usize {
        let rank = train.partition_point(|&r| r < x);
        (rank * LOSS_BINS / train.len()).min(LOSS_BINS - 1)
    };
    let la: Vec<usize> = train.iter().map(|&x| decile(x)).collect();
    let lb: Vec<usize> = val.iter().map(|&x| decile(x)).collect();
    let (mean_train, var_train) = mean_var(train_losses);
    let (mean_val, var_val) = mean_var(val_losses);
    Ok(LossComparison {
        ami: ami(&la, &lb)?,
        mean_train,
        mean_val,
        var_train,
        var_val,
    })
}
