use std::io::Write;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve of one detector on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RocReport {
    /// Thresholds descending; starts at (0, 0) with an infinite threshold and ends at (1, 1).
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub detector: String,
    pub dataset: String,
}

/// Sweeps every distinct score as a threshold (`score ≥ t` flags an anomaly)
/// and integrates the curve with the trapezoidal rule.
///
/// Equal scores form a single threshold step, so ties earn half credit.
pub fn roc_curve(scores_normal: &[f64], scores_anom: &[f64]) -> RocReport {
    assert!(
        !scores_normal.is_empty() && !scores_anom.is_empty(),
        "ROC needs both normal and anomalous scores"
    );
    let mut all: Vec<(f64, bool)> = scores_normal
        .iter()
        .map(|&s| (s, false))
        .chain(scores_anom.iter().map(|&s| (s, true)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));

    let n_neg = scores_normal.len() as f64;
    let n_pos = scores_anom.len() as f64;
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut fp, mut tp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < all.len() {
        let t = all[i].0;
        while i < all.len() && all[i].0 == t {
            if all[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let prev = *points.last().unwrap();
        let p = RocPoint {
            threshold: t,
            fpr: fp as f64 / n_neg,
            tpr: tp as f64 / n_pos,
        };
        auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) * 0.5;
        points.push(p);
    }
    RocReport {
        points,
        auc,
        detector: String::new(),
        dataset: String::new(),
    }
}

/// Probability that a random anomalous score exceeds a random normal score,
/// ties counting one half. Brute force over all pairs.
pub fn auc_oracle(scores_normal: &[f64], scores_anom: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &a in scores_anom {
        for &n in scores_normal {
            if a > n {
                wins += 1.0;
            } else if a == n {
                wins += 0.5;
            }
        }
    }
    wins / (scores_normal.len() as f64 * scores_anom.len() as f64)
}

/// TPR at `target_fpr`, linearly interpolated along the curve.
///
/// Where the curve is vertical at `target_fpr` the highest TPR is returned.
pub fn tpr_at_fpr(report: &RocReport, target_fpr: f64) -> f64 {
    let pts = &report.points;
    let k = pts.partition_point(|p| p.fpr <= target_fpr);
    if k == 0 {
        return 0.0;
    }
    if k == pts.len() {
        return pts[k - 1].tpr;
    }
    let (a, b) = (pts[k - 1], pts[k]);
    if a.fpr == target_fpr {
        return a.tpr;
    }
    a.tpr + (b.tpr - a.tpr) * (target_fpr - a.fpr) / (b.fpr - a.fpr)
}

impl RocReport {
    pub fn labeled(mut self, detector: &str, dataset: &str) -> Self {
        self.detector = detector.to_owned();
        self.dataset = dataset.to_owned();
        self
    }

    /// Thresholds strictly descending, FPR and TPR non-decreasing, ends at (0,0) and (1,1).
    pub fn is_well_formed(&self) -> bool {
        let p = &self.points;
        let first = p.first().is_some_and(|q| q.fpr == 0.0 && q.tpr == 0.0);
        let last = p.last().is_some_and(|q| q.fpr == 1.0 && q.tpr == 1.0);
        first
            && last
            && p.windows(2).all(|w| {
                w[1].threshold < w[0].threshold && w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr
            })
            && (0.0..=1.0).contains(&self.auc)
    }

    /// CSV with header `threshold,fpr,tpr`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for p in &self.points {
            wtr.serialize(p)?;
        }
        wtr.flush()?;
        Ok(())
    }
}
