//! ROC/AUC, detection rate at a fixed FPR, and AMI-based loss comparison.

mod ami;
mod roc;

pub use ami::{ami, compare_loss_distributions, LossComparison, LOSS_BINS};
pub use roc::{auc_oracle, roc_curve, tpr_at_fpr, RocPoint, RocReport};
