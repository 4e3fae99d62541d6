//! ROC curve, AUC and detection rate at FPR 0.2 for synthetic detector
//! scores of increasing separation.
//!
//!     cargo run --release --example roc_evaluation

use rand::Rng;
use rand_distr::StandardNormal;
use v2v_anomaly::eval::{auc_oracle, roc_curve, tpr_at_fpr};
use v2v_anomaly::rng::substream;

fn main() -> v2v_anomaly::Result<()> {
    let mut rng = substream(6, &[]);
    let normal: Vec<f64> = (0..1000).map(|_| rng.sample(StandardNormal)).collect();
    println!("{:>6} {:>8} {:>8} {:>12}", "shift", "AUC", "oracle", "TPR@FPR0.2");
    for shift in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let anomalous: Vec<f64> = (0..1000)
            .map(|_| shift + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let roc = roc_curve(&normal, &anomalous);
        println!(
            "{shift:>6.2} {:>8.4} {:>8.4} {:>12.4}",
            roc.auc,
            auc_oracle(&normal, &anomalous),
            tpr_at_fpr(&roc, 0.2)
        );
    }

    let roc = roc_curve(&[0.1, 0.3], &[0.2, 0.4]).labeled("toy", "example");
    println!("\n{} curve on {}:", roc.detector, roc.dataset);
    roc.write_csv(std::io::stdout())?;
    Ok(())
}
