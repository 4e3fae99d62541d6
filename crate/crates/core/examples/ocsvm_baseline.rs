//! Fits the linear one-class SVM on a synthetic cloud and shows the
//! nu-property and how scores grow away from the data.
//!
//!     cargo run --release --example ocsvm_baseline

use rand::Rng;
use v2v_anomaly::ocsvm::{train_ocsvm, OcsvmParams};
use v2v_anomaly::rng::substream;
use v2v_anomaly::trace::FEATURE_DIM;

fn main() -> v2v_anomaly::Result<()> {
    let mut rng = substream(4, &[]);
    let data: Vec<[f64; FEATURE_DIM]> = (0..5000)
        .map(|_| std::array::from_fn(|i| 0.6 + 0.05 * i as f64 + rng.random_range(-0.1..0.1)))
        .collect();

    for nu in [0.05, 0.1, 0.3] {
        let model = train_ocsvm(&data, &OcsvmParams { nu, seed: 1, ..Default::default() })?;
        let outside = model.score_all(&data).iter().filter(|&&s| s > 0.0).count();
        println!(
            "nu {nu:<4}  rho {:>8.4}  w {:?}  training points outside {:.4}",
            model.rho,
            model.w.map(|v| (v * 1000.0).round() / 1000.0),
            outside as f64 / data.len() as f64
        );
    }

    let model = train_ocsvm(&data, &OcsvmParams { seed: 1, ..Default::default() })?;
    println!("\nscore along a line towards the origin (positive = anomalous):");
    for k in 0..=5 {
        let t = 1.0 - 0.2 * k as f64;
        let y: [f64; FEATURE_DIM] = std::array::from_fn(|i| t * (0.6 + 0.05 * i as f64));
        println!("  scale {t:.1}: score {:+.4}, decision {:+}", model.score(&y), model.decision(&y));
    }
    Ok(())
}
