//! Builds the ten ghost-location datasets from a short simulation and
//! prints what each band looks like.
//!
//!     cargo run --release --example inject_ghosts

use v2v_anomaly::anomaly::{build_anomaly_dataset, AccessibleRegion, BandSpec};
use v2v_anomaly::sim::{run_simulation, ChannelParams, ScenarioConfig};
use v2v_anomaly::trace::{extract_features, reconcile, FeatureVector};

fn main() -> v2v_anomaly::Result<()> {
    let config = ScenarioConfig {
        sim_duration: 60.0,
        seed: 3,
        ..Default::default()
    };
    let out = run_simulation(&config, &ChannelParams::default())?;
    let (linked, _) = reconcile(&out.log)?;
    let normal: Vec<FeatureVector> = linked.iter().map(extract_features).collect();
    let region = AccessibleRegion::from_config(&config)?;

    println!(
        "{:<5} {:>12} {:>12} {:>10} {:>13} {:>9}",
        "band", "D(T,T')", "mean D(T,T')", "max", "mean |gap|", "skipped"
    );
    for band in BandSpec::standard(500) {
        let ds = build_anomaly_dataset(&normal, &band, &region, 11)?;
        let d = ds.ghost_distances();
        let gap: Vec<f64> = ds
            .samples
            .iter()
            .map(|s| (s.d_true - s.l_t.distance(s.l_r)).abs())
            .collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!(
            "{:<5} {:>12} {:>12.2} {:>10.1} {:>13.2} {:>9}",
            band.name,
            band.d_tt.to_string(),
            mean(&d),
            d.iter().copied().fold(0.0, f64::max),
            mean(&gap),
            ds.failures
        );
    }
    Ok(())
}
