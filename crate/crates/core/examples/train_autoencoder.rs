//! Trains the autoencoder on simulated beacons, compares the training and
//! validation loss distributions and round-trips the checkpoint.
//!
//!     cargo run --release --example train_autoencoder [epochs]

use v2v_anomaly::checkpoint;
use v2v_anomaly::dae::{init_model, train_with, Architecture, TrainParams};
use v2v_anomaly::eval::compare_loss_distributions;
use v2v_anomaly::sim::{run_simulation, ChannelParams, ScenarioConfig};
use v2v_anomaly::trace::{extract_features, fit_scaler, reconcile, split, FeatureVector};

fn main() -> v2v_anomaly::Result<()> {
    let epochs: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30);
    let config = ScenarioConfig {
        sim_duration: 40.0,
        seed: 5,
        ..Default::default()
    };
    let out = run_simulation(&config, &ChannelParams::default())?;
    let (linked, _) = reconcile(&out.log)?;
    let features: Vec<FeatureVector> = linked.iter().map(extract_features).collect();

    let (train_set, val_set) = split(&features, 0.8, 1);
    let scaler = fit_scaler(&train_set)?;
    let (train_x, val_x) = (scaler.apply_all(&train_set), scaler.apply_all(&val_set));
    println!("{} training and {} validation samples", train_x.len(), val_x.len());

    let model = init_model(&Architecture::default(), 2)?;
    println!("{} parameters, widths {:?}", model.parameter_count(), model.arch.widths());
    let params = TrainParams {
        epochs,
        seed: 3,
        ..Default::default()
    };
    let (model, report) = train_with(model, &train_x, &val_x, &params, |epoch, loss| {
        if epoch % 5 == 0 {
            println!("epoch {epoch:>4}  mean loss {loss:.6}");
        }
    })?;

    let c = compare_loss_distributions(&report.train_losses, &report.val_losses, 9)?;
    println!("\n           mean         variance");
    println!("train      {:.6e}  {:.6e}", c.mean_train, c.var_train);
    println!("validation {:.6e}  {:.6e}", c.mean_val, c.var_val);
    println!("AMI        {:.4}", c.ami);

    let text = checkpoint::dae_to_string(&model);
    let back = checkpoint::dae_from_str(&text)?;
    println!("\ncheckpoint: {} bytes, reload identical: {}", text.len(), back == model);
    Ok(())
}
