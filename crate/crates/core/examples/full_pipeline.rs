//! Simulate, inject, train, evaluate and report with one master seed.
//!
//! Without arguments a reduced configuration runs in seconds; pass `--default`
//! for the full-size run (a few minutes on one core).
//!
//!     cargo run --release --example full_pipeline [--default] [out-dir]

use v2v_anomaly::pipeline::{Pipeline, RunConfig};

const QUICK: &str = "
[run]
normal_pool = 20000
holdout = 500

[scenario]
sim_duration = 120

[anomaly]
sample_count = 500

[dae]
epochs = 60
";

fn main() -> v2v_anomaly::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let full = args.iter().any(|a| a == "--default");
    let mut config = if full { RunConfig::default() } else { RunConfig::from_toml_str(QUICK)? };
    if let Some(out) = args.iter().find(|a| !a.starts_with("--")) {
        config.run.out = out.into();
    } else {
        config.run.out = "out/example".into();
    }
    let mut pipeline = Pipeline::new(config)?;
    pipeline.verbose = true;
    let report = pipeline.run_all()?;
    println!("{report}");
    println!("artifacts in {}", pipeline.out.display());
    Ok(())
}
