//! Runs a short grid simulation, prints delivery statistics and the first
//! lines of the packet log.
//!
//!     cargo run --release --example simulate_beacons [seconds]

use v2v_anomaly::sim::{simulate, ChannelParams, Mobility, ScenarioConfig};
use v2v_anomaly::trace::{reconcile, write_record};

fn main() -> v2v_anomaly::Result<()> {
    let seconds: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30.0);
    let config = ScenarioConfig {
        sim_duration: seconds,
        seed: 7,
        ..Default::default()
    };
    let params = ChannelParams::default();

    let mut log = Vec::new();
    let mut distance_sum = 0.0;
    let stats = simulate(
        &config,
        &params,
        Mobility::Grid,
        |e| {
            if e.outcome.is_delivered() {
                distance_sum += e.distance;
            }
        },
        |r| {
            log.push(r);
            Ok(())
        },
    )?;

    println!("{stats:#?}");
    println!(
        "mean delivered TX-RX distance {:.1} m, {:.2} receivers per beacon",
        distance_sum / stats.delivered as f64,
        stats.rx_records as f64 / stats.tx_records as f64
    );
    let (linked, summary) = reconcile(&log)?;
    println!("{} linked packets, {} beacons nobody heard\n", linked.len(), summary.unmatched_tx);
    for r in log.iter().take(6) {
        println!("{}", write_record(r));
    }
    Ok(())
}
