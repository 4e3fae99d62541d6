//! Drives the simulator from an external `node_id,t,x,y` trace file
//! instead of the built-in grid mobility.
//!
//!     cargo run --release --example import_traces

use v2v_anomaly::sim::{read_traces_csv, simulate, ChannelParams, Mobility, ScenarioConfig};

fn main() -> v2v_anomaly::Result<()> {
    // three vehicles on the y = 400 street; the one on x = 600 is behind buildings for all of them
    let mut csv = String::from("node_id,t,x,y\n");
    for t in 0..=20 {
        let t = f64::from(t);
        csv += &format!("0,{t},{},400\n", 100.0 + 10.0 * t);
        csv += &format!("1,{t},{},400\n", 900.0 - 12.0 * t);
        csv += &format!("2,{t},{},400\n", 1500.0 + 5.0 * t);
        csv += &format!("3,{t},600,{}\n", 100.0 + 11.0 * t);
    }
    let traces = read_traces_csv(csv.as_bytes())?;
    let config = ScenarioConfig {
        sim_duration: 20.0,
        seed: 1,
        ..Default::default()
    };

    let mut heard = [[0usize; 4]; 4];
    let stats = simulate(
        &config,
        &ChannelParams::default(),
        Mobility::Traces(traces),
        |e| {
            if e.outcome.is_delivered() {
                heard[e.tx as usize][e.rx as usize] += 1;
            }
        },
        |_| Ok(()),
    )?;
    println!("{} beacons, {} receptions", stats.tx_records, stats.rx_records);
    println!("receptions per (tx row, rx column):");
    for (tx, row) in heard.iter().enumerate() {
        println!("  {tx}: {row:?}");
    }
    Ok(())
}
