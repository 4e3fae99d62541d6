//! RSSI and delivery probability against distance on an unobstructed link,
//! and the cost of one building in the path.
//!
//!     cargo run --release --example channel_link_budget

use v2v_anomaly::geometry::{Point, Rect};
use v2v_anomaly::rng::substream;
use v2v_anomaly::sim::{
    compute_rssi, compute_rssi_with_gain, delivery_decision, obstacle_loss, path_loss_det,
    ChannelParams, Material, Obstacle, ScenarioConfig,
};

fn main() {
    let params = ChannelParams::default();
    let bits = ScenarioConfig::default().packet_bits();
    let origin = Point::new(0.0, 0.0);
    let trials = 20_000;

    println!("{:>7} {:>10} {:>12} {:>10}", "d (m)", "PL (dB)", "RSSI (dBm)", "delivered");
    for d in [10.0, 50.0, 100.0, 250.0, 500.0, 1000.0, 1500.0, 2000.0, 2500.0, 3000.0] {
        let rx = Point::new(d, 0.0);
        let mean_rssi = compute_rssi_with_gain(origin, rx, &params, &[], 1.0);
        let delivered = (0..trials)
            .filter(|&t| {
                let mut rng = substream(1, &[t]);
                let rssi = compute_rssi(origin, rx, &params, &[], &mut rng);
                delivery_decision(rssi, &params, bits, &mut rng).is_delivered()
            })
            .count();
        println!(
            "{d:>7.0} {:>10.2} {:>12.2} {:>9.1}%",
            path_loss_det(d, &params).db,
            mean_rssi,
            100.0 * delivered as f64 / trials as f64
        );
    }

    let building = Obstacle {
        rect: Rect::new(40.0, -50.0, 60.0, 50.0),
        material: Material::default(),
    };
    let rx = Point::new(100.0, 0.0);
    let loss = obstacle_loss(origin, rx, std::slice::from_ref(&building));
    println!(
        "\n100 m link through a 20 m deep building: {loss:.1} dB extra, RSSI {:.2} dBm",
        compute_rssi_with_gain(origin, rx, &params, &[building], 1.0)
    );
}
