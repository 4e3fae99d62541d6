//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use v2v_anomaly::dae::{loss, DaeModel};
use v2v_anomaly::trace::{PacketRecord, FEATURE_DIM};

fn sample_loss(model: &DaeModel, x: &[f64; FEATURE_DIM]) -> f64 {
    let (out, _) = model.forward(x).unwrap();
    loss(x, &out)
}

/// Weight `k` of layer `l`, or bias `k - weights.len()` past the weights.
fn param(model: &mut DaeModel, l: usize, k: usize) -> &mut f64 {
    let layer = &mut model.layers[l];
    let n_w = layer.weights.len();
    if k < n_w {
        &mut layer.weights[k]
    } else {
        &mut layer.bias[k - n_w]
    }
}

/// Largest relative deviation between the analytic gradient and a central
/// difference over every weight and bias. Gradients below `floor` are compared
/// in absolute terms against `floor`.
pub fn worst_gradient_error(model: &mut DaeModel, x: &[f64; FEATURE_DIM]) -> f64 {
    const EPS: f64 = 1e-5;
    let floor = 1e-6;
    let (_, cache) = model.forward(x).unwrap();
    let g = model.backward(&cache, x);
    let mut worst: f64 = 0.0;
    for l in 0..model.layers.len() {
        let n_w = model.layers[l].weights.len();
        for k in 0..n_w + model.layers[l].bias.len() {
            let orig = *param(model, l, k);
            *param(model, l, k) = orig + EPS;
            let up = sample_loss(model, x);
            *param(model, l, k) = orig - EPS;
            let down = sample_loss(model, x);
            *param(model, l, k) = orig;
            let numeric = (up - down) / (2.0 * EPS);
            let analytic = if k < n_w { g.weights[l][k] } else { g.bias[l][k - n_w] };
            let err = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(floor);
            worst = worst.max(err);
        }
    }
    worst
}

/// A random valid log record; about half are receptions.
pub fn random_record<R: rand::Rng>(rng: &mut R) -> v2v_anomaly::trace::PacketRecord {
    use v2v_anomaly::geometry::Point;
    let real = |rng: &mut R| -> f64 {
        match rng.random_range(0..4) {
            0 => f64::from_bits(rng.random::<u64>() & !(0x7ff << 52) | (rng.random_range(0..0x7feu64) << 52)),
            1 => rng.random_range(-1e4..1e4),
            2 => rng.random_range(0..3000) as f64,
            _ => -0.0,
        }
    };
    let start_time = rng.random_range(0.0..1e5);
    PacketRecord {
        interface_id: format!("ScenarioWorking.node[{}].wlan[0].radio", rng.random::<u16>()),
        node_id: rng.random(),
        signal_name: format!("UDPData-{}", rng.random::<u32>()),
        sequence_no: rng.random(),
        start_time,
        start_pos: Point::new(real(rng), real(rng)),
        end_time: start_time + rng.random_range(0.0..1.0),
        end_pos: Point::new(real(rng), real(rng)),
        rssi: rng.random_bool(0.5).then(|| real(rng)),
    }
}
