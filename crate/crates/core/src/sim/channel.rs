//! Link budget, Rician fading, obstacle attenuation and the delivery cascade.

use rand::Rng;
use rand_distr::StandardNormal;


use super::config::{ChannelParams, Obstacle};
use crate::geometry::Point;

/// Speed of light used for free-space loss and propagation delay, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space path loss at distance `d` and frequency `f`, dB.
pub fn free_space_loss(d: f64, freq: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * d * freq / SPEED_OF_LIGHT).log10()
}

/// Deterministic (large-scale) path loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub db: f64,
    /// The distance was below the reference distance and was clamped to it.
    pub clamped: bool,
}

/// Log-distance path loss anchored at free space at the reference distance:
/// `FSPL(d0) + 10·α·log10(d / d0)`.
pub fn path_loss_det(d: f64, params: &ChannelParams) -> PathLoss {
    let d0 = params.reference_distance;
    let clamped = !(d >= d0);
    let d = if clamped { d0 } else { d };
    let anchor = free_space_loss(d0, params.carrier_freq);
    let db = if d == d0 {
        anchor
    } else {
        anchor + 10.0 * params.path_loss_exponent * (d / d0).log10()
    };
    PathLoss { db, clamped }
}

/// Draws a Rician power gain `|h|²` with unit mean.
///
/// `h = sqrt(K/(K+1)) + sqrt(1/(2(K+1)))·(z₁ + i·z₂)`, `K = 10^(k_db/10)`.
/// An infinite K-factor is a pure line-of-sight channel and returns exactly 1.
pub fn sample_rician_gain<R: Rng + ?Sized>(k_db: f64, rng: &mut R) -> f64 {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    rician_gain_from_normals(k_db, z1, z2)
}

/// Rician gain for given standard-normal draws.
pub fn rician_gain_from_normals(k_db: f64, z1: f64, z2: f64) -> f64 {
    let k = 10f64.powf(k_db / 10.0);
    if k.is_infinite() {
        return 1.0;
    }
    let los = (k / (k + 1.0)).sqrt();
    let scatter = (1.0 / (2.0 * (k + 1.0))).sqrt();
    let re = los + scatter * z1;
    let im = scatter * z2;
    re * re + im * im
}

/// Attenuation along the straight TX → RX path: wall crossings times the wall
/// loss plus in-obstacle length times the interior attenuation.
pub fn obstacle_loss(p_tx: Point, p_rx: Point, obstacles: &[Obstacle]) -> f64 {
    let mut loss = 0.0;
    for o in obstacles {
        if let Some(t) = o.rect.traverse(p_tx, p_rx) {
            loss += f64::from(t.crossings) * o.material.wall_loss_db
                + t.inside_length * o.material.interior_loss_db_per_m;
        }
    }
    loss
}

/// Received power for a given distance, obstacle loss and fading gain, dBm.
pub fn link_budget(d: f64, obstacle_db: f64, fading_gain: f64, params: &ChannelParams) -> f64 {
    params.budget_gain_dbm() - path_loss_det(d, params).db - obstacle_db
        + 10.0 * fading_gain.log10()
}

/// RSSI of a beacon sent from `p_tx` and received at `p_rx`, with a freshly
/// drawn fading gain. Coincident positions use the reference distance.
pub fn compute_rssi<R: Rng + ?Sized>(
    p_tx: Point,
    p_rx: Point,
    params: &ChannelParams,
    obstacles: &[Obstacle],
    rng: &mut R,
) -> f64 {
    let gain = sample_rician_gain(params.rician_k, rng);
    compute_rssi_with_gain(p_tx, p_rx, params, obstacles, gain)
}

/// As [`compute_rssi`] with the fading gain supplied by the caller.
pub fn compute_rssi_with_gain(
    p_tx: Point,
    p_rx: Point,
    params: &ChannelParams,
    obstacles: &[Obstacle],
    fading_gain: f64,
) -> f64 {
    let d = p_tx.distance(p_rx);
    link_budget(d, obstacle_loss(p_tx, p_rx, obstacles), fading_gain, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Delivered,
    BelowSensitivity,
    BelowSnir,
    PerDrop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeliveryOutcome {
    pub verdict: Verdict,
    /// dBm.
    pub rssi: f64,
    /// dB.
    pub snir: f64,
    /// Packet error rate; 1 when the frame never reaches the PER stage.
    pub per: f64,
}

impl DeliveryOutcome {
    pub fn is_delivered(&self) -> bool {
        self.verdict == Verdict::Delivered
    }

    /// Checks the verdict against the thresholds that produced it.
    pub fn is_consistent(&self, params: &ChannelParams) -> bool {
        let per_ok = (0.0..=1.0).contains(&self.per);
        per_ok
            && match self.verdict {
                Verdict::BelowSensitivity => self.rssi < params.sensitivity,
                Verdict::BelowSnir => {
                    self.rssi >= params.sensitivity && self.snir < params.snir_threshold
                }
                Verdict::Delivered | Verdict::PerDrop => {
                    self.rssi >= params.sensitivity && self.snir >= params.snir_threshold
                }
            }
    }
}

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Uncoded QPSK bit error rate over AWGN at the given SNR (dB).
pub fn qpsk_ber(snr_db: f64) -> f64 {
    let snr = 10f64.powf(snr_db / 10.0);
    q_function((2.0 * snr).sqrt())
}

/// `1 − (1 − BER)^bits`.
pub fn packet_error_rate(snr_db: f64, bits: usize) -> f64 {
    let ber = qpsk_ber(snr_db);
    -((bits as f64) * (-ber).ln_1p()).exp_m1()
}

/// The three-stage delivery cascade for pinned noise and uniform draws.
///
/// Sensitivity first, then the SNIR threshold, then a PER draw: the frame is
/// delivered iff `uniform >= PER`.
pub fn decide_delivery(
    rssi: f64,
    noise_dbm: f64,
    uniform: f64,
    params: &ChannelParams,
    packet_bits: usize,
) -> DeliveryOutcome {
    let snir = rssi - noise_dbm;
    let (verdict, per) = if rssi < params.sensitivity {
        (Verdict::BelowSensitivity, 1.0)
    } else if snir < params.snir_threshold {
        (Verdict::BelowSnir, 1.0)
    } else {
        let per = packet_error_rate(snir, packet_bits);
        if uniform >= per {
            (Verdict::Delivered, per)
        } else {
            (Verdict::PerDrop, per)
        }
    };
    DeliveryOutcome {
        verdict,
        rssi,
        snir,
        per,
    }
}

/// Samples background noise and the PER draw, then runs the cascade.
pub fn delivery_decision<R: Rng + ?Sized>(
    rssi: f64,
    params: &ChannelParams,
    packet_bits: usize,
    rng: &mut R,
) -> DeliveryOutcome {
    let z: f64 = rng.sample(StandardNormal);
    let noise = params.noise_mean + params.noise_std * z;
    let uniform: f64 = rng.random();
    decide_delivery(rssi, noise, uniform, params, packet_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::rng::substream;
    use crate::sim::config::Material;

    fn params() -> ChannelParams {
        ChannelParams::default()
    }

    #[test]
    fn free_space_anchor_at_one_meter() {
        // oracle: 20·log10(4π·5.9e9/c), written out independently
        let oracle = 20.0 * (4.0 * 3.141_592_653_589_793 * 5.9e9 / 2.997_924_58e8_f64).log10();
        let pl = path_loss_det(1.0, &params());
        assert!((pl.db - 47.86).abs() < 0.01, "{}", pl.db);
        assert_eq!(pl.db, free_space_loss(1.0, 5.9e9));
        assert!((pl.db - oracle).abs() < 1e-9);
        assert!(!pl.clamped);
    }

    #[test]
    fn hundred_meters_adds_48_db() {
        let pl = path_loss_det(100.0, &params()).db;
        let anchor = path_loss_det(1.0, &params()).db;
        assert!((pl - anchor - 48.0).abs() < 1e-9);
        assert!((pl - 95.86).abs() < 0.01);
    }

    #[test]
    fn below_reference_distance_is_clamped() {
        let pl = path_loss_det(0.2, &params());
        assert!(pl.clamped);
        assert_eq!(pl.db, path_loss_det(1.0, &params()).db);
    }

    #[test]
    fn infinite_k_is_pure_line_of_sight() {
        let mut rng = substream(3, &[1]);
        assert_eq!(sample_rician_gain(f64::INFINITY, &mut rng), 1.0);
        assert_eq!(sample_rician_gain(1e6, &mut rng), 1.0);
    }

    #[test]
    fn fading_is_deterministic_per_stream() {
        let a: Vec<f64> = {
            let mut r = substream(11, &[4]);
            (0..16).map(|_| sample_rician_gain(8.0, &mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = substream(11, &[4]);
            (0..16).map(|_| sample_rician_gain(8.0, &mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn obstacle_loss_through_one_building() {
        let building = Obstacle {
            rect: Rect::new(40.0, -50.0, 60.0, 50.0),
            material: Material {
                wall_loss_db: 6.0,
                interior_loss_db_per_m: 1.0,
            },
        };
        let loss = obstacle_loss(Point::new(0.0, 0.0), Point::new(100.0, 0.0), &[building]);
        assert!((loss - 32.0).abs() < 1e-9);
        assert_eq!(
            obstacle_loss(Point::new(0.0, 60.0), Point::new(100.0, 60.0), &[building]),
            0.0
        );
        // grazing the top edge
        assert_eq!(
            obstacle_loss(Point::new(0.0, 50.0), Point::new(100.0, 50.0), &[building]),
            0.0
        );
    }

    #[test]
    fn rssi_link_budget_examples() {
        let p = params();
        let tx = Point::new(0.0, 0.0);
        let rx = Point::new(100.0, 0.0);
        let clear = compute_rssi_with_gain(tx, rx, &p, &[], 1.0);
        assert!((clear - (-53.86)).abs() < 0.01, "{clear}");
        let building = Obstacle {
            rect: Rect::new(40.0, -50.0, 60.0, 50.0),
            material: Material::default(),
        };
        let blocked = compute_rssi_with_gain(tx, rx, &p, &[building], 1.0);
        assert!((clear - blocked - 32.0).abs() < 1e-9);
        // coincident positions fall back to the reference distance
        let same = compute_rssi_with_gain(tx, tx, &p, &[], 1.0);
        assert_eq!(same, p.budget_gain_dbm() - path_loss_det(1.0, &p).db);
    }

    #[test]
    fn delivery_cascade_examples() {
        let p = params();
        let bits = 1120;
        let o = decide_delivery(-90.0, -110.0, 0.5, &p, bits);
        assert_eq!(o.verdict, Verdict::BelowSensitivity);
        let o = decide_delivery(-85.0, -92.0, 0.5, &p, bits);
        assert_eq!(o.verdict, Verdict::BelowSnir);
        assert!((o.snir - 7.0).abs() < 1e-12);
        let o = decide_delivery(-60.0, -110.0, 0.0, &p, bits);
        assert_eq!(o.verdict, Verdict::Delivered);
        assert!(o.per < 1e-12);
        for o in [
            decide_delivery(-90.0, -110.0, 0.5, &p, bits),
            decide_delivery(-85.0, -92.0, 0.5, &p, bits),
            decide_delivery(-60.0, -110.0, 0.0, &p, bits),
        ] {
            assert!(o.is_consistent(&p));
        }
    }

    #[test]
    fn per_is_a_probability_and_decreases_with_snr() {
        let mut last = 1.0;
        for snr in [-5.0, 0.0, 3.0, 6.0, 8.0, 10.0, 12.0] {
            let per = packet_error_rate(snr, 1120);
            assert!((0.0..=1.0).contains(&per));
            assert!(per <= last);
            last = per;
        }
        // Q(sqrt(2·10^5)) underflows far below 1e-12
        assert!(packet_error_rate(50.0, 1120) < 1e-12);
    }

    #[test]
    fn q_function_reference_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-15);
        assert!((q_function(1.0) - 0.158_655_253_931_457).abs() < 1e-12);
        assert!((q_function(3.0) - 1.349_898_031_630_095e-3).abs() < 1e-15);
    }
}
