use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Rect;

/// Scenario geometry, fleet and beaconing regime.
///
/// Defaults reproduce the 2 km × 2 km, 150-vehicle, 1800 s, one-beacon-per-second
/// regime with 140-byte beacons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Width of the scenario area (x extent), meters.
    pub area_width: f64,
    /// Height of the scenario area (y extent), meters.
    pub area_height: f64,
    /// Simulated time, seconds.
    pub sim_duration: f64,
    pub fleet_size: usize,
    /// Seconds between consecutive beacons of one vehicle.
    pub beacon_interval: f64,
    /// Beacon length on the air, bytes.
    pub packet_length: usize,
    /// Distance between parallel street centerlines, meters.
    pub grid_spacing: f64,
    pub street_width: f64,
    /// Vehicle speeds are drawn uniformly from `[speed_min, speed_max]` m/s at spawn.
    pub speed_min: f64,
    pub speed_max: f64,
    pub obstacles: ObstacleSpec,
    /// Seed for mobility and channel randomness. Set by the pipeline from the
    /// master seed; not read from config files.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            area_width: 2000.0,
            area_height: 2000.0,
            sim_duration: 1800.0,
            fleet_size: 150,
            beacon_interval: 1.0,
            packet_length: 140,
            grid_spacing: 200.0,
            street_width: 20.0,
            speed_min: 8.0,
            speed_max: 14.0,
            obstacles: ObstacleSpec::default(),
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("scenario.area_width", self.area_width),
            ("scenario.area_height", self.area_height),
            ("scenario.sim_duration", self.sim_duration),
            ("scenario.beacon_interval", self.beacon_interval),
            ("scenario.grid_spacing", self.grid_spacing),
            ("scenario.street_width", self.street_width),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{key} must be positive, got {v}")));
            }
        }
        if self.fleet_size == 0 {
            return Err(Error::Config("scenario.fleet_size must be positive".into()));
        }
        if self.packet_length == 0 {
            return Err(Error::Config("scenario.packet_length must be positive".into()));
        }
        if !(self.speed_min >= 0.0 && self.speed_max >= self.speed_min && self.speed_max.is_finite()) {
            return Err(Error::Config(format!(
                "scenario.speed_min/speed_max must satisfy 0 <= min <= max, got [{}, {}]",
                self.speed_min, self.speed_max
            )));
        }
        self.obstacles.validate()
    }

    /// Number of beacons each vehicle emits over the run.
    pub fn beacon_count(&self) -> usize {
        (self.sim_duration / self.beacon_interval + 1e-9).floor() as usize
    }

    pub fn packet_bits(&self) -> usize {
        self.packet_length * 8
    }
}

/// Dielectric attenuation of one obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// Loss per wall crossing, dB.
    pub wall_loss_db: f64,
    /// Attenuation per meter travelled inside the obstacle, dB/m.
    pub interior_loss_db_per_m: f64,
}

impl Default for Material {
    fn default() -> Self {
        Self {
            wall_loss_db: 6.0,
            interior_loss_db_per_m: 1.0,
        }
    }
}

/// An axis-aligned obstacle with its material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub rect: Rect,
    pub material: Material,
}

/// Explicit obstacle given in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleRect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub wall_loss_db: Option<f64>,
    pub interior_loss_db_per_m: Option<f64>,
}

/// How obstacles are laid out.
///
/// With `fill_blocks`, every street block receives one building covering the
/// block up to `setback` meters from the street edge (a fraction `block_fill`
/// of blocks is built, chosen from the scenario seed). `extra` rectangles are
/// added verbatim and must not overlap street centerlines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObstacleSpec {
    pub fill_blocks: bool,
    pub block_fill: f64,
    pub setback: f64,
    pub wall_loss_db: f64,
    pub interior_loss_db_per_m: f64,
    pub extra: Vec<ObstacleRect>,
}

impl Default for ObstacleSpec {
    fn default() -> Self {
        let m = Material::default();
        Self {
            fill_blocks: true,
            block_fill: 1.0,
            setback: 0.0,
            wall_loss_db: m.wall_loss_db,
            interior_loss_db_per_m: m.interior_loss_db_per_m,
            extra: Vec::new(),
        }
    }
}

impl ObstacleSpec {
    pub fn material(&self) -> Material {
        Material {
            wall_loss_db: self.wall_loss_db,
            interior_loss_db_per_m: self.interior_loss_db_per_m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.block_fill) {
            return Err(Error::Config(format!(
                "obstacles.block_fill must lie in [0, 1], got {}",
                self.block_fill
            )));
        }
        if !(self.setback >= 0.0) || !(self.wall_loss_db >= 0.0) || !(self.interior_loss_db_per_m >= 0.0) {
            return Err(Error::Config(
                "obstacles.setback, wall_loss_db and interior_loss_db_per_m must be non-negative".into(),
            ));
        }
        for (i, r) in self.extra.iter().enumerate() {
            if !(r.x_max > r.x_min && r.y_max > r.y_min) {
                return Err(Error::Config(format!("obstacles.extra[{i}] has an empty extent")));
            }
        }
        Ok(())
    }
}

/// Radio channel and receiver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelParams {
    /// Hz.
    pub carrier_freq: f64,
    /// dBm.
    pub tx_power: f64,
    /// dBi.
    pub antenna_gain_tx: f64,
    /// dBi.
    pub antenna_gain_rx: f64,
    /// Connector and cable losses, dB.
    pub cable_loss: f64,
    pub path_loss_exponent: f64,
    /// Rician K-factor, dB.
    pub rician_k: f64,
    /// Reference distance of the log-distance model, meters.
    pub reference_distance: f64,
    /// Mean background noise, dBm.
    pub noise_mean: f64,
    /// Standard deviation of the background noise, dB.
    pub noise_std: f64,
    /// Receiver sensitivity, dBm.
    pub sensitivity: f64,
    /// Minimum decodable SNIR, dB.
    pub snir_threshold: f64,
    /// PHY bit rate used to derive frame durations, bit/s (QPSK 1/2 on a 10 MHz channel).
    pub data_rate: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            carrier_freq: 5.9e9,
            tx_power: 27.0,
            antenna_gain_tx: 9.0,
            antenna_gain_rx: 9.0,
            cable_loss: 3.0,
            path_loss_exponent: 2.4,
            rician_k: 8.0,
            reference_distance: 1.0,
            noise_mean: -110.0,
            noise_std: 3.0,
            sensitivity: -88.0,
            snir_threshold: 10.0,
            data_rate: 6.0e6,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.reference_distance > 0.0 && self.reference_distance.is_finite()) {
            return Err(Error::Config(format!(
                "channel.reference_distance must be positive, got {}",
                self.reference_distance
            )));
        }
        if !(self.noise_std >= 0.0) {
            return Err(Error::Config(format!(
                "channel.noise_std must be non-negative, got {}",
                self.noise_std
            )));
        }
        if !(self.carrier_freq > 0.0) || !(self.data_rate > 0.0) {
            return Err(Error::Config(
                "channel.carrier_freq and channel.data_rate must be positive".into(),
            ));
        }
        if !(self.path_loss_exponent > 0.0) {
            return Err(Error::Config(format!(
                "channel.path_loss_exponent must be positive, got {}",
                self.path_loss_exponent
            )));
        }
        Ok(())
    }

    /// Transmitter EIRP minus receiver-side cable loss, plus the RX gain, dB(m).
    pub fn budget_gain_dbm(&self) -> f64 {
        self.tx_power + self.antenna_gain_tx + self.antenna_gain_rx - self.cable_loss
    }

    /// Airtime of a frame of `bits` bits, seconds.
    pub fn airtime(&self, bits: usize) -> f64 {
        bits as f64 / self.data_rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_simulation_table() {
        let s = ScenarioConfig::default();
        assert_eq!(s.sim_duration, 1800.0);
        assert_eq!((s.area_width, s.area_height), (2000.0, 2000.0));
        assert_eq!(s.fleet_size, 150);
        assert_eq!(s.beacon_interval, 1.0);
        assert_eq!(s.packet_length, 140);
        assert_eq!(s.beacon_count(), 1800);

        let c = ChannelParams::default();
        assert_eq!(c.carrier_freq, 5.9e9);
        assert_eq!(c.tx_power, 27.0);
        assert_eq!((c.antenna_gain_tx, c.antenna_gain_rx), (9.0, 9.0));
        assert_eq!(c.cable_loss, 3.0);
        assert_eq!(c.path_loss_exponent, 2.4);
        assert_eq!(c.rician_k, 8.0);
        assert_eq!((c.noise_mean, c.noise_std), (-110.0, 3.0));
        assert_eq!(c.sensitivity, -88.0);
        assert_eq!(c.snir_threshold, 10.0);
    }

    #[test]
    fn rejects_bad_values() {
        let mut s = ScenarioConfig::default();
        s.fleet_size = 0;
        assert!(s.validate().is_err());
        let mut s = ScenarioConfig::default();
        s.beacon_interval = 0.0;
        assert!(s.validate().is_err());
        let mut c = ChannelParams::default();
        c.reference_distance = 0.0;
        assert!(c.validate().is_err());
        c = ChannelParams::default();
        c.noise_std = -1.0;
        assert!(c.validate().is_err());
    }
}
