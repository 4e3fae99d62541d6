//! Seeded V2V beaconing simulation over a Rician-fading channel.

pub mod channel;
pub mod config;
pub mod engine;
pub mod scenario;
pub mod traces;

pub use channel::{
    compute_rssi, compute_rssi_with_gain, decide_delivery, delivery_decision, obstacle_loss,
    path_loss_det, sample_rician_gain, DeliveryOutcome, PathLoss, Verdict,
};
pub use config::{ChannelParams, Material, Obstacle, ObstacleSpec, ScenarioConfig};
pub use engine::{run_simulation, simulate, LinkEvent, Mobility, SimOutput, SimStats};
pub use scenario::{build_scenario, NodeState, Scenario, StreetGrid};
pub use traces::{read_traces_csv, VehicleTrace};
