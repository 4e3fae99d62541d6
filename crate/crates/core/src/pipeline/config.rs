use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::anomaly::BandSpec;
use crate::dae::{Architecture, TrainParams};
use crate::error::{Error, Result};
use crate::ocsvm::OcsvmParams;
use crate::rng::derive_seed;
use crate::sim::{ChannelParams, ScenarioConfig};

/// Everything one pipeline run needs, loaded from a single TOML file.
///
/// Every section and key is optional; missing values take the defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub run: RunSection,
    pub scenario: ScenarioConfig,
    pub channel: ChannelParams,
    pub anomaly: AnomalySection,
    pub dae: DaeSection,
    pub ocsvm: OcsvmParams,
    pub eval: EvalSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Master seed; every module seed is derived from it.
    pub seed: u64,
    pub out: PathBuf,
    /// Normal samples drawn from the log for training and validation.
    pub normal_pool: usize,
    /// Normal samples kept aside as the negative class of every ROC.
    pub holdout: usize,
    pub train_ratio: f64,
    /// Optional `node_id,t,x,y` CSV replacing the built-in grid mobility.
    pub traces: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 1,
            out: PathBuf::from("out"),
            normal_pool: 60_000,
            holdout: 1000,
            train_ratio: 0.8,
            traces: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnomalySection {
    pub sample_count: usize,
    /// Band definitions; empty means the ten standard bands with `sample_count` samples each.
    pub bands: Vec<BandSpec>,
}

impl Default for AnomalySection {
    fn default() -> Self {
        Self {
            sample_count: 1000,
            bands: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DaeSection {
    /// Widths of the two hidden layers on each side of the bottleneck.
    pub hidden: [usize; 2],
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl Default for DaeSection {
    fn default() -> Self {
        let t = TrainParams::default();
        Self {
            hidden: [128, 64],
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    /// FPR at which the detection rate is reported.
    pub target_fpr: f64,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self { target_fpr: 0.2 }
    }
}

/// Module seeds derived from the master seed by label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seeds {
    pub scenario: u64,
    pub sampling: u64,
    pub inject: u64,
    pub split: u64,
    pub dae_init: u64,
    pub dae_train: u64,
    pub ocsvm: u64,
    pub loss_ami: u64,
}

impl Seeds {
    pub fn derive(master: u64) -> Self {
        Self {
            scenario: derive_seed(master, "scenario"),
            sampling: derive_seed(master, "sampling"),
            inject: derive_seed(master, "inject"),
            split: derive_seed(master, "split"),
            dae_init: derive_seed(master, "dae-init"),
            dae_train: derive_seed(master, "dae-train"),
            ocsvm: derive_seed(master, "ocsvm"),
            loss_ami: derive_seed(master, "loss-ami"),
        }
    }
}

impl RunConfig {
    /// Parses and validates a TOML document. Unknown keys are rejected by name.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::Config(format!("config file {} not found", path.display())));
        }
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.channel.validate()?;
        self.architecture()?;
        self.train_params().validate()?;
        self.ocsvm_params().validate()?;
        for b in self.bands() {
            b.validate()?;
        }
        let mut names: Vec<&str> = self.anomaly.bands.iter().map(|b| b.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("anomaly.bands names must be unique".into()));
        }
        if self.anomaly.sample_count == 0 {
            return Err(Error::Config("anomaly.sample_count must be positive".into()));
        }
        let r = &self.run;
        if !(r.train_ratio > 0.0 && r.train_ratio < 1.0) {
            return Err(Error::Config(format!(
                "run.train_ratio must lie in (0, 1), got {}",
                r.train_ratio
            )));
        }
        if r.normal_pool < 2 || r.holdout == 0 {
            return Err(Error::Config(
                "run.normal_pool must be at least 2 and run.holdout positive".into(),
            ));
        }
        if !(self.eval.target_fpr > 0.0 && self.eval.target_fpr < 1.0) {
            return Err(Error::Config(format!(
                "eval.target_fpr must lie in (0, 1), got {}",
                self.eval.target_fpr
            )));
        }
        Ok(())
    }

    pub fn seeds(&self) -> Seeds {
        Seeds::derive(self.run.seed)
    }

    /// Scenario section with its seed filled in.
    pub fn scenario_config(&self) -> ScenarioConfig {
        ScenarioConfig {
            seed: self.seeds().scenario,
            ..self.scenario.clone()
        }
    }

    pub fn bands(&self) -> Vec<BandSpec> {
        if self.anomaly.bands.is_empty() {
            BandSpec::standard(self.anomaly.sample_count)
        } else {
            self.anomaly.bands.clone()
        }
    }

    pub fn architecture(&self) -> Result<Architecture> {
        Architecture::with_hidden(self.dae.hidden[0], self.dae.hidden[1])
    }

    pub fn train_params(&self) -> TrainParams {
        TrainParams {
            epochs: self.dae.epochs,
            learning_rate: self.dae.learning_rate,
            batch_size: self.dae.batch_size,
            seed: self.seeds().dae_train,
        }
    }

    pub fn ocsvm_params(&self) -> OcsvmParams {
        OcsvmParams {
            seed: self.seeds().ocsvm,
            ..self.ocsvm
        }
    }

    /// SHA-256 of the canonical TOML form, ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.out = PathBuf::new();
        hex_digest(c.to_toml_string().as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.bands().len(), 10);
        assert_eq!(c.scenario.beacon_count() * c.scenario.fleet_size, 270_000);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::from_toml_str("[dae]\nepochz = 3\n").unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("epochz"), "{err}");
        let err = RunConfig::from_toml_str("[scenario.obstacles]\nwall = 3\n").unwrap_err();
        assert!(err.to_string().contains("wall"), "{err}");
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = RunConfig::default();
        c.anomaly.bands = BandSpec::standard(5);
        c.run.traces = Some("t.csv".into());
        let back = RunConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn hash_tracks_content_not_output_dir() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.run.out = "elsewhere".into();
        assert_eq!(a.hash(), b.hash());
        b.dae.epochs = 3;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn module_seeds_are_independent_of_hyperparameters() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.dae.epochs = 7;
        assert_eq!(a.scenario_config().seed, b.scenario_config().seed);
        let s = a.seeds();
        assert_ne!(s.scenario, s.inject);
        assert_ne!(s.dae_init, s.dae_train);
    }
}
