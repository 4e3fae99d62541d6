//! End-to-end orchestration: simulate → inject → train → eval → report.
//!
//! Each stage reads the artifacts of the previous one from the output
//! directory, so stages can be rerun independently. Every stage records the
//! config hash, master seed, counts and SHA-256 of the files it wrote in
//! `manifest.toml`.

mod config;

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

pub use config::{AnomalySection, DaeSection, EvalSection, RunConfig, RunSection, Seeds};

use crate::anomaly::{build_anomaly_dataset, AccessibleRegion, AnomalyDataset};
use crate::checkpoint;
use crate::dae::{init_model, train_with, TrainReport};
use crate::error::{Error, Result};
use crate::eval::{compare_loss_distributions, roc_curve, tpr_at_fpr, LossComparison, RocReport};
use crate::ocsvm::train_ocsvm;
use crate::rng::substream;
use crate::sim::{read_traces_csv, simulate, Mobility, SimStats};
use crate::trace::{
    extract_features, read_features_csv, read_log, reconcile, split, write_features_csv,
    write_record, FeatureVector,
};

pub const LOG_FILE: &str = "log.txt";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const FEATURES_FILE: &str = "features.csv";
pub const HOLDOUT_FILE: &str = "holdout.csv";
pub const DAE_CKPT: &str = "dae.ckpt";
pub const OCSVM_CKPT: &str = "ocsvm.ckpt";
pub const SCALER_CKPT: &str = "scaler.ckpt";
pub const EPOCH_LOSS_FILE: &str = "epoch_losses.csv";
pub const VAL_LOSS_FILE: &str = "val_losses.csv";
pub const LOSS_COMPARISON_FILE: &str = "loss_comparison.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const DETECTION_RATE_FILE: &str = "detection_rate.csv";
pub const REPORT_FILE: &str = "report.txt";
pub const ROC_DIR: &str = "roc";

pub const DETECTORS: [&str; 2] = ["DAE", "OCSVM"];

pub fn band_file(band: &str) -> String {
    format!("{band}.csv")
}

pub fn truth_file(band: &str) -> String {
    format!("{band}_truth.csv")
}

pub fn roc_file(detector: &str, band: &str) -> String {
    format!("{ROC_DIR}/{detector}_{band}.csv")
}

/// A configured run bound to an output directory.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: RunConfig,
    pub out: PathBuf,
    /// Progress messages on stderr.
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InjectStats {
    pub linked: usize,
    pub pool: usize,
    pub holdout: usize,
    pub anomalies: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub report: TrainReport,
    pub comparison: LossComparison,
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub detector: String,
    pub dataset: String,
    pub auc: f64,
    #[serde(rename = "tpr_at_fpr_0.2")]
    pub tpr_at_fpr: f64,
}

#[derive(Debug, Serialize)]
struct TruthRow {
    x_t_true: f64,
    y_t_true: f64,
    d_tt: f64,
    d_gap: f64,
}

/// Per-band ghost ground truth as written next to each anomaly dataset.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct Truth {
    pub x_t_true: f64,
    pub y_t_true: f64,
    pub d_tt: f64,
    pub d_gap: f64,
}

#[derive(Debug, Serialize)]
struct LossRow {
    split: &'static str,
    ami: f64,
    mean: f64,
    variance: f64,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    Ok(BufReader::new(File::open(path)?))
}

/// SHA-256 of a file's bytes.
pub fn file_digest(path: &Path) -> Result<String> {
    Ok(config::hex_digest(&fs::read(path)?))
}

pub fn read_truth_csv(path: &Path) -> Result<Vec<Truth>> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

impl Pipeline {
    /// Uses the config's output directory.
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let out = config.run.out.clone();
        Ok(Self {
            config,
            out,
            verbose: false,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn note(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// Adds or replaces one stage's section in the manifest.
    fn record_stage(&self, stage: &str, counts: &[(&str, usize)], files: &[String]) -> Result<()> {
        let path = self.path(MANIFEST_FILE);
        let mut doc: toml::Table = if path.exists() {
            toml::from_str(&fs::read_to_string(&path)?)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
        } else {
            toml::Table::new()
        };
        let mut section = toml::Table::new();
        section.insert("config_hash".into(), self.config.hash().into());
        // TOML integers are signed 64-bit
        section.insert("seed".into(), self.config.run.seed.to_string().into());
        let mut c = toml::Table::new();
        for (k, v) in counts {
            c.insert((*k).into(), (*v as i64).into());
        }
        section.insert("counts".into(), c.into());
        let mut f = toml::Table::new();
        for name in files {
            f.insert(name.clone(), file_digest(&self.path(name))?.into());
        }
        section.insert("files".into(), f.into());
        doc.insert(stage.into(), section.into());
        fs::write(&path, toml::to_string(&doc).expect("manifest serializes"))?;
        Ok(())
    }

    /// Runs the simulator and writes the packet log.
    pub fn simulate(&self) -> Result<SimStats> {
        let t = Instant::now();
        let cfg = self.config.scenario_config();
        let mobility = match &self.config.run.traces {
            Some(p) => Mobility::Traces(read_traces_csv(open(p)?)?),
            None => Mobility::Grid,
        };
        fs::create_dir_all(&self.out)?;
        let mut w = create(&self.path(LOG_FILE))?;
        let stats = simulate(&cfg, &self.config.channel, mobility, |_| {}, |r| {
            writeln!(w, "{}", write_record(&r))?;
            Ok(())
        })?;
        w.flush()?;
        drop(w);
        self.record_stage(
            "simulate",
            &[
                ("tx_records", stats.tx_records),
                ("rx_records", stats.rx_records),
                ("link_evaluations", stats.link_evaluations),
                ("delivered", stats.delivered),
                ("below_sensitivity", stats.below_sensitivity),
                ("below_snir", stats.below_snir),
                ("per_drop", stats.per_drop),
            ],
            &[LOG_FILE.to_owned()],
        )?;
        self.note(format!(
            "simulate: {} TX, {} RX records in {:.1?}",
            stats.tx_records,
            stats.rx_records,
            t.elapsed()
        ));
        Ok(stats)
    }

    /// Extracts normal features from the log and writes the training pool,
    /// the normal hold-out and one ghost dataset per band.
    ///
    /// The three draws are disjoint: anomalies are built from packets that
    /// are neither trained on nor used as hold-out.
    pub fn inject(&self) -> Result<InjectStats> {
        let t = Instant::now();
        let log = read_log(open(&self.path(LOG_FILE))?)?;
        let (linked, _) = reconcile(&log)?;
        let features: Vec<FeatureVector> = linked.iter().map(extract_features).collect();
        drop(linked);
        drop(log);

        let run = &self.config.run;
        let seeds = self.config.seeds();
        let mut order: Vec<usize> = (0..features.len()).collect();
        order.shuffle(&mut substream(seeds.sampling, &[]));
        if features.len() < run.holdout + run.normal_pool {
            return Err(Error::InvalidInput(format!(
                "log yields {} linked packets, fewer than run.holdout + run.normal_pool = {}",
                features.len(),
                run.holdout + run.normal_pool
            )));
        }
        let pick = |idx: &[usize]| -> Vec<FeatureVector> { idx.iter().map(|&i| features[i]).collect() };
        let holdout = pick(&order[..run.holdout]);
        let pool = pick(&order[run.holdout..run.holdout + run.normal_pool]);
        let sources = pick(&order[run.holdout + run.normal_pool..]);

        let mut files = vec![FEATURES_FILE.to_owned(), HOLDOUT_FILE.to_owned()];
        write_features_csv(create(&self.path(FEATURES_FILE))?, &pool)?;
        write_features_csv(create(&self.path(HOLDOUT_FILE))?, &holdout)?;

        let region = AccessibleRegion::from_config(&self.config.scenario_config())?;
        let mut stats = InjectStats {
            linked: features.len(),
            pool: pool.len(),
            holdout: holdout.len(),
            ..Default::default()
        };
        for band in self.config.bands() {
            let ds = build_anomaly_dataset(&sources, &band, &region, seeds.inject)?;
            self.write_band(&ds)?;
            stats.anomalies += ds.samples.len();
            stats.failures += ds.failures;
            files.push(band_file(&band.name));
            files.push(truth_file(&band.name));
        }
        self.record_stage(
            "inject",
            &[
                ("linked", stats.linked),
                ("pool", stats.pool),
                ("holdout", stats.holdout),
                ("anomalies", stats.anomalies),
                ("infeasible_sources", stats.failures),
            ],
            &files,
        )?;
        self.note(format!(
            "inject: {} linked packets, {} anomalies in {:.1?}",
            stats.linked,
            stats.anomalies,
            t.elapsed()
        ));
        Ok(stats)
    }

    fn write_band(&self, ds: &AnomalyDataset) -> Result<()> {
        write_features_csv(create(&self.path(&band_file(&ds.band.name)))?, &ds.samples)?;
        let mut w = csv::Writer::from_writer(create(&self.path(&truth_file(&ds.band.name)))?);
        for (s, t) in ds.samples.iter().zip(&ds.true_l_t) {
            w.serialize(TruthRow {
                x_t_true: t.x,
                y_t_true: t.y,
                d_tt: s.l_t.distance(*t),
                d_gap: (s.d_true - s.l_t.distance(s.l_r)).abs(),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Trains the autoencoder and the one-class SVM on the training split and
    /// compares training and validation loss distributions.
    pub fn train(&self) -> Result<TrainOutcome> {
        let t = Instant::now();
        let pool = read_features_csv(open(&self.path(FEATURES_FILE))?)?;
        let seeds = self.config.seeds();
        let (train_set, val_set) = split(&pool, self.config.run.train_ratio, seeds.split);
        let scaler = crate::trace::fit_scaler(&train_set)?;
        let train_x = scaler.apply_all(&train_set);
        let val_x = scaler.apply_all(&val_set);

        let model = init_model(&self.config.architecture()?, seeds.dae_init)?;
        let params = self.config.train_params();
        let (model, report) = train_with(model, &train_x, &val_x, &params, |epoch, loss| {
            if (epoch + 1) % 10 == 0 {
                self.note(format!("train: epoch {:>4} loss {loss:.6}", epoch + 1));
            }
        })?;
        let svm = train_ocsvm(&train_x, &self.config.ocsvm_params())?;
        let comparison =
            compare_loss_distributions(&report.train_losses, &report.val_losses, seeds.loss_ami)?;

        checkpoint::save_dae(&model, &self.path(DAE_CKPT))?;
        checkpoint::save_ocsvm(&svm, &self.path(OCSVM_CKPT))?;
        checkpoint::save_scaler(&scaler, &self.path(SCALER_CKPT))?;

        let mut w = create(&self.path(EPOCH_LOSS_FILE))?;
        writeln!(w, "epoch,loss")?;
        for (i, l) in report.epoch_losses.iter().enumerate() {
            writeln!(w, "{},{l}", i + 1)?;
        }
        w.flush()?;
        let mut w = create(&self.path(VAL_LOSS_FILE))?;
        writeln!(w, "loss")?;
        for l in &report.val_losses {
            writeln!(w, "{l}")?;
        }
        w.flush()?;
        write_loss_comparison(&self.path(LOSS_COMPARISON_FILE), &comparison)?;

        let files = [DAE_CKPT, OCSVM_CKPT, SCALER_CKPT, EPOCH_LOSS_FILE, VAL_LOSS_FILE, LOSS_COMPARISON_FILE]
            .map(str::to_owned);
        self.record_stage(
            "train",
            &[
                ("train_samples", train_x.len()),
                ("val_samples", val_x.len()),
                ("epochs", report.epoch_losses.len()),
            ],
            &files,
        )?;
        self.note(format!(
            "train: final loss {:.6}, AMI {:.3} in {:.1?}",
            report.epoch_losses.last().copied().unwrap_or(f64::NAN),
            comparison.ami,
            t.elapsed()
        ));
        Ok(TrainOutcome { report, comparison })
    }

    /// Scores the hold-out and every anomaly dataset with both detectors and
    /// writes one ROC per (detector, dataset), the summary and the detection
    /// rate per band.
    pub fn eval(&self) -> Result<Vec<SummaryRow>> {
        let dae = checkpoint::load_dae(&self.path(DAE_CKPT))?;
        let svm = checkpoint::load_ocsvm(&self.path(OCSVM_CKPT))?;
        let scaler = checkpoint::load_scaler(&self.path(SCALER_CKPT))?;
        let holdout = scaler.apply_all(&read_features_csv(open(&self.path(HOLDOUT_FILE))?)?);
        let normal = [dae.score_all(&holdout), svm.score_all(&holdout)];
        let fpr = self.config.eval.target_fpr;

        let mut rows = Vec::new();
        let mut files = Vec::new();
        let mut rate = String::from("dataset,DAE,OCSVM\n");
        for band in self.config.bands() {
            let data = scaler.apply_all(&read_features_csv(open(&self.path(&band_file(&band.name)))?)?);
            let anomalous = [dae.score_all(&data), svm.score_all(&data)];
            let mut tprs = Vec::new();
            for (d, det) in DETECTORS.iter().enumerate() {
                let roc: RocReport = roc_curve(&normal[d], &anomalous[d]).labeled(det, &band.name);
                let name = roc_file(det, &band.name);
                roc.write_csv(create(&self.path(&name))?)?;
                files.push(name);
                let tpr = tpr_at_fpr(&roc, fpr);
                tprs.push(tpr);
                rows.push(SummaryRow {
                    detector: det.to_string(),
                    dataset: band.name.clone(),
                    auc: roc.auc,
                    tpr_at_fpr: tpr,
                });
            }
            let _ = writeln!(rate, "{},{},{}", band.name, tprs[0], tprs[1]);
        }
        let mut w = csv::Writer::from_writer(create(&self.path(SUMMARY_FILE))?);
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
        fs::write(self.path(DETECTION_RATE_FILE), rate)?;
        files.push(SUMMARY_FILE.to_owned());
        files.push(DETECTION_RATE_FILE.to_owned());
        self.record_stage("eval", &[("roc_curves", rows.len())], &files)?;
        self.note(format!("eval: {} ROC curves", rows.len()));
        Ok(rows)
    }

    /// Renders the summary and loss comparison as a plain-text report.
    pub fn report(&self) -> Result<String> {
        let rows = read_summary_csv(&self.path(SUMMARY_FILE))?;
        let losses = fs::read_to_string(self.path(LOSS_COMPARISON_FILE))
            .map_err(|_| Error::MissingArtifact(self.path(LOSS_COMPARISON_FILE)))?;
        let fpr = self.config.eval.target_fpr;
        let mut s = String::new();
        let _ = writeln!(s, "master seed {}  config {}", self.config.run.seed, self.config.hash());
        let _ = writeln!(s, "\nloss distributions (train vs validation)");
        let _ = writeln!(s, "  {:<10} {:>8} {:>12} {:>12}", "split", "AMI", "mean", "variance");
        for line in losses.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let num = |i: usize| f.get(i).and_then(|v| v.parse::<f64>().ok()).unwrap_or(f64::NAN);
            let _ = writeln!(s, "  {:<10} {:>8.4} {:>12.4e} {:>12.4e}", f[0], num(1), num(2), num(3));
        }
        let _ = writeln!(s, "\n{:<8} {:>9} {:>9} {:>11} {:>11}", "dataset", "DAE AUC", "SVM AUC", "DAE TPR", "SVM TPR");
        let _ = writeln!(s, "{:<8} {:>9} {:>9} {:>11} {:>11}", "", "", "", format!("@FPR {fpr}"), format!("@FPR {fpr}"));
        for pair in rows.chunks(2) {
            if let [d, o] = pair {
                let _ = writeln!(
                    s,
                    "{:<8} {:>9.4} {:>9.4} {:>11.4} {:>11.4}",
                    d.dataset, d.auc, o.auc, d.tpr_at_fpr, o.tpr_at_fpr
                );
            }
        }
        fs::write(self.path(REPORT_FILE), &s)?;
        Ok(s)
    }

    /// All five stages in order.
    pub fn run_all(&self) -> Result<String> {
        self.simulate()?;
        self.inject()?;
        self.train()?;
        self.eval()?;
        self.report()
    }
}

fn write_loss_comparison(path: &Path, c: &LossComparison) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.serialize(LossRow {
        split: "train",
        ami: c.ami,
        mean: c.mean_train,
        variance: c.var_train,
    })?;
    w.serialize(LossRow {
        split: "validation",
        ami: c.ami,
        mean: c.mean_val,
        variance: c.var_val,
    })?;
    w.flush()?;
    Ok(())
}
