//! Packet log I/O, TX/RX reconciliation and feature extraction.

pub mod features;
pub mod record;

pub use features::{
    apply_scaler, extract_features, fit_scaler, read_features_csv, reconcile, split,
    write_features_csv, FeatureVector, Label, LinkedPacket, ReconcileSummary, Scaler,
    FEATURE_DIM,
};
pub use record::{parse_record, read_log, write_log, write_record, PacketLog, PacketRecord, Side};
