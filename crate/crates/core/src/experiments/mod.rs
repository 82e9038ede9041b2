//! Scaling experiments: perturbation and discretization scans, log-log
//! fits and their CSV form.

mod config;
mod fit;
mod scan;

pub use config::{profile_to_depth, BaseMap, ExperimentConfig, FamilySpec, OutputSpec};
pub use fit::{
    holder_fit, holder_fit_with, slope_check, HolderFit, SlopeCheck, DEFAULT_RESAMPLES,
    SLOPE_MARGIN,
};
pub use scan::{
    discretization_scan, evaluate_point, read_records_csv, stability_scan, write_records_csv,
    MeasureKind, ScalingRecord, ScanFailure, ScanReport, CSV_HEADER,
};
