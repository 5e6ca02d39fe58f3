//! Configuration-driven parameter sweeps, figure presets, dataset emission,
//! and the validation suite behind the `nhpb` binary.
//!
//! The library half exists so integration tests can drive scans in-process;
//! the binary is a thin argument parser over these modules.

pub mod config;
pub mod dataset;
pub mod presets;
pub mod scan;
pub mod validate;

pub use config::{AxisSpec, LinkSpec, OracleSettings, OutputKind, ScanConfig, LASER_AXIS};
pub use dataset::{write_dataset, Format};
pub use presets::{figure_preset, PRESET_NAMES};
pub use scan::{run_scan, run_scan_with_threads, Dataset, Row, RowValues, STATUS_OK};
pub use validate::{run_case, CaseReport, Check, CASE_NAMES};
