//! File formats: JSON scenario configs in, CSV tables and a JSON run
//! manifest out.

mod config;
mod report;

pub use config::{ArmFile, ArmsFile, ConfigFile, DesignFile};
pub use report::{
    format_sig6, write_curve_csv, write_scan_csv, write_summary_csv, RunManifest, SUMMARY_HEADER,
};
