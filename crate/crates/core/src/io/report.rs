//! CSV tables and the JSON run manifest.
//!
//! `summary.csv`: design,hypothesis,rejection_rate,rejection_mcse,
//! mean_prop_arm1,mean_outcome,replications. Curve CSV: p1,rho_n1,rho_er.
//! Scan CSV: ratio,power,mcse,mean_outcome. Reals carry 6 significant
//! digits; the manifest keeps full precision.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::ConfigFile;
use crate::engine::{MetricsSummary, ScanRow};
use crate::neyman::CurvePoint;

pub const SUMMARY_HEADER: [&str; 7] = [
    "design",
    "hypothesis",
    "rejection_rate",
    "rejection_mcse",
    "mean_prop_arm1",
    "mean_outcome",
    "replications",
];

/// Rounds to 6 significant digits and prints the shortest decimal form of
/// the rounded value.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("valid float");
    // avoid "-0"
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

pub fn write_summary_csv<W: Write>(out: W, rows: &[MetricsSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.design.clone(),
            r.hypothesis.as_str().to_string(),
            format_sig6(r.rejection_rate),
            format_sig6(r.rejection_mcse),
            format_sig6(r.mean_prop_arm1),
            format_sig6(r.mean_outcome),
            r.replications.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve_csv<W: Write>(out: W, rows: &[CurvePoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p1", "rho_n1", "rho_er"])?;
    for r in rows {
        w.write_record([
            format_sig6(r.p1),
            format_sig6(r.rho_n1),
            format_sig6(r.rho_er),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scan_csv<W: Write>(out: W, rows: &[ScanRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ratio", "power", "mcse", "mean_outcome"])?;
    for r in rows {
        w.write_record([
            r.ratio.to_string(),
            format_sig6(r.power),
            format_sig6(r.mcse),
            format_sig6(r.mean_outcome),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to reproduce a `simulate` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub master_seed: u64,
    pub duration_secs: f64,
    pub config: ConfigFile,
    pub summaries: Vec<MetricsSummary>,
    /// Labels of designs whose null rejection rate exceeds alpha by more
    /// than the inflation margin.
    pub type1_inflation: Vec<String>,
}

impl RunManifest {
    pub fn new(
        config: ConfigFile,
        summaries: Vec<MetricsSummary>,
        duration_secs: f64,
        inflation_margin: f64,
    ) -> Self {
        let type1_inflation = summaries
            .iter()
            .filter(|s| s.type1_inflated(inflation_margin))
            .map(|s| s.design.clone())
            .collect();
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: config.seed,
            duration_secs,
            config,
            summaries,
            type1_inflation,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises")
    }
}
