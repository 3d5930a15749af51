use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricReport;

pub const REPORT_CSV_HEADER: &str = "frame,auc,sauc,nss,sim,cc";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::InvalidArgument(format!(
                "unknown report format `{s}`"
            ))),
        }
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per frame, then a `mean` row. Undefined values are empty cells.
pub fn report_to_csv(r: &MetricReport) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    let row = |label: String, vals: [Option<f64>; 5]| {
        let cells: Vec<String> = vals.into_iter().map(cell).collect();
        format!("{label},{}\n", cells.join(","))
    };
    for f in &r.frames {
        out += &row(f.frame.to_string(), [f.auc, f.sauc, f.nss, f.sim, f.cc]);
    }
    out += &row("mean".into(), [r.auc, r.sauc, r.nss, r.sim, r.cc]);
    out
}

pub fn report_to_json(r: &MetricReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(r)? + "\n")
}

pub fn write_report(r: &MetricReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Json => report_to_json(r)?,
        ReportFormat::Csv => report_to_csv(r),
    };
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::FrameMetrics;

    fn sample() -> MetricReport {
        MetricReport::from_frames(vec![
            FrameMetrics {
                frame: 0,
                auc: Some(0.75),
                sauc: None,
                nss: Some(1.5),
                sim: Some(0.5),
                cc: Some(0.25),
            },
            FrameMetrics {
                frame: 1,
                auc: None,
                sauc: None,
                nss: None,
                sim: Some(0.25),
                cc: Some(0.75),
            },
        ])
    }

    #[test]
    fn csv_layout() {
        let text = report_to_csv(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], REPORT_CSV_HEADER);
        assert_eq!(lines[1], "0,0.75,,1.5,0.5,0.25");
        assert_eq!(lines[2], "1,,,,0.25,0.75");
        assert_eq!(lines[3], "mean,0.75,,1.5,0.375,0.5");
    }

    #[test]
    fn json_field_names() {
        let v: serde_json::Value =
            serde_json::from_str(&report_to_json(&sample()).unwrap()).unwrap();
        for key in ["auc", "sauc", "nss", "sim", "cc", "frames"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["sauc"].is_null());
        assert_eq!(v["frames"][1]["frame"], 1);
        let back: MetricReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, sample());
    }
}
