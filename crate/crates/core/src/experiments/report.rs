//! CSV rows and JSON summary documents for experiment reports.

use std::io::Write;

use serde::Serialize;

use super::ExperimentError;

/// Writes one CSV row per record, with a header row in field order.
/// Absent optional values become empty cells.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Pretty-printed JSON summary of a whole report.
pub fn write_summary<T: Serialize, W: Write>(report: &T, mut out: W) -> Result<(), ExperimentError> {
    serde_json::to_writer_pretty(&mut out, report).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run_e3, Condition};

    #[test]
    fn e3_csv_has_header_and_three_rows() {
        let report = run_e3(42, 20).unwrap();
        let mut buf = Vec::new();
        write_csv(&report.conditions, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[0],
            "condition,tasks,quality_mean,quality_std,std_defined,accuracy_pct,inflation_selected_pct,\
             distinct_delegates,d_vs_blind,p_vs_blind,d_vs_self_claimed"
        );
        assert!(lines[1].starts_with(Condition::Blind.as_str()));
        assert!(lines[1].ends_with(",,,"));
    }
}
