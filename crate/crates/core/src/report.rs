//! Tables for analysts: the sample-statistics table, the importance table
//! and the sentiment table, rendered as CSV, JSON or Markdown.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shipped JSON schema for [`Report`] documents.
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Markdown => "md",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::config(format!("unknown report format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub labels: Vec<String>,
    pub cells: Vec<String>,
}

/// A titled grid of pre-formatted cells. Each row carries one or more
/// labels (e.g. measure and orientation) followed by one cell per column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportTable {
    pub title: String,
    pub label_headers: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl ReportTable {
    pub fn new(title: &str, label_headers: &[&str], columns: Vec<String>) -> Self {
        ReportTable {
            title: title.to_string(),
            label_headers: label_headers.iter().map(|s| s.to_string()).collect(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, labels: Vec<String>, cells: Vec<String>) {
        debug_assert_eq!(labels.len(), self.label_headers.len());
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(ReportRow { labels, cells });
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(self.label_headers.iter().chain(&self.columns))?;
        for row in &self.rows {
            wtr.write_record(row.labels.iter().chain(&row.cells))?;
        }
        wtr.flush().map_err(|e| Error::io("<report csv>", e))?;
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv); the title is not stored in
    /// the file.
    pub fn read_csv(title: &str, label_count: usize, r: impl Read) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.len() < label_count {
            return Err(Error::config(format!(
                "table {title:?}: header has {} columns, expected at least {label_count}",
                headers.len()
            )));
        }
        let mut table = ReportTable {
            title: title.to_string(),
            label_headers: headers.iter().take(label_count).map(String::from).collect(),
            columns: headers.iter().skip(label_count).map(String::from).collect(),
            rows: Vec::new(),
        };
        for rec in rdr.records() {
            let rec = rec?;
            table.rows.push(ReportRow {
                labels: rec.iter().take(label_count).map(String::from).collect(),
                cells: rec.iter().skip(label_count).map(String::from).collect(),
            });
        }
        Ok(table)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "### {}\n", self.title);
        let headers: Vec<&str> = self
            .label_headers
            .iter()
            .chain(&self.columns)
            .map(String::as_str)
            .collect();
        let _ = writeln!(s, "| {} |", headers.join(" | "));
        let align: Vec<&str> = (0..headers.len())
            .map(|i| {
                if i < self.label_headers.len() {
                    "---"
                } else {
                    "---:"
                }
            })
            .collect();
        let _ = writeln!(s, "| {} |", align.join(" | "));
        for row in &self.rows {
            let cells: Vec<&str> = row
                .labels
                .iter()
                .chain(&row.cells)
                .map(String::as_str)
                .collect();
            let _ = writeln!(s, "| {} |", cells.join(" | "));
        }
        s
    }

    /// Numeric value of every cell in column `col`, skipping blanks and `NA`.
    pub fn column_values(&self, col: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.cells.get(col))
            .filter_map(|c| c.trim_end_matches('%').parse::<f64>().ok())
            .collect()
    }
}

/// A bundle of tables, the unit rendered by the `report` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tables: Vec<ReportTable>,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Markdown => Ok(self
                .tables
                .iter()
                .map(ReportTable::to_markdown)
                .collect::<Vec<_>>()
                .join("\n")),
            Format::Csv => {
                // tables separated by a blank line, each preceded by its title
                let mut out = Vec::new();
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        out.push(b'\n');
                    }
                    writeln!(out, "# {}", t.title).map_err(|e| Error::io("<report>", e))?;
                    t.write_csv(&mut out)?;
                }
                Ok(String::from_utf8(out).expect("csv output is UTF-8"))
            }
        }
    }

    /// Parse the output of `render(Format::Csv)`.
    pub fn parse_csv(text: &str, label_counts: &[usize]) -> Result<Self> {
        let blocks: Vec<&str> = text
            .split("\n\n")
            .filter(|b| !b.trim().is_empty())
            .collect();
        if blocks.len() != label_counts.len() {
            return Err(Error::config(format!(
                "expected {} tables, found {}",
                label_counts.len(),
                blocks.len()
            )));
        }
        let mut tables = Vec::new();
        for (block, &labels) in blocks.iter().zip(label_counts) {
            let (first, rest) = block.split_once('\n').unwrap_or((block, ""));
            let title = first
                .strip_prefix("# ")
                .ok_or_else(|| Error::config("table block without a title line"))?;
            tables.push(ReportTable::read_csv(title, labels, rest.as_bytes())?);
        }
        Ok(Report { tables })
    }
}

/// Round values to `decimals` places so that they still add up to `total`
/// (largest remainder method). Falls back to plain rounding when the inputs
/// do not add up to `total` in the first place.
pub fn round_preserving_total(values: &[f64], decimals: u32, total: f64) -> Vec<f64> {
    let scale = 10f64.powi(decimals as i32);
    let sum: f64 = values.iter().sum();
    if values.is_empty() || (sum - total).abs() > 1e-6 * total.abs().max(1.0) {
        return values.iter().map(|v| (v * scale).round() / scale).collect();
    }
    let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
    let mut units: Vec<i64> = scaled.iter().map(|v| v.floor() as i64).collect();
    let target = (total * scale).round() as i64;
    let missing = target - units.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = scaled[a] - scaled[a].floor();
        let fb = scaled[b] - scaled[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(missing.max(0) as usize) {
        units[i] += 1;
    }
    units.into_iter().map(|u| u as f64 / scale).collect()
}

pub fn fmt_fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    // no "-0.00"
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "NA".to_string(), |v| fmt_fixed(v, decimals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ReportTable {
        let mut t = ReportTable::new(
            "Importance",
            &["measure", "orientation"],
            vec!["customers".into(), "media".into(), "Overall".into()],
        );
        t.push(
            vec!["SBS".into(), "a, with comma".into()],
            vec!["60.00".into(), "30.00".into(), "45.00".into()],
        );
        t.push(
            vec!["SBS".into(), "b".into()],
            vec!["40.00".into(), "70.00".into(), "55.00".into()],
        );
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = toy();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = ReportTable::read_csv("Importance", 2, buf.as_slice()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn report_csv_round_trip() {
        let mut second = toy();
        second.title = "Other".into();
        let report = Report {
            tables: vec![toy(), second],
        };
        let text = report.render(Format::Csv).unwrap();
        assert_eq!(Report::parse_csv(&text, &[2, 2]).unwrap(), report);
    }

    #[test]
    fn markdown_layout() {
        let md = toy().to_markdown();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines[0], "### Importance");
        assert_eq!(
            lines[2],
            "| measure | orientation | customers | media | Overall |"
        );
        assert_eq!(lines[3], "| --- | --- | ---: | ---: | ---: |");
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn json_matches_schema() {
        let report = Report {
            tables: vec![toy()],
        };
        let value: serde_json::Value =
            serde_json::from_str(&report.render(Format::Json).unwrap()).unwrap();
        let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        assert!(jsonschema::is_valid(&schema, &value));
        let broken = serde_json::json!({"tables": [{"title": 3}]});
        assert!(!jsonschema::is_valid(&schema, &broken));
        let back: Report = serde_json::from_value(value).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn largest_remainder_rounding() {
        let v = [100.0 / 3.0, 100.0 / 3.0, 100.0 / 3.0];
        let r = round_preserving_total(&v, 2, 100.0);
        assert_eq!(r, [33.34, 33.33, 33.33]);
        let six = [16.666, 16.666, 16.666, 16.666, 16.666, 16.67];
        let r = round_preserving_total(&six, 2, 100.0);
        assert!((r.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        // inputs not summing to the total: plain rounding
        assert_eq!(
            round_preserving_total(&[1.234, 2.345], 2, 100.0),
            [1.23, 2.35]
        );
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_fixed(-0.0001, 2), "0.00");
        assert_eq!(fmt_fixed(-0.5, 3), "-0.500");
        assert_eq!(fmt_opt(None, 3), "NA");
        assert_eq!(fmt_opt(Some(0.1125), 3), "0.113");
    }

    #[test]
    fn format_parsing() {
        assert_eq!("md".parse::<Format>().unwrap(), Format::Markdown);
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
