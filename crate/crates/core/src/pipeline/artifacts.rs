//! Report tables built from a finished run, and reading them back.

use std::collections::BTreeMap;
use std::path::Path;

use crate::corpus::GroupLabel;
use crate::error::{Error, Result};
use crate::report::{fmt_fixed, fmt_opt, round_preserving_total, Report, ReportTable};
use crate::scoring::{rank_orientations, SbsResult};
use crate::sentiment::{SentimentSummary, ALL};

pub const SAMPLE_STATS_FILE: &str = "sample_stats.csv";
pub const IMPORTANCE_FILE: &str = "importance_table.csv";
pub const SENTIMENT_TABLE_FILE: &str = "sentiment_table.csv";

pub const SAMPLE_STATS_TITLE: &str = "Sample statistics";
pub const IMPORTANCE_TITLE: &str = "Importance of orientations (% of SBS and components)";
pub const SENTIMENT_TITLE: &str = "Mean sentiment by orientation";

/// Row label of documents that never reached scoring.
pub const EXCLUDED_ROW: &str = "excluded";

pub(crate) fn column_name(g: &GroupLabel) -> String {
    if g.is_overall() {
        "Overall".to_string()
    } else {
        g.as_str().to_string()
    }
}

/// Per-group numbers for the sample-statistics table.
#[derive(Debug, Clone, Default)]
pub(crate) struct SampleRow {
    pub docs: usize,
    pub lengths: Vec<f64>,
    pub sentiment: Option<Vec<f64>>,
}

fn mean_sd(v: &[f64]) -> (Option<f64>, Option<f64>) {
    if v.is_empty() {
        return (None, None);
    }
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    (Some(m), Some(var.sqrt()))
}

/// Groups in label order, then the excluded documents. Volume shares are
/// taken over all valid documents, excluded ones included.
pub(crate) fn sample_stats_table(rows: &[(String, SampleRow)]) -> ReportTable {
    let mut t = ReportTable::new(
        SAMPLE_STATS_TITLE,
        &["group"],
        [
            "documents",
            "volume_pct",
            "length_mean",
            "length_sd",
            "sentiment_mean",
            "sentiment_sd",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    let total: usize = rows.iter().map(|(_, r)| r.docs).sum();
    let raw: Vec<f64> = rows
        .iter()
        .map(|(_, r)| {
            if total == 0 {
                0.0
            } else {
                r.docs as f64 / total as f64 * 100.0
            }
        })
        .collect();
    let volume = round_preserving_total(&raw, 2, 100.0);
    for ((label, r), vol) in rows.iter().zip(volume) {
        let (lm, lsd) = mean_sd(&r.lengths);
        let (sm, ssd) = r.sentiment.as_deref().map_or((None, None), mean_sd);
        t.push(
            vec![label.clone()],
            vec![
                r.docs.to_string(),
                fmt_fixed(vol, 2),
                fmt_opt(lm, 2),
                fmt_opt(lsd, 2),
                fmt_opt(sm, 3),
                fmt_opt(ssd, 3),
            ],
        );
    }
    t
}

/// Measure x orientation rows, one column per group with Overall last.
/// Each (measure, group) column is rounded to add up to exactly 100.00.
pub(crate) fn importance_table(
    groups: &[GroupLabel],
    scores: &[SbsResult],
    orientations: &[String],
) -> ReportTable {
    let mut t = ReportTable::new(
        IMPORTANCE_TITLE,
        &["measure", "orientation"],
        groups.iter().map(column_name).collect(),
    );
    type Pick = fn(&SbsResult) -> f64;
    let measures: [(&str, Pick); 4] = [
        ("SBS", |r| r.share_sbs),
        ("Prevalence", |r| r.share_prevalence),
        ("Diversity", |r| r.share_diversity),
        ("Connectivity", |r| r.share_connectivity),
    ];
    let index: BTreeMap<(&GroupLabel, &str), &SbsResult> = scores
        .iter()
        .map(|r| ((&r.group, r.orientation.as_str()), r))
        .collect();
    for (name, pick) in measures {
        let columns: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| {
                let raw: Vec<f64> = orientations
                    .iter()
                    .map(|o| index.get(&(g, o.as_str())).map_or(0.0, |r| pick(r)))
                    .collect();
                round_preserving_total(&raw, 2, 100.0)
            })
            .collect();
        for (i, o) in orientations.iter().enumerate() {
            t.push(
                vec![name.to_string(), o.clone()],
                columns.iter().map(|c| fmt_fixed(c[i], 2)).collect(),
            );
        }
    }
    t
}

pub(crate) fn sentiment_table(
    groups: &[GroupLabel],
    summaries: &[SentimentSummary],
    orientations: &[String],
) -> ReportTable {
    let mut t = ReportTable::new(
        SENTIMENT_TITLE,
        &["orientation"],
        groups.iter().map(column_name).collect(),
    );
    let index: BTreeMap<(&GroupLabel, &str), &SentimentSummary> = summaries
        .iter()
        .map(|s| ((&s.group, s.orientation.as_str()), s))
        .collect();
    for o in orientations.iter().map(String::as_str).chain([ALL]) {
        t.push(
            vec![o.to_string()],
            groups
                .iter()
                .map(|g| fmt_opt(index.get(&(g, o)).and_then(|s| s.mean), 3))
                .collect(),
        );
    }
    t
}

pub(crate) fn write_scores_csv(scores: &[SbsResult], w: impl std::io::Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "group",
        "orientation",
        "prevalence",
        "diversity",
        "connectivity",
        "z_prevalence",
        "z_diversity",
        "z_connectivity",
        "sbs",
        "share_prevalence",
        "share_diversity",
        "share_connectivity",
        "share_sbs",
    ])?;
    for r in scores {
        let mut rec = vec![r.group.as_str().to_string(), r.orientation.clone()];
        rec.extend(
            [
                r.prevalence,
                r.diversity,
                r.connectivity,
                r.z_prevalence,
                r.z_diversity,
                r.z_connectivity,
                r.sbs,
                r.share_prevalence,
                r.share_diversity,
                r.share_connectivity,
                r.share_sbs,
            ]
            .iter()
            .map(|v| fmt_fixed(*v, 6)),
        );
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("<scores csv>", e))?;
    Ok(())
}

pub(crate) fn write_ranking_csv(
    groups: &[GroupLabel],
    scores: &[SbsResult],
    w: impl std::io::Write,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["group", "rank", "orientation", "share_sbs"])?;
    for g in groups {
        for (i, r) in rank_orientations(scores, g).into_iter().enumerate() {
            wtr.write_record([
                g.as_str(),
                &(i + 1).to_string(),
                &r.orientation,
                &fmt_fixed(r.share_sbs, 6),
            ])?;
        }
    }
    wtr.flush().map_err(|e| Error::io("<ranking csv>", e))?;
    Ok(())
}

pub(crate) fn write_sentiment_summary_csv(
    rows: &[SentimentSummary],
    w: impl std::io::Write,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["group", "orientation", "n", "mean", "sd"])?;
    for s in rows {
        wtr.write_record([
            s.group.as_str(),
            &s.orientation,
            &s.n.to_string(),
            &fmt_opt(s.mean, 6),
            &fmt_opt(s.sd, 6),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<sentiment csv>", e))?;
    Ok(())
}

/// Read the three report tables of a finished run. A missing file is an
/// error naming that file.
pub fn load_report(dir: &Path) -> Result<Report> {
    let read = |file: &str, title: &str, labels: usize| -> Result<ReportTable> {
        let path = dir.join(file);
        let f = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
        ReportTable::read_csv(title, labels, f).map_err(|e| Error::Malformed {
            path: path.clone(),
            message: e.to_string(),
        })
    };
    Ok(Report {
        tables: vec![
            read(SAMPLE_STATS_FILE, SAMPLE_STATS_TITLE, 1)?,
            read(IMPORTANCE_FILE, IMPORTANCE_TITLE, 2)?,
            read(SENTIMENT_TABLE_FILE, SENTIMENT_TITLE, 1)?,
        ],
    })
}

/// File-name-safe form of a group label.
pub(crate) fn file_stem(g: &GroupLabel) -> String {
    g.as_str()
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}
