//! Corpus ingestion, query filtering, spam flagging and group partitioning.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textprep::{self, PrepConfig};

/// Name of the synthetic group holding the whole corpus.
pub const OVERALL: &str = "overall";

/// Stakeholder group label. Stored lowercased so comparison is
/// case-insensitive. The synthetic `overall` group orders after every
/// real group, which keeps it in the last column of every table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GroupLabel(String);

impl GroupLabel {
    pub fn new(name: &str) -> Result<Self> {
        let norm = name.trim().to_lowercase();
        if norm.is_empty() {
            return Err(Error::config("group label must be non-empty"));
        }
        Ok(GroupLabel(norm))
    }

    pub fn overall() -> Self {
        GroupLabel(OVERALL.to_string())
    }

    pub fn is_overall(&self) -> bool {
        self.0 == OVERALL
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Ord for GroupLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_overall(), other.is_overall()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for GroupLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for GroupLabel {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        GroupLabel::new(&s)
    }
}

impl From<GroupLabel> for String {
    fn from(g: GroupLabel) -> String {
        g.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: String,
    pub text: String,
    pub author_id: String,
    pub group: GroupLabel,
    #[serde(default)]
    pub followers: u64,
    #[serde(default)]
    pub following: u64,
    #[serde(default)]
    pub mentions_received: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

/// Loose row shape used while validating input. Every field is optional so
/// a bad row can be rejected with a precise reason instead of a parse error.
#[derive(Debug, Deserialize)]
struct RawRecord {
    id: Option<String>,
    text: Option<String>,
    author_id: Option<String>,
    group: Option<String>,
    followers: Option<u64>,
    following: Option<u64>,
    mentions_received: Option<u64>,
    timestamp: Option<String>,
}

impl RawRecord {
    fn validate(self) -> std::result::Result<DocumentRecord, String> {
        let id = non_empty(self.id, "id")?;
        let text = self.text.unwrap_or_default();
        if text.trim().is_empty() {
            return Err("missing or empty text".into());
        }
        let author_id = non_empty(self.author_id, "author_id")?;
        let group = GroupLabel::new(&self.group.unwrap_or_default())
            .map_err(|_| "missing or empty group".to_string())?;
        if group.is_overall() {
            return Err(format!("group label {OVERALL:?} is reserved"));
        }
        let timestamp = match self.timestamp {
            Some(ts) if !ts.trim().is_empty() => {
                let ts = ts.trim().to_string();
                chrono::DateTime::parse_from_rfc3339(&ts)
                    .map_err(|e| format!("bad timestamp {ts:?}: {e}"))?;
                Some(ts)
            }
            _ => None,
        };
        Ok(DocumentRecord {
            id,
            text,
            author_id,
            group,
            followers: self.followers.unwrap_or(0),
            following: self.following.unwrap_or(0),
            mentions_received: self.mentions_received.unwrap_or(0),
            timestamp,
        })
    }
}

fn non_empty(v: Option<String>, field: &str) -> std::result::Result<String, String> {
    match v {
        Some(s) if !s.trim().is_empty() => Ok(s),
        _ => Err(format!("missing or empty {field}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// Guess from the file extension; anything that is not `.csv` is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "ndjson" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(Error::config(format!("unknown corpus format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadedCorpus {
    pub docs: Vec<DocumentRecord>,
    pub rejected: usize,
    pub warnings: Vec<String>,
}

/// Read a corpus file. Malformed rows are skipped and counted; an
/// unreadable file or a duplicated id aborts the load.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<LoadedCorpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = LoadedCorpus::default();
    let mut seen: HashMap<String, usize> = HashMap::new();

    let mut accept =
        |out: &mut LoadedCorpus, line: usize, row: std::result::Result<RawRecord, String>| {
            match row.and_then(RawRecord::validate) {
                Ok(doc) => {
                    if seen.insert(doc.id.clone(), line).is_some() {
                        return Err(Error::DuplicateId { id: doc.id, line });
                    }
                    out.docs.push(doc);
                }
                Err(reason) => {
                    let msg = format!("{}:{line}: skipped row: {reason}", path.display());
                    warn!("{msg}");
                    out.warnings.push(msg);
                    out.rejected += 1;
                }
            }
            Ok(())
        };

    match format {
        CorpusFormat::Jsonl => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let row = serde_json::from_str::<RawRecord>(&line).map_err(|e| e.to_string());
                accept(&mut out, i + 1, row)?;
            }
        }
        CorpusFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(file);
            let headers = rdr.headers()?.clone();
            for required in ["id", "text", "author_id", "group"] {
                if !headers.iter().any(|h| h == required) {
                    return Err(Error::Malformed {
                        path: path.to_path_buf(),
                        message: format!("CSV header lacks required column {required:?}"),
                    });
                }
            }
            for (i, rec) in rdr.records().enumerate() {
                // header is line 1
                let line = i + 2;
                let row = rec.map_err(|e| e.to_string()).and_then(|r| {
                    r.deserialize::<RawRecord>(Some(&headers))
                        .map_err(|e| e.to_string())
                });
                accept(&mut out, line, row)?;
            }
        }
    }
    Ok(out)
}

/// Keyword query: a document passes when it contains at least one concept
/// phrase and, with the context filter on, at least one context phrase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub concept_terms: Vec<String>,
    #[serde(default)]
    pub context_terms: Vec<String>,
    #[serde(default = "default_true")]
    pub context_filter: bool,
}

fn default_true() -> bool {
    true
}

fn phrase_tokens(phrases: &[String], prep: &PrepConfig, what: &str) -> Result<Vec<Vec<String>>> {
    phrases
        .iter()
        .map(|p| {
            let toks = textprep::tokenize_words(p, prep);
            if toks.is_empty() {
                Err(Error::config(format!(
                    "{what} term {p:?} has no word tokens"
                )))
            } else {
                Ok(toks)
            }
        })
        .collect()
}

fn contains_phrase(haystack: &[String], phrase: &[String]) -> bool {
    haystack.windows(phrase.len()).any(|w| w == phrase)
}

pub fn filter_by_query(
    docs: &[DocumentRecord],
    query: &SearchQuery,
    prep: &PrepConfig,
) -> Result<Vec<DocumentRecord>> {
    if query.concept_terms.is_empty() {
        return Err(Error::config("search query has no concept terms"));
    }
    if query.context_filter && query.context_terms.is_empty() {
        return Err(Error::config(
            "search query context filter is on but no context terms are given",
        ));
    }
    let concepts = phrase_tokens(&query.concept_terms, prep, "concept")?;
    let contexts = phrase_tokens(&query.context_terms, prep, "context")?;

    Ok(docs
        .iter()
        .filter(|d| {
            let words = textprep::tokenize_words(&d.text, prep);
            concepts.iter().any(|p| contains_phrase(&words, p))
                && (!query.context_filter || contexts.iter().any(|p| contains_phrase(&words, p)))
        })
        .cloned()
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpamConfig {
    pub enabled: bool,
    /// Minimum z-score of an author's document count.
    pub z_min: f64,
    /// Maximum number of mentions the author receives.
    pub max_mentions: u64,
    /// Minimum following / followers ratio.
    pub min_follow_ratio: f64,
}

impl Default for SpamConfig {
    fn default() -> Self {
        SpamConfig {
            enabled: true,
            z_min: 2.0,
            max_mentions: 0,
            min_follow_ratio: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpamVerdict {
    pub author_id: String,
    pub tweet_volume_z: f64,
    pub mentions_received: u64,
    pub follow_ratio: f64,
    pub flagged: bool,
}

/// One verdict per author, sorted by author id. Thresholds are evaluated
/// on the whole input; account statistics use the largest value seen
/// across the author's documents.
pub fn flag_spammers(docs: &[DocumentRecord], cfg: &SpamConfig) -> Vec<SpamVerdict> {
    #[derive(Default)]
    struct Acc {
        volume: u64,
        mentions: u64,
        followers: u64,
        following: u64,
    }
    let mut authors: BTreeMap<&str, Acc> = BTreeMap::new();
    for d in docs {
        let a = authors.entry(d.author_id.as_str()).or_default();
        a.volume += 1;
        a.mentions = a.mentions.max(d.mentions_received);
        a.followers = a.followers.max(d.followers);
        a.following = a.following.max(d.following);
    }

    let n = authors.len() as f64;
    let (mean, sd) = if authors.len() >= 2 {
        let mean = authors.values().map(|a| a.volume as f64).sum::<f64>() / n;
        let var = authors
            .values()
            .map(|a| (a.volume as f64 - mean).powi(2))
            .sum::<f64>()
            / n;
        (mean, var.sqrt())
    } else {
        (0.0, 0.0)
    };
    let volume_z_defined = authors.len() >= 2 && sd > 0.0;

    authors
        .into_iter()
        .map(|(id, a)| {
            let z = if volume_z_defined {
                (a.volume as f64 - mean) / sd
            } else {
                0.0
            };
            let follow_ratio = a.following as f64 / a.followers.max(1) as f64;
            let flagged = volume_z_defined
                && z >= cfg.z_min
                && a.mentions <= cfg.max_mentions
                && follow_ratio >= cfg.min_follow_ratio;
            SpamVerdict {
                author_id: id.to_string(),
                tweet_volume_z: z,
                mentions_received: a.mentions,
                follow_ratio,
                flagged,
            }
        })
        .collect()
}

/// Drop every document written by a flagged author.
pub fn remove_flagged(docs: &[DocumentRecord], verdicts: &[SpamVerdict]) -> Vec<DocumentRecord> {
    let flagged: HashSet<&str> = verdicts
        .iter()
        .filter(|v| v.flagged)
        .map(|v| v.author_id.as_str())
        .collect();
    docs.iter()
        .filter(|d| !flagged.contains(d.author_id.as_str()))
        .cloned()
        .collect()
}

/// Split by group. The synthetic `overall` group holding every document
/// is always present, even for an empty corpus.
pub fn partition_by_group(docs: &[DocumentRecord]) -> BTreeMap<GroupLabel, Vec<DocumentRecord>> {
    let mut map: BTreeMap<GroupLabel, Vec<DocumentRecord>> = BTreeMap::new();
    for d in docs {
        map.entry(d.group.clone()).or_default().push(d.clone());
    }
    map.insert(GroupLabel::overall(), docs.to_vec());
    map
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectReport {
    pub total: usize,
    pub kept: usize,
    pub rejected: usize,
    pub spam_flagged: usize,
    pub spam_share: f64,
}

impl RejectReport {
    /// `total` counts valid loaded documents; `spam_flagged` counts documents
    /// removed as spam, and `rejected` everything that did not reach scoring.
    pub fn new(total: usize, kept: usize, spam_docs: usize) -> Self {
        let share = if total == 0 {
            0.0
        } else {
            spam_docs as f64 / total as f64
        };
        RejectReport {
            total,
            kept,
            rejected: total - kept,
            spam_flagged: spam_docs,
            spam_share: (share * 1e4).round() / 1e4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn doc(id: &str, text: &str, author: &str, group: &str) -> DocumentRecord {
        DocumentRecord {
            id: id.into(),
            text: text.into(),
            author_id: author.into(),
            group: GroupLabel::new(group).unwrap(),
            followers: 0,
            following: 0,
            mentions_received: 0,
            timestamp: None,
        }
    }

    fn write_tmp(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn jsonl_all_valid() {
        let f = write_tmp(
            r#"{"id":"t1","text":"a b","author_id":"u1","group":"customers"}
{"id":"t2","text":"c d","author_id":"u2","group":"media","extra":1}
{"id":"t3","text":"e f","author_id":"u1","group":"Customers","followers":3}
"#,
            ".jsonl",
        );
        let c = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(c.docs.len(), 3);
        assert_eq!(c.rejected, 0);
        assert_eq!(c.docs[2].group.as_str(), "customers");
        assert_eq!(c.docs[2].followers, 3);
    }

    #[test]
    fn jsonl_missing_text_is_skipped() {
        let f = write_tmp(
            r#"{"id":"t1","text":"a b","author_id":"u1","group":"customers"}
{"id":"t2","author_id":"u2","group":"media"}
{"id":"t3","text":"e f","author_id":"u1","group":"customers"}
"#,
            ".jsonl",
        );
        let c = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(c.docs.len(), 2);
        assert_eq!(c.rejected, 1);
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn duplicate_id_is_fatal() {
        let f = write_tmp(
            r#"{"id":"t1","text":"a","author_id":"u1","group":"customers"}
{"id":"t1","text":"b","author_id":"u2","group":"media"}
"#,
            ".jsonl",
        );
        let err = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { ref id, line: 2 } if id == "t1"));
    }

    #[test]
    fn unreadable_file_is_fatal() {
        let err = load_corpus(Path::new("/nonexistent/corpus.jsonl"), CorpusFormat::Jsonl);
        assert!(matches!(err, Err(Error::Io { .. })));
    }

    #[test]
    fn csv_defaults_and_quoting() {
        let f = write_tmp(
            "id,text,author_id,group,followers,following,mentions_received,timestamp\n\
             t1,\"hello, world\",u1,media,,,,\n\
             t2,\"quoted \"\"text\"\"\",u2,customers,10,20,3,2019-03-01T10:00:00Z\n\
             t3,,u3,media,,,,\n\
             t4,bad ts,u4,media,,,,yesterday\n",
            ".csv",
        );
        let c = load_corpus(f.path(), CorpusFormat::Csv).unwrap();
        assert_eq!(c.docs.len(), 2);
        assert_eq!(c.rejected, 2);
        assert_eq!(c.docs[0].text, "hello, world");
        assert_eq!(c.docs[0].followers, 0);
        assert_eq!(c.docs[0].timestamp, None);
        assert_eq!(c.docs[1].text, "quoted \"text\"");
        assert_eq!(c.docs[1].mentions_received, 3);
    }

    #[test]
    fn csv_without_required_header_is_fatal() {
        let f = write_tmp("id,body\nt1,hi\n", ".csv");
        assert!(matches!(
            load_corpus(f.path(), CorpusFormat::Csv),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn reserved_overall_label_is_rejected() {
        let f = write_tmp(
            r#"{"id":"t1","text":"a","author_id":"u1","group":"Overall"}"#,
            ".jsonl",
        );
        let c = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!((c.docs.len(), c.rejected), (0, 1));
    }

    fn query() -> SearchQuery {
        SearchQuery {
            concept_terms: vec!["service quality".into()],
            context_terms: vec!["company".into()],
            context_filter: true,
        }
    }

    #[test]
    fn query_filter_examples() {
        let prep = PrepConfig::english();
        let docs = vec![
            doc("1", "service quality at this company is great", "a", "c"),
            doc("2", "service quality is great", "a", "c"),
            doc("3", "COMPANY improves Service Quality", "a", "c"),
            doc("4", "quality service for the company", "a", "c"),
        ];
        let kept = filter_by_query(&docs, &query(), &prep).unwrap();
        let ids: Vec<_> = kept.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["1", "3"]);

        let mut q = query();
        q.context_filter = false;
        let kept = filter_by_query(&docs, &q, &prep).unwrap();
        assert_eq!(kept.len(), 3);
    }

    #[test]
    fn empty_query_lists_are_config_errors() {
        let prep = PrepConfig::english();
        let mut q = query();
        q.concept_terms.clear();
        assert!(filter_by_query(&[], &q, &prep).unwrap_err().is_config());
        let mut q = query();
        q.context_terms.clear();
        assert!(filter_by_query(&[], &q, &prep).unwrap_err().is_config());
        q.context_filter = false;
        assert!(filter_by_query(&[], &q, &prep).is_ok());
    }

    #[test]
    fn heavy_silent_author_is_flagged() {
        let mut docs = Vec::new();
        for i in 0..500 {
            let mut d = doc(&format!("s{i}"), "buy now", "bot", "customers");
            d.followers = 10;
            d.following = 5000;
            docs.push(d);
        }
        for a in 0..10 {
            for k in 0..2 {
                let mut d = doc(
                    &format!("u{a}_{k}"),
                    "hello",
                    &format!("user{a}"),
                    "customers",
                );
                d.mentions_received = 40;
                docs.push(d);
            }
        }
        let verdicts = flag_spammers(&docs, &SpamConfig::default());
        let bot = verdicts.iter().find(|v| v.author_id == "bot").unwrap();
        assert!(bot.tweet_volume_z > 2.0);
        assert!(bot.flagged);
        assert_eq!(verdicts.iter().filter(|v| v.flagged).count(), 1);
        assert_eq!(remove_flagged(&docs, &verdicts).len(), 20);
    }

    #[test]
    fn single_author_is_never_flagged() {
        let mut d = doc("1", "x", "solo", "media");
        d.following = 1000;
        let verdicts = flag_spammers(&[d.clone(), d], &SpamConfig::default());
        assert_eq!(verdicts.len(), 1);
        assert!(!verdicts[0].flagged);
    }

    #[test]
    fn partition_examples() {
        let docs = vec![
            doc("1", "a", "u", "customers"),
            doc("2", "a", "u", "Media"),
            doc("3", "a", "u", "customers"),
            doc("4", "a", "u", "media"),
            doc("5", "a", "u", "CUSTOMERS"),
        ];
        let p = partition_by_group(&docs);
        let sizes: Vec<_> = p.iter().map(|(g, d)| (g.as_str(), d.len())).collect();
        assert_eq!(sizes, [("customers", 3), ("media", 2), ("overall", 5)]);

        let empty = partition_by_group(&[]);
        assert_eq!(empty.len(), 1);
        assert!(empty[&GroupLabel::overall()].is_empty());
    }

    #[test]
    fn overall_sorts_last() {
        let mut labels = [
            GroupLabel::overall(),
            GroupLabel::new("zeta").unwrap(),
            GroupLabel::new("alpha").unwrap(),
        ];
        labels.sort();
        assert_eq!(labels.last().unwrap(), &GroupLabel::overall());
    }

    #[test]
    fn reject_report_share_is_rounded() {
        let r = RejectReport::new(1000, 990, 4);
        assert_eq!(r.rejected, 10);
        assert_eq!(r.spam_share, 0.004);
        let r = RejectReport::new(3, 2, 1);
        assert_eq!(r.spam_share, 0.3333);
        assert_eq!(RejectReport::new(0, 0, 0).spam_share, 0.0);
    }
}
