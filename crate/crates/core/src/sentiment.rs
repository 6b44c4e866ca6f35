//! Document sentiment in [-1, 1] and per-orientation summaries.
//!
//! Scoring goes through [`SentimentScorer`] so other models can be plugged
//! in; the default is a lexicon mean.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::GroupLabel;
use crate::error::{Error, Result};
use crate::graph::ConceptCluster;
use crate::textprep::{Preprocessor, TokenStream, NGRAM_JOINER};

/// Label of the summary row covering every document of a group.
pub const ALL: &str = "all";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub doc_id: String,
    pub value: f64,
}

pub trait SentimentScorer: Send + Sync {
    /// Raw polarity of a document. Out-of-range and non-finite values are
    /// tolerated here and fixed up by [`score_document`].
    fn score(&self, stream: &TokenStream) -> f64;
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    valences: HashMap<String, f64>,
}

#[derive(Deserialize)]
struct LexiconRow {
    term: String,
    valence: f64,
}

impl Lexicon {
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut valences = HashMap::new();
        for (term, v) in pairs {
            let term = term.into();
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::config(format!(
                    "valence {v} of {term:?} is outside [-1, 1]"
                )));
            }
            valences.insert(term, v);
        }
        Ok(Lexicon { valences })
    }

    /// CSV with a `term,valence` header.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut rdr = csv::Reader::from_reader(file);
        let mut pairs = Vec::new();
        for row in rdr.deserialize::<LexiconRow>() {
            let row = row.map_err(|e| Error::Malformed {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            pairs.push((row.term.trim().to_lowercase(), row.valence));
        }
        Lexicon::from_pairs(pairs).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Re-key the lexicon by the preprocessor's normal form so it matches
    /// token streams. Entries collapsing onto one stem are averaged.
    pub fn normalized(&self, prep: &Preprocessor) -> Lexicon {
        let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        let mut entries: Vec<(&String, &f64)> = self.valences.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        for (term, &v) in entries {
            if let Some(key) = prep.normalize_phrase(term) {
                let e = acc.entry(key).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
        Lexicon {
            valences: acc
                .into_iter()
                .map(|(k, (s, n))| (k, s / n as f64))
                .collect(),
        }
    }

    pub fn get(&self, term: &str) -> Option<f64> {
        self.valences.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.valences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
    }
}

/// Mean valence of the tokens found in the lexicon. An n-gram token missing
/// from the lexicon is looked up word by word.
#[derive(Debug, Clone, Default)]
pub struct LexiconScorer {
    lexicon: Lexicon,
}

impl LexiconScorer {
    pub fn new(lexicon: Lexicon) -> Self {
        LexiconScorer { lexicon }
    }
}

impl SentimentScorer for LexiconScorer {
    fn score(&self, stream: &TokenStream) -> f64 {
        let mut sum = 0.0;
        let mut hits = 0usize;
        for term in stream.terms() {
            if let Some(v) = self.lexicon.get(term) {
                sum += v;
                hits += 1;
            } else if term.contains(NGRAM_JOINER) {
                for part in term.split(NGRAM_JOINER) {
                    if let Some(v) = self.lexicon.get(part) {
                        sum += v;
                        hits += 1;
                    }
                }
            }
        }
        if hits == 0 {
            0.0
        } else {
            sum / hits as f64
        }
    }
}

/// Score one document, clamped to [-1, 1]; a non-finite raw score counts
/// as neutral.
pub fn score_document(stream: &TokenStream, scorer: &dyn SentimentScorer) -> SentimentScore {
    let raw = scorer.score(stream);
    SentimentScore {
        doc_id: stream.doc_id.clone(),
        value: if raw.is_finite() {
            raw.clamp(-1.0, 1.0)
        } else {
            0.0
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentSummary {
    pub group: GroupLabel,
    pub orientation: String,
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var.sqrt()))
}

/// One summary per orientation (in cluster order) plus the `all` row. A
/// document belongs to every orientation whose keywords it contains.
/// `scores` and `streams` are matched by document id.
pub fn summarize(
    group: &GroupLabel,
    scores: &[SentimentScore],
    streams: &[TokenStream],
    clusters: &[ConceptCluster],
) -> Vec<SentimentSummary> {
    let by_doc: HashMap<&str, &TokenStream> =
        streams.iter().map(|s| (s.doc_id.as_str(), s)).collect();
    let mut out = Vec::with_capacity(clusters.len() + 1);
    for c in clusters {
        let values: Vec<f64> = scores
            .iter()
            .filter(|s| {
                by_doc.get(s.doc_id.as_str()).is_some_and(|stream| {
                    let terms: HashSet<&str> = stream.terms().collect();
                    c.keywords.iter().any(|k| terms.contains(k.as_str()))
                })
            })
            .map(|s| s.value)
            .collect();
        let (mean, sd) = mean_sd(&values);
        out.push(SentimentSummary {
            group: group.clone(),
            orientation: c.orientation.clone(),
            n: values.len(),
            mean,
            sd,
        });
    }
    let all: Vec<f64> = scores.iter().map(|s| s.value).collect();
    let (mean, sd) = mean_sd(&all);
    out.push(SentimentSummary {
        group: group.clone(),
        orientation: ALL.to_string(),
        n: all.len(),
        mean,
        sd,
    });
    out
}
