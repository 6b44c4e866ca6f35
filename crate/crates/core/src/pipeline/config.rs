//! Run configuration: one JSON document, resolved into validated parts
//! before any data is read.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{CorpusFormat, GroupLabel, SearchQuery, SpamConfig};
use crate::error::{Error, Result};
use crate::graph::{validate_clusters, ConceptCluster, GraphConfig};
use crate::sentiment::Lexicon;
use crate::textprep::{self, NgramVocab, PrepConfig, Preprocessor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepSpec {
    pub language: String,
    /// Replaces the built-in list when set.
    pub stopwords_file: Option<PathBuf>,
    pub extra_stopwords: Vec<String>,
    pub min_token_len: usize,
    pub ngram_max: usize,
    pub ngram_min_count: usize,
    pub keep_hashtag_body: bool,
    pub strip_urls: bool,
    pub strip_mentions: bool,
}

impl Default for PrepSpec {
    fn default() -> Self {
        let d = PrepConfig::default();
        PrepSpec {
            language: d.language,
            stopwords_file: None,
            extra_stopwords: Vec::new(),
            min_token_len: d.min_token_len,
            ngram_max: d.ngram_max,
            ngram_min_count: d.ngram_min_count,
            keep_hashtag_body: d.keep_hashtag_body,
            strip_urls: d.strip_urls,
            strip_mentions: d.strip_mentions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    pub orientation: String,
    /// Surface phrases, normalized like the corpus text.
    pub keywords: Vec<String>,
    /// Keywords are already in normal form (stemmed, n-grams joined with `_`).
    #[serde(default)]
    pub stemmed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub prep: PrepSpec,
    #[serde(default)]
    pub graph: GraphConfig,
    pub clusters: Vec<ClusterSpec>,
    #[serde(default)]
    pub spam: SpamConfig,
    #[serde(default)]
    pub query: Option<SearchQuery>,
    /// `term,valence` CSV. Without one every document scores 0.
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    /// Restrict the per-group outputs to these labels. The overall group
    /// always covers the whole filtered corpus.
    #[serde(default)]
    pub groups: Option<Vec<String>>,
    #[serde(default)]
    pub corpus_format: Option<String>,
}

impl RunConfig {
    /// Parse a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::config(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.prep.stopwords_file.as_mut() {
            rebase(p);
        }
        if let Some(p) = cfg.lexicon.as_mut() {
            rebase(p);
        }
        Ok(cfg)
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let mut prep = PrepConfig::for_language(&self.prep.language)?;
        if let Some(path) = &self.prep.stopwords_file {
            prep.stopwords = textprep::load_stopwords(path)
                .map_err(|e| Error::config(format!("stopwords file: {e}")))?;
        }
        prep.stopwords.extend(
            self.prep
                .extra_stopwords
                .iter()
                .map(|w| w.trim().to_lowercase()),
        );
        prep.min_token_len = self.prep.min_token_len;
        prep.ngram_max = self.prep.ngram_max;
        prep.ngram_min_count = self.prep.ngram_min_count;
        prep.keep_hashtag_body = self.prep.keep_hashtag_body;
        prep.strip_urls = self.prep.strip_urls;
        prep.strip_mentions = self.prep.strip_mentions;
        prep.validate()?;
        self.graph.validate()?;

        if self.clusters.is_empty() {
            return Err(Error::config("at least one concept cluster is required"));
        }
        let normalizer = Preprocessor::new(prep.clone(), NgramVocab::default())?;
        let mut clusters = Vec::with_capacity(self.clusters.len());
        let mut phrases = BTreeSet::new();
        for spec in &self.clusters {
            let mut keywords = BTreeSet::new();
            for k in &spec.keywords {
                let norm = if spec.stemmed {
                    Some(k.trim().to_lowercase()).filter(|k| !k.is_empty())
                } else {
                    normalizer.normalize_phrase(k)
                };
                let norm = norm.ok_or_else(|| {
                    Error::config(format!(
                        "keyword {k:?} of {:?} is empty after preprocessing",
                        spec.orientation
                    ))
                })?;
                if !spec.stemmed && norm.contains(textprep::NGRAM_JOINER) {
                    phrases.insert(k.clone());
                }
                keywords.insert(norm);
            }
            clusters.push(ConceptCluster {
                orientation: spec.orientation.trim().to_string(),
                keywords,
            });
        }
        validate_clusters(&clusters)?;

        let lexicon = match &self.lexicon {
            Some(path) => {
                let bytes = std::fs::read(path)
                    .map_err(|e| Error::config(format!("lexicon {}: {e}", path.display())))?;
                let lex =
                    Lexicon::load(path).map_err(|e| Error::config(format!("lexicon: {e}")))?;
                Some((lex, sha256_hex(&bytes)))
            }
            None => None,
        };
        let groups = match &self.groups {
            Some(names) => {
                let labels = names
                    .iter()
                    .map(|n| GroupLabel::new(n))
                    .collect::<Result<BTreeSet<_>>>()?;
                if labels.iter().any(GroupLabel::is_overall) {
                    return Err(Error::config(
                        "the overall group cannot be selected explicitly",
                    ));
                }
                Some(labels)
            }
            None => None,
        };
        let corpus_format = self
            .corpus_format
            .as_deref()
            .map(str::parse::<CorpusFormat>)
            .transpose()?;
        if let Some(q) = &self.query {
            if q.concept_terms.is_empty() {
                return Err(Error::config("search query has no concept terms"));
            }
        }

        Ok(ResolvedConfig {
            prep,
            graph: self.graph.clone(),
            clusters,
            required_phrases: phrases.into_iter().collect(),
            spam: self.spam.clone(),
            query: self.query.clone(),
            lexicon,
            groups,
            corpus_format,
        })
    }
}

/// A validated configuration with every referenced file already read.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub prep: PrepConfig,
    pub graph: GraphConfig,
    pub clusters: Vec<ConceptCluster>,
    /// Multiword keywords forced into the n-gram vocabulary.
    pub required_phrases: Vec<String>,
    pub spam: SpamConfig,
    pub query: Option<SearchQuery>,
    /// The lexicon and the digest of its file.
    pub lexicon: Option<(Lexicon, String)>,
    pub groups: Option<BTreeSet<GroupLabel>>,
    pub corpus_format: Option<CorpusFormat>,
}

#[derive(Serialize)]
struct DigestView<'a> {
    prep: &'a PrepConfig,
    graph: &'a GraphConfig,
    clusters: &'a [ConceptCluster],
    required_phrases: &'a [String],
    spam: &'a SpamConfig,
    query: &'a Option<SearchQuery>,
    lexicon_sha256: Option<&'a str>,
    groups: &'a Option<BTreeSet<GroupLabel>>,
}

impl ResolvedConfig {
    /// Digest of everything that can change the results. File contents are
    /// hashed, file locations are not.
    pub fn digest(&self) -> String {
        let view = DigestView {
            prep: &self.prep,
            graph: &self.graph,
            clusters: &self.clusters,
            required_phrases: &self.required_phrases,
            spam: &self.spam,
            query: &self.query,
            lexicon_sha256: self.lexicon.as_ref().map(|(_, d)| d.as_str()),
            groups: &self.groups,
        };
        sha256_hex(&serde_json::to_vec(&view).expect("config serializes"))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
