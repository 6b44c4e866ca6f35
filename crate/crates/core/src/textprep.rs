//! Text normalization: tokenization, stopword removal, n-gram merging and
//! snowball stemming.
//!
//! The per-document pipeline is `tokenize -> remove_stopwords ->
//! merge_ngrams -> stem`. N-gram detection runs once over the whole corpus
//! on stopword-filtered surface tokens, before stemming.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rust_stemmers::{Algorithm, Stemmer};
use serde::Serialize;

use crate::corpus::DocumentRecord;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Separator used when several words are joined into one n-gram term.
pub const NGRAM_JOINER: char = '_';

const ITALIAN_STOPWORDS: &str = include_str!("../data/stopwords/italian.txt");
const ENGLISH_STOPWORDS: &str = include_str!("../data/stopwords/english.txt");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrepConfig {
    pub language: String,
    pub stopwords: BTreeSet<String>,
    pub min_token_len: usize,
    pub ngram_max: usize,
    pub ngram_min_count: usize,
    pub keep_hashtag_body: bool,
    pub strip_urls: bool,
    pub strip_mentions: bool,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig::for_language("italian").expect("built-in language")
    }
}

impl PrepConfig {
    /// Defaults for `language`, with its shipped stopword list when one exists.
    pub fn for_language(language: &str) -> Result<Self> {
        let language = language.trim().to_lowercase();
        algorithm(&language)?;
        Ok(PrepConfig {
            stopwords: builtin_stopwords(&language).unwrap_or_default(),
            language,
            min_token_len: 2,
            ngram_max: 3,
            ngram_min_count: 5,
            keep_hashtag_body: true,
            strip_urls: true,
            strip_mentions: true,
        })
    }

    pub fn english() -> Self {
        PrepConfig::for_language("english").expect("built-in language")
    }

    pub fn validate(&self) -> Result<()> {
        algorithm(&self.language)?;
        if self.stopwords.is_empty() {
            return Err(Error::config(format!(
                "no stopwords configured for language {:?}",
                self.language
            )));
        }
        if !(1..=3).contains(&self.ngram_max) {
            return Err(Error::config("ngram_max must be 1, 2 or 3"));
        }
        if self.ngram_min_count < 2 {
            return Err(Error::config("ngram_min_count must be at least 2"));
        }
        if self.min_token_len == 0 {
            return Err(Error::config("min_token_len must be at least 1"));
        }
        Ok(())
    }
}

/// Parse a stopword file: one term per line, `#` starts a comment.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

pub fn builtin_stopwords(language: &str) -> Option<BTreeSet<String>> {
    match language {
        "italian" => Some(parse_stopwords(ITALIAN_STOPWORDS)),
        "english" => Some(parse_stopwords(ENGLISH_STOPWORDS)),
        _ => None,
    }
}

fn algorithm(language: &str) -> Result<Algorithm> {
    Ok(match language {
        "arabic" => Algorithm::Arabic,
        "danish" => Algorithm::Danish,
        "dutch" => Algorithm::Dutch,
        "english" => Algorithm::English,
        "finnish" => Algorithm::Finnish,
        "french" => Algorithm::French,
        "german" => Algorithm::German,
        "greek" => Algorithm::Greek,
        "hungarian" => Algorithm::Hungarian,
        "italian" => Algorithm::Italian,
        "norwegian" => Algorithm::Norwegian,
        "portuguese" => Algorithm::Portuguese,
        "romanian" => Algorithm::Romanian,
        "russian" => Algorithm::Russian,
        "spanish" => Algorithm::Spanish,
        "swedish" => Algorithm::Swedish,
        "tamil" => Algorithm::Tamil,
        "turkish" => Algorithm::Turkish,
        other => return Err(Error::UnsupportedLanguage(other.to_string())),
    })
}

/// A token with its byte span in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub term: String,
    pub start: usize,
    pub end: usize,
}

/// Lowercase word tokens. URLs and @-mentions are dropped (when configured),
/// hashtags keep their body, and any non-alphanumeric character splits words.
pub fn tokenize(text: &str, cfg: &PrepConfig) -> Vec<Token> {
    let mut out = Vec::new();
    for (chunk_start, chunk) in whitespace_chunks(text) {
        let lower = chunk.to_lowercase();
        if cfg.strip_urls
            && (lower.starts_with("http://")
                || lower.starts_with("https://")
                || lower.starts_with("www."))
        {
            continue;
        }
        let (body, offset) = if let Some(rest) = chunk.strip_prefix('@') {
            if cfg.strip_mentions {
                continue;
            }
            (rest, 1)
        } else if let Some(rest) = chunk.strip_prefix('#') {
            if !cfg.keep_hashtag_body {
                continue;
            }
            (rest, 1)
        } else {
            (chunk, 0)
        };
        let base = chunk_start + offset;
        let mut word_start: Option<usize> = None;
        for (i, c) in body.char_indices() {
            match (c.is_alphanumeric(), word_start) {
                (true, None) => word_start = Some(i),
                (false, Some(s)) => {
                    out.push(word(body, s, i, base));
                    word_start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = word_start {
            out.push(word(body, s, body.len(), base));
        }
    }
    out
}

fn word(body: &str, s: usize, e: usize, base: usize) -> Token {
    Token {
        term: body[s..e].to_lowercase(),
        start: base + s,
        end: base + e,
    }
}

fn whitespace_chunks(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split(char::is_whitespace)
        .filter(|s| !s.is_empty())
        .map(move |s| (s.as_ptr() as usize - text.as_ptr() as usize, s))
}

pub fn tokenize_words(text: &str, cfg: &PrepConfig) -> Vec<String> {
    tokenize(text, cfg).into_iter().map(|t| t.term).collect()
}

/// Drop stopwords and tokens shorter than `min_token_len` characters.
pub fn remove_stopwords(tokens: Vec<Token>, cfg: &PrepConfig) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| t.term.chars().count() >= cfg.min_token_len && !cfg.stopwords.contains(&t.term))
        .collect()
}

/// Multiword terms (bigrams and trigrams) with their corpus counts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NgramVocab {
    entries: BTreeMap<Vec<String>, usize>,
    max_len: usize,
}

impl NgramVocab {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, words: &[String]) -> bool {
        self.entries.contains_key(words)
    }

    pub fn count(&self, words: &[String]) -> Option<usize> {
        self.entries.get(words).copied()
    }

    /// Force a phrase into the vocabulary regardless of its count, keeping
    /// the observed count when it is already there.
    pub fn insert(&mut self, words: Vec<String>, count: usize) {
        if words.len() < 2 {
            return;
        }
        self.max_len = self.max_len.max(words.len());
        self.entries.entry(words).or_insert(count);
    }

    /// Keep only the entries for which `keep` returns true.
    pub fn retain(&mut self, mut keep: impl FnMut(&[String]) -> bool) {
        self.entries.retain(|k, _| keep(k));
        self.max_len = self.entries.keys().map(Vec::len).max().unwrap_or(0);
    }

    /// `(joined_ngram, count)` pairs in lexical order.
    pub fn iter(&self) -> impl Iterator<Item = (String, usize)> + '_ {
        self.entries.iter().map(|(k, &v)| (join(k), v))
    }

    pub fn write_csv(&self, w: impl std::io::Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["ngram", "count"])?;
        for (ngram, count) in self.iter() {
            wtr.write_record([ngram, count.to_string()])?;
        }
        wtr.flush().map_err(|e| Error::io("<ngram csv>", e))?;
        Ok(())
    }
}

fn join(words: &[String]) -> String {
    let mut s = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            s.push(NGRAM_JOINER);
        }
        s.push_str(w);
    }
    s
}

type NgramCounts = HashMap<Vec<String>, usize>;

fn count_ngrams(streams: &[Vec<String>], max_n: usize) -> NgramCounts {
    let mut counts = NgramCounts::new();
    for s in streams {
        for n in 2..=max_n {
            for w in s.windows(n) {
                *counts.entry(w.to_vec()).or_insert(0) += 1;
            }
        }
    }
    counts
}

pub fn detect_ngrams(streams: &[Vec<String>], cfg: &PrepConfig) -> NgramVocab {
    detect_ngrams_with(streams, cfg, Execution::default())
}

/// Count contiguous bigrams/trigrams over stopword-filtered streams and keep
/// those reaching `ngram_min_count`. Counts are integers, so the chunked
/// reduction gives the same vocabulary on every schedule.
pub fn detect_ngrams_with(
    streams: &[Vec<String>],
    cfg: &PrepConfig,
    exec: Execution,
) -> NgramVocab {
    let mut vocab = NgramVocab::default();
    if cfg.ngram_max < 2 {
        return vocab;
    }
    let partials = exec.map_chunks(streams, 256, |chunk| count_ngrams(chunk, cfg.ngram_max));
    let mut total = NgramCounts::new();
    for part in partials {
        for (k, v) in part {
            *total.entry(k).or_insert(0) += v;
        }
    }
    for (words, count) in total {
        if count >= cfg.ngram_min_count {
            vocab.insert(words, count);
        }
    }
    vocab
}

/// Re-tokenize with the vocabulary: scanning left to right, the longest
/// vocabulary n-gram starting at the current position is merged and its
/// words consumed.
pub fn merge_ngrams(tokens: Vec<Token>, vocab: &NgramVocab) -> Vec<Token> {
    if vocab.is_empty() {
        return tokens;
    }
    let words: Vec<String> = tokens.iter().map(|t| t.term.clone()).collect();
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let longest = (2..=vocab.max_len.min(tokens.len() - i))
            .rev()
            .find(|&n| vocab.contains(&words[i..i + n]));
        match longest {
            Some(n) => {
                out.push(Token {
                    term: join(&words[i..i + n]),
                    start: tokens[i].start,
                    end: tokens[i + n - 1].end,
                });
                i += n;
            }
            None => {
                out.push(tokens[i].clone());
                i += 1;
            }
        }
    }
    out
}

/// Snowball stemmer for one language. N-gram terms are stemmed word by word.
#[derive(Clone)]
pub struct TermStemmer {
    language: String,
    algorithm: Algorithm,
}

impl std::fmt::Debug for TermStemmer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TermStemmer")
            .field("language", &self.language)
            .finish()
    }
}

impl TermStemmer {
    pub fn new(language: &str) -> Result<Self> {
        let language = language.trim().to_lowercase();
        Ok(TermStemmer {
            algorithm: algorithm(&language)?,
            language,
        })
    }

    pub fn stem(&self, token: &str) -> String {
        let stemmer = Stemmer::create(self.algorithm);
        let mut out = String::with_capacity(token.len());
        for (i, part) in token.split(NGRAM_JOINER).enumerate() {
            if i > 0 {
                out.push(NGRAM_JOINER);
            }
            out.push_str(&stemmer.stem(part));
        }
        out
    }
}

pub fn stem(token: &str, language: &str) -> Result<String> {
    Ok(TermStemmer::new(language)?.stem(token))
}

/// Preprocessed document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenStream {
    pub doc_id: String,
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.term.as_str())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Configuration, stemmer and shared n-gram vocabulary bundled together.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    cfg: PrepConfig,
    stemmer: TermStemmer,
    vocab: NgramVocab,
}

impl Preprocessor {
    pub fn new(cfg: PrepConfig, vocab: NgramVocab) -> Result<Self> {
        Ok(Preprocessor {
            stemmer: TermStemmer::new(&cfg.language)?,
            cfg,
            vocab,
        })
    }

    /// Build the vocabulary from `docs` first. `required` phrases are always
    /// merged, whether or not they reach the count threshold.
    pub fn fit(
        cfg: PrepConfig,
        docs: &[DocumentRecord],
        required: &[String],
        exec: Execution,
    ) -> Result<Self> {
        let filtered: Vec<Vec<String>> = exec.map(docs, |d| {
            remove_stopwords(tokenize(&d.text, &cfg), &cfg)
                .into_iter()
                .map(|t| t.term)
                .collect()
        });
        let mut vocab = detect_ngrams_with(&filtered, &cfg, exec);
        for phrase in required {
            let words: Vec<String> = remove_stopwords(tokenize(phrase, &cfg), &cfg)
                .into_iter()
                .map(|t| t.term)
                .collect();
            if words.len() >= 2 && words.len() <= cfg.ngram_max.max(2) {
                let count = count_ngrams(&filtered, words.len())
                    .get(&words)
                    .copied()
                    .unwrap_or(0);
                vocab.insert(words, count);
            }
        }
        Preprocessor::new(cfg, vocab)
    }

    /// Drop collocations that would swallow one of the `terms` (normal
    /// forms) unless the collocation is itself one of them, so a single-word
    /// keyword is never hidden inside an n-gram token. Returns the number of
    /// entries removed.
    pub fn protect(&mut self, terms: &BTreeSet<String>) -> usize {
        let before = self.vocab.len();
        let stemmer = &self.stemmer;
        self.vocab.retain(|words| {
            let stems: Vec<String> = words.iter().map(|w| stemmer.stem(w)).collect();
            terms.contains(&join(&stems)) || !stems.iter().any(|s| terms.contains(s))
        });
        before - self.vocab.len()
    }

    pub fn config(&self) -> &PrepConfig {
        &self.cfg
    }

    pub fn vocab(&self) -> &NgramVocab {
        &self.vocab
    }

    pub fn stemmer(&self) -> &TermStemmer {
        &self.stemmer
    }

    pub fn preprocess(&self, doc: &DocumentRecord) -> TokenStream {
        TokenStream {
            doc_id: doc.id.clone(),
            tokens: self.process_text(&doc.text),
        }
    }

    pub fn process_text(&self, text: &str) -> Vec<Token> {
        let kept = remove_stopwords(tokenize(text, &self.cfg), &self.cfg);
        merge_ngrams(kept, &self.vocab)
            .into_iter()
            .map(|t| Token {
                term: self.stemmer.stem(&t.term),
                ..t
            })
            .collect()
    }

    /// Normal form of a keyword phrase: the stemmed words that survive
    /// stopword removal, joined into a single term. `None` when nothing
    /// survives.
    pub fn normalize_phrase(&self, phrase: &str) -> Option<String> {
        let words: Vec<String> = remove_stopwords(tokenize(phrase, &self.cfg), &self.cfg)
            .into_iter()
            .map(|t| self.stemmer.stem(&t.term))
            .collect();
        if words.is_empty() {
            None
        } else {
            Some(join(&words))
        }
    }
}

pub fn preprocess(
    doc: &DocumentRecord,
    cfg: &PrepConfig,
    vocab: &NgramVocab,
) -> Result<TokenStream> {
    Ok(Preprocessor::new(cfg.clone(), vocab.clone())?.preprocess(doc))
}
