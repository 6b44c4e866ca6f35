//! End-to-end runs: corpus in, score tables and a manifest out.
//!
//! Stages run in a fixed order and every failure is tagged with the stage
//! it came from. Artifacts are written to a staging directory and moved
//! into place only when the whole run succeeded.

mod artifacts;
mod config;
mod table3;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::corpus::{self, CorpusFormat, DocumentRecord, GroupLabel, RejectReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{self, CooccurrenceGraph};
use crate::metrics::{self, ComponentScores, TermCounts};
use crate::scoring::{self, SbsResult};
use crate::sentiment::{self, LexiconScorer, SentimentScore, SentimentScorer, SentimentSummary};
use crate::textprep::{self, Preprocessor, TokenStream};

pub use artifacts::{
    load_report, EXCLUDED_ROW, IMPORTANCE_FILE, IMPORTANCE_TITLE, SAMPLE_STATS_FILE,
    SAMPLE_STATS_TITLE, SENTIMENT_TABLE_FILE, SENTIMENT_TITLE,
};
pub use config::{sha256_hex, ClusterSpec, PrepSpec, ResolvedConfig, RunConfig};
pub use table3::{
    validate_grid, validate_table3, CellCheck, Measure, PublishedGrid, Table3Report,
    PUBLISHED_TABLE3, RECONSTRUCTION_TOLERANCE,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REJECT_FILE: &str = "reject_report.json";
pub const VOCAB_FILE: &str = "ngram_vocab.csv";
pub const COMPONENTS_FILE: &str = "components.csv";
pub const SCORES_FILE: &str = "scores.csv";
pub const RANKING_FILE: &str = "ranking.csv";
pub const SENTIMENT_FILE: &str = "sentiment.csv";
pub const SENTIMENT_SUMMARY_FILE: &str = "sentiment_summary.csv";
pub const GRAPHS_DIR: &str = "graphs";
const STAGING_DIR: &str = ".staging";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Config,
    CorpusLoad,
    CorpusSpam,
    CorpusQuery,
    CorpusPartition,
    Vocab,
    Preprocess,
    Graph,
    Metrics,
    Scoring,
    Sentiment,
    ReportWrite,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::CorpusLoad => "corpus.load",
            Stage::CorpusSpam => "corpus.spam",
            Stage::CorpusQuery => "corpus.query",
            Stage::CorpusPartition => "corpus.partition",
            Stage::Vocab => "textprep.vocab",
            Stage::Preprocess => "textprep.preprocess",
            Stage::Graph => "graph",
            Stage::Metrics => "metrics",
            Stage::Scoring => "scoring",
            Stage::Sentiment => "sentiment",
            Stage::ReportWrite => "report.write",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl StageError {
    /// Bad configuration rather than bad data or I/O.
    pub fn is_config(&self) -> bool {
        self.stage == Stage::Config || self.source.is_config()
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentCounts {
    /// Valid documents read from the corpus.
    pub loaded: usize,
    /// Rows skipped as malformed.
    pub malformed_rows: usize,
    pub spam_excluded: usize,
    pub query_excluded: usize,
    /// Documents reaching the overall group.
    pub analysed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_digest: String,
    pub corpus_digest: String,
    pub documents: DocumentCounts,
    pub group_doc_counts: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
    /// Wall time per stage. The only field that differs between reruns.
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Serialize)]
struct RejectSummary<'a> {
    #[serde(flatten)]
    report: RejectReport,
    malformed_rows: usize,
    query_excluded: usize,
    spam_authors: Vec<&'a str>,
}

/// Everything computed for one group.
#[derive(Debug, Clone)]
pub struct GroupOutcome {
    pub group: GroupLabel,
    pub doc_count: usize,
    /// The pruned graph with keyword nodes merged into concept nodes.
    pub graph: CooccurrenceGraph,
    pub components: Vec<ComponentScores>,
    pub scores: Vec<SbsResult>,
    pub sentiment: Vec<SentimentSummary>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    /// Groups in label order, overall last. Empty when no document
    /// survived filtering.
    pub groups: Vec<GroupOutcome>,
}

impl RunOutcome {
    pub fn group(&self, name: &str) -> Option<&GroupOutcome> {
        self.groups
            .iter()
            .find(|g| g.group.as_str() == name.to_lowercase())
    }

    pub fn scores(&self) -> impl Iterator<Item = &SbsResult> {
        self.groups.iter().flat_map(|g| g.scores.iter())
    }
}

struct NeutralScorer;

impl SentimentScorer for NeutralScorer {
    fn score(&self, _: &TokenStream) -> f64 {
        0.0
    }
}

#[derive(Default)]
struct Timer {
    timings: BTreeMap<String, u64>,
}

impl Timer {
    fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.timings.entry(stage.as_str().to_string()).or_default() +=
            t.elapsed().as_millis() as u64;
        out
    }
}

/// Run the pipeline with the default execution strategy.
pub fn run(
    corpus_path: &Path,
    cfg: &RunConfig,
    out_dir: &Path,
) -> std::result::Result<RunOutcome, StageError> {
    run_with(corpus_path, cfg, out_dir, Execution::default())
}

pub fn run_with(
    corpus_path: &Path,
    cfg: &RunConfig,
    out_dir: &Path,
    exec: Execution,
) -> std::result::Result<RunOutcome, StageError> {
    let mut timer = Timer::default();
    let resolved = timer
        .time(Stage::Config, || cfg.resolve())
        .at(Stage::Config)?;
    let config_digest = resolved.digest();
    let mut warnings = Vec::new();

    // load
    let (corpus_digest, loaded) = timer
        .time(Stage::CorpusLoad, || -> Result<_> {
            let bytes = fs::read(corpus_path).map_err(|e| Error::io(corpus_path, e))?;
            let format = resolved
                .corpus_format
                .unwrap_or_else(|| CorpusFormat::from_path(corpus_path));
            Ok((
                sha256_hex(&bytes),
                corpus::load_corpus(corpus_path, format)?,
            ))
        })
        .at(Stage::CorpusLoad)?;
    info!(
        "loaded {} documents ({} malformed rows)",
        loaded.docs.len(),
        loaded.rejected
    );
    warnings.extend(loaded.warnings.iter().cloned());
    let all_docs = loaded.docs;

    // spam
    let (after_spam, spam_authors) = timer.time(Stage::CorpusSpam, || {
        if !resolved.spam.enabled {
            return (all_docs.clone(), Vec::new());
        }
        let verdicts = corpus::flag_spammers(&all_docs, &resolved.spam);
        let flagged: Vec<String> = verdicts
            .iter()
            .filter(|v| v.flagged)
            .map(|v| v.author_id.clone())
            .collect();
        (corpus::remove_flagged(&all_docs, &verdicts), flagged)
    });
    let spam_excluded = all_docs.len() - after_spam.len();

    // query
    let kept = timer
        .time(Stage::CorpusQuery, || match &resolved.query {
            Some(q) => corpus::filter_by_query(&after_spam, q, &resolved.prep),
            None => Ok(after_spam.clone()),
        })
        .at(Stage::CorpusQuery)?;
    let query_excluded = after_spam.len() - kept.len();

    let counts = DocumentCounts {
        loaded: all_docs.len(),
        malformed_rows: loaded.rejected,
        spam_excluded,
        query_excluded,
        analysed: kept.len(),
    };
    let reject = RejectSummary {
        report: RejectReport::new(all_docs.len(), kept.len(), spam_excluded),
        malformed_rows: loaded.rejected,
        query_excluded,
        spam_authors: spam_authors.iter().map(String::as_str).collect(),
    };

    let mut manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest,
        corpus_digest,
        documents: counts,
        group_doc_counts: BTreeMap::new(),
        warnings,
        artifacts: Vec::new(),
        timings_ms: BTreeMap::new(),
    };

    let staging = prepare_staging(out_dir).at(Stage::ReportWrite)?;
    let result = (|| {
        if kept.is_empty() {
            let msg = "no documents left after filtering; no score tables written".to_string();
            warn!("{msg}");
            manifest.warnings.push(msg);
            manifest
                .group_doc_counts
                .insert(corpus::OVERALL.to_string(), 0);
            write_json(&staging, REJECT_FILE, &reject, &mut manifest.artifacts)
                .at(Stage::ReportWrite)?;
            return Ok(Vec::new());
        }
        let groups = analyse(
            &kept,
            &all_docs,
            &resolved,
            exec,
            &mut timer,
            &mut manifest,
            &staging,
        )?;
        write_json(&staging, REJECT_FILE, &reject, &mut manifest.artifacts)
            .at(Stage::ReportWrite)?;
        Ok(groups)
    })();
    let groups = match result {
        Ok(g) => g,
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
    };

    manifest.artifacts.push(MANIFEST_FILE.to_string());
    manifest.artifacts.sort();
    manifest.timings_ms = timer.timings;
    let finish = (|| -> Result<()> {
        let mut sink = Vec::new();
        write_json(&staging, MANIFEST_FILE, &manifest, &mut sink)?;
        publish(&staging, out_dir)
    })();
    if let Err(e) = finish {
        let _ = fs::remove_dir_all(&staging);
        return Err(StageError {
            stage: Stage::ReportWrite,
            source: e,
        });
    }
    info!(
        "wrote {} artifacts to {}",
        manifest.artifacts.len(),
        out_dir.display()
    );
    Ok(RunOutcome { manifest, groups })
}

fn analyse(
    kept: &[DocumentRecord],
    all_docs: &[DocumentRecord],
    cfg: &ResolvedConfig,
    exec: Execution,
    timer: &mut Timer,
    manifest: &mut RunManifest,
    staging: &Path,
) -> std::result::Result<Vec<GroupOutcome>, StageError> {
    let mut partition = timer.time(Stage::CorpusPartition, || corpus::partition_by_group(kept));
    if let Some(selected) = &cfg.groups {
        for g in selected {
            if !partition.contains_key(g) {
                let msg = format!("selected group {g:?} has no documents");
                warn!("{msg}");
                manifest.warnings.push(msg);
            }
        }
        partition.retain(|g, _| g.is_overall() || selected.contains(g));
    }
    let mut stems: HashMap<String, &GroupLabel> = HashMap::new();
    for g in partition.keys() {
        if let Some(prev) = stems.insert(artifacts::file_stem(g), g) {
            return Err(StageError {
                stage: Stage::CorpusPartition,
                source: Error::config(format!(
                    "groups {prev:?} and {g:?} map to the same file name"
                )),
            });
        }
    }
    manifest.group_doc_counts = partition
        .iter()
        .map(|(g, docs)| (g.as_str().to_string(), docs.len()))
        .collect();

    let mut prep = timer
        .time(Stage::Vocab, || {
            Preprocessor::fit(cfg.prep.clone(), kept, &cfg.required_phrases, exec)
        })
        .at(Stage::Vocab)?;
    let keywords: BTreeSet<String> = cfg
        .clusters
        .iter()
        .flat_map(|c| c.keywords.iter().cloned())
        .collect();
    let dropped = prep.protect(&keywords);
    if dropped > 0 {
        info!("dropped {dropped} collocations that would hide a keyword");
    }
    info!("n-gram vocabulary: {} entries", prep.vocab().len());

    let streams: Vec<TokenStream> =
        timer.time(Stage::Preprocess, || exec.map(kept, |d| prep.preprocess(d)));
    let stream_of: HashMap<&str, &TokenStream> =
        streams.iter().map(|s| (s.doc_id.as_str(), s)).collect();

    let scorer: Box<dyn SentimentScorer> = match &cfg.lexicon {
        Some((lex, _)) => Box::new(LexiconScorer::new(lex.normalized(&prep))),
        None => {
            let msg = "no lexicon configured; every document scores 0".to_string();
            warn!("{msg}");
            manifest.warnings.push(msg);
            Box::new(NeutralScorer)
        }
    };
    let doc_scores: Vec<SentimentScore> = timer.time(Stage::Sentiment, || {
        exec.map(&streams, |s| sentiment::score_document(s, scorer.as_ref()))
    });
    let score_of: HashMap<&str, f64> = doc_scores
        .iter()
        .map(|s| (s.doc_id.as_str(), s.value))
        .collect();

    let jobs: Vec<(&GroupLabel, &Vec<DocumentRecord>)> = partition.iter().collect();
    let t = Instant::now();
    let outcomes = exec.map(&jobs, |(group, docs)| {
        analyse_group(group, docs, &stream_of, &doc_scores, cfg, exec)
    });
    *timer.timings.entry("groups".to_string()).or_default() += t.elapsed().as_millis() as u64;
    let outcomes = outcomes
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;

    timer
        .time(Stage::ReportWrite, || {
            write_run_artifacts(
                staging,
                &outcomes,
                kept,
                all_docs,
                &prep,
                &doc_scores,
                &score_of,
                cfg,
                manifest,
            )
        })
        .at(Stage::ReportWrite)?;
    Ok(outcomes)
}

fn analyse_group(
    group: &GroupLabel,
    docs: &[DocumentRecord],
    stream_of: &HashMap<&str, &TokenStream>,
    doc_scores: &[SentimentScore],
    cfg: &ResolvedConfig,
    exec: Execution,
) -> std::result::Result<GroupOutcome, StageError> {
    let streams: Vec<TokenStream> = docs
        .iter()
        .map(|d| stream_of[d.id.as_str()].clone())
        .collect();
    let raw = graph::build_graph_with(&streams, &cfg.graph, exec);
    let pruned = graph::prune(&raw, &cfg.graph);
    let merged = graph::merge_clusters(&pruned, &cfg.clusters).at(Stage::Graph)?;
    info!(
        "group {group}: {} docs, graph {} nodes / {} edges after pruning and merging",
        docs.len(),
        merged.node_count(),
        merged.edge_count()
    );

    let counts = TermCounts::from_streams(&streams);
    let components = metrics::component_scores(&merged, &counts, &cfg.clusters, exec);
    let scores = scoring::score_group(group, &components, &cfg.clusters).at(Stage::Scoring)?;

    let ids: std::collections::HashSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    let group_scores: Vec<SentimentScore> = doc_scores
        .iter()
        .filter(|s| ids.contains(s.doc_id.as_str()))
        .cloned()
        .collect();
    let sentiment = sentiment::summarize(group, &group_scores, &streams, &cfg.clusters);

    Ok(GroupOutcome {
        group: group.clone(),
        doc_count: docs.len(),
        graph: merged,
        components,
        scores,
        sentiment,
    })
}

#[allow(clippy::too_many_arguments)]
fn write_run_artifacts(
    dir: &Path,
    outcomes: &[GroupOutcome],
    kept: &[DocumentRecord],
    all_docs: &[DocumentRecord],
    prep: &Preprocessor,
    doc_scores: &[SentimentScore],
    score_of: &HashMap<&str, f64>,
    cfg: &ResolvedConfig,
    manifest: &mut RunManifest,
) -> Result<()> {
    let list = &mut manifest.artifacts;
    write_file(dir, VOCAB_FILE, list, |w| prep.vocab().write_csv(w))?;

    fs::create_dir_all(dir.join(GRAPHS_DIR)).map_err(|e| Error::io(dir.join(GRAPHS_DIR), e))?;
    for o in outcomes {
        let stem = artifacts::file_stem(&o.group);
        write_file(dir, &format!("{GRAPHS_DIR}/{stem}.edges.csv"), list, |w| {
            o.graph.write_edges_csv(w)
        })?;
        write_file(dir, &format!("{GRAPHS_DIR}/{stem}.nodes.csv"), list, |w| {
            o.graph.write_nodes_csv(w)
        })?;
    }
    write_file(dir, COMPONENTS_FILE, list, |w| {
        metrics::write_components_csv(
            outcomes
                .iter()
                .flat_map(|o| o.components.iter().map(move |c| (o.group.as_str(), c))),
            w,
        )
    })?;

    let groups: Vec<GroupLabel> = outcomes.iter().map(|o| o.group.clone()).collect();
    let scores: Vec<SbsResult> = outcomes
        .iter()
        .flat_map(|o| o.scores.iter().cloned())
        .collect();
    let summaries: Vec<SentimentSummary> = outcomes
        .iter()
        .flat_map(|o| o.sentiment.iter().cloned())
        .collect();
    let orientations: Vec<String> = cfg.clusters.iter().map(|c| c.orientation.clone()).collect();
    write_file(dir, SCORES_FILE, list, |w| {
        artifacts::write_scores_csv(&scores, w)
    })?;
    write_file(dir, RANKING_FILE, list, |w| {
        artifacts::write_ranking_csv(&groups, &scores, w)
    })?;
    write_file(dir, SENTIMENT_SUMMARY_FILE, list, |w| {
        artifacts::write_sentiment_summary_csv(&summaries, w)
    })?;
    write_file(dir, SENTIMENT_FILE, list, |w| {
        let group_of: HashMap<&str, &GroupLabel> =
            kept.iter().map(|d| (d.id.as_str(), &d.group)).collect();
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["doc_id", "group", "sentiment"])?;
        for s in doc_scores {
            wtr.write_record([
                s.doc_id.as_str(),
                group_of[s.doc_id.as_str()].as_str(),
                &crate::report::fmt_fixed(s.value, 6),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io(SENTIMENT_FILE, e))
    })?;

    write_file(dir, IMPORTANCE_FILE, list, |w| {
        artifacts::importance_table(&groups, &scores, &orientations).write_csv(w)
    })?;
    write_file(dir, SENTIMENT_TABLE_FILE, list, |w| {
        artifacts::sentiment_table(&groups, &summaries, &orientations).write_csv(w)
    })?;

    let words = |d: &DocumentRecord| textprep::tokenize_words(&d.text, &cfg.prep).len() as f64;
    let mut rows: Vec<(String, artifacts::SampleRow)> = Vec::new();
    for o in outcomes.iter().filter(|o| !o.group.is_overall()) {
        let docs: Vec<&DocumentRecord> = kept.iter().filter(|d| d.group == o.group).collect();
        rows.push((
            o.group.as_str().to_string(),
            artifacts::SampleRow {
                docs: docs.len(),
                lengths: docs.iter().map(|d| words(d)).collect(),
                sentiment: Some(docs.iter().map(|d| score_of[d.id.as_str()]).collect()),
            },
        ));
    }
    let kept_ids: std::collections::HashSet<&str> = kept.iter().map(|d| d.id.as_str()).collect();
    let excluded: Vec<&DocumentRecord> = all_docs
        .iter()
        .filter(|d| !kept_ids.contains(d.id.as_str()))
        .collect();
    rows.push((
        EXCLUDED_ROW.to_string(),
        artifacts::SampleRow {
            docs: excluded.len(),
            lengths: excluded.iter().map(|d| words(d)).collect(),
            sentiment: None,
        },
    ));
    write_file(dir, SAMPLE_STATS_FILE, list, |w| {
        artifacts::sample_stats_table(&rows).write_csv(w)
    })?;
    Ok(())
}

fn write_file(
    dir: &Path,
    name: &str,
    list: &mut Vec<String>,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    list.push(name.to_string());
    Ok(())
}

fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    value: &T,
    list: &mut Vec<String>,
) -> Result<()> {
    write_file(dir, name, list, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n").map_err(|e| Error::io(name, e))
    })
}

fn prepare_staging(out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let staging = out_dir.join(STAGING_DIR);
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    fs::create_dir(&staging).map_err(|e| Error::io(&staging, e))?;
    Ok(staging)
}

/// Move every staged entry into `out_dir`, replacing what was there.
fn publish(staging: &Path, out_dir: &Path) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(staging)
        .map_err(|e| Error::io(staging, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(staging, err)))
        .collect::<Result<_>>()?;
    entries.sort();
    for src in entries {
        let dest = out_dir.join(src.file_name().expect("entry has a name"));
        if dest.is_dir() {
            fs::remove_dir_all(&dest).map_err(|e| Error::io(&dest, e))?;
        }
        fs::rename(&src, &dest).map_err(|e| Error::io(&dest, e))?;
    }
    fs::remove_dir(staging).map_err(|e| Error::io(staging, e))
}

/// Outcome of running the same corpus at several window sizes.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub runs: Vec<(usize, RunOutcome)>,
    pub comparison: PathBuf,
}

pub const SWEEP_FILE: &str = "window_comparison.csv";

/// Run once per window into `out_dir/window_<w>/` and write a long-format
/// comparison of the SBS shares and ranks.
pub fn window_sweep(
    corpus_path: &Path,
    cfg: &RunConfig,
    windows: &[usize],
    out_dir: &Path,
    exec: Execution,
) -> std::result::Result<SweepOutcome, StageError> {
    if windows.is_empty() {
        return Err(StageError {
            stage: Stage::Config,
            source: Error::config("no windows given"),
        });
    }
    let mut runs = Vec::new();
    for &w in windows {
        let mut c = cfg.clone();
        c.graph.window = w;
        let outcome = run_with(corpus_path, &c, &out_dir.join(format!("window_{w}")), exec)?;
        runs.push((w, outcome));
    }
    let comparison = out_dir.join(SWEEP_FILE);
    (|| -> Result<()> {
        let file = File::create(&comparison).map_err(|e| Error::io(&comparison, e))?;
        let mut wtr = csv::Writer::from_writer(BufWriter::new(file));
        wtr.write_record(["window", "group", "orientation", "share_sbs", "rank"])?;
        for (w, outcome) in &runs {
            for g in &outcome.groups {
                for (rank, r) in scoring::rank_orientations(&g.scores, &g.group)
                    .into_iter()
                    .enumerate()
                {
                    wtr.write_record([
                        &w.to_string(),
                        g.group.as_str(),
                        &r.orientation,
                        &crate::report::fmt_fixed(r.share_sbs, 6),
                        &(rank + 1).to_string(),
                    ])?;
                }
            }
        }
        wtr.flush().map_err(|e| Error::io(&comparison, e))
    })()
    .at(Stage::ReportWrite)?;
    Ok(SweepOutcome { runs, comparison })
}
