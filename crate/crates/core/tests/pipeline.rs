mod common;

use std::fs;

use sbs_core::corpus::SearchQuery;
use sbs_core::pipeline::{self, Stage, MANIFEST_FILE, REJECT_FILE, SCORES_FILE};
use sbs_core::report::{Format, Report, REPORT_SCHEMA};
use sbs_core::Execution;

#[test]
fn empty_corpus_writes_manifest_only() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::write_corpus(dir.path(), &[]);
    let cfg = common::dominance_config(dir.path());
    let out = dir.path().join("out");
    let outcome = pipeline::run(&corpus, &cfg, &out).unwrap();
    assert!(outcome.groups.is_empty());
    let m = &outcome.manifest;
    assert_eq!(m.documents.loaded, 0);
    assert_eq!(m.documents.analysed, 0);
    assert_eq!(m.group_doc_counts.get("overall"), Some(&0));
    assert!(m.warnings.iter().any(|w| w.contains("no documents")));
    assert!(out.join(MANIFEST_FILE).is_file());
    assert!(out.join(REJECT_FILE).is_file());
    assert!(!out.join(SCORES_FILE).exists());
    assert!(!out.join(".staging").exists());
}

#[test]
fn unreadable_corpus_is_a_load_stage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::dominance_config(dir.path());
    let out = dir.path().join("out");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join("keep.txt"), "earlier run").unwrap();
    let err = pipeline::run(&dir.path().join("missing.jsonl"), &cfg, &out).unwrap_err();
    assert_eq!(err.stage, Stage::CorpusLoad);
    assert!(!err.is_config());
    assert!(err.to_string().starts_with("[corpus.load]"));
    // nothing half-written, nothing removed
    let names: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, ["keep.txt"]);
}

#[test]
fn duplicate_ids_abort_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![
        ("t1".to_string(), "a", "alpha river"),
        ("t1".to_string(), "b", "beta river"),
    ];
    let corpus = common::write_corpus(dir.path(), &rows);
    let cfg = common::dominance_config(dir.path());
    let err = pipeline::run(&corpus, &cfg, &dir.path().join("out")).unwrap_err();
    assert_eq!(err.stage, Stage::CorpusLoad);
}

#[test]
fn bad_config_is_reported_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::write_corpus(dir.path(), &common::dominance_rows());
    let mut cfg = common::dominance_config(dir.path());
    cfg.clusters[1].keywords = vec!["alpha".into()];
    let err = pipeline::run(&corpus, &cfg, &dir.path().join("out")).unwrap_err();
    assert_eq!(err.stage, Stage::Config);
    assert!(err.is_config());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn corpus_digest_detects_a_single_byte_change() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::write_corpus(dir.path(), &common::dominance_rows());
    let cfg = common::dominance_config(dir.path());
    let a = pipeline::run(&corpus, &cfg, &dir.path().join("a"))
        .unwrap()
        .manifest;

    let mut bytes = fs::read(&corpus).unwrap();
    let pos = bytes.iter().position(|&b| b == b'r').unwrap();
    bytes[pos] = b'R';
    fs::write(&corpus, bytes).unwrap();
    let b = pipeline::run(&corpus, &cfg, &dir.path().join("b"))
        .unwrap()
        .manifest;
    assert_ne!(a.corpus_digest, b.corpus_digest);
    assert_eq!(a.config_digest, b.config_digest);
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::write_corpus(dir.path(), &common::dominance_rows());
    let cfg = common::dominance_config(dir.path());
    pipeline::run_with(
        &corpus,
        &cfg,
        &dir.path().join("seq"),
        Execution::Sequential,
    )
    .unwrap();
    pipeline::run_with(&corpus, &cfg, &dir.path().join("par"), Execution::Parallel).unwrap();
    assert_eq!(
        common::snapshot(&dir.path().join("seq")),
        common::snapshot(&dir.path().join("par"))
    );
}

#[test]
fn disabling_filters_only_grows_the_document_set() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = common::dominance_rows();
    // one prolific silent account
    for i in 0..40 {
        rows.push((format!("s{i:02}"), "north", "buy alpha coins now"));
    }
    let path = dir.path().join("corpus.jsonl");
    let body: String = rows
        .iter()
        .map(|(id, g, t)| {
            let spam = id.starts_with('s');
            serde_json::json!({
                "id": id, "text": t, "group": g,
                "author_id": if spam { "bot".to_string() } else { format!("u{id}") },
                "followers": if spam { 2 } else { 100 },
                "following": if spam { 3000 } else { 100 },
            })
            .to_string()
                + "\n"
        })
        .collect();
    fs::write(&path, body).unwrap();

    let mut cfg = common::dominance_config(dir.path());
    cfg.query = Some(SearchQuery {
        concept_terms: vec!["alpha".into(), "beta".into()],
        context_terms: vec![],
        context_filter: false,
    });
    let both = pipeline::run(&path, &cfg, &dir.path().join("both"))
        .unwrap()
        .manifest;
    assert_eq!(both.documents.spam_excluded, 40);
    assert!(both.documents.query_excluded > 0);

    let mut no_spam = cfg.clone();
    no_spam.spam.enabled = false;
    let m1 = pipeline::run(&path, &no_spam, &dir.path().join("nospam"))
        .unwrap()
        .manifest;
    let mut no_query = cfg.clone();
    no_query.query = None;
    let m2 = pipeline::run(&path, &no_query, &dir.path().join("noquery"))
        .unwrap()
        .manifest;
    assert!(m1.documents.analysed > both.documents.analysed);
    assert!(m2.documents.analysed > both.documents.analysed);
    for m in [&m1, &m2] {
        for (g, n) in &both.group_doc_counts {
            assert!(m.group_doc_counts[g] >= *n);
        }
    }
}

#[test]
fn group_selection_keeps_the_full_overall() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::write_corpus(dir.path(), &common::dominance_rows());
    let mut cfg = common::dominance_config(dir.path());
    let all = pipeline::run(&corpus, &cfg, &dir.path().join("all")).unwrap();
    cfg.groups = Some(vec!["North".into()]);
    let some = pipeline::run(&corpus, &cfg, &dir.path().join("some")).unwrap();
    let names: Vec<&str> = some.groups.iter().map(|g| g.group.as_str()).collect();
    assert_eq!(names, ["north", "overall"]);
    assert_eq!(
        all.group("overall").unwrap().scores,
        some.group("overall").unwrap().scores
    );
}

#[test]
fn csv_corpus_gives_the_same_scores() {
    let dir = tempfile::tempdir().unwrap();
    let rows = common::dominance_rows();
    let jsonl = common::write_corpus(dir.path(), &rows);
    let csv_path = dir.path().join("corpus.csv");
    let mut w = csv::Writer::from_path(&csv_path).unwrap();
    w.write_record(["id", "text", "author_id", "group"])
        .unwrap();
    for (id, g, t) in &rows {
        w.write_record([id.as_str(), t, &format!("u{id}"), g])
            .unwrap();
    }
    w.flush().unwrap();
    let cfg = common::dominance_config(dir.path());
    let a = pipeline::run(&jsonl, &cfg, &dir.path().join("a")).unwrap();
    let b = pipeline::run(&csv_path, &cfg, &dir.path().join("b")).unwrap();
    assert_eq!(
        a.scores().collect::<Vec<_>>(),
        b.scores().collect::<Vec<_>>()
    );
}

#[test]
fn report_renders_in_all_formats() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::write_corpus(dir.path(), &common::dominance_rows());
    let cfg = common::dominance_config(dir.path());
    let out = dir.path().join("out");
    pipeline::run(&corpus, &cfg, &out).unwrap();
    let report = pipeline::load_report(&out).unwrap();

    let md = report.render(Format::Markdown).unwrap();
    assert!(md.contains("| measure | orientation | north | south | Overall |"));
    assert!(md.contains("### Sample statistics"));

    let csv_text = report.render(Format::Csv).unwrap();
    assert_eq!(Report::parse_csv(&csv_text, &[1, 2, 1]).unwrap(), report);

    let json: serde_json::Value =
        serde_json::from_str(&report.render(Format::Json).unwrap()).unwrap();
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    assert!(jsonschema::is_valid(&schema, &json));
    assert_eq!(serde_json::from_value::<Report>(json).unwrap(), report);

    fs::remove_file(out.join(pipeline::SENTIMENT_TABLE_FILE)).unwrap();
    let err = pipeline::load_report(&out).unwrap_err();
    assert!(err.to_string().contains(pipeline::SENTIMENT_TABLE_FILE));
}

#[test]
fn sample_statistics_account_for_every_document() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::write_corpus(dir.path(), &common::dominance_rows());
    let cfg = common::dominance_config(dir.path());
    let out = dir.path().join("out");
    pipeline::run(&corpus, &cfg, &out).unwrap();
    let report = pipeline::load_report(&out).unwrap();
    let stats = &report.tables[0];
    let docs: usize = stats
        .rows
        .iter()
        .map(|r| r.cells[0].parse::<usize>().unwrap())
        .sum();
    assert_eq!(docs, common::dominance_rows().len());
    let volume: f64 = stats.column_values(1).iter().sum();
    assert!((volume - 100.0).abs() < 1e-9);
    assert_eq!(stats.rows.last().unwrap().labels[0], pipeline::EXCLUDED_ROW);
}

#[test]
fn window_sweep_rejects_an_empty_list() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::write_corpus(dir.path(), &common::dominance_rows());
    let cfg = common::dominance_config(dir.path());
    let err =
        pipeline::window_sweep(&corpus, &cfg, &[], dir.path(), Execution::default()).unwrap_err();
    assert!(err.is_config());
}
