mod common;

use common::{fixtures, run_pipeline, step};

#[test]
fn fixture_pipeline_reproduces_reference_pairs() {
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(dir.path());
    let d = dir.path();

    assert_eq!(std::fs::read(d.join("pairs.tsv")).unwrap(), std::fs::read(fixtures().join("expected_pairs.tsv")).unwrap());
    assert_eq!(
        std::fs::read(d.join("quarantine.tsv")).unwrap(),
        std::fs::read(fixtures().join("expected_quarantine.tsv")).unwrap()
    );

    // Hand count: 4 matched headline pairs (A-A, B-B equivalent; C-C, D-E
    // possible), 10 links of which the over-long ratio pair is quarantined.
    let stats: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["n_headline_pairs"], 4);
    assert_eq!(stats["n_sentence_pairs"], 8);
    assert_eq!(stats["n_image_matched_articles"], 2);

    let lines = |f: &str| std::fs::read_to_string(d.join("export").join(f)).unwrap().lines().count();
    assert_eq!((lines("train.src"), lines("train.tgt"), lines("test.src"), lines("test.tgt")), (7, 7, 1, 1));
}

#[test]
fn every_step_is_idempotent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_pipeline(a.path());
    run_pipeline(b.path());
    for f in [
        "articles/kp.ckb.json",
        "articles/kp.kmr.json",
        "candidates.json",
        "sheet.tsv",
        "annotations.json",
        "alignment/ckb-kmr.ckb.txt",
        "alignment/ckb-kmr.kmr.txt",
        "alignment/ckb-kmr.index.json",
        "pairs.tsv",
        "stats.json",
        "split.json",
        "export/train.src",
        "export/test.tgt",
    ] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn validate_and_dedup_on_reference_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::copy(fixtures().join("expected_pairs.tsv"), d.join("pairs.tsv")).unwrap();
    step(&["validate", "--pairs", "pairs.tsv"], d);
    step(&["dedup", "--pairs", "pairs.tsv", "--out", "dedup.tsv"], d);
    assert_eq!(std::fs::read(d.join("dedup.tsv")).unwrap(), std::fs::read(d.join("pairs.tsv")).unwrap());
}
