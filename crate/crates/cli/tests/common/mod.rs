#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/pipeline")
}

pub fn paramine(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramine"))
        .args(args)
        .current_dir(cwd)
        .env_remove("PARAMINE_CONFIG")
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

/// Runs a step and panics with its stderr when it fails.
pub fn step(args: &[&str], cwd: &Path) -> String {
    let out = paramine(args, cwd);
    assert!(out.status.success(), "paramine {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Fills the verdict column of a generated sheet from `verdicts.tsv`;
/// rows not listed there stay blank.
pub fn fill_sheet(sheet: &str) -> String {
    let text = std::fs::read_to_string(fixtures().join("verdicts.tsv")).unwrap();
    let verdicts: HashMap<(&str, &str), &str> = text
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            ((c[0], c[1]), c[2])
        })
        .collect();
    let mut out = String::new();
    for (i, line) in sheet.lines().enumerate() {
        let mut cols: Vec<&str> = line.split('\t').collect();
        if i > 0 {
            cols[7] = verdicts.get(&(cols[0], cols[3])).copied().unwrap_or("");
        }
        out.push_str(&cols.join("\t"));
        out.push('\n');
    }
    out
}

/// The fixture pipeline from stored pages to exported split, in `dir`.
pub fn run_pipeline(dir: &Path) {
    let fx = fixtures();
    let fx = fx.to_str().unwrap();
    step(&["extract", "--profile", &format!("{fx}/profile.json"), "--pages", &format!("{fx}/pages"), "--out", "articles"], dir);
    step(&["mine", "--src", "articles/kp.ckb.json", "--tgt", "articles/kp.kmr.json", "--out", "candidates.json"], dir);
    step(&["sheet", "--candidates", "candidates.json", "--articles", "articles/kp.ckb.json", "--articles", "articles/kp.kmr.json", "--out", "sheet.tsv"], dir);
    let filled = fill_sheet(&std::fs::read_to_string(dir.join("sheet.tsv")).unwrap());
    std::fs::write(dir.join("sheet.filled.tsv"), filled).unwrap();
    step(&["import-sheet", "--sheet", "sheet.filled.tsv", "--annotator", "fixture", "--out", "annotations.json"], dir);
    step(&["align-inputs", "--annotations", "annotations.json", "--articles", "articles/kp.ckb.json", "--articles", "articles/kp.kmr.json", "--out", "alignment"], dir);
    step(
        &[
            "import-alignment",
            "--src-doc", "alignment/ckb-kmr.ckb.txt",
            "--tgt-doc", "alignment/ckb-kmr.kmr.txt",
            "--index", "alignment/ckb-kmr.index.json",
            "--links", &format!("{fx}/links.tsv"),
            "--out", "pairs.tsv",
            "--quarantine", "quarantine.tsv",
        ],
        dir,
    );
    let stats = step(&["stats", "--pairs", "pairs.tsv", "--annotations", "annotations.json", "--json"], dir);
    std::fs::write(dir.join("stats.json"), stats).unwrap();
    step(&["split", "--pairs", "pairs.tsv", "--out", "split.json"], dir);
    step(&["export", "--pairs", "pairs.tsv", "--manifest", "split.json", "--format", "bitext", "--out", "export"], dir);
}
