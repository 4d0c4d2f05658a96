//! Corpus statistics, deduplication, train/test splits and exports.
//!
//! Token counts everywhere are whitespace tokens of the trimmed text.

pub mod published;
pub mod split;

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::{token_count, write_pairs_tsv, HeadlineAnnotation, PairsError, TranslationPair};
use crate::model::write_atomic;

pub use split::{split, SplitError, SplitManifest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// `src-tgt` language codes; absent for an empty pair list.
    pub language_pair: Option<String>,
    pub n_headline_pairs: usize,
    pub n_sentence_pairs: usize,
    pub n_tokens_side_a: usize,
    pub n_tokens_side_b: usize,
    /// Absent when there are no sentence pairs.
    pub mean_tokens_per_sentence_a: Option<f64>,
    pub mean_tokens_per_sentence_b: Option<f64>,
    pub n_image_matched_articles: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("pairs mix language pairs `{0}` and `{1}`")]
    MixedLanguagePairs(String, String),
}

/// Statistics over one language pair. Headline counts are over distinct
/// `equivalent`/`possible` annotations; the image count is the subset
/// admitted through a shared image.
pub fn compute_stats(pairs: &[TranslationPair], annotations: &[HeadlineAnnotation]) -> Result<CorpusStats, StatsError> {
    let mut language_pair: Option<String> = None;
    let (mut tokens_a, mut tokens_b) = (0, 0);
    for p in pairs {
        let lp = format!("{}-{}", p.src_language, p.tgt_language);
        match &language_pair {
            None => language_pair = Some(lp),
            Some(seen) if *seen != lp => return Err(StatsError::MixedLanguagePairs(seen.clone(), lp)),
            Some(_) => {}
        }
        tokens_a += token_count(&p.src_text);
        tokens_b += token_count(&p.tgt_text);
    }
    let matched: BTreeSet<(&str, &str, bool)> = annotations
        .iter()
        .filter(|a| a.verdict.is_match())
        .map(|a| (a.source_id.as_str(), a.target_id.as_str(), a.matched_via.is_some_and(|m| m.via_image())))
        .collect();
    let n = pairs.len();
    let mean = |total: usize| (n > 0).then(|| total as f64 / n as f64);
    Ok(CorpusStats {
        language_pair,
        n_headline_pairs: matched.len(),
        n_sentence_pairs: n,
        n_tokens_side_a: tokens_a,
        n_tokens_side_b: tokens_b,
        mean_tokens_per_sentence_a: mean(tokens_a),
        mean_tokens_per_sentence_b: mean(tokens_b),
        n_image_matched_articles: matched.iter().filter(|m| m.2).count(),
    })
}

/// Drops exact `(src_text, tgt_text)` repeats, keeping the first. Returns
/// the survivors and the number removed.
pub fn dedup(pairs: Vec<TranslationPair>) -> (Vec<TranslationPair>, usize) {
    let before = pairs.len();
    let mut seen = HashSet::new();
    let kept: Vec<TranslationPair> =
        pairs.into_iter().filter(|p| seen.insert((p.src_text.clone(), p.tgt_text.clone()))).collect();
    let removed = before - kept.len();
    (kept, removed)
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error("pair {0} contains a line break")]
    LineBreak(usize),
    #[error(transparent)]
    Pairs(#[from] PairsError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// `train.src`, `train.tgt`, `test.src`, `test.tgt`.
    Bitext,
    /// `train.tsv` and `test.tsv` in the pair interchange format.
    Tsv,
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf, ExportError> {
    let path = dir.join(name);
    write_atomic(&path, body.as_bytes()).map_err(|source| ExportError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Writes the split in manifest order and returns the written paths.
pub fn export(
    pairs: &[TranslationPair],
    manifest: &SplitManifest,
    out_dir: &Path,
    format: ExportFormat,
) -> Result<Vec<PathBuf>, ExportError> {
    manifest.check(pairs.len())?;
    fs::create_dir_all(out_dir).map_err(|source| ExportError::Io { path: out_dir.to_owned(), source })?;
    let mut written = Vec::new();
    for (name, ids) in [("train", &manifest.train_ids), ("test", &manifest.test_ids)] {
        match format {
            ExportFormat::Bitext => {
                let (mut src, mut tgt) = (String::new(), String::new());
                for &i in ids {
                    let p = &pairs[i];
                    if p.src_text.contains(['\n', '\r']) || p.tgt_text.contains(['\n', '\r']) {
                        return Err(ExportError::LineBreak(i));
                    }
                    src.push_str(&p.src_text);
                    src.push('\n');
                    tgt.push_str(&p.tgt_text);
                    tgt.push('\n');
                }
                written.push(write_file(out_dir, &format!("{name}.src"), &src)?);
                written.push(write_file(out_dir, &format!("{name}.tgt"), &tgt)?);
            }
            ExportFormat::Tsv => {
                let subset: Vec<TranslationPair> = ids.iter().map(|&i| pairs[i].clone()).collect();
                written.push(write_file(out_dir, &format!("{name}.tsv"), &write_pairs_tsv(&subset)?)?);
            }
        }
    }
    Ok(written)
}

pub fn export_bitext(pairs: &[TranslationPair], manifest: &SplitManifest, out_dir: &Path) -> Result<Vec<PathBuf>, ExportError> {
    export(pairs, manifest, out_dir, ExportFormat::Bitext)
}
