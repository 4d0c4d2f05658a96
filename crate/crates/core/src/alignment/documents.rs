//! Plain-text documents handed to sentence aligners.
//!
//! For each language pair, matched articles are written in the same order
//! to two files. Within an article each paragraph (lead first) is one line;
//! articles are separated by a blank line. An index file records, for each
//! article position, the two article ids and their byte offsets.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::HeadlineAnnotation;
use crate::model::{write_atomic, ArticleRecord, Language};
use crate::pair_miner::ArticleIndex;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("unknown article id `{0}`")]
    UnknownArticle(String),
    #[error("articles `{0}` and `{1}` are in the same language")]
    SameLanguage(String, String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub src_id: String,
    pub tgt_id: String,
    pub src_offset: usize,
    pub tgt_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentIndex {
    pub src_language: Language,
    pub tgt_language: Language,
    pub articles: Vec<IndexEntry>,
}

impl AlignmentIndex {
    pub fn load(path: &Path) -> std::io::Result<AlignmentIndex> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Source and target documents for one language pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentDocuments {
    pub src_text: String,
    pub tgt_text: String,
    pub index: AlignmentIndex,
}

impl AlignmentDocuments {
    pub fn stem(&self) -> String {
        format!("{}-{}", self.index.src_language, self.index.tgt_language)
    }

    /// `<stem>.<src>.txt`, `<stem>.<tgt>.txt` and `<stem>.index.json`.
    pub fn file_names(&self) -> [String; 3] {
        let stem = self.stem();
        [
            format!("{stem}.{}.txt", self.index.src_language),
            format!("{stem}.{}.txt", self.index.tgt_language),
            format!("{stem}.index.json"),
        ]
    }
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn paragraphs(article: &ArticleRecord) -> Vec<String> {
    article.body_paragraphs().map(collapse_whitespace).filter(|p| !p.is_empty()).collect()
}

fn has_content(article: &ArticleRecord) -> bool {
    article.content.iter().any(|p| !p.trim().is_empty())
}

/// Builds the documents in memory. Only `equivalent` and `possible` verdicts
/// contribute; pairs are ordered by source id then target id, and pairs
/// where either article has no content are dropped from both sides.
pub fn build_alignment_documents(
    annotations: &[HeadlineAnnotation],
    articles: &ArticleIndex<'_>,
) -> Result<Vec<AlignmentDocuments>, EmitError> {
    let matched: BTreeSet<(&str, &str)> = annotations
        .iter()
        .filter(|a| a.verdict.is_match())
        .map(|a| (a.source_id.as_str(), a.target_id.as_str()))
        .collect();

    let mut by_languages: BTreeMap<(Language, Language), AlignmentDocuments> = BTreeMap::new();
    for (src_id, tgt_id) in matched {
        let src = articles.get(src_id).ok_or_else(|| EmitError::UnknownArticle(src_id.to_string()))?;
        let tgt = articles.get(tgt_id).ok_or_else(|| EmitError::UnknownArticle(tgt_id.to_string()))?;
        if src.language == tgt.language {
            return Err(EmitError::SameLanguage(src_id.to_string(), tgt_id.to_string()));
        }
        if !has_content(src) || !has_content(tgt) {
            warn!("skipping {src_id} / {tgt_id}: empty article content");
            continue;
        }
        let docs = by_languages.entry((src.language, tgt.language)).or_insert_with(|| AlignmentDocuments {
            src_text: String::new(),
            tgt_text: String::new(),
            index: AlignmentIndex { src_language: src.language, tgt_language: tgt.language, articles: Vec::new() },
        });
        let src_offset = append_article(&mut docs.src_text, src);
        let tgt_offset = append_article(&mut docs.tgt_text, tgt);
        docs.index.articles.push(IndexEntry {
            src_id: src_id.to_string(),
            tgt_id: tgt_id.to_string(),
            src_offset,
            tgt_offset,
        });
    }
    Ok(by_languages.into_values().collect())
}

fn append_article(doc: &mut String, article: &ArticleRecord) -> usize {
    if !doc.is_empty() {
        doc.push('\n');
    }
    let offset = doc.len();
    for p in paragraphs(article) {
        doc.push_str(&p);
        doc.push('\n');
    }
    offset
}

/// Writes the documents and index files into `out_dir`.
pub fn emit_alignment_inputs(
    annotations: &[HeadlineAnnotation],
    articles: &ArticleIndex<'_>,
    out_dir: &Path,
) -> Result<Vec<AlignmentDocuments>, EmitError> {
    let docs = build_alignment_documents(annotations, articles)?;
    let io = |path: PathBuf| move |source| EmitError::Io { path, source };
    fs::create_dir_all(out_dir).map_err(io(out_dir.to_owned()))?;
    for d in &docs {
        let [src, tgt, index] = d.file_names();
        let mut index_json = serde_json::to_string_pretty(&d.index).expect("index serializes");
        index_json.push('\n');
        for (name, body) in [(src, d.src_text.as_str()), (tgt, d.tgt_text.as_str()), (index, index_json.as_str())] {
            let path = out_dir.join(name);
            write_atomic(&path, body.as_bytes()).map_err(io(path.clone()))?;
        }
    }
    Ok(docs)
}

/// Splits a paragraph into sentences after `.`, `!`, `?` or `؟` followed by
/// whitespace. Whitespace inside a sentence is collapsed to single spaces.
pub fn segment_paragraph(paragraph: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut chars = paragraph.chars().peekable();
    while let Some(c) = chars.next() {
        current.push(c);
        if matches!(c, '.' | '!' | '?' | '؟') && chars.peek().is_some_and(|n| n.is_whitespace()) {
            out.push(collapse_whitespace(&current));
            current.clear();
        }
    }
    out.push(collapse_whitespace(&current));
    out.retain(|s| !s.is_empty());
    out
}

/// Segments of each article of a document, in order.
pub fn segment_document(text: &str) -> Vec<Vec<String>> {
    let text = text.trim_end_matches('\n');
    if text.is_empty() {
        return Vec::new();
    }
    text.split("\n\n").map(|article| article.lines().flat_map(segment_paragraph).collect()).collect()
}
