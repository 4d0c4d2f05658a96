//! Sentence-alignment link files and translation-pair import.
//!
//! One link per line: source segment indices, a tab, target segment
//! indices, each comma-joined. Two optional trailing columns carry edited
//! source and target text. Indices count segments over the whole document
//! from 0.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::documents::{segment_document, AlignmentIndex};
use super::{validate_pair, TranslationPair, ValidationConfig, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Link {
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub src_edit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tgt_edit: Option<String>,
}

impl Link {
    pub fn new(src: impl Into<Vec<usize>>, tgt: impl Into<Vec<usize>>) -> Link {
        Link { src: src.into(), tgt: tgt.into(), src_edit: None, tgt_edit: None }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImportError {
    #[error("link {link}: {reason}")]
    Syntax { link: usize, reason: String },
    #[error("link {link}: {side} segment {index} out of range ({len} segments)")]
    OutOfRange { link: usize, side: &'static str, index: usize, len: usize },
    #[error("{side} document has {found} articles but the index lists {expected}")]
    ArticleCount { side: &'static str, expected: usize, found: usize },
}

fn parse_indices(field: &str, link: usize) -> Result<Vec<usize>, ImportError> {
    let indices = field
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| ImportError::Syntax { link, reason: format!("bad segment index `{s}`") })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(indices)
}

fn edit_field(field: Option<&str>) -> Option<String> {
    field.filter(|s| !s.is_empty()).map(String::from)
}

/// Parses a link file. Blank lines are ignored; links are numbered from 1
/// counting only non-blank lines.
pub fn parse_links(text: &str) -> Result<Vec<Link>, ImportError> {
    let mut links = Vec::new();
    for line in text.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.trim().is_empty()) {
        let n = links.len() + 1;
        let cols: Vec<&str> = line.split('\t').collect();
        if !(cols.len() == 2 || cols.len() == 4) {
            return Err(ImportError::Syntax { link: n, reason: format!("expected 2 or 4 columns, found {}", cols.len()) });
        }
        links.push(Link {
            src: parse_indices(cols[0], n)?,
            tgt: parse_indices(cols[1], n)?,
            src_edit: edit_field(cols.get(2).copied()),
            tgt_edit: edit_field(cols.get(3).copied()),
        });
    }
    Ok(links)
}

pub fn format_links(links: &[Link]) -> String {
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let mut out = String::new();
    for l in links {
        let _ = write!(out, "{}\t{}", join(&l.src), join(&l.tgt));
        if l.src_edit.is_some() || l.tgt_edit.is_some() {
            let _ = write!(out, "\t{}\t{}", l.src_edit.as_deref().unwrap_or(""), l.tgt_edit.as_deref().unwrap_or(""));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImportResult {
    pub pairs: Vec<TranslationPair>,
    pub quarantined: Vec<(TranslationPair, Vec<Violation>)>,
}

/// Segment texts with the article position each belongs to.
pub(crate) struct Segments {
    pub texts: Vec<String>,
    pub article: Vec<usize>,
}

impl Segments {
    pub fn of_document(doc: &str, side: &'static str, expected_articles: usize) -> Result<Segments, ImportError> {
        let articles = segment_document(doc);
        if articles.len() != expected_articles {
            return Err(ImportError::ArticleCount { side, expected: expected_articles, found: articles.len() });
        }
        let mut texts = Vec::new();
        let mut article = Vec::new();
        for (i, segs) in articles.into_iter().enumerate() {
            article.extend(std::iter::repeat(i).take(segs.len()));
            texts.extend(segs);
        }
        Ok(Segments { texts, article })
    }

    fn join(&self, indices: &[usize], link: usize, side: &'static str) -> Result<String, ImportError> {
        if indices.is_empty() {
            return Err(ImportError::Syntax { link, reason: format!("empty {side} side") });
        }
        let mut parts = Vec::with_capacity(indices.len());
        for &index in indices {
            let text = self.texts.get(index).ok_or(ImportError::OutOfRange { link, side, index, len: self.texts.len() })?;
            parts.push(text.as_str());
        }
        Ok(parts.join(" "))
    }
}

/// Checks that every link refers to existing segments.
pub fn check_links(src: &[String], tgt: &[String], links: &[Link]) -> Result<(), ImportError> {
    for (i, l) in links.iter().enumerate() {
        for (side, indices, len) in [("source", &l.src, src.len()), ("target", &l.tgt, tgt.len())] {
            if indices.is_empty() {
                return Err(ImportError::Syntax { link: i + 1, reason: format!("empty {side} side") });
            }
            if let Some(&index) = indices.iter().find(|&&x| x >= len) {
                return Err(ImportError::OutOfRange { link: i + 1, side, index, len });
            }
        }
    }
    Ok(())
}

/// Turns links over a document pair into translation pairs. Pairs failing
/// [`validate_pair`] go to `quarantined` with their violations.
pub fn import_alignment(
    src_doc: &str,
    tgt_doc: &str,
    index: &AlignmentIndex,
    links: &[Link],
    config: &ValidationConfig,
) -> Result<ImportResult, ImportError> {
    let src = Segments::of_document(src_doc, "source", index.articles.len())?;
    let tgt = Segments::of_document(tgt_doc, "target", index.articles.len())?;
    import_segments(&src, &tgt, index, links, config)
}

pub(crate) fn import_segments(
    src: &Segments,
    tgt: &Segments,
    index: &AlignmentIndex,
    links: &[Link],
    config: &ValidationConfig,
) -> Result<ImportResult, ImportError> {
    let mut result = ImportResult::default();
    for (i, link) in links.iter().enumerate() {
        let n = i + 1;
        let src_joined = src.join(&link.src, n, "source")?;
        let tgt_joined = tgt.join(&link.tgt, n, "target")?;
        let src_text = link.src_edit.clone().unwrap_or(src_joined.clone());
        let tgt_text = link.tgt_edit.clone().unwrap_or(tgt_joined.clone());
        let pair = TranslationPair {
            edited: src_text != src_joined || tgt_text != tgt_joined,
            src_text,
            tgt_text,
            src_language: index.src_language,
            tgt_language: index.tgt_language,
            src_article: index.articles[src.article[link.src[0]]].src_id.clone(),
            tgt_article: index.articles[tgt.article[link.tgt[0]]].tgt_id.clone(),
            merged_from: (link.src.len(), link.tgt.len()),
        };
        match validate_pair(&pair, config) {
            Ok(()) => result.pairs.push(pair),
            Err(v) => result.quarantined.push((pair, v)),
        }
    }
    Ok(result)
}
