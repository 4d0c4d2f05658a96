//! Annotation sheets: one TSV row per headline candidate.

use std::collections::HashSet;

use thiserror::Error;

use super::{HeadlineAnnotation, UnknownVerdict, Verdict};
use crate::pair_miner::{ArticleIndex, CandidateSet, MatchedVia};

pub const SHEET_HEADER: [&str; 8] =
    ["source_id", "source_headline", "rank", "target_id", "target_headline", "score", "matched_via", "verdict"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SheetError {
    #[error("unknown article id `{0}`")]
    UnknownArticle(String),
    #[error("sheet header does not match the expected columns")]
    BadHeader,
    #[error("row {row}: expected {expected} columns, found {found}")]
    ColumnCount { row: usize, expected: usize, found: usize },
    #[error("row {row}: {source}")]
    Verdict { row: usize, source: UnknownVerdict },
    #[error("row {row}: bad matched_via: {reason}")]
    MatchedVia { row: usize, reason: String },
    #[error("row {row}: duplicate verdict for {source_id} / {target_id}")]
    Duplicate { row: usize, source_id: String, target_id: String },
}

fn cell(text: &str) -> String {
    text.split(['\t', '\n', '\r']).filter(|s| !s.is_empty()).collect::<Vec<_>>().join(" ")
}

/// Renders candidate sets as an annotation sheet with an empty verdict
/// column. Rows are grouped by source in set order.
pub fn generate_sheet(sets: &[CandidateSet], articles: &ArticleIndex<'_>) -> Result<String, SheetError> {
    let mut out = SHEET_HEADER.join("\t");
    out.push('\n');
    for set in sets {
        let source = articles.get(&set.source_id).ok_or_else(|| SheetError::UnknownArticle(set.source_id.clone()))?;
        for (rank, c) in set.candidates.iter().enumerate() {
            let target = articles.get(&c.target_id).ok_or_else(|| SheetError::UnknownArticle(c.target_id.clone()))?;
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{:.4}\t{}\t\n",
                set.source_id,
                cell(&source.title),
                rank + 1,
                c.target_id,
                cell(&target.title),
                c.score,
                c.matched_via
            ));
        }
    }
    Ok(out)
}

/// Reads back a filled sheet. Rows with a blank verdict are skipped; rows
/// are numbered from 1 at the header.
pub fn import_sheet(sheet: &str, annotator: &str) -> Result<Vec<HeadlineAnnotation>, SheetError> {
    let mut lines = sheet.lines();
    let header = lines.next().ok_or(SheetError::BadHeader)?;
    if header.trim_end_matches('\r').split('\t').collect::<Vec<_>>() != SHEET_HEADER {
        return Err(SheetError::BadHeader);
    }
    let mut seen = HashSet::new();
    let mut annotations = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        // Spreadsheet exports may drop the trailing empty verdict cell.
        let cols = match cols.len() {
            8 => cols,
            7 => cols.into_iter().chain([""]).collect(),
            found => return Err(SheetError::ColumnCount { row, expected: 8, found }),
        };
        let verdict = cols[7].trim();
        if verdict.is_empty() {
            continue;
        }
        let verdict: Verdict = verdict.parse().map_err(|source| SheetError::Verdict { row, source })?;
        let matched_via: MatchedVia =
            cols[6].trim().parse().map_err(|reason| SheetError::MatchedVia { row, reason })?;
        let (source_id, target_id) = (cols[0].to_string(), cols[3].to_string());
        if !seen.insert((source_id.clone(), target_id.clone())) {
            return Err(SheetError::Duplicate { row, source_id, target_id });
        }
        annotations.push(HeadlineAnnotation {
            source_id,
            target_id,
            verdict,
            annotator: annotator.to_string(),
            timestamp: None,
            matched_via: Some(matched_via),
        });
    }
    Ok(annotations)
}
