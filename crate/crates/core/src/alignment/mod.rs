//! Human adjudication and sentence alignment.
//!
//! Headline candidates go out as a TSV sheet and come back as
//! [`HeadlineAnnotation`]s. Matched articles are written to a pair of plain
//! text documents for sentence alignment, and the resulting link file is
//! turned into validated [`TranslationPair`]s.

pub mod documents;
pub mod links;
pub mod pairs;
pub mod sheet;

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::model::Language;
use crate::pair_miner::MatchedVia;

pub use documents::{
    emit_alignment_inputs, segment_document, segment_paragraph, AlignmentDocuments, AlignmentIndex, EmitError, IndexEntry,
};
pub use links::{import_alignment, parse_links, ImportError, ImportResult, Link};
pub use pairs::{read_pairs_tsv, write_pairs_tsv, write_quarantine_tsv, PairsError};
pub use sheet::{generate_sheet, import_sheet, SheetError};

/// Annotator judgement on a headline pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Literal translations of each other.
    Equivalent,
    /// Same news content, not a literal translation.
    Possible,
    None,
}

impl Verdict {
    pub const ALL: [Verdict; 3] = [Verdict::Equivalent, Verdict::Possible, Verdict::None];

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equivalent => "equivalent",
            Verdict::Possible => "possible",
            Verdict::None => "none",
        }
    }

    /// The articles are related and go on to sentence alignment.
    pub fn is_match(self) -> bool {
        matches!(self, Verdict::Equivalent | Verdict::Possible)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownVerdict(pub String);

impl fmt::Display for UnknownVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown verdict `{}` (expected equivalent, possible or none)", self.0)
    }
}

impl std::error::Error for UnknownVerdict {}

impl FromStr for Verdict {
    type Err = UnknownVerdict;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Verdict::ALL.into_iter().find(|v| v.as_str() == s).ok_or_else(|| UnknownVerdict(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadlineAnnotation {
    pub source_id: String,
    pub target_id: String,
    pub verdict: Verdict,
    pub annotator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
    /// Gate that admitted the pair, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_via: Option<MatchedVia>,
}

/// One aligned sentence or phrase and its counterpart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationPair {
    pub src_text: String,
    pub tgt_text: String,
    pub src_language: Language,
    pub tgt_language: Language,
    pub src_article: String,
    pub tgt_article: String,
    pub edited: bool,
    /// Number of source and target segments joined into this pair.
    pub merged_from: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationConfig {
    pub max_tokens: usize,
    pub max_ratio: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig { max_tokens: 80, max_ratio: 3.0 }
    }
}

/// A breached alignment guideline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub guideline: u8,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "guideline {}: {}", self.guideline, self.detail)
    }
}

pub fn token_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Checks a pair against the length (1) and expansion (2) guidelines.
/// Merged (3) and edited (4) pairs are allowed; edits stay visible through
/// [`TranslationPair::edited`].
pub fn validate_pair(pair: &TranslationPair, config: &ValidationConfig) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let sides = [("source", token_count(&pair.src_text)), ("target", token_count(&pair.tgt_text))];
    for (side, n) in sides {
        if n == 0 {
            violations.push(Violation { guideline: 1, detail: format!("{side} side is empty") });
        } else if n > config.max_tokens {
            violations.push(Violation {
                guideline: 1,
                detail: format!("{side} side has {n} tokens (max {})", config.max_tokens),
            });
        }
    }
    let (a, b) = (sides[0].1, sides[1].1);
    if a > 0 && b > 0 {
        let ratio = a.max(b) as f64 / a.min(b) as f64;
        if ratio > config.max_ratio {
            violations.push(Violation {
                guideline: 2,
                detail: format!("length ratio {ratio:.2} exceeds {}", config.max_ratio),
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Headlines judged `equivalent`, as translation pairs. `possible` pairs
/// are not translations and are left out. Ids missing from `articles` are
/// skipped.
pub fn headline_pairs(
    annotations: &[HeadlineAnnotation],
    articles: &crate::pair_miner::ArticleIndex<'_>,
) -> Vec<TranslationPair> {
    let mut seen = std::collections::BTreeSet::new();
    annotations
        .iter()
        .filter(|a| a.verdict == Verdict::Equivalent)
        .filter(|a| seen.insert((a.source_id.as_str(), a.target_id.as_str())))
        .filter_map(|a| {
            let (s, t) = (articles.get(&a.source_id)?, articles.get(&a.target_id)?);
            Some(TranslationPair {
                src_text: s.title.split_whitespace().collect::<Vec<_>>().join(" "),
                tgt_text: t.title.split_whitespace().collect::<Vec<_>>().join(" "),
                src_language: s.language,
                tgt_language: t.language,
                src_article: s.id.clone(),
                tgt_article: t.id.clone(),
                edited: false,
                merged_from: (1, 1),
            })
        })
        .collect()
}

pub fn save_annotations(annotations: &[HeadlineAnnotation], path: &std::path::Path) -> std::io::Result<()> {
    let mut json = serde_json::to_string_pretty(annotations)?;
    json.push('\n');
    crate::model::write_atomic(path, json.as_bytes())
}

pub fn load_annotations(path: &std::path::Path) -> std::io::Result<Vec<HeadlineAnnotation>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
