//! Normalized article schema and its JSON file representation.
//!
//! Every other stage consumes [`ArticleRecord`]s. Files hold the articles of
//! one site in one language:
//!
//! ```json
//! {"site": "anf", "language": "kmr", "articles": [ ... ]}
//! ```

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use url::Url;

/// ISO 639-3 code of one of the three corpus languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    /// Central Kurdish (Sorani), Arabic-based script.
    Ckb,
    /// Northern Kurdish (Kurmanji), Latin-based script.
    Kmr,
    /// English.
    Eng,
}

impl Language {
    pub const ALL: [Language; 3] = [Language::Ckb, Language::Kmr, Language::Eng];

    pub fn code(self) -> &'static str {
        match self {
            Language::Ckb => "ckb",
            Language::Kmr => "kmr",
            Language::Eng => "eng",
        }
    }

    /// Maps the dialect segment found in news-site URLs (`so`, `ku`, `en`)
    /// or an ISO code onto a language.
    pub fn from_url_dialect(segment: &str) -> Option<Language> {
        match segment.to_ascii_lowercase().as_str() {
            "so" | "sorani" | "ckb" => Some(Language::Ckb),
            "ku" | "kurmanci" | "kurmanji" | "kmr" => Some(Language::Kmr),
            "en" | "english" | "eng" => Some(Language::Eng),
            _ => None,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown language code `{0}` (expected ckb, kmr or eng)")]
pub struct UnknownLanguage(pub String);

impl FromStr for Language {
    type Err = UnknownLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ckb" => Ok(Language::Ckb),
            "kmr" => Ok(Language::Kmr),
            "eng" => Ok(Language::Eng),
            other => Err(UnknownLanguage(other.to_string())),
        }
    }
}

/// One normalized news article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub id: String,
    pub tags: Vec<String>,
    pub original_link: String,
    pub language: Language,
    pub title: String,
    #[serde(default, skip_serializing_if = "lead_is_absent")]
    pub lead: Option<String>,
    pub date: NaiveDate,
    pub content: Vec<String>,
    pub images: Vec<String>,
    pub site: String,
}

fn lead_is_absent(lead: &Option<String>) -> bool {
    lead.as_deref().map_or(true, |l| l.trim().is_empty())
}

impl ArticleRecord {
    /// Checks the record-level invariants, returning the first broken one.
    pub fn check(&self) -> Result<(), String> {
        if self.title.trim().is_empty() {
            return Err("title is empty".into());
        }
        match Url::parse(&self.original_link) {
            Ok(u) if u.has_host() => {}
            _ => return Err(format!("original_link `{}` is not an absolute URL", self.original_link)),
        }
        let mut seen = HashSet::new();
        for img in &self.images {
            let norm = normalize_url(None, img)
                .ok_or_else(|| format!("image `{img}` is not an absolute URL"))?;
            if !seen.insert(norm) {
                return Err(format!("duplicate image `{img}`"));
            }
        }
        Ok(())
    }

    /// Lead (if any) followed by the content paragraphs.
    pub fn body_paragraphs(&self) -> impl Iterator<Item = &str> {
        self.lead
            .as_deref()
            .filter(|l| !l.trim().is_empty())
            .into_iter()
            .chain(self.content.iter().map(String::as_str))
    }

    pub fn normalized_images(&self) -> BTreeSet<String> {
        self.images
            .iter()
            .filter_map(|i| normalize_url(None, i))
            .collect()
    }
}

/// Stable article identifier: site code, a dash, then the first 16 hex
/// digits of the SHA-256 of the normalized link.
pub fn article_id(site: &str, original_link: &str) -> String {
    let normalized = normalize_url(None, original_link).unwrap_or_else(|| original_link.to_string());
    let digest = Sha256::digest(normalized.as_bytes());
    format!("{site}-{}", hex::encode(&digest[..8]))
}

/// Resolves `raw` against `base`, drops the fragment and keeps the query.
/// Returns `None` for anything that does not end up as an http(s) URL.
pub fn normalize_url(base: Option<&Url>, raw: &str) -> Option<String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return None;
    }
    let mut url = match base {
        Some(b) => b.join(raw).ok()?,
        None => Url::parse(raw).ok()?,
    };
    if !matches!(url.scheme(), "http" | "https") {
        return None;
    }
    url.set_fragment(None);
    Some(url.to_string())
}

/// The articles of one site in one language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFile {
    pub site: String,
    pub language: Language,
    pub articles: Vec<ArticleRecord>,
}

impl CorpusFile {
    pub fn new(site: impl Into<String>, language: Language) -> Self {
        CorpusFile { site: site.into(), language, articles: Vec::new() }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let mut issues = Vec::new();
        let mut ids = HashSet::new();
        for (index, a) in self.articles.iter().enumerate() {
            if let Err(reason) = a.check() {
                issues.push(RecordIssue { index, id: a.id.clone(), reason });
            }
            if a.site != self.site {
                issues.push(RecordIssue {
                    index,
                    id: a.id.clone(),
                    reason: format!("site `{}` differs from file site `{}`", a.site, self.site),
                });
            }
            if a.language != self.language {
                issues.push(RecordIssue {
                    index,
                    id: a.id.clone(),
                    reason: format!("language `{}` differs from file language `{}`", a.language, self.language),
                });
            }
            if !ids.insert(a.id.as_str()) {
                issues.push(RecordIssue { index, id: a.id.clone(), reason: format!("duplicate id `{}`", a.id) });
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(CorpusError::Validation(issues))
        }
    }

    pub fn get(&self, id: &str) -> Option<&ArticleRecord> {
        self.articles.iter().find(|a| a.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordIssue {
    pub index: usize,
    pub id: String,
    pub reason: String,
}

impl fmt::Display for RecordIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} ({}): {}", self.index, self.id, self.reason)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON at byte {offset} (line {line}, column {column}): {message}")]
    Parse { offset: usize, line: usize, column: usize, message: String },
    #[error("invalid records: {}", format_issues(.0))]
    Validation(Vec<RecordIssue>),
}

fn format_issues(issues: &[RecordIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl CorpusError {
    /// Ids named by a validation error, in record order.
    pub fn offending_ids(&self) -> Vec<&str> {
        match self {
            CorpusError::Validation(issues) => issues.iter().map(|i| i.id.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

// Loose mirror of the file schema so that bad language codes and dates are
// reported per record instead of as an opaque parse failure.
#[derive(Deserialize)]
struct RawCorpus {
    site: String,
    language: String,
    articles: Vec<RawArticle>,
}

#[derive(Deserialize)]
struct RawArticle {
    id: String,
    #[serde(default)]
    tags: Vec<String>,
    original_link: String,
    language: String,
    title: String,
    #[serde(default)]
    lead: Option<String>,
    date: String,
    #[serde(default)]
    content: Vec<String>,
    #[serde(default)]
    images: Vec<String>,
    site: String,
}

/// Parses and validates a corpus from JSON text.
pub fn parse_articles(text: &str) -> Result<CorpusFile, CorpusError> {
    let raw: RawCorpus = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        CorpusError::Parse { offset: byte_offset(text, line, column), line, column, message: e.to_string() }
    })?;

    let mut issues = Vec::new();
    let file_language = match raw.language.parse::<Language>() {
        Ok(l) => Some(l),
        Err(e) => {
            issues.push(RecordIssue { index: 0, id: "<file>".into(), reason: e.to_string() });
            None
        }
    };
    let mut articles = Vec::with_capacity(raw.articles.len());
    for (index, a) in raw.articles.into_iter().enumerate() {
        let language = match a.language.parse::<Language>() {
            Ok(l) => l,
            Err(e) => {
                issues.push(RecordIssue { index, id: a.id, reason: e.to_string() });
                continue;
            }
        };
        let date = match NaiveDate::parse_from_str(&a.date, "%Y-%m-%d") {
            Ok(d) => d,
            Err(_) => {
                issues.push(RecordIssue { index, id: a.id, reason: format!("invalid date `{}`", a.date) });
                continue;
            }
        };
        articles.push(ArticleRecord {
            id: a.id,
            tags: a.tags,
            original_link: a.original_link,
            language,
            title: a.title,
            lead: a.lead.filter(|l| !l.trim().is_empty()),
            date,
            content: a.content,
            images: a.images,
            site: a.site,
        });
    }
    if !issues.is_empty() {
        return Err(CorpusError::Validation(issues));
    }
    let corpus = CorpusFile { site: raw.site, language: file_language.expect("checked above"), articles };
    corpus.validate()?;
    Ok(corpus)
}

/// serde_json reports 1-based lines and columns; turn that into a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

pub fn load_articles(path: impl AsRef<Path>) -> Result<CorpusFile, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_owned(), source })?;
    parse_articles(&text)
}

pub fn to_json(corpus: &CorpusFile) -> String {
    let mut out = serde_json::to_string_pretty(corpus).expect("corpus serialization is infallible");
    out.push('\n');
    out
}

/// Writes the whole file in one go (temp file then rename).
pub fn save_articles(corpus: &CorpusFile, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    corpus.validate()?;
    write_atomic(path, to_json(corpus).as_bytes()).map_err(|source| CorpusError::Io { path: path.to_owned(), source })
}

/// Writes via a synced temporary file renamed over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let file_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{file_name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
