use std::collections::BTreeMap;
use std::path::Path;

use scraper::Selector;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use super::calendar::CalendarKind;
use crate::model::Language;

/// Per-site extraction rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteProfile {
    pub site: String,
    /// Elements whose text is one tag each (e.g. `.bashakan a`, `.cat-links a`).
    pub tag_selector: String,
    pub title_selector: String,
    pub lead_selector: String,
    /// Container whose `<p>` descendants form the article content.
    pub content_selector: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_selector: Option<String>,
    pub dialect_url_pattern: DialectRule,
    pub calendar: CalendarKind,
    /// Use this URL path segment as an extra tag (sites that expose the
    /// topic only through their link structure).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag_from_url_segment: Option<usize>,
    /// Pages fetched by `crawl`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub start_urls: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub politeness_ms: Option<u64>,
}

/// Maps a page URL to the article language.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DialectRule {
    /// Path segment holding the dialect code (`/so/...`, `/ku/...`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<usize>,
    /// Segment value to language; when empty the usual codes (`so`, `ku`,
    /// `en`) are recognized.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Language>,
    /// Host to language, for sites that run one domain per language.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub hosts: BTreeMap<String, Language>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Language>,
}

impl DialectRule {
    pub fn language_of(&self, url: &Url) -> Option<Language> {
        if let Some(host) = url.host_str() {
            let host = host.trim_start_matches("www.");
            if let Some(lang) = self.hosts.get(host) {
                return Some(*lang);
            }
        }
        if let Some(idx) = self.segment {
            if let Some(seg) = url.path_segments().and_then(|mut s| s.nth(idx)) {
                let seg = seg.to_ascii_lowercase();
                let hit = if self.values.is_empty() {
                    Language::from_url_dialect(&seg)
                } else {
                    self.values.get(&seg).copied()
                };
                if hit.is_some() {
                    return hit;
                }
            }
        }
        self.default
    }
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("profile is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("selector `{field}` is empty")]
    EmptySelector { field: &'static str },
    #[error("selector `{field}` does not parse: `{selector}`")]
    BadSelector { field: &'static str, selector: String },
    #[error("site code is empty")]
    EmptySite,
}

/// Selectors compiled once per profile.
#[derive(Debug, Clone)]
pub(crate) struct CompiledSelectors {
    pub tag: Selector,
    pub title: Selector,
    pub lead: Selector,
    pub content: Selector,
    pub date: Option<Selector>,
}

fn compile(field: &'static str, selector: &str) -> Result<Selector, ProfileError> {
    if selector.trim().is_empty() {
        return Err(ProfileError::EmptySelector { field });
    }
    Selector::parse(selector).map_err(|_| ProfileError::BadSelector { field, selector: selector.to_string() })
}

impl SiteProfile {
    pub fn load(path: impl AsRef<Path>) -> Result<SiteProfile, ProfileError> {
        let text = std::fs::read_to_string(path)?;
        let profile: SiteProfile = serde_json::from_str(&text)?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        self.compiled().map(|_| ())
    }

    pub(crate) fn compiled(&self) -> Result<CompiledSelectors, ProfileError> {
        if self.site.trim().is_empty() {
            return Err(ProfileError::EmptySite);
        }
        Ok(CompiledSelectors {
            tag: compile("tag_selector", &self.tag_selector)?,
            title: compile("title_selector", &self.title_selector)?,
            lead: compile("lead_selector", &self.lead_selector)?,
            content: compile("content_selector", &self.content_selector)?,
            date: self.date_selector.as_deref().map(|s| compile("date_selector", s)).transpose()?,
        })
    }
}
