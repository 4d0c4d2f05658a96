//! Crawled HTML to [`ArticleRecord`](crate::model::ArticleRecord)s.

pub mod calendar;
pub mod date;
pub mod fetch;
pub mod html;
pub mod profile;
pub mod robots;

use std::fs;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use calendar::{CalendarKind, SolarHijriDate};
pub use date::{normalize_date, DateError};
pub use fetch::{FetchError, Fetcher};
pub use html::{extract, extract_article, ExtractError, Extraction};
pub use profile::{DialectRule, ProfileError, SiteProfile};

/// A fetched page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPage {
    pub url: String,
    pub html: Vec<u8>,
    pub fetched_at: DateTime<Utc>,
}

#[derive(Serialize, Deserialize)]
struct PageMeta {
    url: String,
    fetched_at: DateTime<Utc>,
}

impl RawPage {
    fn stem(&self) -> String {
        hex::encode(&Sha256::digest(self.url.as_bytes())[..8])
    }

    /// Stores the page as `<hash>.html` plus `<hash>.json` with its URL and
    /// fetch time.
    pub fn save_to_dir(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        let stem = self.stem();
        fs::write(dir.join(format!("{stem}.html")), &self.html)?;
        let meta = PageMeta { url: self.url.clone(), fetched_at: self.fetched_at };
        fs::write(dir.join(format!("{stem}.json")), serde_json::to_vec_pretty(&meta)?)
    }

    /// Reads every stored page in `dir`, sorted by URL.
    pub fn load_dir(dir: &Path) -> std::io::Result<Vec<RawPage>> {
        let mut pages = Vec::new();
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let meta: PageMeta = serde_json::from_slice(&fs::read(&path)?)?;
            let html = fs::read(path.with_extension("html"))?;
            pages.push(RawPage { url: meta.url, html, fetched_at: meta.fetched_at });
        }
        pages.sort_by(|a, b| a.url.cmp(&b.url));
        Ok(pages)
    }
}
