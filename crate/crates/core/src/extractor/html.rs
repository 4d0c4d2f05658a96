//! Field extraction from crawled pages.

use std::collections::HashSet;

use chrono::NaiveDate;
use log::warn;
use scraper::{ElementRef, Html, Selector};
use serde_json::Value;
use thiserror::Error;
use url::Url;

use super::calendar::CalendarKind;
use super::date::{normalize_date, DateError};
use super::profile::{ProfileError, SiteProfile};
use super::RawPage;
use crate::model::{article_id, normalize_url, ArticleRecord};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("page url `{0}` is not absolute")]
    BadUrl(String),
    #[error("{url}: no title found")]
    MissingTitle { url: String },
    #[error("{url}: no publication date found")]
    MissingDate { url: String },
    #[error("{url}: {source}")]
    Date {
        url: String,
        #[source]
        source: DateError,
    },
    #[error("{url}: cannot determine the article language from the URL")]
    UnknownDialect { url: String },
}

/// An extracted record plus anything a reviewer should look at.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub record: ArticleRecord,
    pub warnings: Vec<String>,
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn text_of(el: ElementRef<'_>) -> String {
    collapse_ws(&el.text().collect::<String>())
}

/// Structured metadata embedded as JSON-LD, flattened to the objects that
/// carry article fields.
struct JsonLd {
    objects: Vec<Value>,
}

impl JsonLd {
    fn from_document(doc: &Html) -> JsonLd {
        let sel = Selector::parse(r#"script[type="application/ld+json"]"#).expect("static selector");
        let mut objects = Vec::new();
        for script in doc.select(&sel) {
            let raw: String = script.text().collect();
            match serde_json::from_str::<Value>(raw.trim()) {
                Ok(v) => flatten_ld(v, &mut objects),
                Err(e) => warn!("skipping unparsable JSON-LD block: {e}"),
            }
        }
        // Article-typed objects first, in document order.
        objects.sort_by_key(|o| !is_article_type(o));
        JsonLd { objects }
    }

    fn string(&self, keys: &[&str]) -> Option<String> {
        self.objects.iter().find_map(|o| {
            keys.iter().find_map(|k| match o.get(*k) {
                Some(Value::String(s)) if !s.trim().is_empty() => Some(collapse_ws(s)),
                _ => None,
            })
        })
    }

    fn keywords(&self) -> Vec<String> {
        for o in &self.objects {
            match o.get("keywords") {
                Some(Value::String(s)) => return s.split(',').map(str::to_string).collect(),
                Some(Value::Array(items)) => {
                    return items.iter().filter_map(|v| v.as_str().map(str::to_string)).collect();
                }
                _ => {}
            }
        }
        Vec::new()
    }
}

fn flatten_ld(v: Value, out: &mut Vec<Value>) {
    match v {
        Value::Array(items) => items.into_iter().for_each(|i| flatten_ld(i, out)),
        Value::Object(mut map) => {
            if let Some(graph) = map.remove("@graph") {
                flatten_ld(graph, out);
            }
            if !map.is_empty() {
                out.push(Value::Object(map));
            }
        }
        _ => {}
    }
}

fn is_article_type(o: &Value) -> bool {
    let is_article = |s: &str| s.ends_with("Article") || s == "BlogPosting";
    match o.get("@type") {
        Some(Value::String(t)) => is_article(t),
        Some(Value::Array(ts)) => ts.iter().filter_map(Value::as_str).any(is_article),
        _ => false,
    }
}

fn meta_content(doc: &Html, names: &[&str]) -> Option<String> {
    let sel = Selector::parse("meta").expect("static selector");
    for name in names {
        for m in doc.select(&sel) {
            let attrs = m.value();
            let key = attrs.attr("property").or_else(|| attrs.attr("name"));
            if key.is_some_and(|k| k.eq_ignore_ascii_case(name)) {
                if let Some(c) = attrs.attr("content").map(collapse_ws).filter(|c| !c.is_empty()) {
                    return Some(c);
                }
            }
        }
    }
    None
}

fn push_tag(tags: &mut Vec<String>, seen: &mut HashSet<String>, raw: &str) {
    let tag = collapse_ws(raw).to_lowercase();
    if !tag.is_empty() && seen.insert(tag.clone()) {
        tags.push(tag);
    }
}

/// Extracts one article from a page according to `profile`.
pub fn extract(page: &RawPage, profile: &SiteProfile) -> Result<Extraction, ExtractError> {
    let selectors = profile.compiled()?;
    let url = Url::parse(&page.url).map_err(|_| ExtractError::BadUrl(page.url.clone()))?;
    let html = String::from_utf8_lossy(&page.html);
    let doc = Html::parse_document(&html);
    let ld = JsonLd::from_document(&doc);
    let mut warnings = Vec::new();

    let language = profile
        .dialect_url_pattern
        .language_of(&url)
        .ok_or_else(|| ExtractError::UnknownDialect { url: page.url.clone() })?;

    let title = doc
        .select(&selectors.title)
        .map(text_of)
        .find(|t| !t.is_empty())
        .or_else(|| ld.string(&["headline", "name"]))
        .or_else(|| meta_content(&doc, &["og:title", "twitter:title"]))
        .ok_or_else(|| ExtractError::MissingTitle { url: page.url.clone() })?;

    let lead = doc
        .select(&selectors.lead)
        .map(text_of)
        .find(|t| !t.is_empty())
        .or_else(|| ld.string(&["alternativeHeadline"]));

    let mut tags = Vec::new();
    let mut seen = HashSet::new();
    for el in doc.select(&selectors.tag) {
        push_tag(&mut tags, &mut seen, &text_of(el));
    }
    if tags.is_empty() {
        for k in ld.keywords() {
            push_tag(&mut tags, &mut seen, &k);
        }
    }
    if tags.is_empty() {
        if let Some(k) = meta_content(&doc, &["keywords", "news_keywords", "article:tag"]) {
            for t in k.split(',') {
                push_tag(&mut tags, &mut seen, t);
            }
        }
    }
    if let Some(idx) = profile.tag_from_url_segment {
        if let Some(seg) = url.path_segments().and_then(|mut s| s.nth(idx)) {
            let seg = percent_decode(seg);
            push_tag(&mut tags, &mut seen, &seg);
        }
    }

    let mut content = Vec::new();
    let mut images = Vec::new();
    let p_sel = Selector::parse("p").expect("static selector");
    let img_sel = Selector::parse("img").expect("static selector");
    if let Some(container) = doc.select(&selectors.content).next() {
        content.extend(container.select(&p_sel).map(text_of).filter(|t| !t.is_empty()));
        let mut seen_img = HashSet::new();
        for img in container.select(&img_sel) {
            let attrs = img.value();
            let src = attrs.attr("src").filter(|s| !s.trim().is_empty()).or_else(|| attrs.attr("data-src"));
            if let Some(norm) = src.and_then(|s| normalize_url(Some(&url), s)) {
                if seen_img.insert(norm.clone()) {
                    images.push(norm);
                }
            }
        }
    }
    if content.is_empty() {
        if let Some(body) = ld.objects.iter().find_map(|o| o.get("articleBody").and_then(Value::as_str)) {
            content.extend(body.lines().map(collapse_ws).filter(|l| !l.is_empty()));
        }
    }

    let date = resolve_date(&doc, &ld, profile, &selectors.date, &page.url, &mut warnings)?;
    for w in &warnings {
        warn!("{w}");
    }

    let original_link = normalize_url(None, &page.url).unwrap_or_else(|| page.url.clone());
    let record = ArticleRecord {
        id: article_id(&profile.site, &original_link),
        tags,
        original_link,
        language,
        title,
        lead,
        date,
        content,
        images,
        site: profile.site.clone(),
    };
    Ok(Extraction { record, warnings })
}

/// Convenience wrapper returning only the record.
pub fn extract_article(page: &RawPage, profile: &SiteProfile) -> Result<ArticleRecord, ExtractError> {
    extract(page, profile).map(|e| e.record)
}

fn percent_decode(s: &str) -> String {
    url::form_urlencoded::parse(format!("x={s}").as_bytes())
        .next()
        .map(|(_, v)| v.into_owned())
        .unwrap_or_else(|| s.to_string())
}

// JSON-LD is authoritative when present; a disagreeing visible date is
// reported, not silently dropped.
fn resolve_date(
    doc: &Html,
    ld: &JsonLd,
    profile: &SiteProfile,
    date_sel: &Option<Selector>,
    url: &str,
    warnings: &mut Vec<String>,
) -> Result<NaiveDate, ExtractError> {
    let date_err = |source| ExtractError::Date { url: url.to_string(), source };

    let ld_date = ld
        .string(&["datePublished", "dateCreated"])
        .map(|raw| normalize_date(&raw, CalendarKind::Gregorian))
        .transpose()
        .map_err(date_err)?;

    // A machine-readable `datetime` attribute is Gregorian whatever the page calendar.
    let visible = date_sel.as_ref().and_then(|sel| doc.select(sel).next()).and_then(|el| {
        match el.value().attr("datetime").filter(|d| !d.trim().is_empty()) {
            Some(dt) => Some(normalize_date(dt, CalendarKind::Gregorian)),
            None => Some(text_of(el)).filter(|t| !t.is_empty()).map(|t| normalize_date(&t, profile.calendar)),
        }
    });

    match (ld_date, visible) {
        (Some(ld), Some(Ok(vis))) => {
            if ld != vis {
                warnings.push(format!("{url}: JSON-LD date {ld} disagrees with visible date {vis}; using JSON-LD"));
            }
            Ok(ld)
        }
        (Some(ld), Some(Err(e))) => {
            warnings.push(format!("{url}: ignoring unparsable visible date ({e}); using JSON-LD"));
            Ok(ld)
        }
        (Some(ld), None) => Ok(ld),
        (None, Some(vis)) => vis.map_err(date_err),
        (None, None) => {
            let meta = meta_content(doc, &["article:published_time", "datePublished", "pubdate", "date"])
                .ok_or_else(|| ExtractError::MissingDate { url: url.to_string() })?;
            normalize_date(&meta, CalendarKind::Gregorian).map_err(date_err)
        }
    }
}
