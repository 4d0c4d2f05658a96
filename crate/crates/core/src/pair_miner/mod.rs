//! Document-pair filtering and headline candidate ranking.
//!
//! Two articles in different languages are candidates when they share a
//! tag and a publication month (the tag-date gate) or link the same image
//! (the image gate). Candidates are scored on their headlines and the top
//! `k` per source article are kept for human adjudication.

pub mod similarity;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chrono::Datelike;
use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ArticleRecord, CorpusFile, Language};
pub use similarity::{headline_similarity, prepare_headline, RatcliffObershelp, Similarity, TokenJaccard};

pub const DEFAULT_K: usize = 5;

/// Which gate admitted a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchedVia {
    TagDate,
    Image,
    Both,
}

impl MatchedVia {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchedVia::TagDate => "tag-date",
            MatchedVia::Image => "image",
            MatchedVia::Both => "both",
        }
    }

    pub fn via_image(self) -> bool {
        matches!(self, MatchedVia::Image | MatchedVia::Both)
    }
}

impl fmt::Display for MatchedVia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MatchedVia {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tag-date" => Ok(MatchedVia::TagDate),
            "image" => Ok(MatchedVia::Image),
            "both" => Ok(MatchedVia::Both),
            other => Err(format!("unknown matched_via `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub target_id: String,
    pub score: f64,
    pub matched_via: MatchedVia,
}

/// One source headline with its ranked candidates in the other language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub source_id: String,
    pub source_language: Language,
    pub target_language: Language,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MineError {
    #[error("corpora come from different sites (`{0}` and `{1}`)")]
    SiteMismatch(String, String),
    #[error("both corpora are in `{0}`")]
    SameLanguage(Language),
    #[error("pool article `{id}` is in `{found}`, expected `{expected}`")]
    MixedPool { id: String, expected: Language, found: Language },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinerConfig {
    pub k: usize,
    /// Drop candidates scoring below this value.
    pub min_score: Option<f64>,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig { k: DEFAULT_K, min_score: None }
    }
}

/// Shared tag and same publication year and month.
pub fn alignable(a: &ArticleRecord, b: &ArticleRecord) -> bool {
    same_month(a, b) && a.tags.iter().any(|t| b.tags.contains(t))
}

fn same_month(a: &ArticleRecord, b: &ArticleRecord) -> bool {
    a.date.year() == b.date.year() && a.date.month() == b.date.month()
}

/// The articles link at least one identical (normalized) image URL.
pub fn image_match(a: &ArticleRecord, b: &ArticleRecord) -> bool {
    let ia = a.normalized_images();
    !ia.is_empty() && b.normalized_images().iter().any(|i| ia.contains(i))
}

pub fn gate(a: &ArticleRecord, b: &ArticleRecord) -> Option<MatchedVia> {
    match (alignable(a, b), image_match(a, b)) {
        (true, true) => Some(MatchedVia::Both),
        (true, false) => Some(MatchedVia::TagDate),
        (false, true) => Some(MatchedVia::Image),
        (false, false) => None,
    }
}

/// Ranks `pool` against `source` with the default scorer.
pub fn rank_candidates(source: &ArticleRecord, pool: &[ArticleRecord], config: MinerConfig) -> Result<CandidateSet, MineError> {
    Ranker::new(&RatcliffObershelp, config).rank(source, pool)
}

/// Scores gated pool articles against a source article.
pub struct Ranker<'s> {
    scorer: &'s dyn Similarity,
    config: MinerConfig,
}

impl<'s> Ranker<'s> {
    pub fn new(scorer: &'s dyn Similarity, config: MinerConfig) -> Self {
        Ranker { scorer, config }
    }

    pub fn rank(&self, source: &ArticleRecord, pool: &[ArticleRecord]) -> Result<CandidateSet, MineError> {
        let target_language = pool.first().map(|a| a.language).unwrap_or(source.language);
        for a in pool {
            if a.language != target_language {
                return Err(MineError::MixedPool { id: a.id.clone(), expected: target_language, found: a.language });
            }
        }
        if !pool.is_empty() && target_language == source.language {
            return Err(MineError::SameLanguage(source.language));
        }
        let prepared_source = prepare_headline(&source.title);
        let gated: Vec<(&ArticleRecord, MatchedVia)> =
            pool.iter().filter_map(|t| gate(source, t).map(|via| (t, via))).collect();
        Ok(self.finish(source, target_language, &prepared_source, gated.into_iter().map(|(t, via)| (t, prepare_headline(&t.title), via))))
    }

    fn finish<'a>(
        &self,
        source: &ArticleRecord,
        target_language: Language,
        prepared_source: &str,
        gated: impl Iterator<Item = (&'a ArticleRecord, String, MatchedVia)>,
    ) -> CandidateSet {
        let mut scored: Vec<(&ArticleRecord, f64, MatchedVia)> = gated
            .map(|(t, prepared, via)| (t, self.scorer.similarity(prepared_source, &prepared), via))
            .filter(|(_, score, _)| self.config.min_score.map_or(true, |m| *score >= m))
            .collect();
        scored.sort_by(|(ta, sa, _), (tb, sb, _)| {
            sb.total_cmp(sa).then_with(|| ta.date.cmp(&tb.date)).then_with(|| ta.id.cmp(&tb.id))
        });
        scored.truncate(self.config.k);
        if scored.is_empty() {
            info!("{}: no candidate passed the gates", source.id);
        }
        CandidateSet {
            source_id: source.id.clone(),
            source_language: source.language,
            target_language,
            candidates: scored
                .into_iter()
                .map(|(t, score, matched_via)| Candidate { target_id: t.id.clone(), score, matched_via })
                .collect(),
        }
    }
}

/// Candidate sets for every article of `corpus_a` that has at least one
/// gated candidate in `corpus_b`, ordered by source id.
pub fn mine(corpus_a: &CorpusFile, corpus_b: &CorpusFile, config: MinerConfig) -> Result<Vec<CandidateSet>, MineError> {
    mine_with(corpus_a, corpus_b, config, &RatcliffObershelp)
}

pub fn mine_with(
    corpus_a: &CorpusFile,
    corpus_b: &CorpusFile,
    config: MinerConfig,
    scorer: &dyn Similarity,
) -> Result<Vec<CandidateSet>, MineError> {
    if corpus_a.site != corpus_b.site {
        return Err(MineError::SiteMismatch(corpus_a.site.clone(), corpus_b.site.clone()));
    }
    if corpus_a.language == corpus_b.language {
        return Err(MineError::SameLanguage(corpus_a.language));
    }
    if corpus_b.articles.is_empty() {
        return Ok(Vec::new());
    }

    let targets = &corpus_b.articles;
    let prepared: Vec<String> = targets.par_iter().map(|t| prepare_headline(&t.title)).collect();
    let mut by_month: HashMap<(i32, u32), Vec<usize>> = HashMap::new();
    let mut by_image: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, t) in targets.iter().enumerate() {
        by_month.entry((t.date.year(), t.date.month())).or_default().push(i);
        for img in t.normalized_images() {
            by_image.entry(img).or_default().push(i);
        }
    }

    let mut sources: Vec<&ArticleRecord> = corpus_a.articles.iter().collect();
    sources.sort_by(|a, b| a.id.cmp(&b.id));
    let ranker = Ranker::new(scorer, config);
    let sets: Vec<CandidateSet> = sources
        .par_iter()
        .filter_map(|source| {
            let mut pool: BTreeSet<usize> = BTreeSet::new();
            if let Some(same) = by_month.get(&(source.date.year(), source.date.month())) {
                pool.extend(same.iter().copied());
            }
            for img in source.normalized_images() {
                if let Some(hits) = by_image.get(&img) {
                    pool.extend(hits.iter().copied());
                }
            }
            let gated = pool.into_iter().filter_map(|i| {
                gate(source, &targets[i]).map(|via| (&targets[i], prepared[i].clone(), via))
            });
            let set = ranker.finish(source, corpus_b.language, &prepare_headline(&source.title), gated);
            (!set.candidates.is_empty()).then_some(set)
        })
        .collect();
    Ok(sets)
}

/// Index of articles by id across several corpora.
#[derive(Debug, Default, Clone)]
pub struct ArticleIndex<'a> {
    by_id: BTreeMap<&'a str, &'a ArticleRecord>,
}

impl<'a> ArticleIndex<'a> {
    pub fn new(corpora: impl IntoIterator<Item = &'a CorpusFile>) -> Self {
        let mut by_id = BTreeMap::new();
        for c in corpora {
            for a in &c.articles {
                by_id.insert(a.id.as_str(), a);
            }
        }
        ArticleIndex { by_id }
    }

    pub fn get(&self, id: &str) -> Option<&'a ArticleRecord> {
        self.by_id.get(id).copied()
    }
}
