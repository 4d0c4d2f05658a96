//! Building parallel corpora for Kurdish dialects and English from
//! multilingual news sites.
//!
//! The pipeline runs from crawled pages to validated translation pairs:
//! [`extractor`] turns HTML into [`ArticleRecord`]s, [`pair_miner`] proposes
//! cross-language headline candidates, [`alignment`] handles the human
//! adjudication and sentence-alignment files, and [`corpus_tools`] packages
//! the result.

pub mod alignment;
pub mod corpus_tools;
pub mod extractor;
pub mod model;
pub mod pair_miner;
pub mod translit;

pub use alignment::{
    validate_pair, HeadlineAnnotation, Link, TranslationPair, ValidationConfig, Verdict, Violation,
};
pub use corpus_tools::{compute_stats, dedup, export_bitext, split, CorpusStats, SplitManifest};
pub use model::{
    article_id, load_articles, normalize_url, parse_articles, save_articles, ArticleRecord, CorpusError, CorpusFile,
    Language, RecordIssue,
};
pub use pair_miner::{
    alignable, headline_similarity, image_match, mine, rank_candidates, ArticleIndex, Candidate, CandidateSet,
    MatchedVia, MinerConfig,
};
pub use translit::{transliterate, TransliterationTable};
