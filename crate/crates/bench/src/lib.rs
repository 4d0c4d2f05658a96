//! Synthetic inputs for the benchmarks.

use chrono::NaiveDate;
use paramine_core::{ArticleRecord, CorpusFile, Language};

const CKB_WORDS: &[&str] = &["سەرۆکی", "هەرێم", "گەیشتە", "بەغدا", "نرخی", "نەوت", "بازاڕ", "یانەی", "هەولێر", "پەرلەمان"];
const KMR_WORDS: &[&str] = &["Serokê", "Herêmê", "gihîşt", "Bexdayê", "bihayê", "neftê", "bazar", "yaneya", "Hewlêrê", "parlamen"];

/// Deterministic pseudo-headline built from a fixed vocabulary.
pub fn headline(words: &[&str], seed: usize, len: usize) -> String {
    (0..len).map(|i| words[(seed * 7 + i * 3 + seed / 3) % words.len()]).collect::<Vec<_>>().join(" ")
}

pub fn ckb_headline(seed: usize) -> String {
    headline(CKB_WORDS, seed, 4 + seed % 5)
}

pub fn kmr_headline(seed: usize) -> String {
    headline(KMR_WORDS, seed, 4 + seed % 5)
}

/// `n` articles in one language, spread over three tags and two months.
pub fn corpus(language: Language, n: usize) -> CorpusFile {
    let mut c = CorpusFile::new("bench", language);
    for i in 0..n {
        let title = match language {
            Language::Ckb => ckb_headline(i),
            _ => kmr_headline(i),
        };
        c.articles.push(ArticleRecord {
            id: format!("{}-{i:05}", language.code()),
            tags: vec![["siyaset", "abori", "werzish"][i % 3].into()],
            original_link: format!("https://bench.example/{}/{i}", language.code()),
            language,
            title,
            lead: None,
            date: NaiveDate::from_ymd_opt(2020, 1 + (i % 2) as u32, 1 + (i % 28) as u32).unwrap(),
            content: vec![],
            images: vec![],
            site: "bench".into(),
        });
    }
    c
}
