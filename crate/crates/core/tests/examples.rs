//! Worked examples with hand-computed or brute-force expectations.

use chrono::{Duration, NaiveDate};
use paramine_core::alignment::documents::build_alignment_documents;
use paramine_core::alignment::{generate_sheet, import_alignment, import_sheet, segment_document, AlignmentIndex, IndexEntry};
use paramine_core::corpus_tools::{export, ExportFormat};
use paramine_core::extractor::{normalize_date, CalendarKind};
use paramine_core::{
    dedup, headline_similarity, rank_candidates, split, ArticleIndex, ArticleRecord, Candidate, CandidateSet,
    CorpusFile, HeadlineAnnotation, Language, Link, MatchedVia, MinerConfig, TranslationPair, ValidationConfig, Verdict,
};

fn day(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

fn article(id: &str, language: Language, title: &str, date: NaiveDate, content: &[&str]) -> ArticleRecord {
    ArticleRecord {
        id: id.into(),
        tags: vec!["news".into()],
        original_link: format!("https://news.example/{id}"),
        language,
        title: title.into(),
        lead: None,
        date,
        content: content.iter().map(|s| s.to_string()).collect(),
        images: vec![],
        site: "ex".into(),
    }
}

fn pair(i: usize) -> TranslationPair {
    TranslationPair {
        src_text: format!("src {i}"),
        tgt_text: format!("tgt {i}"),
        src_language: Language::Ckb,
        tgt_language: Language::Kmr,
        src_article: "a".into(),
        tgt_article: "b".into(),
        edited: false,
        merged_from: (1, 1),
    }
}

#[test]
fn solar_hijri_day_count() {
    // 1399-01-01 is 2020-03-20; month 1 has 31 days, so 1399-02-06 is 36 days on.
    let expected = day(2020, 3, 20) + Duration::days(31 + 5);
    assert_eq!(expected, day(2020, 4, 25));
    assert_eq!(normalize_date("1399-02-06", CalendarKind::SolarHijri).unwrap(), expected);
    assert_eq!(normalize_date("2720-02-06", CalendarKind::Kurdish).unwrap(), expected);
}

#[test]
fn top_five_of_ten_matches_brute_sort() {
    let src = article("s", Language::Ckb, "سەرۆکی هەرێم گەیشتە بەغدا", day(2020, 4, 1), &[]);
    let titles = [
        "Serokê Herêmê gihîşt Bexdayê",
        "Serok gihîşt",
        "Bexda",
        "Herêm û Bexda",
        "Parlamento civiya",
        "Serokê Herêmê",
        "Lîstik qezenc kir",
        "Serokê Herêmê îro gihîşt Bexdayê",
        "Budce",
        "Civîna Bexdayê",
    ];
    let pool: Vec<_> =
        titles.iter().enumerate().map(|(i, t)| article(&format!("t{i}"), Language::Kmr, t, day(2020, 4, 2), &[])).collect();
    let mut oracle: Vec<(f64, String)> = pool.iter().map(|t| (headline_similarity(&src.title, &t.title), t.id.clone())).collect();
    oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let set = rank_candidates(&src, &pool, MinerConfig::default()).unwrap();
    let got: Vec<_> = set.candidates.iter().map(|c| (c.score, c.target_id.clone())).collect();
    assert_eq!(got, oracle[..5]);
}

#[test]
fn eleven_candidates_eleven_rows() {
    let src: Vec<_> = (0..3).map(|i| article(&format!("s{i}"), Language::Ckb, "سەرۆک", day(2020, 1, 1), &[])).collect();
    let tgt: Vec<_> = (0..5).map(|i| article(&format!("t{i}"), Language::Kmr, "Serok", day(2020, 1, 1), &[])).collect();
    let sizes = [5, 4, 2];
    let sets: Vec<_> = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| CandidateSet {
            source_id: format!("s{i}"),
            source_language: Language::Ckb,
            target_language: Language::Kmr,
            candidates: (0..n)
                .map(|j| Candidate { target_id: format!("t{j}"), score: 1.0 / (j as f64 + 3.0), matched_via: MatchedVia::TagDate })
                .collect(),
        })
        .collect();
    let corpora = [
        CorpusFile { site: "ex".into(), language: Language::Ckb, articles: src },
        CorpusFile { site: "ex".into(), language: Language::Kmr, articles: tgt },
    ];
    let sheet = generate_sheet(&sets, &ArticleIndex::new(&corpora)).unwrap();
    let rows: Vec<&str> = sheet.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0].split('\t').nth(5), Some("0.3333"));
    assert!(rows.iter().all(|r| r.split('\t').nth(5).unwrap().split('.').nth(1).unwrap().len() == 4));
}

#[test]
fn forty_of_hundred_verdicts() {
    let mut sheet = vec![paramine_core::alignment::sheet::SHEET_HEADER.join("\t")];
    for i in 0..100 {
        let verdict = if i < 40 { "possible" } else { "" };
        sheet.push(format!("s{i}\t\t\tt{i}\t\t0.1000\timage\t{verdict}"));
    }
    assert_eq!(import_sheet(&sheet.join("\n"), "a").unwrap().len(), 40);
}

#[test]
fn four_pair_documents_align_by_index() {
    let mut a = CorpusFile::new("ex", Language::Ckb);
    let mut b = CorpusFile::new("ex", Language::Kmr);
    let mut anns = Vec::new();
    for i in 0..4 {
        a.articles.push(article(&format!("s{i}"), Language::Ckb, "x", day(2020, 1, 1), &[&format!("یەک {i}. دوو {i}.")]));
        b.articles.push(article(&format!("t{i}"), Language::Kmr, "y", day(2020, 1, 1), &[&format!("Yek {i}."), "Du."]));
        anns.push(HeadlineAnnotation {
            source_id: format!("s{i}"),
            target_id: format!("t{i}"),
            verdict: if i == 2 { Verdict::Possible } else { Verdict::Equivalent },
            annotator: "a".into(),
            timestamp: None,
            matched_via: None,
        });
    }
    let docs = build_alignment_documents(&anns, &ArticleIndex::new([&a, &b])).unwrap();
    assert_eq!(docs.len(), 1);
    let d = &docs[0];
    let (src, tgt) = (segment_document(&d.src_text), segment_document(&d.tgt_text));
    assert_eq!((src.len(), tgt.len(), d.index.articles.len()), (4, 4, 4));
    for (i, e) in d.index.articles.iter().enumerate() {
        assert_eq!((e.src_id.as_str(), e.tgt_id.as_str()), (format!("s{i}").as_str(), format!("t{i}").as_str()));
        assert!(d.src_text[e.src_offset..].starts_with(&format!("یەک {i}.")));
        assert!(d.tgt_text[e.tgt_offset..].starts_with(&format!("Yek {i}.")));
    }
}

#[test]
fn over_long_segment_quarantined() {
    let long = vec!["w"; 81].join(" ");
    let src = format!("one two.\n{long}.\nthree four.\n");
    let tgt = "yek du.\nsê.\nçar pênc.\n";
    let index = AlignmentIndex {
        src_language: Language::Ckb,
        tgt_language: Language::Kmr,
        articles: vec![IndexEntry { src_id: "s".into(), tgt_id: "t".into(), src_offset: 0, tgt_offset: 0 }],
    };
    let links = [Link::new([0], [0]), Link::new([1], [1]), Link::new([2], [2])];
    let r = import_alignment(&src, tgt, &index, &links, &ValidationConfig::default()).unwrap();
    assert_eq!(r.pairs.len(), 2);
    assert_eq!(r.quarantined.len(), 1);
    assert_eq!(r.quarantined[0].1[0].guideline, 1);
}

#[test]
fn planted_duplicates_removed() {
    let mut pairs: Vec<_> = (0..47).map(pair).collect();
    for i in [3, 10, 40] {
        pairs.push(pair(i));
    }
    let (kept, removed) = dedup(pairs);
    assert_eq!((kept.len(), removed), (47, 3));
}

#[test]
fn hundred_pairs_export_90_10() {
    let pairs: Vec<_> = (0..100).map(pair).collect();
    let m = split(100, 0.9, 42).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export(&pairs, &m, dir.path(), ExportFormat::Bitext).unwrap();
    let counts: Vec<usize> = ["train.src", "train.tgt", "test.src", "test.tgt"]
        .iter()
        .map(|f| {
            let bytes = std::fs::read(dir.path().join(f)).unwrap();
            let text = String::from_utf8(bytes).unwrap();
            assert!(!text.contains('\r') && text.ends_with('\n'));
            text.lines().count()
        })
        .collect();
    assert_eq!(counts, [90, 90, 10, 10]);
    // Line i of train.src and train.tgt come from the same pair.
    let s = std::fs::read_to_string(dir.path().join("train.src")).unwrap();
    let t = std::fs::read_to_string(dir.path().join("train.tgt")).unwrap();
    for (a, b) in s.lines().zip(t.lines()) {
        assert_eq!(a.trim_start_matches("src "), b.trim_start_matches("tgt "));
    }
}
