//! Loading an externally distributed parallel corpus.
//!
//! Two layouts are recognized under a root directory, per language pair
//! `a-b`:
//!
//! * `a-b.tsv` in the pair interchange format;
//! * line-aligned plain-text files `<stem>.<a>` and `<stem>.<b>` anywhere
//!   below the root whose path mentions both language codes. English may
//!   also be spelled `en`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::alignment::{read_pairs_tsv, TranslationPair};
use crate::model::Language;

fn spellings(lang: Language) -> &'static [&'static str] {
    match lang {
        Language::Ckb => &["ckb"],
        Language::Kmr => &["kmr"],
        Language::Eng => &["eng", "en"],
    }
}

fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            walk(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}

fn mentions(path: &Path, lang: Language) -> bool {
    let s = path.to_string_lossy().to_lowercase();
    spellings(lang).iter().any(|code| {
        s.match_indices(code).any(|(i, _)| {
            let before = s[..i].chars().next_back();
            let after = s[i + code.len()..].chars().next();
            !before.is_some_and(|c| c.is_ascii_alphabetic()) && !after.is_some_and(|c| c.is_ascii_alphabetic())
        })
    })
}

/// Pairs for `a-b`, or `None` when neither layout is present.
pub fn load_language_pair(root: &Path, a: Language, b: Language) -> io::Result<Option<Vec<TranslationPair>>> {
    let tsv = root.join(format!("{a}-{b}.tsv"));
    if tsv.is_file() {
        let pairs = read_pairs_tsv(&fs::read_to_string(&tsv)?).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        return Ok(Some(pairs));
    }
    let mut files = Vec::new();
    walk(root, &mut files)?;
    files.sort();
    let mut pairs = Vec::new();
    let mut found = false;
    for src_path in &files {
        let Some(ext) = src_path.extension().and_then(|e| e.to_str()) else { continue };
        if !spellings(a).contains(&ext) || !mentions(src_path, a) || !mentions(src_path, b) {
            continue;
        }
        let Some(tgt_path) = spellings(b).iter().map(|e| src_path.with_extension(e)).find(|p| p.is_file()) else {
            continue;
        };
        found = true;
        let src = fs::read_to_string(src_path)?;
        let tgt = fs::read_to_string(&tgt_path)?;
        let (src_lines, tgt_lines): (Vec<&str>, Vec<&str>) = (src.lines().collect(), tgt.lines().collect());
        if src_lines.len() != tgt_lines.len() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("{} and {} differ in line count", src_path.display(), tgt_path.display()),
            ));
        }
        let stem = src_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        for (i, (s, t)) in src_lines.iter().zip(&tgt_lines).enumerate() {
            if s.trim().is_empty() && t.trim().is_empty() {
                continue;
            }
            pairs.push(TranslationPair {
                src_text: s.trim().to_string(),
                tgt_text: t.trim().to_string(),
                src_language: a,
                tgt_language: b,
                src_article: format!("{stem}:{}", i + 1),
                tgt_article: format!("{stem}:{}", i + 1),
                edited: false,
                merged_from: (1, 1),
            });
        }
    }
    Ok(found.then_some(pairs))
}
