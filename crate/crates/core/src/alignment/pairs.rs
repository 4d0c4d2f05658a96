//! Translation-pair TSV interchange.

use thiserror::Error;

use super::{TranslationPair, Violation};

pub const PAIRS_HEADER: [&str; 8] =
    ["src_text", "tgt_text", "src_language", "tgt_language", "src_article", "tgt_article", "edited", "merged_from"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairsError {
    #[error("pair {index}: field `{field}` contains a tab or newline")]
    Separator { index: usize, field: &'static str },
    #[error("header does not match the pair columns")]
    BadHeader,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
}

fn check(index: usize, field: &'static str, value: &str) -> Result<(), PairsError> {
    if value.contains(['\t', '\n', '\r']) {
        Err(PairsError::Separator { index, field })
    } else {
        Ok(())
    }
}

fn row(index: usize, p: &TranslationPair) -> Result<String, PairsError> {
    check(index, "src_text", &p.src_text)?;
    check(index, "tgt_text", &p.tgt_text)?;
    check(index, "src_article", &p.src_article)?;
    check(index, "tgt_article", &p.tgt_article)?;
    Ok(format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{},{}",
        p.src_text, p.tgt_text, p.src_language, p.tgt_language, p.src_article, p.tgt_article, p.edited, p.merged_from.0, p.merged_from.1
    ))
}

pub fn write_pairs_tsv(pairs: &[TranslationPair]) -> Result<String, PairsError> {
    let mut out = PAIRS_HEADER.join("\t");
    out.push('\n');
    for (i, p) in pairs.iter().enumerate() {
        out.push_str(&row(i, p)?);
        out.push('\n');
    }
    Ok(out)
}

/// Pair rows plus a `violations` column, violations joined by `; `.
pub fn write_quarantine_tsv(quarantined: &[(TranslationPair, Vec<Violation>)]) -> Result<String, PairsError> {
    let mut out = PAIRS_HEADER.join("\t");
    out.push_str("\tviolations\n");
    for (i, (p, v)) in quarantined.iter().enumerate() {
        out.push_str(&row(i, p)?);
        out.push('\t');
        out.push_str(&v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "));
        out.push('\n');
    }
    Ok(out)
}

pub fn read_pairs_tsv(text: &str) -> Result<Vec<TranslationPair>, PairsError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end_matches('\r').split('\t').collect::<Vec<_>>() == PAIRS_HEADER => {}
        _ => return Err(PairsError::BadHeader),
    }
    let mut pairs = Vec::new();
    for (i, raw) in lines.enumerate() {
        let line = i + 2;
        let raw = raw.trim_end_matches('\r');
        if raw.is_empty() {
            continue;
        }
        let err = |reason: String| PairsError::Row { line, reason };
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() != PAIRS_HEADER.len() {
            return Err(err(format!("expected {} columns, found {}", PAIRS_HEADER.len(), cols.len())));
        }
        let edited = match cols[6] {
            "true" => true,
            "false" => false,
            other => return Err(err(format!("bad edited flag `{other}`"))),
        };
        let merged_from = cols[7]
            .split_once(',')
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .ok_or_else(|| err(format!("bad merged_from `{}`", cols[7])))?;
        pairs.push(TranslationPair {
            src_text: cols[0].to_string(),
            tgt_text: cols[1].to_string(),
            src_language: cols[2].parse().map_err(|e| err(format!("{e}")))?,
            tgt_language: cols[3].parse().map_err(|e| err(format!("{e}")))?,
            src_article: cols[4].to_string(),
            tgt_article: cols[5].to_string(),
            edited,
            merged_from,
        });
    }
    Ok(pairs)
}
