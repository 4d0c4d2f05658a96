//! Headline similarity scorers.

use std::collections::HashSet;

use crate::translit::{normalize_for_match, transliterate};

/// Scores two prepared (transliterated and normalized) headlines in `[0, 1]`.
pub trait Similarity: Send + Sync {
    fn similarity(&self, a: &str, b: &str) -> f64;
}

/// Gestalt pattern matching: `2M / (|a| + |b|)` where `M` counts the
/// characters matched by taking the longest common substring and recursing
/// on the unmatched pieces to its left and right.
///
/// When several common substrings share the maximal length, the one
/// starting earliest in `a` wins, then the one starting earliest in `b`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RatcliffObershelp;

impl Similarity for RatcliffObershelp {
    fn similarity(&self, a: &str, b: &str) -> f64 {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        gestalt_ratio(&a, &b)
    }
}

/// Ratio over arbitrary comparable sequences.
pub fn gestalt_ratio<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * matched_count(a, b) as f64 / total as f64
}

/// Number of elements matched by the recursive longest-common-substring
/// decomposition.
pub fn matched_count<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut matched = 0;
    let mut stack = vec![(0, a.len(), 0, b.len())];
    let mut row = vec![0usize; b.len() + 1];
    let mut prev = vec![0usize; b.len() + 1];
    while let Some((a_lo, a_hi, b_lo, b_hi)) = stack.pop() {
        if a_lo >= a_hi || b_lo >= b_hi {
            continue;
        }
        let (i, j, len) = longest_common_substring(&a[a_lo..a_hi], &b[b_lo..b_hi], &mut row, &mut prev);
        if len == 0 {
            continue;
        }
        matched += len;
        stack.push((a_lo, a_lo + i, b_lo, b_lo + j));
        stack.push((a_lo + i + len, a_hi, b_lo + j + len, b_hi));
    }
    matched
}

/// Start in `a`, start in `b` and length of the longest common substring.
/// Scanning end positions in order and only replacing on a strictly longer
/// match yields the earliest start in `a`, then in `b`.
fn longest_common_substring<T: PartialEq>(a: &[T], b: &[T], row: &mut [usize], prev: &mut [usize]) -> (usize, usize, usize) {
    let (mut best_i, mut best_j, mut best_len) = (0, 0, 0);
    prev[..=b.len()].iter_mut().for_each(|x| *x = 0);
    for (i, x) in a.iter().enumerate() {
        row[0] = 0;
        for (j, y) in b.iter().enumerate() {
            row[j + 1] = if x == y { prev[j] + 1 } else { 0 };
            let len = row[j + 1];
            if len > best_len {
                best_len = len;
                best_i = i + 1 - len;
                best_j = j + 1 - len;
            }
        }
        prev[..=b.len()].copy_from_slice(&row[..=b.len()]);
    }
    (best_i, best_j, best_len)
}

/// Jaccard overlap of whitespace tokens; an alternative scorer for experiments.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenJaccard;

impl Similarity for TokenJaccard {
    fn similarity(&self, a: &str, b: &str) -> f64 {
        let sa: HashSet<&str> = a.split_whitespace().collect();
        let sb: HashSet<&str> = b.split_whitespace().collect();
        if sa.is_empty() && sb.is_empty() {
            return 1.0;
        }
        sa.intersection(&sb).count() as f64 / sa.union(&sb).count() as f64
    }
}

/// Transliterates any Arabic-script text and normalizes for matching.
pub fn prepare_headline(h: &str) -> String {
    normalize_for_match(&transliterate(h))
}

/// Similarity of two raw headlines in possibly different scripts.
pub fn headline_similarity(h1: &str, h2: &str) -> f64 {
    RatcliffObershelp.similarity(&prepare_headline(h1), &prepare_headline(h2))
}
