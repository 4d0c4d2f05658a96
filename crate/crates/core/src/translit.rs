//! Sorani Arabic-script to Kurdish Latin-script transliteration, plus the
//! script detection and text normalization used before headline scoring.
//!
//! The rules live in a tab-separated data file (see `data/sorani-latin.tsv`)
//! so they can be amended without touching code. Three letters are
//! ambiguous in the Arabic-based alphabet and are resolved by position:
//!
//! * `و` reads `w` next to a vowel, otherwise `u`;
//! * `ی` reads `y` next to a vowel, otherwise `î`;
//! * `ه` reads `h` at the start of a word, `e` when followed by a consonant
//!   letter, and `h` otherwise.
//!
//! The unwritten short vowel `i` is not reconstructed. The output is meant
//! for similarity matching, not as orthographically correct Latin text.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

const BUILTIN_TABLE: &str = include_str!("../data/sorani-latin.tsv");

/// Letters of the Arabic-based Kurdish alphabet; a table must cover all of them.
pub const KURDISH_ARABIC_LETTERS: &[char] = &[
    'ئ', 'ا', 'ب', 'پ', 'ت', 'ج', 'چ', 'ح', 'خ', 'د', 'ر', 'ڕ', 'ز', 'ژ', 'س', 'ش', 'ع', 'غ', 'ف', 'ڤ', 'ق', 'ک',
    'گ', 'ل', 'ڵ', 'م', 'ن', 'ه', 'ە', 'و', 'ۆ', 'ی', 'ێ',
];

const ZWNJ: char = '\u{200C}';

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Fixed(String),
    /// Consonant and vowel readings of an ambiguous letter.
    Contextual { consonant: String, vowel: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub source: Vec<char>,
    pub target: Target,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("rule `{longer}` comes after its prefix `{prefix}`")]
    Order { longer: String, prefix: String },
    #[error("no rule for letter `{0}`")]
    MissingLetter(char),
    #[error("{0}")]
    Io(String),
}

/// Ordered transliteration rules.
#[derive(Debug, Clone)]
pub struct TransliterationTable {
    version: Option<String>,
    rules: Vec<Rule>,
    by_first: HashMap<char, Vec<usize>>,
}

impl Default for TransliterationTable {
    fn default() -> Self {
        TransliterationTable::builtin()
    }
}

impl TransliterationTable {
    /// The table shipped with the crate.
    pub fn builtin() -> TransliterationTable {
        TransliterationTable::parse(BUILTIN_TABLE).expect("builtin table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TransliterationTable, TableError> {
        let text = std::fs::read_to_string(path).map_err(|e| TableError::Io(e.to_string()))?;
        TransliterationTable::parse(&text)
    }

    pub fn parse(text: &str) -> Result<TransliterationTable, TableError> {
        let mut version = None;
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("version:") {
                    version = Some(v.trim().to_string());
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (source, target) = line
                .split_once('\t')
                .ok_or_else(|| TableError::Syntax { line: line_no, reason: "missing TAB separator".into() })?;
            let target = match target.split_once('|') {
                Some((c, v)) => Target::Contextual { consonant: c.to_string(), vowel: v.to_string() },
                None => Target::Fixed(target.to_string()),
            };
            for variant in source.split('/') {
                if variant.is_empty() {
                    return Err(TableError::Syntax { line: line_no, reason: "empty source".into() });
                }
                rules.push(Rule { source: variant.chars().collect(), target: target.clone() });
            }
        }

        for (i, later) in rules.iter().enumerate() {
            for earlier in &rules[..i] {
                if later.source.len() > earlier.source.len() && later.source.starts_with(&earlier.source) {
                    return Err(TableError::Order {
                        longer: later.source.iter().collect(),
                        prefix: earlier.source.iter().collect(),
                    });
                }
            }
        }

        let mut by_first: HashMap<char, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_first.entry(r.source[0]).or_default().push(i);
        }
        let table = TransliterationTable { version, rules, by_first };
        for &letter in KURDISH_ARABIC_LETTERS {
            if !table.by_first.get(&letter).is_some_and(|idx| idx.iter().any(|&i| table.rules[i].source.len() == 1)) {
                return Err(TableError::MissingLetter(letter));
            }
        }
        Ok(table)
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Every single-character source the table handles.
    pub fn source_letters(&self) -> impl Iterator<Item = char> + '_ {
        self.rules.iter().filter(|r| r.source.len() == 1).map(|r| r.source[0])
    }

    fn rule_at(&self, chars: &[char], pos: usize) -> Option<&Rule> {
        self.by_first
            .get(&chars[pos])?
            .iter()
            .map(|&i| &self.rules[i])
            .find(|r| chars[pos..].starts_with(&r.source))
    }

    fn is_vowel_letter(&self, c: char) -> bool {
        matches!(self.rule_at(&[c], 0), Some(Rule { target: Target::Fixed(t), .. }) if is_latin_vowel_str(t))
    }

    fn is_consonant_letter(&self, c: char) -> bool {
        match self.rule_at(&[c], 0) {
            Some(Rule { target: Target::Contextual { .. }, .. }) => true,
            Some(Rule { target: Target::Fixed(t), .. }) => {
                t.chars().next().is_some_and(|f| f.is_alphabetic()) && !is_latin_vowel_str(t)
            }
            None => false,
        }
    }

    /// Transliterates `text`; characters without a rule pass through.
    pub fn transliterate(&self, text: &str) -> String {
        let chars: Vec<char> = text.chars().collect();
        let mut out = String::with_capacity(text.len());
        let mut pos = 0;
        while pos < chars.len() {
            let c = chars[pos];
            if c == ZWNJ {
                let near_arabic = (pos > 0 && is_arabic_script(chars[pos - 1]))
                    || chars.get(pos + 1).is_some_and(|&n| is_arabic_script(n));
                if !near_arabic {
                    out.push(c);
                }
                pos += 1;
                continue;
            }
            let Some(rule) = self.rule_at(&chars, pos) else {
                out.push(c);
                pos += 1;
                continue;
            };
            let next = chars[pos + rule.source.len()..].iter().copied().find(|&n| n != ZWNJ);
            match &rule.target {
                Target::Fixed(t) => out.push_str(t),
                Target::Contextual { consonant, vowel } => {
                    let word_initial = pos == 0 || !is_word_char(chars[pos - 1]);
                    // `h|e` follows the word-position rule, other pairs the vowel-adjacency rule.
                    let reading = if consonant == "h" {
                        if word_initial {
                            consonant
                        } else if next.is_some_and(|n| self.is_consonant_letter(n)) {
                            vowel
                        } else {
                            consonant
                        }
                    } else {
                        let prev_vowel = !word_initial && out.chars().last().is_some_and(is_latin_vowel);
                        let next_vowel = next.is_some_and(|n| self.is_vowel_letter(n));
                        if prev_vowel || next_vowel {
                            consonant
                        } else {
                            vowel
                        }
                    };
                    out.push_str(reading);
                }
            }
            pos += rule.source.len();
        }
        out
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c) || c == ZWNJ
}

fn is_latin_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'ê' | 'i' | 'î' | 'o' | 'u' | 'û')
}

fn is_latin_vowel_str(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_latin_vowel)
}

/// Arabic, Arabic Supplement, Arabic Extended-A and presentation forms.
pub fn is_arabic_script(c: char) -> bool {
    matches!(c as u32, 0x0600..=0x06FF | 0x0750..=0x077F | 0x08A0..=0x08FF | 0xFB50..=0xFDFF | 0xFE70..=0xFEFF)
}

fn is_latin_script(c: char) -> bool {
    matches!(c as u32, 0x0041..=0x005A | 0x0061..=0x007A | 0x00C0..=0x024F | 0x1E00..=0x1EFF)
        && c != '\u{00D7}'
        && c != '\u{00F7}'
}

/// Transliterates with the built-in table.
pub fn transliterate(text: &str) -> String {
    thread_local! {
        static TABLE: TransliterationTable = TransliterationTable::builtin();
    }
    TABLE.with(|t| t.transliterate(text))
}

/// Lowercase, NFC, punctuation and symbols replaced by spaces, whitespace
/// collapsed and trimmed. Letters, digits and combining marks are kept.
pub fn normalize_for_match(text: &str) -> String {
    let lowered: String = text.nfc().collect::<String>().to_lowercase().nfc().collect();
    let mut out = String::with_capacity(lowered.len());
    let mut pending_space = false;
    for c in lowered.chars() {
        if c.is_alphanumeric() || is_combining_mark(c) {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Script {
    Arabic,
    Latin,
    Mixed,
    None,
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Script::Arabic => "arabic",
            Script::Latin => "latin",
            Script::Mixed => "mixed",
            Script::None => "none",
        })
    }
}

/// Classifies text by which script holds the majority of its letters.
pub fn detect_script(text: &str) -> Script {
    let (mut arabic, mut latin) = (0usize, 0usize);
    for c in text.chars().filter(|c| c.is_alphabetic()) {
        if is_arabic_script(c) {
            arabic += 1;
        } else if is_latin_script(c) {
            latin += 1;
        }
    }
    match (arabic, latin) {
        (0, 0) => Script::None,
        (a, l) if a > l => Script::Arabic,
        (a, l) if l > a => Script::Latin,
        _ => Script::Mixed,
    }
}
