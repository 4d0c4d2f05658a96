//! Service state and its append-only event log.
//!
//! Every accepted mutation is appended to `events.jsonl` and synced before
//! it is applied. On start the state is rebuilt from `snapshot.json` (if
//! present) plus the events logged after it. Exporting writes a fresh
//! snapshot and truncates the log.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use log::{info, warn};
use paramine_core::alignment::documents::{segment_document, AlignmentIndex, IndexEntry};
use paramine_core::alignment::{validate_pair, write_pairs_tsv, HeadlineAnnotation, Link, TranslationPair, ValidationConfig, Verdict};
use paramine_core::model::{load_articles, write_atomic};
use paramine_core::{ArticleRecord, CandidateSet, Language};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EVENTS_FILE: &str = "events.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {reason}")]
    Data { path: PathBuf, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_owned(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Src,
    Tgt,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Src => "src",
            Side::Tgt => "tgt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub text: String,
    /// Position of the article in the session index.
    pub article: usize,
    /// Number of original segments merged into this one.
    pub parts: usize,
    pub edited: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum SegmentOp {
    /// Joins segment `index` with the one after it.
    Merge { side: Side, index: usize },
    /// Splits segment `index` before character `at`.
    Split { side: Side, index: usize, at: usize },
    /// Replaces the text of segment `index`.
    Edit { side: Side, index: usize, text: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub src_language: Language,
    pub tgt_language: Language,
    pub articles: Vec<IndexEntry>,
    pub src: Vec<Segment>,
    pub tgt: Vec<Segment>,
    pub links: Vec<Link>,
    pub version: u64,
}

/// A rejected link list or segment operation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("link {link}: {side} segment {index} out of range ({len} segments)")]
    LinkIndex { link: usize, side: &'static str, index: usize, len: usize },
    #[error("link {link}: empty {side} side")]
    EmptyLink { link: usize, side: &'static str },
    #[error("{side} segment {index} out of range ({len} segments)")]
    SegmentIndex { side: &'static str, index: usize, len: usize },
    #[error("{0}")]
    BadOp(String),
}

impl Session {
    fn from_documents(id: &str, src_doc: &str, tgt_doc: &str, index: AlignmentIndex) -> Result<Session, String> {
        let segments = |doc: &str, side: &str| -> Result<Vec<Segment>, String> {
            let articles = segment_document(doc);
            if articles.len() != index.articles.len() {
                return Err(format!("{side} document has {} articles, index lists {}", articles.len(), index.articles.len()));
            }
            Ok(articles
                .into_iter()
                .enumerate()
                .flat_map(|(article, segs)| segs.into_iter().map(move |text| Segment { text, article, parts: 1, edited: false }))
                .collect())
        };
        Ok(Session {
            id: id.to_string(),
            src_language: index.src_language,
            tgt_language: index.tgt_language,
            src: segments(src_doc, "source")?,
            tgt: segments(tgt_doc, "target")?,
            articles: index.articles,
            links: Vec::new(),
            version: 0,
        })
    }

    fn side(&self, side: Side) -> &Vec<Segment> {
        match side {
            Side::Src => &self.src,
            Side::Tgt => &self.tgt,
        }
    }

    pub fn check_links(&self, links: &[Link]) -> Result<(), SessionError> {
        for (i, l) in links.iter().enumerate() {
            for (side, indices, len) in [("source", &l.src, self.src.len()), ("target", &l.tgt, self.tgt.len())] {
                if indices.is_empty() {
                    return Err(SessionError::EmptyLink { link: i + 1, side });
                }
                if let Some(&index) = indices.iter().find(|&&x| x >= len) {
                    return Err(SessionError::LinkIndex { link: i + 1, side, index, len });
                }
            }
            for edit in [&l.src_edit, &l.tgt_edit].into_iter().flatten() {
                if edit.trim().is_empty() || edit.contains(['\t', '\n', '\r']) {
                    return Err(SessionError::BadOp(format!("link {}: edited text must be one non-empty line without tabs", i + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn check_op(&self, op: &SegmentOp) -> Result<(), SessionError> {
        let (side, index) = match op {
            SegmentOp::Merge { side, index } | SegmentOp::Split { side, index, .. } | SegmentOp::Edit { side, index, .. } => {
                (*side, *index)
            }
        };
        let segs = self.side(side);
        let out_of_range = |index| SessionError::SegmentIndex { side: side.name(), index, len: segs.len() };
        let seg = segs.get(index).ok_or(out_of_range(index))?;
        match op {
            SegmentOp::Merge { .. } => {
                let next = segs.get(index + 1).ok_or(out_of_range(index + 1))?;
                if next.article != seg.article {
                    return Err(SessionError::BadOp("cannot merge segments of different articles".into()));
                }
            }
            SegmentOp::Split { at, .. } => {
                let (a, b) = split_chars(&seg.text, *at);
                if a.trim().is_empty() || b.trim().is_empty() {
                    return Err(SessionError::BadOp(format!("split at {at} leaves an empty segment")));
                }
            }
            SegmentOp::Edit { text, .. } => {
                if text.trim().is_empty() || text.contains(['\t', '\n', '\r']) {
                    return Err(SessionError::BadOp("edited text must be one non-empty line without tabs".into()));
                }
            }
        }
        Ok(())
    }

    fn apply_op(&mut self, op: &SegmentOp) {
        match op {
            SegmentOp::Merge { side, index } => {
                let i = *index;
                let segs = self.side_mut(*side);
                let next = segs.remove(i + 1);
                let seg = &mut segs[i];
                seg.text = format!("{} {}", seg.text, next.text);
                seg.parts += next.parts;
                seg.edited |= next.edited;
                for link in &mut self.links {
                    let indices = side_indices(link, *side);
                    let mut seen = HashSet::new();
                    *indices = indices.iter().map(|&x| if x > i { x - 1 } else { x }).filter(|x| seen.insert(*x)).collect();
                }
            }
            SegmentOp::Split { side, index, at } => {
                let i = *index;
                let segs = self.side_mut(*side);
                let (a, b) = split_chars(&segs[i].text, *at);
                let (a, b) = (a.trim().to_string(), b.trim().to_string());
                let mut second = segs[i].clone();
                segs[i].text = a;
                second.text = b;
                segs.insert(i + 1, second);
                for link in &mut self.links {
                    let indices = side_indices(link, *side);
                    let mut out = Vec::with_capacity(indices.len() + 1);
                    for &x in indices.iter() {
                        match x.cmp(&i) {
                            std::cmp::Ordering::Less => out.push(x),
                            std::cmp::Ordering::Equal => out.extend([i, i + 1]),
                            std::cmp::Ordering::Greater => out.push(x + 1),
                        }
                    }
                    *indices = out;
                }
            }
            SegmentOp::Edit { side, index, text } => {
                let seg = &mut self.side_mut(*side)[*index];
                if seg.text != *text {
                    seg.text = text.clone();
                    seg.edited = true;
                }
            }
        }
    }

    fn side_mut(&mut self, side: Side) -> &mut Vec<Segment> {
        match side {
            Side::Src => &mut self.src,
            Side::Tgt => &mut self.tgt,
        }
    }

    /// Pairs for the current links, split into accepted and rejected.
    pub fn pairs(&self, config: &ValidationConfig) -> (Vec<TranslationPair>, usize) {
        let mut pairs = Vec::new();
        let mut rejected = 0;
        for link in &self.links {
            let join = |segs: &[Segment], indices: &[usize]| {
                let picked: Vec<&Segment> = indices.iter().map(|&i| &segs[i]).collect();
                let text = picked.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ");
                let parts = picked.iter().map(|s| s.parts).sum::<usize>();
                let edited = picked.iter().any(|s| s.edited);
                (text, parts, edited, picked[0].article)
            };
            let (src_joined, src_parts, src_edited, src_article) = join(&self.src, &link.src);
            let (tgt_joined, tgt_parts, tgt_edited, tgt_article) = join(&self.tgt, &link.tgt);
            let src_text = link.src_edit.clone().unwrap_or_else(|| src_joined.clone());
            let tgt_text = link.tgt_edit.clone().unwrap_or_else(|| tgt_joined.clone());
            let pair = TranslationPair {
                edited: src_edited || tgt_edited || src_text != src_joined || tgt_text != tgt_joined,
                src_text,
                tgt_text,
                src_language: self.src_language,
                tgt_language: self.tgt_language,
                src_article: self.articles[src_article].src_id.clone(),
                tgt_article: self.articles[tgt_article].tgt_id.clone(),
                merged_from: (src_parts, tgt_parts),
            };
            match validate_pair(&pair, config) {
                Ok(()) => pairs.push(pair),
                Err(_) => rejected += 1,
            }
        }
        (pairs, rejected)
    }
}

fn side_indices(link: &mut Link, side: Side) -> &mut Vec<usize> {
    match side {
        Side::Src => &mut link.src,
        Side::Tgt => &mut link.tgt,
    }
}

fn split_chars(text: &str, at: usize) -> (&str, &str) {
    let byte = text.char_indices().nth(at).map_or(text.len(), |(b, _)| b);
    text.split_at(byte)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Event {
    Verdict { annotation: HeadlineAnnotation },
    Links { session: String, links: Vec<Link> },
    Segments { session: String, op: SegmentOp },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LoggedEvent {
    seq: u64,
    #[serde(flatten)]
    event: Event,
}

#[derive(Debug, Serialize, Deserialize)]
struct Snapshot {
    seq: u64,
    annotations: Vec<HeadlineAnnotation>,
    sessions: BTreeMap<String, Session>,
}

/// Candidates of one task that the annotator still has to judge.
pub struct PendingTask<'a> {
    pub set: &'a CandidateSet,
    pub pending: Vec<usize>,
}

pub struct Store {
    data_dir: PathBuf,
    articles: HashMap<String, ArticleRecord>,
    sets: Vec<CandidateSet>,
    annotations: Vec<HeadlineAnnotation>,
    judged: HashSet<(String, String, String)>,
    sessions: BTreeMap<String, Session>,
    seq: u64,
    log: File,
    pub validation: ValidationConfig,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, StoreError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| StoreError::Data { path: path.to_owned(), reason: e.to_string() })
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, StoreError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    paths.sort();
    Ok(paths)
}

impl Store {
    /// Loads `articles/*.json`, `candidates.json` and the alignment
    /// sessions in `alignment/`, then replays the snapshot and event log.
    pub fn open(data_dir: &Path, validation: ValidationConfig) -> Result<Store, StoreError> {
        let mut articles = HashMap::new();
        for path in sorted_entries(&data_dir.join("articles"))? {
            if path.extension().and_then(|e| e.to_str()) == Some("json") {
                let corpus = load_articles(&path).map_err(|e| StoreError::Data { path: path.clone(), reason: e.to_string() })?;
                for a in corpus.articles {
                    articles.insert(a.id.clone(), a);
                }
            }
        }
        let candidates_path = data_dir.join("candidates.json");
        let sets: Vec<CandidateSet> = if candidates_path.exists() { read_json(&candidates_path)? } else { Vec::new() };

        let mut sessions = BTreeMap::new();
        let align_dir = data_dir.join("alignment");
        for path in sorted_entries(&align_dir)? {
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            let Some(stem) = name.strip_suffix(".index.json") else { continue };
            let index: AlignmentIndex = read_json(&path)?;
            let doc = |lang: Language| {
                let p = align_dir.join(format!("{stem}.{lang}.txt"));
                fs::read_to_string(&p).map_err(io_err(&p))
            };
            let session = Session::from_documents(stem, &doc(index.src_language)?, &doc(index.tgt_language)?, index)
                .map_err(|reason| StoreError::Data { path: path.clone(), reason })?;
            sessions.insert(stem.to_string(), session);
        }

        let mut seq = 0;
        let mut annotations = Vec::new();
        let snapshot_path = data_dir.join(SNAPSHOT_FILE);
        if snapshot_path.exists() {
            let snap: Snapshot = read_json(&snapshot_path)?;
            seq = snap.seq;
            annotations = snap.annotations;
            sessions.extend(snap.sessions);
        }

        let log_path = data_dir.join(EVENTS_FILE);
        let mut pending_events = Vec::new();
        if log_path.exists() {
            let file = File::open(&log_path).map_err(io_err(&log_path))?;
            for (n, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err(&log_path))?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<LoggedEvent>(&line) {
                    Ok(e) if e.seq > seq => pending_events.push(e),
                    Ok(_) => {}
                    // A torn final line is a write that was never acknowledged.
                    Err(e) => warn!("{}: ignoring line {}: {e}", log_path.display(), n + 1),
                }
            }
        }
        let log = OpenOptions::new().create(true).append(true).open(&log_path).map_err(io_err(&log_path))?;

        let mut store = Store {
            data_dir: data_dir.to_owned(),
            articles,
            sets,
            judged: HashSet::new(),
            annotations: Vec::new(),
            sessions,
            seq,
            log,
            validation,
        };
        for a in annotations {
            store.apply(Event::Verdict { annotation: a });
        }
        let replayed = pending_events.len();
        for e in pending_events {
            store.seq = e.seq;
            store.apply(e.event);
        }
        info!("loaded {} tasks, {} sessions, replayed {replayed} events", store.sets.len(), store.sessions.len());
        Ok(store)
    }

    fn apply(&mut self, event: Event) {
        match event {
            Event::Verdict { annotation } => {
                self.judged.insert((annotation.annotator.clone(), annotation.source_id.clone(), annotation.target_id.clone()));
                self.annotations.push(annotation);
            }
            Event::Links { session, links } => {
                if let Some(s) = self.sessions.get_mut(&session) {
                    s.links = links;
                    s.version += 1;
                }
            }
            Event::Segments { session, op } => {
                if let Some(s) = self.sessions.get_mut(&session) {
                    s.apply_op(&op);
                    s.version += 1;
                }
            }
        }
    }

    /// Logs, syncs, then applies an already validated event.
    pub fn commit(&mut self, event: Event) -> Result<(), StoreError> {
        let logged = LoggedEvent { seq: self.seq + 1, event };
        let mut line = serde_json::to_string(&logged).expect("event serializes");
        line.push('\n');
        let path = self.data_dir.join(EVENTS_FILE);
        self.log.write_all(line.as_bytes()).map_err(io_err(&path))?;
        self.log.sync_data().map_err(io_err(&path))?;
        self.seq = logged.seq;
        self.apply(logged.event);
        Ok(())
    }

    pub fn article(&self, id: &str) -> Option<&ArticleRecord> {
        self.articles.get(id)
    }

    pub fn annotations(&self) -> &[HeadlineAnnotation] {
        &self.annotations
    }

    pub fn is_judged(&self, annotator: &str, source_id: &str, target_id: &str) -> bool {
        self.judged.contains(&(annotator.to_string(), source_id.to_string(), target_id.to_string()))
    }

    pub fn find_candidate(&self, source_id: &str, target_id: &str) -> Option<&paramine_core::Candidate> {
        self.sets
            .iter()
            .filter(|s| s.source_id == source_id)
            .flat_map(|s| &s.candidates)
            .find(|c| c.target_id == target_id)
    }

    pub fn pending_tasks(&self, annotator: &str) -> Vec<PendingTask<'_>> {
        self.sets
            .iter()
            .filter_map(|set| {
                let pending: Vec<usize> = (0..set.candidates.len())
                    .filter(|&i| !self.is_judged(annotator, &set.source_id, &set.candidates[i].target_id))
                    .collect();
                (!pending.is_empty()).then_some(PendingTask { set, pending })
            })
            .collect()
    }

    pub fn task_count(&self) -> usize {
        self.sets.len()
    }

    pub fn session(&self, id: &str) -> Option<&Session> {
        self.sessions.get(id)
    }

    pub fn sessions(&self) -> impl Iterator<Item = &Session> {
        self.sessions.values()
    }

    /// Pairs TSV over all sessions in id order. Writes a snapshot and
    /// truncates the event log.
    pub fn export(&mut self) -> Result<(String, usize), StoreError> {
        let mut pairs = Vec::new();
        let mut rejected = 0;
        for s in self.sessions.values() {
            let (p, r) = s.pairs(&self.validation);
            pairs.extend(p);
            rejected += r;
        }
        let tsv = write_pairs_tsv(&pairs).map_err(|e| StoreError::Data { path: self.data_dir.clone(), reason: e.to_string() })?;
        self.compact()?;
        Ok((tsv, rejected))
    }

    fn compact(&mut self) -> Result<(), StoreError> {
        let snap = Snapshot { seq: self.seq, annotations: self.annotations.clone(), sessions: self.sessions.clone() };
        let path = self.data_dir.join(SNAPSHOT_FILE);
        let mut json = serde_json::to_string(&snap).expect("snapshot serializes");
        json.push('\n');
        write_atomic(&path, json.as_bytes()).map_err(io_err(&path))?;
        let log_path = self.data_dir.join(EVENTS_FILE);
        self.log.set_len(0).map_err(io_err(&log_path))?;
        self.log.sync_all().map_err(io_err(&log_path))?;
        Ok(())
    }
}

/// Builds an annotation from a request after the vocabulary check.
pub fn annotation(
    source_id: String,
    target_id: String,
    verdict: Verdict,
    annotator: String,
    timestamp: Option<DateTime<Utc>>,
    store: &Store,
) -> HeadlineAnnotation {
    let matched_via = store.find_candidate(&source_id, &target_id).map(|c| c.matched_via);
    HeadlineAnnotation { source_id, target_id, verdict, annotator, timestamp, matched_via }
}
