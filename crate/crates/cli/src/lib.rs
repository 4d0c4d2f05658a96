//! The `paramine` command line.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use paramine_core::alignment::documents::AlignmentIndex;
use paramine_core::alignment::{
    emit_alignment_inputs, generate_sheet, import_alignment, import_sheet, load_annotations, parse_links,
    read_pairs_tsv, save_annotations, validate_pair, write_pairs_tsv, write_quarantine_tsv, TranslationPair,
    ValidationConfig,
};
use paramine_core::corpus_tools::{self, ExportFormat, SplitManifest};
use paramine_core::extractor::{extract, Fetcher, RawPage, SiteProfile};
use paramine_core::model::{load_articles, save_articles, write_atomic, CorpusFile};
use paramine_core::pair_miner::{mine, ArticleIndex, CandidateSet, MinerConfig};
use paramine_core::translit::TransliterationTable;

use config::PipelineConfig;

#[derive(Debug, Parser)]
#[command(name = "paramine", version, about = "Build parallel corpora from multilingual news sites")]
pub struct Cli {
    /// Pipeline configuration file (TOML).
    #[arg(long, global = true, env = "PARAMINE_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fetch article pages politely and store them for extraction.
    Crawl(CrawlArgs),
    /// Extract article records from stored pages.
    Extract(ExtractArgs),
    /// Transliterate Arabic-script Kurdish to the Latin-based alphabet.
    Translit(TranslitArgs),
    /// Rank cross-language headline candidates for two article files.
    Mine(MineArgs),
    /// Write an annotation sheet for candidate sets.
    Sheet(SheetArgs),
    /// Read verdicts back from a filled annotation sheet.
    ImportSheet(ImportSheetArgs),
    /// Write the documents to align for matched article pairs.
    AlignInputs(AlignInputsArgs),
    /// Turn a sentence-alignment link file into translation pairs.
    ImportAlignment(ImportAlignmentArgs),
    /// Check translation pairs against the alignment guidelines.
    Validate(ValidateArgs),
    /// Corpus statistics for a pair file.
    Stats(StatsArgs),
    /// Seeded train/test split of a pair file.
    Split(SplitArgs),
    /// Export a split as bitext or TSV.
    Export(ExportArgs),
    /// Remove exact duplicate pairs.
    Dedup(DedupArgs),
    /// Run the adjudication and alignment service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct CrawlArgs {
    #[arg(long)]
    profile: PathBuf,
    /// Extra page URLs besides the profile's start URLs.
    #[arg(long = "url")]
    urls: Vec<String>,
    /// Output directory (defaults to the configured pages directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    politeness_ms: Option<u64>,
    #[arg(long)]
    ignore_robots: bool,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    profile: PathBuf,
    #[arg(long)]
    pages: Option<PathBuf>,
    /// Directory for `<site>.<language>.json` files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TranslitArgs {
    /// Text to convert; standard input is read line by line when absent.
    text: Vec<String>,
    /// Alternative rule table.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MineArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    min_score: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SheetArgs {
    #[arg(long)]
    candidates: PathBuf,
    /// Article files holding every referenced id.
    #[arg(long = "articles", required = true)]
    articles: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ImportSheetArgs {
    #[arg(long)]
    sheet: PathBuf,
    #[arg(long)]
    annotator: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AlignInputsArgs {
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long = "articles", required = true)]
    articles: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[arg(long)]
    max_tokens: Option<usize>,
    #[arg(long)]
    max_ratio: Option<f64>,
}

impl LimitArgs {
    fn resolve(&self, cfg: &PipelineConfig) -> ValidationConfig {
        ValidationConfig {
            max_tokens: self.max_tokens.unwrap_or(cfg.validation.max_tokens),
            max_ratio: self.max_ratio.unwrap_or(cfg.validation.max_ratio),
        }
    }
}

#[derive(Debug, Args)]
struct ImportAlignmentArgs {
    #[arg(long)]
    src_doc: PathBuf,
    #[arg(long)]
    tgt_doc: PathBuf,
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    links: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Where to write pairs failing validation.
    #[arg(long)]
    quarantine: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    annotations: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Bitext,
    Tsv,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum, default_value = "bitext")]
    format: FormatArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DedupArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Data directory (defaults to the configured one).
    #[arg(long)]
    data: Option<PathBuf>,
}

type Result<T> = std::result::Result<T, Box<dyn std::error::Error>>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn write(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    write_atomic(path, body.as_bytes()).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read_pairs(path: &Path) -> Result<Vec<TranslationPair>> {
    read_pairs_tsv(&read(path)?).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_corpora(paths: &[PathBuf]) -> Result<Vec<CorpusFile>> {
    paths.iter().map(|p| load_articles(p).map_err(Into::into)).collect()
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::from_env(),
    };
    match cli.command {
        Command::Crawl(a) => crawl(a, &cfg),
        Command::Extract(a) => extract_pages(a, &cfg),
        Command::Translit(a) => translit(a),
        Command::Mine(a) => mine_cmd(a, &cfg),
        Command::Sheet(a) => {
            let sets: Vec<CandidateSet> = read_json(&a.candidates)?;
            let corpora = load_corpora(&a.articles)?;
            write(&a.out, &generate_sheet(&sets, &ArticleIndex::new(&corpora))?)?;
            Ok(0)
        }
        Command::ImportSheet(a) => {
            let annotations = import_sheet(&read(&a.sheet)?, &a.annotator).map_err(|e| format!("{}: {e}", a.sheet.display()))?;
            if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            save_annotations(&annotations, &a.out)?;
            eprintln!("{} verdicts", annotations.len());
            Ok(0)
        }
        Command::AlignInputs(a) => {
            let annotations = load_annotations(&a.annotations).map_err(|e| format!("{}: {e}", a.annotations.display()))?;
            let corpora = load_corpora(&a.articles)?;
            let out = a.out.unwrap_or(cfg.layout.alignment_dir.clone());
            let docs = emit_alignment_inputs(&annotations, &ArticleIndex::new(&corpora), &out)?;
            for d in &docs {
                eprintln!("{}: {} article pairs", d.stem(), d.index.articles.len());
            }
            Ok(0)
        }
        Command::ImportAlignment(a) => {
            let index = AlignmentIndex::load(&a.index).map_err(|e| format!("{}: {e}", a.index.display()))?;
            let links = parse_links(&read(&a.links)?).map_err(|e| format!("{}: {e}", a.links.display()))?;
            let result = import_alignment(&read(&a.src_doc)?, &read(&a.tgt_doc)?, &index, &links, &a.limits.resolve(&cfg))?;
            write(&a.out, &write_pairs_tsv(&result.pairs)?)?;
            if let Some(q) = &a.quarantine {
                write(q, &write_quarantine_tsv(&result.quarantined)?)?;
            }
            for (p, v) in &result.quarantined {
                let v: Vec<String> = v.iter().map(ToString::to_string).collect();
                warn!("quarantined {} / {}: {}", p.src_article, p.tgt_article, v.join("; "));
            }
            eprintln!("{} pairs imported, {} quarantined", result.pairs.len(), result.quarantined.len());
            Ok(0)
        }
        Command::Validate(a) => {
            let limits = a.limits.resolve(&cfg);
            let mut failures = 0;
            for (i, p) in read_pairs(&a.pairs)?.iter().enumerate() {
                if let Err(v) = validate_pair(p, &limits) {
                    failures += 1;
                    for v in v {
                        println!("pair {}: {v}", i + 1);
                    }
                }
            }
            eprintln!("{failures} pairs with violations");
            Ok(if failures == 0 { 0 } else { 1 })
        }
        Command::Stats(a) => stats(a),
        Command::Split(a) => {
            let n = read_pairs(&a.pairs)?.len();
            let manifest = corpus_tools::split(n, a.ratio.unwrap_or(cfg.split_ratio), a.seed.unwrap_or(cfg.seed))?;
            write(&a.out, &manifest.to_json())?;
            eprintln!("{} train, {} test", manifest.train_ids.len(), manifest.test_ids.len());
            Ok(0)
        }
        Command::Export(a) => {
            let pairs = read_pairs(&a.pairs)?;
            let manifest: SplitManifest = read_json(&a.manifest)?;
            let format = match a.format {
                FormatArg::Bitext => ExportFormat::Bitext,
                FormatArg::Tsv => ExportFormat::Tsv,
            };
            for path in corpus_tools::export(&pairs, &manifest, &a.out, format)? {
                info!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Dedup(a) => {
            let (kept, removed) = corpus_tools::dedup(read_pairs(&a.pairs)?);
            write(&a.out, &write_pairs_tsv(&kept)?)?;
            eprintln!("removed {removed} duplicates, kept {}", kept.len());
            Ok(0)
        }
        Command::Serve(a) => {
            let data = a.data.unwrap_or(cfg.layout.data_dir.clone());
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(paramine_service::serve(SocketAddr::new(a.host, a.port), &data, cfg.validation))?;
            Ok(0)
        }
    }
}

fn crawl(a: CrawlArgs, cfg: &PipelineConfig) -> Result<i32> {
    let profile = SiteProfile::load(&a.profile)?;
    let out = a.out.unwrap_or(cfg.layout.pages_dir.clone());
    let politeness = Duration::from_millis(a.politeness_ms.or(profile.politeness_ms).unwrap_or(1000));
    let urls: Vec<String> = profile.start_urls.iter().cloned().chain(a.urls).collect();
    let fetcher = Arc::new(Fetcher::new(politeness).respect_robots(!a.ignore_robots));
    let rt = tokio::runtime::Runtime::new()?;
    let mut pending = urls;
    let mut failed = 0;
    for attempt in 0..3 {
        if pending.is_empty() {
            break;
        }
        let results = rt.block_on(fetcher.fetch_all(&pending));
        let mut retry = Vec::new();
        for (url, r) in pending.iter().zip(results) {
            match r {
                Ok(page) => page.save_to_dir(&out)?,
                Err(e) if e.is_retryable() && attempt < 2 => retry.push(url.clone()),
                Err(e) => {
                    warn!("{e}");
                    failed += 1;
                }
            }
        }
        pending = retry;
    }
    eprintln!("crawl finished, {failed} failures");
    Ok(if failed == 0 { 0 } else { 1 })
}

fn extract_pages(a: ExtractArgs, cfg: &PipelineConfig) -> Result<i32> {
    let profile = SiteProfile::load(&a.profile)?;
    let pages_dir = a.pages.unwrap_or(cfg.layout.pages_dir.clone());
    let out = a.out.unwrap_or(cfg.layout.articles_dir.clone());
    let pages = RawPage::load_dir(&pages_dir).map_err(|e| format!("{}: {e}", pages_dir.display()))?;
    let mut by_language: std::collections::BTreeMap<_, CorpusFile> = std::collections::BTreeMap::new();
    let mut failed = 0;
    for page in &pages {
        match extract(page, &profile) {
            Ok(x) => {
                let corpus = by_language
                    .entry(x.record.language)
                    .or_insert_with(|| CorpusFile::new(profile.site.clone(), x.record.language));
                if corpus.get(&x.record.id).is_none() {
                    corpus.articles.push(x.record);
                }
            }
            Err(e) => {
                warn!("{e}");
                failed += 1;
            }
        }
    }
    fs::create_dir_all(&out)?;
    for (lang, mut corpus) in by_language {
        corpus.articles.sort_by(|x, y| x.id.cmp(&y.id));
        let path = out.join(format!("{}.{lang}.json", profile.site));
        save_articles(&corpus, &path)?;
        eprintln!("{}: {} articles", path.display(), corpus.articles.len());
    }
    if failed > 0 {
        eprintln!("{failed} pages could not be extracted");
    }
    Ok(0)
}

fn translit(a: TranslitArgs) -> Result<i32> {
    let table = match &a.table {
        Some(p) => TransliterationTable::load(p)?,
        None => TransliterationTable::builtin(),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if a.text.is_empty() {
        for line in io::stdin().lock().lines() {
            writeln!(out, "{}", table.transliterate(&line?))?;
        }
    } else {
        writeln!(out, "{}", table.transliterate(&a.text.join(" ")))?;
    }
    Ok(0)
}

fn mine_cmd(a: MineArgs, cfg: &PipelineConfig) -> Result<i32> {
    let src = load_articles(&a.src)?;
    let tgt = load_articles(&a.tgt)?;
    let config = MinerConfig { k: a.k.unwrap_or(cfg.mining.k), min_score: a.min_score.or(cfg.mining.min_score) };
    if config.k == 0 {
        return Err("--k must be at least 1".into());
    }
    let sets = mine(&src, &tgt, config)?;
    write(&a.out, &to_json(&sets))?;
    eprintln!("{} of {} source articles have candidates", sets.len(), src.articles.len());
    Ok(0)
}

fn stats(a: StatsArgs) -> Result<i32> {
    let pairs = read_pairs(&a.pairs)?;
    let annotations = match &a.annotations {
        Some(p) => load_annotations(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => Vec::new(),
    };
    let s = corpus_tools::compute_stats(&pairs, &annotations)?;
    if a.json {
        print!("{}", to_json(&s));
        return Ok(0);
    }
    let mean = |m: Option<f64>| m.map_or("undefined".to_string(), |m| format!("{m:.2}"));
    println!("language_pair\t{}", s.language_pair.as_deref().unwrap_or("-"));
    println!("headline_pairs\t{}", s.n_headline_pairs);
    println!("image_matched\t{}", s.n_image_matched_articles);
    println!("sentence_pairs\t{}", s.n_sentence_pairs);
    println!("tokens_a\t{}", s.n_tokens_side_a);
    println!("tokens_b\t{}", s.n_tokens_side_b);
    println!("mean_tokens_a\t{}", mean(s.mean_tokens_per_sentence_a));
    println!("mean_tokens_b\t{}", mean(s.mean_tokens_per_sentence_b));
    Ok(0)
}
