use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use crawlsieve::dedup::sim::{simulate_duplicate_distribution, SimConfig};
use crawlsieve::langid::{train, TrainConfig};
use crawlsieve::pipeline::{run, InputFormat, PipelineConfig};
use crawlsieve::record_io::{ReaderOptions, WarcReader};
use crawlsieve::threshold_lab::{collect, suggest_thresholds, Binning, DEFAULT_MIN_GAP};
use crawlsieve::{bias, pii, Exec};

#[derive(Parser)]
#[command(name = "crawlsieve", version, about = "Web-crawl curation pipeline and analysis tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the curation pipeline.
    Run(RunArgs),
    /// Simulate the duplicate distribution of sampling from exact-copy snapshots.
    DedupSim(SimArgs),
    /// Compare metric histograms of two corpora and propose thresholds.
    ThresholdLab(LabArgs),
    /// TF-IDF association of words with subgroup terms.
    BiasAudit(BiasArgs),
    /// Anonymize emails and public IPv4 addresses in text.
    PiiScan(PiiArgs),
    /// List the records of WARC files.
    WarcCat(WarcCatArgs),
    /// Train the n-gram language classifier.
    LidTrain(LidArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Warc,
    Wet,
    Jsonl,
}

impl From<Format> for InputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Warc => InputFormat::Warc,
            Format::Wet => InputFormat::Wet,
            Format::Jsonl => InputFormat::Jsonl,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; command-line values override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    shards: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Spill directory for dedup signatures and postings.
    #[arg(long, env = "CRAWLSIEVE_TMPDIR")]
    tmpdir: Option<PathBuf>,
    /// Print the effective config and exit.
    #[arg(long)]
    print_config: bool,
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 100)]
    snapshots: u64,
    #[arg(long, default_value_t = 100_000)]
    docs_per_snapshot: u64,
    /// Sample size as a fraction of all copies; repeatable.
    #[arg(long = "fraction", required = true)]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3.0)]
    nsigma: f64,
}

#[derive(Args)]
struct LabArgs {
    /// Higher-quality corpus (JSONL with a `text` field, or one document per line).
    #[arg(long)]
    high: PathBuf,
    #[arg(long)]
    low: PathBuf,
    /// Metric name; repeatable.
    #[arg(long = "metric", required = true)]
    metrics: Vec<String>,
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Fixed-width range `min,max`; quantile bins when omitted.
    #[arg(long, value_parser = parse_range)]
    range: Option<(f64, f64)>,
    #[arg(long, default_value_t = DEFAULT_MIN_GAP)]
    min_gap: f64,
    #[arg(long)]
    tsv: bool,
}

#[derive(Args)]
struct BiasArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Subgroup term; repeatable.
    #[arg(long = "term", required = true)]
    terms: Vec<String>,
    /// Rows per table.
    #[arg(long, default_value_t = 20)]
    top: usize,
}

#[derive(Args)]
struct PiiArgs {
    /// Input text; stdin when omitted.
    input: Option<PathBuf>,
}

#[derive(Args)]
struct WarcCatArgs {
    #[arg(long)]
    responses_only: bool,
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct LidArgs {
    /// `label<TAB>text` lines.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected min,max")?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

/// JSONL rows contribute their `text` field; any other line is a document.
fn read_corpus(path: &Path) -> Result<Vec<String>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for line in BufReader::new(f).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let text = serde_json::from_str::<serde_json::Value>(&line)
            .ok()
            .and_then(|v| v.get("text").and_then(|t| t.as_str()).map(str::to_string));
        out.push(text.unwrap_or(line));
    }
    Ok(out)
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => {
            PipelineConfig::from_toml(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?
        }
        None => PipelineConfig::default(),
    };
    if !a.inputs.is_empty() {
        cfg.inputs = a.inputs;
    }
    if let Some(f) = a.format {
        cfg.format = f.into();
    }
    if a.output.is_some() {
        cfg.output_dir = a.output;
    }
    if let Some(n) = a.shards {
        cfg.shard_count = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.tmpdir.is_some() {
        cfg.spill_dir = a.tmpdir;
    }
    if a.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    if cfg.inputs.is_empty() {
        bail!("no inputs");
    }
    let out = run(&cfg)?;
    let m = &out.manifest;
    for e in &m.record_errors {
        log::warn!("{}@{}: {}", e.source, e.position, e.reason);
    }
    eprintln!("{:<18} {:>9} {:>9} {:>9} {:>12}", "stage", "input", "kept", "dropped", "tokens_kept");
    for s in &m.stages {
        let name = if s.enabled { s.stage.clone() } else { format!("{} (off)", s.stage) };
        eprintln!("{:<18} {:>9} {:>9} {:>9} {:>12}", name, s.input_docs, s.kept_docs, s.dropped_docs, s.kept_tokens);
    }
    if cfg.output_dir.is_none() {
        let mut w = BufWriter::new(io::stdout().lock());
        for i in 0..out.shards.len() {
            w.write_all(out.shard_jsonl(i).as_bytes())?;
        }
        w.flush()?;
    }
    Ok(())
}

fn cmd_sim(a: SimArgs) -> Result<()> {
    println!("fraction\tsample\tunique_fraction\tbin\tobserved\texpected\tsigma\twithin");
    let mut all_ok = true;
    for f in a.fractions {
        if !(f > 0.0 && f <= 1.0) {
            bail!("fraction {f} outside (0, 1]");
        }
        let total = a.snapshots * a.docs_per_snapshot;
        let cfg = SimConfig {
            num_snapshots: a.snapshots,
            tokens_per_snapshot: a.docs_per_snapshot,
            tokens_per_doc: 1,
            sample_tokens: ((total as f64 * f).round() as u64).max(1),
        };
        let r = simulate_duplicate_distribution(&cfg, a.seed)?;
        for c in r.bin_checks(a.nsigma) {
            all_ok &= c.within;
            println!(
                "{f}\t{}\t{:.6}\t{}\t{}\t{:.3}\t{:.3}\t{}",
                r.sample_size,
                r.unique_fraction(),
                c.label,
                c.observed,
                c.expected,
                c.sigma,
                c.within
            );
        }
    }
    if !all_ok {
        log::warn!("some bins fall outside {} sigma", a.nsigma);
    }
    Ok(())
}

fn cmd_lab(a: LabArgs) -> Result<()> {
    let high = read_corpus(&a.high)?;
    let low = read_corpus(&a.low)?;
    let binning = match a.range {
        Some((min, max)) => Binning::FixedWidth { min, max, bins: a.bins },
        None => Binning::Quantile { bins: a.bins },
    };
    for m in &a.metrics {
        let h = collect(&high, m, binning, Exec::default())?;
        // Quantile edges come from the high corpus so both sides share bins.
        let lb = match binning {
            Binning::Quantile { .. } => {
                Binning::FixedWidth { min: h.bin_edges[0], max: *h.bin_edges.last().unwrap(), bins: h.bins() }
            }
            b => b,
        };
        let hb = if matches!(binning, Binning::Quantile { .. }) { collect(&high, m, lb, Exec::default())? } else { h };
        let l = collect(&low, m, lb, Exec::default())?;
        let rep = suggest_thresholds(&hb, &l, a.min_gap)?;
        if a.tsv {
            for r in rep.tsv_rows() {
                println!("{r}");
            }
        } else {
            print!("{}", rep.to_table());
        }
    }
    Ok(())
}

fn cmd_bias(a: BiasArgs) -> Result<()> {
    let docs = read_corpus(&a.corpus)?;
    let terms: Vec<&str> = a.terms.iter().map(String::as_str).collect();
    println!("# term distribution");
    for (t, n) in bias::term_distribution(&docs, &terms)? {
        println!("{t}\t{n}");
    }
    let corpus = bias::BiasCorpus::new(&docs);
    for t in &terms {
        let mut table = corpus.association(t)?;
        table.rows.truncate(a.top);
        println!("# {t}: {} of {} documents", table.selected_doc_count, table.corpus_doc_count);
        print!("{}", table.to_tsv());
    }
    Ok(())
}

fn cmd_pii(a: PiiArgs) -> Result<()> {
    let mut text = String::new();
    match a.input {
        Some(p) => text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    let (out, rep) = pii::anonymize(&text);
    print!("{out}");
    eprintln!(
        "emails_replaced={} ips_replaced={} ips_skipped_private={}",
        rep.emails_replaced, rep.ips_replaced, rep.ips_skipped_private
    );
    Ok(())
}

fn cmd_warc_cat(a: WarcCatArgs) -> Result<()> {
    let mut errors = 0;
    for p in &a.files {
        let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
        let opts = ReaderOptions { response_only: a.responses_only, base_offset: 0 };
        for rec in WarcReader::with_options(BufReader::new(f), &p.display().to_string(), opts)? {
            match rec {
                Ok(r) => println!(
                    "{}\t{}\t{}\t{}\t{}",
                    r.byte_offset,
                    r.record_type.as_str(),
                    r.record_id,
                    r.target_uri.as_deref().unwrap_or("-"),
                    r.payload.len()
                ),
                Err(e) => {
                    errors += 1;
                    eprintln!("{e}");
                }
            }
        }
    }
    if errors > 0 {
        log::warn!("{errors} damaged records");
    }
    Ok(())
}

fn cmd_lid(a: LidArgs) -> Result<()> {
    let f = File::open(&a.data).with_context(|| format!("opening {}", a.data.display()))?;
    let mut samples = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let Some((label, text)) = line.split_once('\t') else {
            bail!("{}:{}: expected label<TAB>text", a.data.display(), i + 1);
        };
        samples.push((text.to_string(), label.to_string()));
    }
    let cfg = TrainConfig { epochs: a.epochs, seed: a.seed, ..Default::default() };
    let (model, rep) = train(&samples, &cfg)?;
    let mut w = BufWriter::new(File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?);
    model.write_to(&mut w)?;
    w.flush()?;
    eprintln!(
        "trained on {} samples, held-out accuracy {:.4} over {}",
        rep.train_samples, rep.holdout_accuracy, rep.holdout_samples
    );
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::DedupSim(a) => cmd_sim(a),
        Cmd::ThresholdLab(a) => cmd_lab(a),
        Cmd::BiasAudit(a) => cmd_bias(a),
        Cmd::PiiScan(a) => cmd_pii(a),
        Cmd::WarcCat(a) => cmd_warc_cat(a),
        Cmd::LidTrain(a) => cmd_lid(a),
    }
}
