//! `etdq`: ingest, detect, fix, evaluate, inspect the journal, and build
//! benchmarks from the command line.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use etd_quality::detection::{diagnose_record, FieldDiagnosis};
use etd_quality::ecc::{apply_ecc, ActionKind};
use etd_quality::evaluation::benchmark::{generate_standard, write_benchmark, STANDARD_SEED};
use etd_quality::evaluation::report::benchmark_report;
use etd_quality::evaluation::sampling::combine_samples;
use etd_quality::evaluation::{inject_noise, read_labels, stratified_sample, write_labels, EvalReport, NoiseConfig, Prediction, SampleCriterion};
use etd_quality::io::{read_csv, read_jsonl, write_csv, write_jsonl, RowError};
use etd_quality::store::{format_timestamp, VersionStore};
use etd_quality::{EtdRecord, FieldKey, PipelineConfig, Resources};

/// `println!` that ignores a closed stdout, as when piped into `head`.
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Debug, Parser)]
#[command(name = "etdq", version, about = "Detect, correct and canonicalize ETD metadata")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Pipeline configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Department similarity threshold, overrides the config.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Worker threads; defaults to the number of processors.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Record file format; inferred from the extension when absent.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Journal path, overrides the config.
    #[arg(long, global = true)]
    pub journal: Option<PathBuf>,
    /// Extraction oracle (JSON-lines file or sidecar directory), overrides the config.
    #[arg(long, global = true)]
    pub oracle: Option<PathBuf>,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load records and write version 1 of each new record to the journal.
    Ingest {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write one JSON line per field diagnosis and print counts.
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Detect, correct and canonicalize; commit changed records.
    Fix {
        #[arg(long)]
        input: PathBuf,
        /// Corrected records.
        #[arg(long)]
        output: PathBuf,
        /// Per-record diagnoses and actions (default: <output stem>.predictions.jsonl).
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Fields still in error (default: <output stem>.unresolved.csv).
        #[arg(long)]
        unresolved: Option<PathBuf>,
    },
    /// Score predictions against gold labels.
    Evaluate {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Directory for report.txt and report.json.
        #[arg(long)]
        output: PathBuf,
    },
    /// List the versions of one record.
    History {
        #[arg(long)]
        id: String,
    },
    /// Append a copy of an earlier version as the newest one.
    Rollback {
        #[arg(long)]
        id: String,
        #[arg(long)]
        version: u32,
    },
    /// Fields that differ between two versions.
    Diff {
        #[arg(long)]
        id: String,
        #[arg(long)]
        from: u32,
        /// Defaults to the latest version.
        #[arg(long)]
        to: Option<u32>,
    },
    /// Corrupt clean records into a labeled benchmark.
    Inject {
        /// Clean records; not needed with --preset.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Noise configuration (JSON).
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        output: PathBuf,
    },
    /// Draw a seeded stratified sample; several criteria are combined.
    Sample {
        #[arg(long)]
        input: PathBuf,
        /// Criterion as JSON, e.g. '{"criterion":"by_degree","degrees":5,"per":20}'.
        #[arg(long, required = true)]
        criterion: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 500 records with the published per-field error counts.
    Standard,
}

/// Finished without hard failure; `Partial` means some input was skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Partial,
}

pub fn exit_code(r: &Result<Status>) -> ExitCode {
    match r {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Partial) => ExitCode::from(1),
        Err(_) => ExitCode::from(2),
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    let g = &cli.global;
    match &cli.command {
        Command::Ingest { input } => ingest(g, input),
        Command::Detect { input, output } => detect(g, input, output),
        Command::Fix {
            input,
            output,
            predictions,
            unresolved,
        } => fix(g, input, output, predictions.as_deref(), unresolved.as_deref()),
        Command::Evaluate { predictions, gold, output } => evaluate(predictions, gold, output),
        Command::History { id } => history(g, id),
        Command::Rollback { id, version } => rollback(g, id, *version),
        Command::Diff { id, from, to } => diff(g, id, *from, *to),
        Command::Inject {
            input,
            noise,
            preset,
            seed,
            output,
        } => inject(g, input.as_deref(), noise.as_deref(), *preset, *seed, output),
        Command::Sample {
            input,
            criterion,
            seed,
            output,
        } => sample(g, input, criterion, *seed, output),
    }
}

fn config(g: &Global) -> Result<PipelineConfig> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(t) = g.threshold {
        cfg.threshold = t;
    }
    if let Some(j) = &g.journal {
        cfg.journal = Some(j.clone());
    }
    if let Some(o) = &g.oracle {
        cfg.oracle = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resources(cfg: &PipelineConfig, records: &[EtdRecord]) -> Result<Resources> {
    let titles = records.iter().filter_map(|r| r.raw(FieldKey::Title));
    cfg.build_resources(titles).context("loading resources")
}

fn format_of(g: &Global, path: &Path) -> Format {
    g.format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("json") | Some("ndjson") => Format::Jsonl,
        _ => Format::Csv,
    })
}

/// Reads records, reporting bad rows and duplicate ids on stderr.
pub fn read_records(path: &Path, format: Format) -> Result<(Vec<EtdRecord>, Vec<RowError>)> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (records, mut errors) = match format {
        Format::Csv => read_csv(f)?,
        Format::Jsonl => read_jsonl(BufReader::new(f))?,
    };
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        if seen.insert(r.id.clone()) {
            out.push(r);
        } else {
            errors.push(RowError {
                line: 0,
                message: format!("duplicate id {:?}", r.id),
            });
        }
    }
    for e in &errors {
        eprintln!("{}: line {}: {}", path.display(), e.line, e.message);
    }
    Ok((out, errors))
}

fn status(errors: &[RowError]) -> Status {
    if errors.is_empty() {
        Status::Ok
    } else {
        Status::Partial
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        f(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_records(path: &Path, format: Format, records: &[EtdRecord]) -> Result<()> {
    write_atomic(path, |w| {
        match format {
            Format::Csv => write_csv(w, records)?,
            Format::Jsonl => write_jsonl(w, records)?,
        }
        Ok(())
    })
}

fn pool(g: &Global) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = g.jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

fn open_store(cfg: &PipelineConfig) -> Result<Option<VersionStore>> {
    cfg.journal
        .as_ref()
        .map(|p| VersionStore::open(p).with_context(|| format!("opening journal {}", p.display())))
        .transpose()
}

fn read_store(cfg: &PipelineConfig) -> Result<VersionStore> {
    let p = cfg.journal.as_ref().context("no journal configured (use --journal or the config file)")?;
    Ok(VersionStore::read_only(p)?)
}

fn ingest(g: &Global, input: &Path) -> Result<Status> {
    let cfg = config(g)?;
    let (records, errors) = read_records(input, format_of(g, input))?;
    let mut store = open_store(&cfg)?.context("ingest needs a journal (use --journal or the config file)")?;
    let mut created = 0;
    for r in &records {
        if store.commit(r, &[])?.is_some() {
            created += 1;
        }
    }
    out!("ingested {} records, {} new versions, {} rejected rows", records.len(), created, errors.len());
    Ok(status(&errors))
}

#[derive(Serialize)]
struct DiagnosisLine<'a> {
    record_id: &'a str,
    #[serde(flatten)]
    diagnosis: &'a FieldDiagnosis,
}

fn print_counts(title: &str, counts: &BTreeMap<(String, String), usize>) {
    out!("{title}");
    if counts.is_empty() {
        out!("  (none)");
    }
    for ((a, b), n) in counts {
        out!("  {a:<12}{b:<16}{n:>6}");
    }
}

fn detect(g: &Global, input: &Path, output: &Path) -> Result<Status> {
    let cfg = config(g)?;
    let (records, errors) = read_records(input, format_of(g, input))?;
    let res = resources(&cfg, &records)?;
    let diags: Vec<Vec<FieldDiagnosis>> = pool(g)?.install(|| records.par_iter().map(|r| diagnose_record(r, &res)).collect());
    let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    write_atomic(output, |w| {
        for (r, ds) in records.iter().zip(&diags) {
            for d in ds {
                serde_json::to_writer(&mut *w, &DiagnosisLine { record_id: &r.id, diagnosis: d })?;
                w.write_all(b"\n")?;
                *counts.entry((d.field.to_string(), d.kind.to_string())).or_default() += 1;
            }
        }
        Ok(())
    })?;
    out!("{} records, {} diagnoses", records.len(), diags.iter().map(Vec::len).sum::<usize>());
    print_counts("diagnoses by field and kind:", &counts);
    Ok(status(&errors))
}

fn sibling(output: &Path, suffix: &str) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    output.with_file_name(format!("{stem}{suffix}"))
}

/// Runs detection and correction over every record, in input order.
pub fn run_pipeline(records: &[EtdRecord], res: &Resources, pool: &rayon::ThreadPool) -> Vec<Prediction> {
    pool.install(|| {
        records
            .par_iter()
            .map(|r| {
                let diagnoses = diagnose_record(r, res);
                let out = apply_ecc(r, &diagnoses, res);
                Prediction {
                    record_id: r.id.clone(),
                    diagnoses,
                    actions: out.actions,
                    unresolved: out.unresolved,
                    record: out.record,
                }
            })
            .collect()
    })
}

fn fix(g: &Global, input: &Path, output: &Path, predictions: Option<&Path>, unresolved: Option<&Path>) -> Result<Status> {
    let cfg = config(g)?;
    let (records, errors) = read_records(input, format_of(g, input))?;
    let mut store = open_store(&cfg)?;
    let res = resources(&cfg, &records)?;
    let preds = run_pipeline(&records, &res, &pool(g)?);

    let mut new_versions = 0;
    if let Some(store) = store.as_mut() {
        for (orig, p) in records.iter().zip(&preds) {
            if !store.contains(&orig.id) && store.commit(orig, &[])?.is_some() {
                new_versions += 1;
            }
            let same = store.latest(&orig.id).is_some_and(|v| v.snapshot == p.record);
            if !same && store.commit(&p.record, &p.actions)?.is_some() {
                new_versions += 1;
            }
        }
    }

    let corrected: Vec<EtdRecord> = preds.iter().map(|p| p.record.clone()).collect();
    write_records(output, format_of(g, output), &corrected)?;
    let pred_path = predictions.map(Path::to_path_buf).unwrap_or_else(|| sibling(output, ".predictions.jsonl"));
    write_atomic(&pred_path, |w| {
        for p in &preds {
            serde_json::to_writer(&mut *w, p)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    let unres_path = unresolved.map(Path::to_path_buf).unwrap_or_else(|| sibling(output, ".unresolved.csv"));
    write_atomic(&unres_path, |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["record_id", "field", "value"])?;
        for p in &preds {
            for f in &p.unresolved {
                c.write_record([p.record_id.as_str(), f.as_str(), p.record.raw(*f).unwrap_or("")])?;
            }
        }
        c.flush()?;
        Ok(())
    })?;

    let mut by_kind: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut canonical: BTreeMap<FieldKey, usize> = BTreeMap::new();
    let mut open: BTreeMap<(String, String), usize> = BTreeMap::new();
    for p in &preds {
        for a in &p.actions {
            *by_kind.entry((a.field.to_string(), kind_name(a.kind))).or_default() += 1;
        }
        let mut fields: Vec<FieldKey> = p.actions.iter().filter(|a| a.kind.is_canonicalization()).map(|a| a.field).collect();
        fields.dedup();
        for f in fields {
            *canonical.entry(f).or_default() += 1;
        }
        for f in &p.unresolved {
            *open.entry((f.to_string(), "unresolved".into())).or_default() += 1;
        }
    }
    out!("{} records, {} actions, {} new versions", records.len(), by_kind.values().sum::<usize>(), new_versions);
    print_counts("actions by field and kind:", &by_kind);
    out!("canonicalized values by field:");
    for f in FieldKey::ALL {
        out!("  {:<12}{:>6}", f.as_str(), canonical.get(&f).copied().unwrap_or(0));
    }
    print_counts("unresolved fields:", &open);
    Ok(status(&errors))
}

fn kind_name(k: ActionKind) -> String {
    serde_json::to_value(k).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_else(|| format!("{k:?}"))
}

fn evaluate(predictions: &Path, gold: &Path, output: &Path) -> Result<Status> {
    let f = File::open(predictions).with_context(|| format!("opening {}", predictions.display()))?;
    let mut preds = Vec::new();
    for (i, line) in std::io::BufRead::lines(BufReader::new(f)).enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Prediction = serde_json::from_str(&line).with_context(|| format!("{}: line {}", predictions.display(), i + 1))?;
        preds.push(p);
    }
    let labels = read_labels(File::open(gold).with_context(|| format!("opening {}", gold.display()))?)?;
    let ids: HashSet<&str> = preds.iter().map(|p| p.record_id.as_str()).collect();
    let mut unmatched: Vec<&str> = labels.iter().map(|l| l.record_id.as_str()).filter(|id| !ids.contains(id)).collect();
    unmatched.sort_unstable();
    unmatched.dedup();
    for id in &unmatched {
        eprintln!("label for {id:?} has no prediction");
    }
    let report = EvalReport::evaluate(&preds, &labels);
    let text = benchmark_report(&report.fields)?;
    std::fs::create_dir_all(output).with_context(|| format!("creating {}", output.display()))?;
    write_atomic(&output.join("report.txt"), |w| Ok(w.write_all(text.as_bytes())?))?;
    let json = report.to_json()?;
    write_atomic(&output.join("report.json"), |w| Ok(w.write_all(json.as_bytes())?))?;
    let _ = std::io::stdout().write_all(text.as_bytes());
    Ok(if unmatched.is_empty() { Status::Ok } else { Status::Partial })
}

fn history(g: &Global, id: &str) -> Result<Status> {
    let store = read_store(&config(g)?)?;
    for v in store.history(id)? {
        let summary = if v.change_summary.is_empty() {
            "ingested".to_string()
        } else {
            v.change_summary
                .iter()
                .map(|a| format!("{}:{}", a.field, kind_name(a.kind)))
                .collect::<Vec<_>>()
                .join(", ")
        };
        out!("v{}\t{}\t{}", v.version, format_timestamp(&v.timestamp), summary);
    }
    Ok(Status::Ok)
}

fn rollback(g: &Global, id: &str, version: u32) -> Result<Status> {
    let cfg = config(g)?;
    let mut store = open_store(&cfg)?.context("rollback needs a journal (use --journal or the config file)")?;
    let v = store.rollback(id, version)?;
    out!("{id}: restored v{version} as v{}", v.version);
    Ok(Status::Ok)
}

fn diff(g: &Global, id: &str, from: u32, to: Option<u32>) -> Result<Status> {
    let store = read_store(&config(g)?)?;
    let to = match to {
        Some(t) => t,
        None => store.latest(id).map(|v| v.version).context(format!("unknown record id {id:?}"))?,
    };
    let rows = store.diff(id, from, to)?;
    if rows.is_empty() {
        out!("no differences between v{from} and v{to}");
    }
    for d in rows {
        out!("{}\t{}\t{}", d.field, d.a.as_deref().unwrap_or("-"), d.b.as_deref().unwrap_or("-"));
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct InjectManifest<'a> {
    generator: &'a str,
    input: String,
    records: usize,
    labels: usize,
    noise: &'a NoiseConfig,
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn inject(
    g: &Global,
    input: Option<&Path>,
    noise: Option<&Path>,
    preset: Option<Preset>,
    seed: Option<u64>,
    output: &Path,
) -> Result<Status> {
    let cfg = config(g)?;
    if let Some(Preset::Standard) = preset {
        let res = resources(&cfg, &[])?;
        let b = generate_standard(seed.unwrap_or(STANDARD_SEED), &res)?;
        write_benchmark(output, &b)?;
        out!("wrote {} records and {} labels to {}", b.corrupted.len(), b.labels.len(), output.display());
        return Ok(Status::Ok);
    }
    let input = input.context("inject needs --input or --preset")?;
    let noise = noise.context("inject needs --noise or --preset")?;
    let text = std::fs::read_to_string(noise).with_context(|| format!("reading {}", noise.display()))?;
    let mut nc: NoiseConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", noise.display()))?;
    if let Some(s) = seed {
        nc.seed = s;
    }
    nc.validate()?;
    let (gold, errors) = read_records(input, format_of(g, input))?;
    let res = resources(&cfg, &gold)?;
    let (corrupted, labels) = inject_noise(&gold, &nc, &res)?;
    std::fs::create_dir_all(output)?;
    write_records(&output.join("records.csv"), Format::Csv, &corrupted)?;
    write_atomic(&output.join("labels.csv"), |w| Ok(write_labels(w, &labels)?))?;
    let manifest = InjectManifest {
        generator: "noise",
        input: file_name(input),
        records: corrupted.len(),
        labels: labels.len(),
        noise: &nc,
    };
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    write_atomic(&output.join("manifest.json"), |w| Ok(w.write_all(json.as_bytes())?))?;
    out!("wrote {} records and {} labels to {}", corrupted.len(), labels.len(), output.display());
    Ok(status(&errors))
}

#[derive(Serialize)]
struct SampleManifest<'a> {
    input: String,
    seed: u64,
    criteria: &'a [SampleCriterion],
    records: usize,
}

fn sample(g: &Global, input: &Path, criteria: &[String], seed: u64, output: &Path) -> Result<Status> {
    let criteria: Vec<SampleCriterion> = criteria
        .iter()
        .map(|c| serde_json::from_str(c).with_context(|| format!("bad criterion {c}")))
        .collect::<Result<_>>()?;
    let (records, errors) = read_records(input, format_of(g, input))?;
    // each criterion gets its own stream so adding one leaves the others unchanged
    let samples = criteria
        .iter()
        .enumerate()
        .map(|(i, c)| stratified_sample(&records, c, seed.wrapping_add(i as u64)))
        .collect::<etd_quality::Result<Vec<_>>>()?;
    let picked = combine_samples(samples);
    write_records(output, format_of(g, output), &picked)?;
    let manifest = SampleManifest {
        input: file_name(input),
        seed,
        criteria: &criteria,
        records: picked.len(),
    };
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    write_atomic(&sibling(output, ".manifest.json"), |w| Ok(w.write_all(json.as_bytes())?))?;
    out!("sampled {} of {} records", picked.len(), records.len());
    Ok(status(&errors))
}
