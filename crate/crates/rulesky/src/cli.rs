//! Command-line pipeline: mine rules to CSV, select rules by skyline /
//! representative / threshold criteria with a JSON report, and generate
//! synthetic basket datasets.
//!
//! Reports are deterministic: the same config produces byte-identical
//! output, so timings go to standard error only.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baseline::{gain, tb_rules, thresholds_from_rules, ThresholdVector};
use crate::dataset::{TransactionDataset, Vocabulary};
use crate::dominance::{representative_oracle_counted, skyline_naive_counted, PairCounter};
use crate::error::{Error, Result};
use crate::measures::{parse_measure_list, Measure, RelationalTable, CSV_SIG_DIGITS};
use crate::miner::{generate_rules, mine_frequent};
use crate::numeric::{parse_decimal, render_decimal, to_f64, trunc2};
use crate::rar::{rar_trace, RarMode, RarOutcome};

#[derive(Debug, Parser)]
#[command(
    name = "rulesky",
    version,
    about = "Association-rule mining with skyline and representative-rule selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine frequent itemsets from a basket file and score every rule.
    Mine(MineArgs),
    /// Select rules from a basket or rules CSV by the requested criterion.
    Select(SelectArgs),
    /// Generate a deterministic synthetic basket dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// Basket file: one transaction per line, whitespace-separated items.
    #[arg(long)]
    pub input: PathBuf,
    /// Relative frequency threshold in (0,1], as an exact decimal.
    #[arg(long, default_value = "0.1")]
    pub min_freq: String,
    /// Comma-separated measures: freq,conf,recall,pearl,loev,zhang.
    #[arg(long, default_value = "freq,conf,pearl")]
    pub measures: String,
    /// Rules CSV destination (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rar,
    Skyline,
    Oracle,
    Tb,
    All,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Rar => "rar",
            Mode::Skyline => "skyline",
            Mode::Oracle => "oracle",
            Mode::Tb => "tb",
            Mode::All => "all",
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Basket file, or a rules CSV produced by `mine` (detected by header).
    #[arg(long)]
    pub input: PathBuf,
    /// Mining threshold; ignored when the input is a rules CSV.
    #[arg(long, default_value = "0.1")]
    pub min_freq: String,
    /// Measures to score (basket input) or project (CSV input).
    #[arg(long)]
    pub measures: Option<String>,
    /// Selection criterion; `all` runs skyline, oracle, rar and tb.
    #[arg(long, value_enum, default_value_t = Mode::Rar)]
    pub mode: Mode,
    /// Run the literal pseudocode variant of rar (requires --mode rar).
    #[arg(long)]
    pub faithful_alg1: bool,
    /// Selected-rules CSV destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report destination (stdout if omitted).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// JSONL per-iteration trace (modes that run rar only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// External thresholds JSON for --mode tb: {"freq": "0.10", ...}.
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of distinct items (labeled i0, i1, ...).
    #[arg(long, default_value_t = 20)]
    pub items: u32,
    /// Number of transactions to draw.
    #[arg(long, default_value_t = 500)]
    pub transactions: u64,
    /// Expected fraction of items per transaction, in [0,1].
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    /// RNG seed; equal seeds give byte-identical output.
    #[arg(long)]
    pub seed: u64,
    /// Basket destination (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct DatasetSummary {
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transactions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_items: Option<usize>,
    /// Mean items per transaction, truncated to 2 decimals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg_transaction_size: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_freq: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub imported_rules: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct ComparisonCounts {
    pub rar: u64,
    pub oracle: u64,
}

/// The machine-readable selection result. Fields that a mode does not
/// compute serialize as null.
#[derive(Debug, Serialize)]
pub struct SelectionReport {
    pub dataset: DatasetSummary,
    pub mode: String,
    pub measures: Vec<String>,
    pub all_rules: usize,
    pub sky_rules: Option<usize>,
    pub rr_rules: Option<usize>,
    pub tb_rules: Option<usize>,
    pub thresholds: Option<BTreeMap<String, String>>,
    pub gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparisons: Option<ComparisonCounts>,
    pub selected_ids: Vec<u32>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mine(args) => run_mine(args),
        Command::Select(args) => run_select(args),
        Command::Synth(args) => run_synth(args),
    }
}

/// Opens `path` for reading; a missing file is a usage error, anything
/// else an IO error.
fn read_input(path: &Path) -> Result<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Err(Error::Input(format!(
            "input file not found: {}",
            path.display()
        ))),
        Err(e) => Err(Error::Io(e)),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_csv_header<W: Write>(out: W, measures: &[Measure]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string(), "premise".into(), "conclusion".into()];
    header.extend(measures.iter().map(|m| m.short_name().to_string()));
    w.write_record(&header)
        .map_err(|e| Error::Input(format!("CSV write failed: {e}")))?;
    w.flush()?;
    Ok(())
}

pub fn run_mine(args: MineArgs) -> Result<()> {
    let started = Instant::now();
    let text = read_input(&args.input)?;
    let ds = TransactionDataset::load_basket_str(&text)?;
    let min_freq = parse_decimal(&args.min_freq)?;
    let measures = parse_measure_list(&args.measures)?;
    let frequent = mine_frequent(&ds, &min_freq)?;
    let rules = generate_rules(&frequent);
    let n_rules = rules.len();
    let stats = ds.stats();

    let out = open_output(args.out.as_deref())?;
    if rules.is_empty() {
        write_csv_header(out, &measures)?;
        eprintln!(
            "warning: no rules at min_freq {} ({} frequent itemsets)",
            args.min_freq,
            frequent.len()
        );
    } else {
        let table = RelationalTable::build(&ds, rules, measures)?;
        table.write_csv(ds.vocab(), out)?;
    }
    eprintln!(
        "{} transactions, {} distinct items, avg transaction size {}; \
         {} frequent itemsets, {} rules; {:.1?}",
        stats.transaction_count,
        stats.item_count,
        trunc2(&stats.avg_transaction_size),
        frequent.len(),
        n_rules,
        started.elapsed()
    );
    Ok(())
}

enum Source {
    Basket(TransactionDataset),
    Imported(Vocabulary),
}

impl Source {
    fn vocab(&self) -> &Vocabulary {
        match self {
            Source::Basket(ds) => ds.vocab(),
            Source::Imported(v) => v,
        }
    }
}

pub fn run_select(args: SelectArgs) -> Result<()> {
    if args.faithful_alg1 && args.mode != Mode::Rar {
        return Err(Error::Parameter(
            "--faithful-alg1 requires --mode rar".into(),
        ));
    }
    if args.thresholds.is_some() && args.mode != Mode::Tb {
        return Err(Error::Parameter("--thresholds requires --mode tb".into()));
    }

    let text = read_input(&args.input)?;
    let is_rules_csv = text.trim_start().starts_with("id,premise,conclusion");

    let (raw, source, summary) = if is_rules_csv {
        let (full, vocab) = RelationalTable::read_csv(text.as_bytes())?;
        let table = match &args.measures {
            Some(list) => full.project(&parse_measure_list(list)?)?,
            None => full,
        };
        let summary = DatasetSummary {
            source: args.input.display().to_string(),
            transactions: None,
            distinct_items: None,
            avg_transaction_size: None,
            min_freq: None,
            imported_rules: Some(table.len()),
        };
        (table, Source::Imported(vocab), summary)
    } else {
        let ds = TransactionDataset::load_basket_str(&text)?;
        let min_freq = parse_decimal(&args.min_freq)?;
        let measures = parse_measure_list(args.measures.as_deref().unwrap_or("freq,conf,pearl"))?;
        let t0 = Instant::now();
        let frequent = mine_frequent(&ds, &min_freq)?;
        let rules = generate_rules(&frequent);
        eprintln!(
            "mined {} frequent itemsets, {} rules in {:.1?}",
            frequent.len(),
            rules.len(),
            t0.elapsed()
        );
        let stats = ds.stats();
        let summary = DatasetSummary {
            source: args.input.display().to_string(),
            transactions: Some(stats.transaction_count),
            distinct_items: Some(stats.item_count),
            avg_transaction_size: Some(trunc2(&stats.avg_transaction_size)),
            min_freq: Some(render_decimal(&min_freq, CSV_SIG_DIGITS)),
            imported_rules: None,
        };
        if rules.is_empty() {
            eprintln!("warning: no rules to select from");
            let report = SelectionReport {
                dataset: summary,
                mode: args.mode.name().to_string(),
                measures: measures
                    .iter()
                    .map(|m| m.short_name().to_string())
                    .collect(),
                all_rules: 0,
                sky_rules: None,
                rr_rules: None,
                tb_rules: None,
                thresholds: None,
                gain: None,
                comparisons: None,
                selected_ids: Vec::new(),
            };
            return write_report(&report, args.report.as_deref());
        }
        let t0 = Instant::now();
        let table = RelationalTable::build(&ds, rules, measures)?;
        eprintln!("scored {} rules in {:.1?}", table.len(), t0.elapsed());
        (table, Source::Basket(ds), summary)
    };

    let rar_mode = if args.faithful_alg1 {
        RarMode::FaithfulAlg1
    } else {
        RarMode::Definitional
    };
    let needs_rar = matches!(args.mode, Mode::Rar | Mode::All)
        || (args.mode == Mode::Tb && args.thresholds.is_none());

    let mut sky: Option<Vec<usize>> = None;
    let mut oracle: Option<Vec<usize>> = None;
    let mut oracle_cost = 0u64;
    let mut rar_out: Option<RarOutcome> = None;
    let mut thresholds: Option<ThresholdVector> = None;
    let mut tb: Option<Vec<usize>> = None;

    if matches!(args.mode, Mode::Skyline | Mode::All) {
        let t0 = Instant::now();
        let counter = PairCounter::new();
        sky = Some(skyline_naive_counted(&raw, &counter));
        eprintln!(
            "skyline: {} rules in {:.1?} ({} comparisons)",
            sky.as_ref().unwrap().len(),
            t0.elapsed(),
            counter.get()
        );
    }
    if matches!(args.mode, Mode::Oracle | Mode::All) {
        let t0 = Instant::now();
        let counter = PairCounter::new();
        oracle = Some(representative_oracle_counted(&raw, &counter));
        oracle_cost = counter.get();
        eprintln!(
            "oracle: {} rules in {:.1?} ({} comparisons)",
            oracle.as_ref().unwrap().len(),
            t0.elapsed(),
            oracle_cost
        );
    }
    if needs_rar {
        // Selection works on normalized values; thresholds and the
        // baseline always use the raw table.
        let normalized;
        let rar_input = if raw.all_measures_share_unit_interval() {
            &raw
        } else {
            let t0 = Instant::now();
            normalized = raw.normalize()?;
            eprintln!(
                "normalized {} measures in {:.1?}",
                raw.measures().len(),
                t0.elapsed()
            );
            &normalized
        };
        let t0 = Instant::now();
        let out = rar_trace(rar_input, rar_mode)?;
        eprintln!(
            "rar: {} rules in {:.1?} ({} comparisons)",
            out.rr_rows.len(),
            t0.elapsed(),
            out.comparisons
        );
        rar_out = Some(out);
    }
    if args.mode == Mode::Tb || args.mode == Mode::All {
        let th = match &args.thresholds {
            Some(path) => parse_thresholds_file(path, raw.measures())?,
            None => thresholds_from_rules(&raw, &rar_out.as_ref().unwrap().rr_rows)?,
        };
        let t0 = Instant::now();
        let rows = tb_rules(&raw, &th)?;
        eprintln!("tb: {} rules in {:.1?}", rows.len(), t0.elapsed());
        thresholds = Some(th);
        tb = Some(rows);
    }

    if args.mode == Mode::All {
        let rar_set: BTreeSet<usize> = rar_out.as_ref().unwrap().rr_rows.iter().copied().collect();
        let oracle_set: BTreeSet<usize> = oracle.as_ref().unwrap().iter().copied().collect();
        assert_eq!(
            rar_set, oracle_set,
            "rar output diverged from the representative oracle"
        );
        let tb_set: BTreeSet<usize> = tb.as_ref().unwrap().iter().copied().collect();
        for s in sky.as_ref().unwrap() {
            assert!(
                rar_set.contains(s),
                "skyline rule not in the representative set"
            );
        }
        for r in &rar_set {
            assert!(
                tb_set.contains(r),
                "representative rule below its own thresholds"
            );
        }
    }

    // Rows the chosen mode stands behind, in that mode's native order.
    let selected_rows: &[usize] = match args.mode {
        Mode::Rar | Mode::All => &rar_out.as_ref().unwrap().rr_rows,
        Mode::Skyline => sky.as_ref().unwrap(),
        Mode::Oracle => oracle.as_ref().unwrap(),
        Mode::Tb => tb.as_ref().unwrap(),
    };
    let selected_ids: Vec<u32> = selected_rows.iter().map(|&r| raw.rules()[r].id).collect();

    if let Some(path) = &args.trace {
        let out = rar_out
            .as_ref()
            .ok_or_else(|| Error::Parameter("--trace requires a mode that runs rar".into()))?;
        let mut w = BufWriter::new(File::create(path)?);
        for it in &out.iterations {
            let line = serde_json::to_string(it).expect("trace record serializes");
            w.write_all(line.as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }

    if let Some(path) = &args.out {
        if selected_rows.is_empty() {
            eprintln!("warning: empty selection, writing header-only CSV");
            write_csv_header(BufWriter::new(File::create(path)?), raw.measures())?;
        } else {
            let sub = sub_table(&raw, selected_rows)?;
            sub.write_csv(source.vocab(), BufWriter::new(File::create(path)?))?;
        }
    }

    let gain_value = match (&tb, &rar_out) {
        (Some(t), Some(r)) if args.thresholds.is_none() => {
            Some(to_f64(&gain(t.len(), r.rr_rows.len())?))
        }
        _ => None,
    };
    let report = SelectionReport {
        dataset: summary,
        mode: args.mode.name().to_string(),
        measures: raw
            .measures()
            .iter()
            .map(|m| m.short_name().to_string())
            .collect(),
        all_rules: raw.len(),
        sky_rules: sky.as_ref().map(Vec::len),
        rr_rules: rar_out
            .as_ref()
            .map(|o| o.rr_rows.len())
            .or(oracle.as_ref().map(Vec::len)),
        tb_rules: tb.as_ref().map(Vec::len),
        thresholds: thresholds.as_ref().map(|th| {
            raw.measures()
                .iter()
                .zip(&th.eps)
                .map(|(m, v)| {
                    (
                        m.short_name().to_string(),
                        render_decimal(v, CSV_SIG_DIGITS),
                    )
                })
                .collect()
        }),
        gain: gain_value,
        comparisons: if args.mode == Mode::All {
            // oracle_cost already covers the oracle's own skyline pass.
            Some(ComparisonCounts {
                rar: rar_out.as_ref().unwrap().comparisons,
                oracle: oracle_cost,
            })
        } else {
            None
        },
        selected_ids,
    };
    write_report(&report, args.report.as_deref())
}

fn write_report(report: &SelectionReport, path: Option<&Path>) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    match path {
        Some(p) => std::fs::write(p, json)?,
        None => io::stdout().lock().write_all(json.as_bytes())?,
    }
    Ok(())
}

/// A table holding only `rows` of `t`, in the given order.
fn sub_table(t: &RelationalTable, rows: &[usize]) -> Result<RelationalTable> {
    let rules = rows.iter().map(|&r| t.rules()[r].clone()).collect();
    let mut values = Vec::with_capacity(rows.len() * t.measures().len());
    for &r in rows {
        values.extend(t.vector(r).iter().cloned());
    }
    RelationalTable::from_parts(rules, t.measures().to_vec(), values, t.is_normalized())
}

fn parse_thresholds_file(path: &Path, measures: &[Measure]) -> Result<ThresholdVector> {
    let text = read_input(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("malformed thresholds JSON: {e}")))?;
    let obj = value.as_object().ok_or_else(|| {
        Error::Input("thresholds file must be a JSON object keyed by measure".into())
    })?;
    let known: Vec<&str> = measures.iter().map(|m| m.short_name()).collect();
    for key in obj.keys() {
        if !known.contains(&key.as_str()) {
            return Err(Error::Parameter(format!(
                "threshold for unknown measure `{key}`; the table has: {}",
                known.join(", ")
            )));
        }
    }
    let mut eps = Vec::with_capacity(measures.len());
    for m in measures {
        let v = obj.get(m.short_name()).ok_or_else(|| {
            Error::Parameter(format!(
                "thresholds file is missing measure `{}`",
                m.short_name()
            ))
        })?;
        let r = match v {
            serde_json::Value::String(s) => parse_decimal(s)?,
            serde_json::Value::Number(n) => parse_decimal(&n.to_string())?,
            _ => {
                return Err(Error::Input(format!(
                    "threshold for `{}` must be a number or decimal string",
                    m.short_name()
                )))
            }
        };
        eps.push(r);
    }
    Ok(ThresholdVector { eps })
}

pub fn run_synth(args: SynthArgs) -> Result<()> {
    if !args.density.is_finite() || !(0.0..=1.0).contains(&args.density) {
        return Err(Error::Parameter(format!(
            "--density must be in [0,1], got {}",
            args.density
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    // Items get uneven inclusion rates around the requested density so
    // support levels vary; the draw count per transaction is fixed, which
    // keeps output identical for identical seeds.
    let weights: Vec<f64> = (0..args.items)
        .map(|_| args.density * rng.gen_range(0.5..1.5))
        .collect();
    let mut out = open_output(args.out.as_deref())?;
    let mut suppressed = 0u64;
    let mut written = 0u64;
    let mut line = String::new();
    for _ in 0..args.transactions {
        line.clear();
        for (i, w) in weights.iter().enumerate() {
            if rng.gen::<f64>() < *w {
                if !line.is_empty() {
                    line.push(' ');
                }
                line.push('i');
                line.push_str(&i.to_string());
            }
        }
        if line.is_empty() {
            suppressed += 1;
            continue;
        }
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
        written += 1;
    }
    out.flush()?;
    if suppressed > 0 {
        eprintln!("warning: suppressed {suppressed} empty transactions");
    }
    eprintln!(
        "wrote {written} transactions over {} items (seed {})",
        args.items, args.seed
    );
    Ok(())
}
