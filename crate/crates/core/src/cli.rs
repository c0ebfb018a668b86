//! Command-line front end. The `outlying` binary is a thin wrapper around
//! [`run`], which keeps the whole surface testable in-process.
//!
//! Exit codes: 0 success, 1 data or runtime error, 2 usage error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dataset::{read_csv_file, AttributeKind, Condition, Dataset, Explanation};
use crate::error::Error;
use crate::intervals::EmConfig;
use crate::miner::{explain_one, mine, MiningConfig, PairVerdict};
use crate::outlierness::outlierness_with_curve;
use crate::report::{write_curve_tsv, RunReport};
use crate::synth::Unif2;

pub const SEED_ENV: &str = "OUTLYING_SEED";

#[derive(Debug, Parser)]
#[command(name = "outlying", version, about = "Explain what makes a known outlier exceptional")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine all minimal explanation/property pairs for one object.
    Mine(MineArgs),
    /// Evaluate a single explanation/property pair.
    Score(ScoreArgs),
    /// Write the two-cluster uniform dataset with a planted outlier.
    GenUnif2(GenArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Sidecar schema, one `name:numeric|categorical` per line.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// 0-based row index of the outlier.
    #[arg(long)]
    pub outlier: usize,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 0.2, value_parser = unit_interval)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.9, value_parser = unit_interval)]
    pub omega: f64,
    /// Maximum explanation size; capped at the number of attributes.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub kmax: u32,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Annihilation threshold `t` of the mixture fit.
    #[arg(long, default_value_t = 1.0, value_parser = non_negative)]
    pub annihilation: f64,
    /// Initial mixture components (default: floor(sqrt(n))).
    #[arg(long)]
    pub components: Option<usize>,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    pub tol: f64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for one G-curve TSV per pair.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Emit a TSV table instead of JSON lines.
    #[arg(long)]
    pub tsv: bool,
    /// Append a wall-time record to the JSON report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Property attribute name.
    #[arg(long)]
    pub property: String,
    /// Explanation condition, `attr:lo:hi` or `attr=value`; repeatable.
    #[arg(long = "cond", value_parser = parse_condition_spec)]
    pub conditions: Vec<ConditionSpec>,
    #[arg(long, default_value_t = 0.2, value_parser = unit_interval)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.9, value_parser = unit_interval)]
    pub omega: f64,
    /// Write the G curve of the pair to this TSV file.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub size: usize,
    /// Number of auxiliary uniform noise attributes.
    #[arg(long, default_value_t = 1)]
    pub noise: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// A condition as typed on the command line, before name resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionSpec {
    Interval { attribute: String, lo: f64, hi: f64 },
    Equals { attribute: String, value: String },
}

pub fn parse_condition_spec(s: &str) -> Result<ConditionSpec, String> {
    if let Some((attr, value)) = s.split_once('=') {
        if attr.is_empty() || value.is_empty() {
            return Err(format!("malformed condition `{s}`, expected attr=value"));
        }
        return Ok(ConditionSpec::Equals { attribute: attr.into(), value: value.into() });
    }
    let parts: Vec<&str> = s.rsplitn(3, ':').collect();
    let [hi, lo, attr] = parts[..] else {
        return Err(format!("malformed condition `{s}`, expected attr:lo:hi or attr=value"));
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad lower bound in `{s}`"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad upper bound in `{s}`"))?;
    if attr.is_empty() || !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(format!("malformed interval condition `{s}`"));
    }
    Ok(ConditionSpec::Interval { attribute: attr.into(), lo, hi })
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{x} must be a finite non-negative number"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{x} must be positive"))
    }
}

/// Command failure, split by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => Failure::Usage(msg),
            other => Failure::Data(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.into())
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Mine(args) => cmd_mine(&args, stdout, stderr),
        Command::Score(args) => cmd_score(&args, stdout),
        Command::GenUnif2(args) => cmd_gen_unif2(&args, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn load(args: &DataArgs) -> Result<Dataset, Failure> {
    let db = read_csv_file(&args.data, args.schema.as_deref())?;
    if args.outlier >= db.len() {
        return Err(Failure::Usage(format!(
            "--outlier {} is out of range (dataset has {} rows)",
            args.outlier,
            db.len()
        )));
    }
    Ok(db)
}

pub fn cmd_mine(args: &MineArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let db = load(&args.data)?;
    let cfg = MiningConfig {
        support_threshold: args.sigma,
        outlierness_threshold: args.omega,
        max_explanation_size: (args.kmax as usize).min(db.width()),
        outlier: args.data.outlier,
        em: EmConfig {
            initial_components: args.components,
            tolerance: args.tol,
            max_iterations: args.max_iter,
            seed: args.seed,
            annihilation_threshold: args.annihilation,
        },
    };
    let result = mine(&db, &cfg)?;
    let report = RunReport::new(
        &db,
        &cfg,
        &result,
        Some(args.data.data.display().to_string()),
        args.data.schema.as_ref().map(|p| p.display().to_string()),
    );

    let write = |w: &mut dyn Write| -> Result<(), Failure> {
        if args.tsv {
            report.write_tsv(w)?;
        } else {
            report.write_jsonl(w, args.timings)?;
        }
        Ok(())
    };
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write(&mut w)?;
            w.flush()?;
        }
        None => write(stdout)?,
    }

    if let Some(dir) = &args.curves {
        fs::create_dir_all(dir)?;
        for (rank, pair) in result.pairs.iter().enumerate() {
            let cdf = pair.g_curve(&db, cfg.outlier)?;
            let name = format!("pair-{:03}-{}.tsv", rank + 1, db.schema()[pair.property].name);
            let mut w = BufWriter::new(File::create(dir.join(name))?);
            write_curve_tsv(&mut w, &cdf)?;
            w.flush()?;
        }
    }

    let _ = serde_json::to_writer(&mut *stderr, &report.timings);
    let _ = writeln!(stderr);
    Ok(())
}

#[derive(Serialize)]
struct ScoreRecord<'a> {
    record: &'static str,
    property: &'a str,
    support: f64,
    raw: Option<f64>,
    score: Option<f64>,
    query_density: Option<f64>,
    area_above: Option<f64>,
    area_below: Option<f64>,
    verdict: PairVerdict,
}

fn resolve(db: &Dataset, spec: &ConditionSpec) -> Result<Condition, Failure> {
    let name = match spec {
        ConditionSpec::Interval { attribute, .. } | ConditionSpec::Equals { attribute, .. } => attribute,
    };
    let attr = db
        .attribute_by_name(name)
        .ok_or_else(|| Failure::Usage(format!("unknown attribute `{name}`")))?;
    match (spec, attr.kind) {
        (ConditionSpec::Interval { lo, hi, .. }, AttributeKind::Numeric) => {
            Ok(Condition::interval(attr.index, *lo, *hi)?)
        }
        (ConditionSpec::Equals { value, .. }, AttributeKind::Categorical) => {
            Ok(Condition::equals(attr.index, value.clone()))
        }
        (ConditionSpec::Equals { value, .. }, AttributeKind::Numeric) => {
            let v: f64 = value
                .parse()
                .map_err(|_| Failure::Usage(format!("`{value}` is not a number for `{name}`")))?;
            Ok(Condition::interval(attr.index, v, v)?)
        }
        (ConditionSpec::Interval { .. }, AttributeKind::Categorical) => Err(Failure::Usage(format!(
            "`{name}` is categorical; use {name}=value"
        ))),
    }
}

pub fn cmd_score(args: &ScoreArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let db = load(&args.data)?;
    let property = db
        .attribute_by_name(&args.property)
        .ok_or_else(|| Failure::Usage(format!("unknown property `{}`", args.property)))?
        .index;
    let conditions = args
        .conditions
        .iter()
        .map(|s| resolve(&db, s))
        .collect::<Result<Vec<_>, _>>()?;
    let explanation = Explanation::new(conditions).map_err(|e| Failure::Usage(e.to_string()))?;
    let cfg = MiningConfig {
        support_threshold: args.sigma,
        outlierness_threshold: args.omega,
        max_explanation_size: db.width(),
        outlier: args.data.outlier,
        em: EmConfig::default(),
    };
    let eval = explain_one(&db, &cfg, &explanation, property)?;
    let record = ScoreRecord {
        record: "score",
        property: &args.property,
        support: eval.support,
        raw: eval.score.map(|s| s.raw),
        score: eval.score.map(|s| s.value),
        query_density: eval.score.map(|s| s.query_density),
        area_above: eval.score.map(|s| s.area_above),
        area_below: eval.score.map(|s| s.area_below),
        verdict: eval.verdict,
    };
    serde_json::to_writer(&mut *stdout, &record).map_err(Error::from)?;
    writeln!(stdout)?;

    if let Some(path) = &args.curve {
        let view = crate::dataset::select(&db, &explanation)?;
        let (_, cdf) = outlierness_with_curve(&view, property, cfg.outlier)?;
        let mut w = BufWriter::new(File::create(path)?);
        write_curve_tsv(&mut w, &cdf)?;
        w.flush()?;
    }
    Ok(())
}

pub fn cmd_gen_unif2(args: &GenArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let data = Unif2::generate(args.seed, args.size, args.noise)?;
    let mut w = BufWriter::new(File::create(&args.out)?);
    data.write_csv(&mut w)?;
    w.flush()?;
    writeln!(stdout, "{}", data.outlier_row())?;
    Ok(())
}
