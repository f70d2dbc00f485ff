//! Command-line layer: file formats, subcommands and run reports.
//!
//! Every command turns parsed arguments into a [`RunReport`] plus an exit code
//! (0 clean, 1 failures or violations found, 2 bad input, 3 soundness
//! failure). Reports are deterministic for identical inputs and seeds; wall
//! time is only included with `--timing`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{bracket_sets, CertifiedSets, ScanConfig, Verdict};
use crate::cellset::CellSet;
use crate::chessboard::{
    enumeration_size, exhaustive_verify, lebesgue_witness, randomized_verify, separating_level, steinhaus_witness,
    IntegerField, Labeling, VerifyMode, DEFAULT_ENUM_GUARD,
};
use crate::error::{Error, Result};
use crate::field::{ExprField, ScalarField, VertexField};
use crate::grid::GridSpec;
use crate::oracle::compare_with_engine;
use crate::synthesis::{build_function, validate_spec, ConnSepSpec};

// ---------------------------------------------------------------- formats

/// `{n, k, labels}`: colors `1..=n`, row-major with axis 1 fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelingFile {
    pub n: usize,
    pub k: usize,
    pub labels: Vec<u8>,
}

/// `{n, k, cells}`: 1-based multi-indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSetFile {
    pub n: usize,
    pub k: usize,
    pub cells: Vec<Vec<usize>>,
}

/// `{n, k, values}`: one value per vertex, `(k+1)^n` of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexFieldFile {
    pub n: usize,
    pub k: usize,
    pub values: Vec<f64>,
}

/// `{n, k, values}`: one integer per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegerFieldFile {
    pub n: usize,
    pub k: usize,
    pub values: Vec<i64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FieldFile {
    Vertex(VertexFieldFile),
    Expr(ExprField),
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn parse_grid(n: usize, k: usize) -> Result<GridSpec> {
    GridSpec::new(n, k).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_labeling(text: &str) -> Result<Labeling> {
    let f: LabelingFile = parse_json(text, "labeling")?;
    Labeling::new(parse_grid(f.n, f.k)?, f.labels)
}

pub fn parse_cell_set(text: &str) -> Result<CellSet> {
    let f: CellSetFile = parse_json(text, "cell set")?;
    let spec = parse_grid(f.n, f.k)?;
    let cells = f.cells.iter().map(|c| spec.cell(c)).collect::<Result<Vec<_>>>().map_err(|e| Error::Parse(e.to_string()))?;
    CellSet::from_cells(spec, &cells)
}

pub fn parse_integer_field(text: &str) -> Result<IntegerField> {
    let f: IntegerFieldFile = parse_json(text, "integer field")?;
    let spec = parse_grid(f.n, f.k)?;
    if f.values.len() != spec.cell_count() {
        return Err(Error::Parse(format!("integer field on {spec} needs {} values, got {}", spec.cell_count(), f.values.len())));
    }
    IntegerField::new(spec, f.values)
}

/// A vertex field (`values` key) or an expression field (`expr` key).
pub fn parse_field(text: &str) -> Result<ScalarField> {
    match parse_json::<FieldFile>(text, "field")? {
        FieldFile::Vertex(v) => Ok(VertexField::new(parse_grid(v.n, v.k)?, v.values)?.into()),
        FieldFile::Expr(e) => Ok(ExprField::new(e.n, e.expr).map_err(|e| Error::Parse(e.to_string()))?.into()),
    }
}

/// A Conn/Sep specification; every number must lie in `[0, 1]`.
pub fn parse_spec(text: &str) -> Result<ConnSepSpec> {
    let s: ConnSepSpec = parse_json(text, "spec")?;
    for set in s.a.iter().chain(&s.b) {
        if let Some((lo, hi)) = set.bounds() {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(Error::Parse(format!("prescribed set {set} is not a subinterval of [0, 1]")));
            }
        }
    }
    Ok(s)
}

pub fn cell_set_file(set: &CellSet) -> CellSetFile {
    let spec = set.spec();
    CellSetFile { n: spec.n(), k: spec.k(), cells: set.cells().into_iter().map(|c| c.index().to_vec()).collect() }
}

/// Fixed-precision decimal used for every level and coordinate in reports.
pub fn decimal(x: f64) -> String {
    format!("{x:.12}")
}

fn decimal_pairs(v: &[(f64, f64)]) -> Vec<[String; 2]> {
    v.iter().map(|&(a, b)| [decimal(a), decimal(b)]).collect()
}

// ---------------------------------------------------------------- report

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the arguments and every input file.
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub counts: BTreeMap<String, u64>,
    pub results: Value,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

/// A report with the exit code it implies.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
}

struct Digest256(Sha256);

impl Digest256 {
    fn new(command: &str, args: &impl Serialize) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(serde_json::to_vec(args).expect("arguments serialize"));
        Digest256(h)
    }

    fn file(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.0.update((text.len() as u64).to_le_bytes());
        self.0.update(text.as_bytes());
        Ok(text)
    }

    fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

fn report(command: &str, digest: Digest256, seed: Option<u64>, counts: &[(&str, u64)], results: Value) -> RunReport {
    RunReport {
        command: command.to_string(),
        inputs_digest: digest.finish(),
        seed,
        counts: counts.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        results,
        warnings: Vec::new(),
        elapsed_ms: None,
    }
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

// ---------------------------------------------------------------- arguments

#[derive(Debug, Parser)]
#[command(name = "cubeconn", version, about = "Exact connect/separate analysis of cell sets in the subdivided cube")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Add wall time to the report (breaks byte-for-byte replay).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chessboard witness for a labeling, or for a cover by n cell sets.
    Witness(WitnessArgs),
    /// Check the chessboard theorems over many instances.
    Verify(VerifyArgs),
    /// Connecting or separating level of an integer field.
    Level(LevelArgs),
    /// Certified Conn/Sep sets of a scalar field.
    Analyze(AnalyzeArgs),
    /// Build a field with prescribed Conn/Sep sets.
    Synthesize(SynthesizeArgs),
    /// Compare the topology engine with the face-lattice oracle.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    /// Labeling file.
    #[arg(required_unless_present = "cover", conflicts_with = "cover")]
    pub labeling: Option<PathBuf>,
    /// Require links of dimension at least i − 1.
    #[arg(long)]
    pub generalized: bool,
    /// n cell-set files covering the grid (covering form of the theorem).
    #[arg(long, num_args = 1..)]
    pub cover: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "plain")]
    pub mode: VerifyMode,
    /// Largest enumeration attempted exhaustively.
    #[arg(long, default_value_t = DEFAULT_ENUM_GUARD)]
    pub max_enum: u128,
    /// Random trials; used when the enumeration exceeds the guard, or always
    /// with --randomized.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub randomized: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LevelArgs {
    /// Integer field file `{n, k, values}` with one value per cell.
    pub field: PathBuf,
    /// Axis to analyze; all axes when omitted.
    #[arg(long)]
    pub axis: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Vertex or expression field file.
    pub field: PathBuf,
    /// Axes to report (default: all).
    #[arg(long, value_delimiter = ',')]
    pub axes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
    pub kschedule: Vec<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub dp: f64,
    /// Include every scanned level, not only the merged sets.
    #[arg(long)]
    pub levels: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthesizeArgs {
    /// Specification file `{n, A, B}`.
    pub spec: PathBuf,
    /// Where to write the expression field.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid schedule for a round-trip analysis of the result.
    #[arg(long, value_delimiter = ',')]
    pub verify_k: Vec<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub dp: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Every cell set of the grid.
    #[arg(long, conflicts_with = "trials")]
    pub exhaustive: bool,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

// ---------------------------------------------------------------- commands

pub fn cmd_witness(args: &WitnessArgs) -> Result<Outcome> {
    let mut digest = Digest256::new("witness", args);
    let (witness, form) = match &args.labeling {
        Some(path) => {
            let labeling = parse_labeling(&digest.file(path)?)?;
            (steinhaus_witness(&labeling, args.generalized)?, if args.generalized { "generalized" } else { "plain" })
        }
        None => {
            let sets = args.cover.iter().map(|p| parse_cell_set(&digest.file(p)?)).collect::<Result<Vec<_>>>()?;
            (lebesgue_witness(&sets)?, "cover")
        }
    };
    let len = witness.chain.len() as u64;
    let results = json!({ "form": form, "color": witness.axis, "chain": witness.chain });
    Ok(Outcome { report: report("witness", digest, None, &[("chain_length", len)], results), exit_code: 0 })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let digest = Digest256::new("verify", args);
    let size = enumeration_size(args.n, args.k, args.mode)?;
    let randomized = args.randomized || size > args.max_enum;
    let (r, seed) = if randomized {
        let Some(trials) = args.trials else {
            return Err(Error::Usage(format!(
                "enumeration of {size} instances exceeds --max-enum {}; pass --trials for a randomized run",
                args.max_enum
            )));
        };
        (randomized_verify(args.n, args.k, args.mode, args.seed, trials)?, Some(args.seed))
    } else {
        (exhaustive_verify(args.n, args.k, args.mode, args.max_enum)?, None)
    };
    let counts = [("total", r.total), ("checked", r.checked), ("failures", r.failures)];
    let results = json!({
        "mode": args.mode,
        "exhaustive": !randomized,
        "histogram": r.histogram,
        "max_chain_len": r.max_chain_len,
        "failure_samples": r.failure_samples,
    });
    let exit_code = i32::from(r.failures > 0);
    Ok(Outcome { report: report("verify", digest, seed, &counts, results), exit_code })
}

pub fn cmd_level(args: &LevelArgs) -> Result<Outcome> {
    let mut digest = Digest256::new("level", args);
    let g = parse_integer_field(&digest.file(&args.field)?)?;
    let axes: Vec<usize> = match args.axis {
        Some(i) => vec![i],
        None => (1..=g.spec().n()).collect(),
    };
    let mut outcomes = Vec::new();
    for &i in &axes {
        outcomes.push(json!({ "axis": i, "outcome": separating_level(&g, i)? }));
    }
    let results = json!({ "axes": outcomes });
    Ok(Outcome { report: report("level", digest, None, &[("axes", axes.len() as u64)], results), exit_code: 0 })
}

fn certified_json(sets: &CertifiedSets, with_levels: bool) -> Value {
    let verdict = |v: &Verdict| to_value(v);
    let scans: Vec<Value> = sets
        .scans
        .iter()
        .map(|scan| {
            let axes: Vec<Value> = scan
                .axes
                .iter()
                .map(|a| {
                    json!({
                        "axis": a.axis,
                        "conn_certified_in": decimal_pairs(&a.conn_certified_in),
                        "conn_certified_out": decimal_pairs(&a.conn_certified_out),
                        "sep_certified_in": decimal_pairs(&a.sep_certified_in),
                        "sep_certified_out": decimal_pairs(&a.sep_certified_out),
                    })
                })
                .collect();
            let mut v = json!({
                "k": scan.k,
                "value_range": [decimal(scan.value_range.lo), decimal(scan.value_range.hi)],
                "axes": axes,
            });
            if with_levels {
                v["levels"] = scan
                    .levels
                    .iter()
                    .map(|lv| {
                        json!({
                            "p": decimal(lv.p),
                            "conn": lv.conn.iter().map(verdict).collect::<Vec<_>>(),
                            "sep": lv.sep.iter().map(verdict).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
            }
            v
        })
        .collect();
    json!({ "dp": decimal(sets.dp), "scans": scans, "nesting_violations": sets.nesting_violations })
}

fn undetermined_warnings(sets: &CertifiedSets) -> Vec<String> {
    sets.undetermined_axes()
        .into_iter()
        .map(|a| format!("undetermined: nothing certified in Conn or Sep on axis {a} at k={}", sets.finest().k))
        .collect()
}

fn scan_counts(sets: &CertifiedSets) -> Vec<(&'static str, u64)> {
    let levels = sets.scans.iter().map(|s| s.levels.len() as u64).sum();
    vec![
        ("grids", sets.scans.len() as u64),
        ("levels", levels),
        ("nesting_violations", sets.nesting_violations.len() as u64),
    ]
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let mut digest = Digest256::new("analyze", args);
    let field = parse_field(&digest.file(&args.field)?)?;
    let axes = if args.axes.is_empty() { (1..=field.dim()).collect() } else { args.axes.clone() };
    let sets = bracket_sets(&field, &ScanConfig::new(axes, args.kschedule.clone(), args.dp))?;
    let mut r = report("analyze", digest, None, &scan_counts(&sets), certified_json(&sets, args.levels));
    r.warnings = undetermined_warnings(&sets);
    let exit_code = i32::from(!sets.nesting_violations.is_empty());
    Ok(Outcome { report: r, exit_code })
}

/// Levels where a certified verdict contradicts the prescribed sets.
pub fn ground_truth_violations(spec: &ConnSepSpec, sets: &CertifiedSets) -> Vec<String> {
    let mut out = Vec::new();
    for scan in &sets.scans {
        for lv in &scan.levels {
            for s in 0..spec.n {
                for (what, v, set) in [("conn", lv.conn[s], &spec.a[s]), ("sep", lv.sep[s], &spec.b[s])] {
                    let bad = match v {
                        Verdict::In => !set.contains(lv.p),
                        Verdict::Out => set.contains(lv.p),
                        Verdict::Undetermined => false,
                    };
                    if bad {
                        out.push(format!(
                            "k={} level {}: {what} on axis {} certified {v:?}, prescribed {set}",
                            scan.k,
                            decimal(lv.p),
                            s + 1
                        ));
                    }
                }
            }
        }
    }
    out
}

pub fn cmd_synthesize(args: &SynthesizeArgs) -> Result<Outcome> {
    let mut digest = Digest256::new("synthesize", args);
    let spec = parse_spec(&digest.file(&args.spec)?)?;
    if let Some(v) = validate_spec(&spec)? {
        let results = json!({ "valid": false, "violation": v, "message": v.to_string() });
        return Ok(Outcome { report: report("synthesize", digest, None, &[], results), exit_code: 1 });
    }
    let f = build_function(&spec)?;
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&f.field).expect("field serializes");
        std::fs::write(path, text + "\n")?;
    }
    let mut results = json!({
        "valid": true,
        "branch": f.branch,
        "permutation": f.permutation,
        "elements": f.elements,
        "lipschitz_bound": decimal(f.lipschitz_bound),
    });
    if args.out.is_none() {
        results["field"] = to_value(&f.field);
    }
    let mut counts = vec![("elements", f.elements.len() as u64)];
    let mut exit_code = 0;
    if !args.verify_k.is_empty() {
        let axes = (1..=spec.n).collect();
        let sets = bracket_sets(&f.scalar(), &ScanConfig::new(axes, args.verify_k.clone(), args.dp))?;
        let violations = ground_truth_violations(&spec, &sets);
        let pass = violations.is_empty() && sets.nesting_violations.is_empty();
        exit_code = i32::from(!pass);
        counts.extend(scan_counts(&sets));
        counts.push(("ground_truth_violations", violations.len() as u64));
        results["round_trip"] = json!({
            "pass": pass,
            "violations": violations,
            "certified": certified_json(&sets, false),
        });
    }
    Ok(Outcome { report: report("synthesize", digest, None, &counts, results), exit_code })
}

/// Largest grid checked exhaustively by `oracle-check`.
const ORACLE_EXHAUSTIVE_CELLS: usize = 24;

pub fn cmd_oracle_check(args: &OracleArgs) -> Result<Outcome> {
    let digest = Digest256::new("oracle-check", args);
    let spec = GridSpec::new(args.n, args.k)?;
    let cells = spec.cell_count();
    let sets: Vec<CellSet> = if args.exhaustive {
        if cells > ORACLE_EXHAUSTIVE_CELLS {
            return Err(Error::SizeGuard {
                what: format!("cell sets of {spec}"),
                size: 1u128 << cells.min(127),
                limit: 1u128 << ORACLE_EXHAUSTIVE_CELLS,
            });
        }
        (0..1u64 << cells).map(|m| CellSet::from_mask(spec, m)).collect()
    } else {
        let Some(trials) = args.trials else {
            return Err(Error::usage("pass --exhaustive or --trials"));
        };
        (0..trials)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(t));
                let density: f64 = rng.gen_range(0.1..0.9);
                CellSet::from_fn(spec, |_| rng.gen_bool(density))
            })
            .collect()
    };
    let found = sets.par_iter().map(compare_with_engine).collect::<Result<Vec<_>>>()?;
    let mismatches: Vec<_> = found.into_iter().flatten().collect();
    let counts = [("checked", sets.len() as u64), ("mismatches", mismatches.len() as u64)];
    let samples: Vec<_> = mismatches.iter().take(5).collect();
    let results = json!({ "exhaustive": args.exhaustive, "mismatch_samples": samples });
    let seed = (!args.exhaustive).then_some(args.seed);
    Ok(Outcome { report: report("oracle-check", digest, seed, &counts, results), exit_code: i32::from(!mismatches.is_empty()) })
}

// ---------------------------------------------------------------- driver

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Soundness(_) => 3,
        _ => 2,
    }
}

fn out_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Witness(a) => a.out.as_deref(),
        Command::Verify(a) => a.out.as_deref(),
        Command::Level(a) => a.out.as_deref(),
        Command::Analyze(a) => a.out.as_deref(),
        // synthesize writes the field to --out; its report goes to stdout
        Command::Synthesize(_) => None,
        Command::OracleCheck(a) => a.out.as_deref(),
    }
}

pub fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Witness(a) => cmd_witness(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Level(a) => cmd_level(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::OracleCheck(a) => cmd_oracle_check(a),
    }
}

/// Runs a parsed command line, writes the report, returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("warning: --jobs ignored: {e}");
        }
    }
    let start = Instant::now();
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    let mut report = outcome.report;
    if cli.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis());
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match out_path(&cli.command) {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    outcome.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_have_fixed_precision() {
        assert_eq!(decimal(0.5), "0.500000000000");
        assert_eq!(decimal(-0.25), "-0.250000000000");
    }

    #[test]
    fn spec_values_outside_unit_interval_are_rejected() {
        let bad = r#"{"n": 2, "A": [null, [0.2, 1.5]], "B": [[0.2, 0.6], null]}"#;
        assert!(matches!(parse_spec(bad), Err(Error::Parse(_))));
        let ok = r#"{"n": 2, "A": [null, [0.2, 0.6]], "B": [[0.2, 0.6], null]}"#;
        assert!(parse_spec(ok).is_ok());
    }

    #[test]
    fn field_files_of_both_kinds_parse() {
        let v = parse_field(r#"{"n": 1, "k": 2, "values": [0, 0.5, 1]}"#).unwrap();
        assert!(matches!(v, ScalarField::Vertex(_)));
        let e = parse_field(r#"{"n": 2, "expr": {"op": "coord", "axis": 1}}"#).unwrap();
        assert!(matches!(e, ScalarField::Expr(_)));
        assert!(matches!(parse_field(r#"{"n": 2, "expr": {"op": "coord", "axis": 3}}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_field("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn labeling_color_zero_is_a_parse_error() {
        assert!(matches!(parse_labeling(r#"{"n": 2, "k": 2, "labels": [0, 1, 1, 1]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn cell_set_round_trips_through_its_file() {
        let set = parse_cell_set(r#"{"n": 2, "k": 3, "cells": [[1, 1], [3, 2]]}"#).unwrap();
        assert_eq!(set.len(), 2);
        let text = serde_json::to_string(&cell_set_file(&set)).unwrap();
        assert_eq!(parse_cell_set(&text).unwrap(), set);
        assert!(parse_cell_set(r#"{"n": 2, "k": 3, "cells": [[4, 1]]}"#).is_err());
    }
}
