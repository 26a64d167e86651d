//! The `diagflow` command line.
//!
//! Exit codes of `classify`: 0 Minimal, 10 NotMinimal, 11 NotApplicable,
//! 1 on any error. Every run appends a [`RunRecord`] to the record file.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bianchi::{self, BianchiMatrix, BianchiMatrixJson, Classifier, QuadraticTrace, Verdict};
use crate::flows::{self, log_ball_grid, RootIndex};
use crate::forms::{self, CubicOrderSpec, FormSpec, RationalVerdict};
use crate::lattice::{self, UnimodularLattice};
use crate::{cell_cap_from_env, round_sig};

pub const EXIT_MINIMAL: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_MINIMAL: i32 = 10;
pub const EXIT_NOT_APPLICABLE: i32 = 11;

#[derive(Debug, Parser)]
#[command(name = "diagflow", version, about = "Diagonal flows on lattice spaces and Bianchi orbit classification")]
pub struct Cli {
    /// Append-only JSON-lines file receiving one record per run.
    #[arg(long, global = true, default_value = "diagflow-runs.jsonl")]
    pub record_file: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Classify the compact C-orbit defined by γ (or by a trace a + b√−d).
    Classify(ClassifyArgs),
    /// Classify companion matrices over a rectangle of traces.
    Scan(ScanArgs),
    /// Drive a lattice vector to zero along an AU-orbit.
    Escape(EscapeArgs),
    /// Minimum systole of a·L over a ball in log-coordinates.
    Probe(ProbeArgs),
    /// Box infimum of a product of linear forms and rational-multiple test.
    Forms(FormsArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub d: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<i64>,
    /// Inline JSON `{"d":…,"entries":[[[re,im],…],…]}` or a path to such a file.
    #[arg(long, conflicts_with_all = ["d", "a", "b"])]
    pub matrix: Option<String>,
    #[arg(long, default_value_t = bianchi::DEFAULT_MAX_POWER)]
    pub max_power: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub d: i64,
    #[arg(long)]
    pub amax: i64,
    #[arg(long)]
    pub bmax: i64,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub out: ScanFormat,
    /// Output path (default `scan_d<d>_a<amax>_b<bmax>.<csv|jsonl>`).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EscapeArgs {
    /// Inline lattice JSON or a path; defaults to the standard lattice of the vector's dimension.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Integer coordinates of the lattice vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub vector: Vec<i64>,
    /// Row index i of the unipotent direction (i, 1).
    #[arg(long, default_value_t = 2)]
    pub udir: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 20.0)]
    pub tmax: f64,
    #[arg(long, default_value = "escape_trace.jsonl")]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    /// Cubic coefficients c2,c1,c0 of x³ + c2x² + c1x + c0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1, conflicts_with = "lattice")]
    pub cubic: Option<Vec<i64>>,
    #[arg(long)]
    pub lattice: Option<String>,
    #[arg(long, default_value_t = 5.0)]
    pub grid_radius: f64,
    #[arg(long, default_value_t = 0.25)]
    pub grid_step: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct FormsArgs {
    /// Inline JSON `{"coeff": …}` / `{"cubic": […]}` or a path; a bare array is read as coefficients.
    #[arg(long, conflicts_with = "cubic")]
    pub coeff: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub cubic: Option<Vec<i64>>,
    #[arg(long, default_value_t = 10)]
    pub radius: i64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_den: i64,
}

/// One line of the run log.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub params: serde_json::Value,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<String>,
    pub exit_code: i32,
}

impl RunRecord {
    pub fn append_to(&self, path: &Path) -> std::io::Result<()> {
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        let mut line = serde_json::to_string(self)?;
        line.push('\n');
        f.write_all(line.as_bytes())
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn read_inline_or_file(arg: &str) -> anyhow::Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

fn sig(x: f64) -> f64 {
    round_sig(x, 12)
}

struct Outcome {
    code: i32,
    outputs: Vec<String>,
}

/// Parses `args`, runs the command writing human-readable lines and a final
/// JSON line to `out`, appends the run record, and returns the exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    run(&cli, out, err)
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let started = now();
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a, out),
        Command::Scan(a) => cmd_scan(a, out),
        Command::Escape(a) => cmd_escape(a, out),
        Command::Probe(a) => cmd_probe(a, out),
        Command::Forms(a) => cmd_forms(a, out),
    };
    let (code, outputs) = match result {
        Ok(o) => (o.code, o.outputs),
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            (EXIT_ERROR, Vec::new())
        }
    };
    let params = serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null);
    let (command, params) = match params {
        serde_json::Value::Object(m) if m.len() == 1 => m.into_iter().next().expect("one entry"),
        other => ("unknown".to_string(), other),
    };
    let record = RunRecord {
        command,
        params,
        started,
        finished: now(),
        outputs,
        exit_code: code,
    };
    if let Err(e) = record.append_to(&cli.record_file) {
        let _ = writeln!(err, "warning: could not write run record to {}: {e}", cli.record_file.display());
    }
    code
}

fn cmd_classify(args: &ClassifyArgs, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let gamma = match (&args.matrix, args.d, args.a, args.b) {
        (Some(m), ..) => {
            let j: BianchiMatrixJson = serde_json::from_str(&read_inline_or_file(m)?).context("parsing --matrix")?;
            BianchiMatrix::try_from(j)?
        }
        (None, Some(d), Some(a), Some(b)) => BianchiMatrix::companion(&QuadraticTrace::new(a, b, d)?),
        _ => bail!("classify needs --d, --a, --b or --matrix"),
    };
    let trace = gamma.trace();
    let classifier = Classifier {
        strict: true,
        max_power: args.max_power,
        ..Default::default()
    };
    let res = classifier.classify(&gamma)?;
    let disc = bianchi::discriminant_formula(&trace);
    let square = bianchi::disc_square_test(&trace);

    writeln!(out, "trace: {trace}")?;
    writeln!(out, "verdict: {}", res.verdict)?;
    if let Some(w) = res.witness {
        writeln!(out, "pell k: {}", w.pell_k)?;
        match w.real_power_n {
            Some(n) => writeln!(out, "real eigenvalue power n: {n}")?,
            None => writeln!(out, "real eigenvalue power n: none up to {}", args.max_power)?,
        }
    }
    writeln!(out, "discriminant: {disc} (square: {square})")?;
    writeln!(out, "reason: {}", res.reason)?;
    let record = json!({
        "d": trace.d(),
        "a": trace.a.to_string(),
        "b": trace.b.to_string(),
        "verdict": res.verdict,
        "pell_k": res.witness.map(|w| w.pell_k),
        "real_power_n": res.witness.and_then(|w| w.real_power_n),
        "disc": disc.to_string(),
        "disc_is_square": square,
    });
    writeln!(out, "{record}")?;
    let code = match res.verdict {
        Verdict::Minimal => EXIT_MINIMAL,
        Verdict::NotMinimal => EXIT_NOT_MINIMAL,
        Verdict::NotApplicable => EXIT_NOT_APPLICABLE,
    };
    Ok(Outcome { code, outputs: vec![] })
}

fn cmd_scan(args: &ScanArgs, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let report = bianchi::scan(args.d, args.amax, args.bmax)?;
    let ext = match args.out {
        ScanFormat::Csv => "csv",
        ScanFormat::Jsonl => "jsonl",
    };
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("scan_d{}_a{}_b{}.{ext}", args.d, args.amax, args.bmax)));
    let file = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    match args.out {
        ScanFormat::Csv => report.write_csv(file)?,
        ScanFormat::Jsonl => report.write_jsonl(file)?,
    }
    writeln!(
        out,
        "d = {}: {} traces, {} minimal, {} not minimal, {} not applicable",
        report.d,
        (2 * args.amax + 1) * (2 * args.bmax + 1),
        report.minimal,
        report.not_minimal,
        report.not_applicable
    )?;
    for r in report.not_minimal_rows() {
        writeln!(
            out,
            "  not minimal: a = {}, b = {}, k = {}, n = {}",
            r.a,
            r.b,
            r.pell_k.map_or("-".into(), |k| k.to_string()),
            r.real_power_n.map_or("-".into(), |n| n.to_string())
        )?;
    }
    writeln!(out, "wrote {}", path.display())?;
    let summary = json!({
        "d": report.d,
        "rows": report.rows.len(),
        "minimal": report.minimal,
        "not_minimal": report.not_minimal,
        "not_applicable": report.not_applicable,
        "output": path.display().to_string(),
    });
    writeln!(out, "{summary}")?;
    Ok(Outcome {
        code: 0,
        outputs: vec![path.display().to_string()],
    })
}

fn load_lattice(arg: &str) -> anyhow::Result<UnimodularLattice> {
    serde_json::from_str(&read_inline_or_file(arg)?).context("parsing lattice JSON")
}

fn cmd_escape(args: &EscapeArgs, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let lattice = match &args.lattice {
        Some(s) => load_lattice(s)?,
        None => UnimodularLattice::identity(args.vector.len()),
    };
    let v = lattice.vector(&args.vector)?;
    let udir = RootIndex::new(args.udir, 1)?;
    let outcome = flows::escape_run(&lattice, &v, udir, args.eps, args.tmax)?;
    let file = BufWriter::new(File::create(&args.output).with_context(|| format!("creating {}", args.output.display()))?);
    outcome.write_jsonl(file)?;

    writeln!(out, "unipotent steps: {}", outcome.unipotent_steps())?;
    writeln!(out, "flow time t: {}", sig(outcome.t))?;
    writeln!(out, "image length: {}", sig(outcome.image_length))?;
    writeln!(out, "final systole: {}", sig(outcome.final_systole))?;
    writeln!(out, "wrote {}", args.output.display())?;
    let rec = json!({
        "unipotent_steps": outcome.unipotent_steps(),
        "t": sig(outcome.t),
        "image_length": sig(outcome.image_length),
        "final_systole": sig(outcome.final_systole),
        "trace": args.output.display().to_string(),
    });
    writeln!(out, "{rec}")?;
    Ok(Outcome {
        code: 0,
        outputs: vec![args.output.display().to_string()],
    })
}

fn parse_cubic(c: &[i64]) -> anyhow::Result<CubicOrderSpec> {
    match c {
        [c2, c1, c0] => Ok(CubicOrderSpec::new(*c2, *c1, *c0)?),
        _ => Err(anyhow!("--cubic expects c2,c1,c0")),
    }
}

fn cmd_probe(args: &ProbeArgs, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let lattice = match (&args.cubic, &args.lattice) {
        (Some(c), _) => forms::cubic_field_lattice(&parse_cubic(c)?)?,
        (None, Some(l)) => load_lattice(l)?,
        (None, None) => bail!("probe needs --cubic or --lattice"),
    };
    let grid = log_ball_grid(lattice.dim(), args.grid_radius, args.grid_step)?;
    let report = lattice::is_bounded_probe_with_cap(&lattice, &grid, args.eps, cell_cap_from_env())?;
    let verdict = if report.stays_above() { "stays-above-eps" } else { "dips-below-eps" };
    writeln!(out, "grid points: {}", report.grid_size)?;
    writeln!(out, "min systole: {}", sig(report.min_systole))?;
    writeln!(
        out,
        "attained at logs: {:?}",
        report.argmin.logs().iter().map(|&t| sig(t)).collect::<Vec<_>>()
    )?;
    writeln!(out, "verdict: {verdict} (eps = {})", args.eps)?;
    let rec = json!({
        "verdict": verdict,
        "min_systole": sig(report.min_systole),
        "argmin": report.argmin.logs().iter().map(|&t| sig(t)).collect::<Vec<_>>(),
        "grid_size": report.grid_size,
        "eps": args.eps,
    });
    writeln!(out, "{rec}")?;
    Ok(Outcome { code: 0, outputs: vec![] })
}

fn cmd_forms(args: &FormsArgs, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let (form, norm_const) = match (&args.coeff, &args.cubic) {
        (_, Some(c)) => {
            let spec = parse_cubic(c)?;
            (forms::norm_form(&spec)?, Some(forms::normalization_constant(&spec)?))
        }
        (Some(s), None) => {
            let text = read_inline_or_file(s)?;
            let spec: FormSpec = if text.trim_start().starts_with('[') {
                serde_json::from_str(&format!("{{\"coeff\": {text}}}"))?
            } else {
                serde_json::from_str(&text)?
            };
            let nc = match &spec {
                FormSpec::Cubic { cubic: [c2, c1, c0] } => {
                    Some(forms::normalization_constant(&CubicOrderSpec::new(*c2, *c1, *c0)?)?)
                }
                _ => None,
            };
            (spec.to_form()?, nc)
        }
        (None, None) => bail!("forms needs --coeff or --cubic"),
    };
    let inf = forms::infimum_box_with_cap(&form, args.radius, cell_cap_from_env())?;
    let verdict = forms::is_rational_multiple(&form, args.tol, args.max_den);

    writeln!(out, "radius: {} ({} ± classes scanned)", inf.radius, inf.scanned)?;
    writeln!(out, "min |f|: {} at {:?}", sig(inf.min_abs), inf.argmin)?;
    match (&inf.min_nonzero, &inf.argmin_nonzero) {
        (Some(m), Some(x)) => writeln!(out, "min |f| over f ≠ 0: {} at {:?}", sig(*m), x)?,
        _ => writeln!(out, "min |f| over f ≠ 0: none (f vanishes on the box)")?,
    }
    if let Some(c) = norm_const {
        writeln!(out, "normalization constant 1/|det|: {}", sig(c))?;
    }
    match &verdict {
        RationalVerdict::Yes { form, .. } => {
            writeln!(out, "rational multiple: yes, scale {}", sig(form.scale))?;
            for (m, c) in &form.terms {
                writeln!(out, "  {c} · x^{m:?}")?;
            }
        }
        RationalVerdict::No { reason, .. } => writeln!(out, "rational multiple: no ({reason})")?,
    }
    let rec = json!({
        "radius": inf.radius,
        "min_abs": sig(inf.min_abs),
        "argmin": inf.argmin,
        "min_nonzero": inf.min_nonzero.map(sig),
        "argmin_nonzero": inf.argmin_nonzero,
        "normalization_constant": norm_const.map(sig),
        "rational_multiple": verdict.is_yes(),
    });
    writeln!(out, "{rec}")?;
    Ok(Outcome { code: 0, outputs: vec![] })
}
