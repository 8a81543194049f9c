//! The `invcorr` command line.
//!
//! Results go to stdout (or `--output`, written atomically) as JSON, or CSV
//! for samples. Errors go to stderr as `{"error": {"code", "message"}}`.
//! Exit codes: 0 success / member / pass / holds, 1 error, 2 non-member /
//! fail / does not hold, 3 inconclusive.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bivariate::{is_quasi_independent, quasi_frechet_fit_detail, quasi_independence_gap, JointPmf};
use crate::dependence::{is_nqd, is_pqd, is_prd, quadrant_gaps, Conditioning, GridPmf};
use crate::error::{Error, Result};
use crate::models::{
    conformal_corr, conformal_joint_pmf, conformal_pmf_table, model_from_membership, Checkerboard, CommonShockModel,
    ConformalSpec, ExactRational, FrechetPair, GammaModel, MarkovModel, Sampler, Samples,
};
use crate::partitions::{bell_number, enumerate_partitions};
use crate::polytope::{membership, CorrMatrix, MembershipCert, DEFAULT_TOL};
use crate::verify::{verify_exact, verify_mc, InvarianceReport, Mode, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "invcorr", version, about = "Invariant correlation toolkit")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    QuasiInd,
    QuasiFrechet,
    Pqd,
    Nqd,
    Prd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CondArg {
    Equal,
    AtMost,
}

#[derive(Debug, Args)]
struct InputArg {
    /// JSON file path, or inline JSON starting with `{` or `[`.
    #[arg(long)]
    input: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bell number of `d`, optionally with every partition.
    Bell {
        d: usize,
        #[arg(long)]
        list: bool,
    },
    /// Certify membership of a correlation matrix in the clique partition polytope.
    Membership {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Draw samples from a model, certificate, Markov, Fréchet, checkerboard or conformal spec.
    Sample {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Structural checks on a finite bivariate pmf.
    Check {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Conditioning event for `prd`.
        #[arg(long, value_enum, default_value_t = CondArg::Equal)]
        conditioning: CondArg,
    },
    /// Invariance verification: exact for a pmf, Monte-Carlo for `{"sampler", "target"}`.
    Verify {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value_t = Mode::All)]
        mode: Mode,
        /// Number of library transforms.
        #[arg(long, default_value_t = 20)]
        budget: usize,
        /// Required for Monte-Carlo runs; seeds the random transforms otherwise.
        #[arg(long)]
        seed: Option<u64>,
        /// Monte-Carlo sample size.
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Exact joint pmf of null conformal p-values.
    Conformal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Comma-separated 1-based indices; prints one probability instead of the table.
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
    },
}

/// What a subcommand produced.
struct Outcome {
    body: Vec<u8>,
    code: i32,
}

impl Outcome {
    fn json<T: Serialize>(value: &T, code: i32) -> Result<Self> {
        let mut body = serde_json::to_vec_pretty(value)?;
        body.push(b'\n');
        Ok(Self { body, code })
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let err = json!({"error": {"code": "validation", "message": text.trim_end()}});
                let _ = writeln!(stderr, "{err}");
            }
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|out| {
        match &cli.output {
            Some(path) => write_atomic(path, &out.body)?,
            None => stdout.write_all(&out.body)?,
        }
        Ok(out.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let err = json!({"error": {"code": e.code(), "message": e.to_string()}});
            let _ = writeln!(stderr, "{err}");
            EXIT_ERROR
        }
    }
}

fn write_atomic(path: &Path, body: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(body)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn read_input(arg: &str) -> Result<Value> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)?
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}

fn parse<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// A correlation matrix as `{"d", "rows"}` or a bare array of rows.
fn parse_matrix(v: Value) -> Result<CorrMatrix> {
    let (d, rows) = match v {
        Value::Array(_) => (None, v),
        mut other => (other.get("d").cloned(), other.get_mut("rows").map(Value::take).unwrap_or(Value::Null)),
    };
    let rows: Vec<Vec<f64>> = parse(rows, "matrix rows")?;
    if let Some(d) = d {
        let d: usize = parse(d, "matrix d")?;
        if d != rows.len() {
            return Err(Error::validation(format!("d = {d} but {} rows given", rows.len())));
        }
    }
    CorrMatrix::new(rows)
}

fn has(v: &Value, key: &str) -> bool {
    v.get(key).is_some()
}

/// Any sampler the CLI can build, recognized by its keys.
pub fn sampler_from_json(v: Value) -> Result<Box<dyn Sampler>> {
    if has(&v, "member") {
        let cert: MembershipCert = parse(v, "membership certificate")?;
        Ok(Box::new(model_from_membership(&cert)?))
    } else if has(&v, "stay_probs") {
        let stay: Vec<f64> = parse(v["stay_probs"].clone(), "stay_probs")?;
        Ok(Box::new(MarkovModel::new(stay)?))
    } else if has(&v, "shock") {
        let shock: Vec<f64> = parse(v["shock"].clone(), "shock")?;
        Ok(Box::new(CommonShockModel::common_shock(&shock)?))
    } else if has(&v, "cells") {
        let cells: [[f64; 3]; 3] = parse(v["cells"].clone(), "cells")?;
        let r: f64 = parse(v.get("r").cloned().unwrap_or(Value::Null), "r")?;
        Ok(Box::new(Checkerboard::new(cells, r)?))
    } else if has(&v, "n") && has(&v, "m") {
        let spec: ConformalSpec = parse(v, "conformal spec")?;
        spec.validate()?;
        Ok(Box::new(spec))
    } else if has(&v, "weights") {
        let m: GammaModel = parse(v, "gamma model")?;
        Ok(Box::new(m))
    } else if has(&v, "r") {
        let r: f64 = parse(v["r"].clone(), "r")?;
        let s: f64 = parse(v.get("s").cloned().unwrap_or(json!(0.0)), "s")?;
        Ok(Box::new(FrechetPair::new(r, s)?))
    } else {
        Err(Error::Parse(
            "unrecognized sampler spec; expected a gamma model, certificate, markov, shock, frechet, checkerboard or conformal spec"
                .into(),
        ))
    }
}

/// The invariant correlation matrix a sampler spec implies, when known.
fn implied_target(v: &Value, d: usize) -> Result<Option<CorrMatrix>> {
    let fill = |f: &dyn Fn(usize, usize) -> f64| {
        CorrMatrix::new((0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { f(i, j) }).collect()).collect())
    };
    if has(v, "member") {
        let cert: MembershipCert = parse(v.clone(), "membership certificate")?;
        return Ok(Some(model_from_membership(&cert)?.expected_corr()));
    }
    if has(v, "stay_probs") {
        let m = MarkovModel::new(parse(v["stay_probs"].clone(), "stay_probs")?)?;
        return fill(&|i, j| m.pairwise_corr(i, j)).map(Some);
    }
    if has(v, "shock") {
        let shock: Vec<f64> = parse(v["shock"].clone(), "shock")?;
        let m = CommonShockModel::common_shock(&shock)?;
        return fill(&|i, j| m.pairwise_corr(i, j)).map(Some);
    }
    if has(v, "n") && has(v, "m") {
        let spec: ConformalSpec = parse(v.clone(), "conformal spec")?;
        let r = 1.0 / (spec.n as f64 + 2.0);
        return fill(&|_, _| r).map(Some);
    }
    if has(v, "weights") {
        let m: GammaModel = parse(v.clone(), "gamma model")?;
        return Ok(Some(m.expected_corr()));
    }
    if has(v, "r") {
        let r: f64 = parse(v["r"].clone(), "r")?;
        let s: f64 = parse(v.get("s").cloned().unwrap_or(json!(0.0)), "s")?;
        if s == 0.0 {
            return fill(&|_, _| r).map(Some);
        }
    }
    if has(v, "cells") {
        let r: f64 = parse(v["r"].clone(), "r")?;
        return fill(&|_, _| r).map(Some);
    }
    Ok(None)
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Bell { d, list } => {
            let b = bell_number(*d);
            let bell: Value = match u64::try_from(&b) {
                Ok(v) => json!(v),
                Err(_) => json!(b.to_string()),
            };
            let mut out = json!({"d": d, "bell": bell});
            if *list {
                let parts: Vec<Vec<Vec<usize>>> = enumerate_partitions(*d)?.iter().map(|p| p.blocks()).collect();
                out["partitions"] = json!(parts);
            }
            Outcome::json(&out, EXIT_OK)
        }
        Command::Membership { input, tol } => {
            let r = parse_matrix(read_input(&input.input)?)?;
            let cert = membership(&r, *tol)?;
            Outcome::json(&cert, if cert.member { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Sample { input, count, seed, format } => {
            if *count == 0 {
                return Err(Error::validation("count must be positive"));
            }
            let sampler = sampler_from_json(read_input(&input.input)?)?;
            let samples = sampler.sample(*count, *seed);
            samples_outcome(&samples, *format)
        }
        Command::Check { input, which, tol, conditioning } => {
            check(read_input(&input.input)?, *which, *tol, *conditioning)
        }
        Command::Verify { input, mode, budget, seed, count, tol, alpha } => {
            let v = read_input(&input.input)?;
            let report = if has(&v, "sampler") {
                let seed = seed.ok_or_else(|| Error::validation("--seed is required for Monte-Carlo verification"))?;
                let spec = v["sampler"].clone();
                let sampler = sampler_from_json(spec.clone())?;
                let target = match v.get("target") {
                    Some(t) => parse_matrix(t.clone())?,
                    None => implied_target(&spec, sampler.dim())?
                        .ok_or_else(|| Error::validation("no target given and none implied by the sampler"))?,
                };
                verify_mc(sampler.as_ref(), &target, *mode, *budget, *count, seed, *alpha)?
            } else {
                let pmf: JointPmf = parse(v, "pmf")?;
                verify_exact(&pmf, *mode, *budget, seed.unwrap_or(0), *tol)?
            };
            Outcome::json(&report, verdict_code(&report))
        }
        Command::Conformal { n, m, indices } => {
            let spec = ConformalSpec::new(*n, *m)?;
            let corr = ExactRational::from(&conformal_corr(*n));
            let out = match indices {
                Some(idx) => {
                    let p = conformal_joint_pmf(&spec, idx)?;
                    json!({"n": n, "m": m, "indices": idx, "prob": ExactRational::from(&p), "corr": corr})
                }
                None => json!({"n": n, "m": m, "corr": corr, "table": conformal_pmf_table(&spec)?}),
            };
            Outcome::json(&out, EXIT_OK)
        }
    }
}

fn verdict_code(report: &InvarianceReport) -> i32 {
    match report.verdict {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_NEGATIVE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn samples_outcome(samples: &Samples, format: Format) -> Result<Outcome> {
    match format {
        Format::Csv => {
            let mut body = Vec::new();
            samples.write_csv(&mut body)?;
            Ok(Outcome { body, code: EXIT_OK })
        }
        Format::Json => {
            let rows: Vec<&[f64]> = samples.rows().collect();
            Outcome::json(&rows, EXIT_OK)
        }
    }
}

fn holds_code(holds: bool) -> i32 {
    if holds {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn check(v: Value, which: Which, tol: f64, cond: CondArg) -> Result<Outcome> {
    if which == Which::Prd {
        let grid = if has(&v, "levels") {
            parse::<GridPmf>(v, "grid pmf")?
        } else {
            GridPmf::from_joint(&parse::<JointPmf>(v, "pmf")?)
        };
        let cond = match cond {
            CondArg::Equal => Conditioning::Equal,
            CondArg::AtMost => Conditioning::AtMost,
        };
        let subset: Vec<usize> = (0..grid.d()).collect();
        let report = is_prd(&grid, &subset, cond, tol)?;
        let code = holds_code(report.prd);
        let mut out = serde_json::to_value(&report)?;
        out["check"] = json!("prd");
        out["holds"] = json!(report.prd);
        return Outcome::json(&out, code);
    }
    let pmf: JointPmf = parse(v, "pmf")?;
    let (holds, out) = match which {
        Which::QuasiInd => {
            let holds = is_quasi_independent(&pmf, tol);
            (holds, json!({"check": "quasi_independent", "holds": holds, "gap": quasi_independence_gap(&pmf)}))
        }
        Which::QuasiFrechet => {
            if !pmf.identical_marginals() {
                (false, json!({"check": "quasi_frechet", "holds": false, "reason": "marginals differ"}))
            } else {
                let fit = quasi_frechet_fit_detail(&pmf)?;
                let holds = fit.residual <= tol && fit.bounds.contains(fit.r, tol);
                (
                    holds,
                    json!({"check": "quasi_frechet", "holds": holds, "r": fit.r, "residual": fit.residual, "bounds": fit.bounds}),
                )
            }
        }
        Which::Pqd | Which::Nqd => {
            let gaps = quadrant_gaps(pmf.probs());
            let flat = gaps.iter().flatten();
            let min = flat.clone().copied().fold(f64::INFINITY, f64::min);
            let max = flat.copied().fold(f64::NEG_INFINITY, f64::max);
            let (name, holds) =
                if which == Which::Pqd { ("pqd", is_pqd(&pmf, tol)) } else { ("nqd", is_nqd(&pmf, tol)) };
            (holds, json!({"check": name, "holds": holds, "min_gap": min, "max_gap": max}))
        }
        Which::Prd => unreachable!(),
    };
    Outcome::json(&out, holds_code(holds))
}
