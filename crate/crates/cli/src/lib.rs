//! Command implementations behind the `xpower` binary.

pub mod output;
pub mod problem;
pub mod reproduce;

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use xpower::{
    cost_summary, extended_run, inverse_run_observed, jacobi_eigensolve, power_run_observed,
    predict_limit, rr2x2_run_observed, simultaneous_spectrum, IterationTrace, SpectrumSpec,
};

use crate::problem::{parse_problem, Method, ProblemDocument};
use crate::reproduce::{reproduce, Target};

/// Text for stdout plus whether every embedded check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub checks_passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            checks_passed: true,
        }
    }
}

pub fn load_problem(path: &Path) -> anyhow::Result<ProblemDocument> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_problem(&text).with_context(|| format!("{}", path.display()))
}

pub fn run_problem(doc: &ProblemDocument) -> xpower::Result<IterationTrace> {
    let (h, s) = (doc.pair.h(), doc.pair.s());
    match doc.method {
        Method::Power => power_run_observed(h, Some(s), &doc.config),
        Method::Inverse => inverse_run_observed(h, Some(s), &doc.config),
        Method::Rr2x2 => rr2x2_run_observed(h, Some(s), &doc.config),
        Method::Extended => extended_run(&doc.pair, &doc.config),
    }
}

/// `<dir>/<stem>.trace.csv` next to the problem file.
pub fn default_trace_path(problem: &Path) -> PathBuf {
    let stem = problem
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".to_string());
    problem.with_file_name(format!("{stem}.trace.csv"))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn cmd_run(problem: &Path, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let doc = load_problem(problem)?;
    let trace = run_problem(&doc)?;
    let out = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_trace_path(problem));
    output::write_trace_csv(&trace, create(&out)?)
        .with_context(|| format!("cannot write {}", out.display()))?;

    let last = trace.last();
    let cost = cost_summary(&trace);
    let mut t = String::new();
    writeln!(t, "method: {}", doc.method.as_str()).unwrap();
    writeln!(t, "dimension: {}", doc.dim()).unwrap();
    writeln!(t, "termination: {}", trace.termination.as_str()).unwrap();
    writeln!(t, "full steps: {}", trace.full_steps()).unwrap();
    writeln!(t, "e estimate: {:.12}", last.e_estimate).unwrap();
    if let Some(s) = last.s_estimate {
        writeln!(t, "s estimate: {s:.12}").unwrap();
    }
    writeln!(t, "h residual: {:.3e}", last.h_residual).unwrap();
    writeln!(t, "matvecs: {}, solves: {}", cost.matvecs, cost.solves).unwrap();
    writeln!(t, "trace: {}", out.display()).unwrap();
    Ok(Outcome::ok(t))
}

/// Spectrum pairs of the document, recovering them numerically for matrix input.
fn problem_spectrum(doc: &ProblemDocument) -> xpower::Result<SpectrumSpec> {
    match doc.spectrum() {
        Some(spec) => Ok(spec.clone()),
        None => Ok(SpectrumSpec::new(
            simultaneous_spectrum(&doc.pair)?
                .into_iter()
                .map(|p| (p.e, p.s))
                .collect(),
        )),
    }
}

pub fn cmd_predict(problem: &Path, mu: f64) -> anyhow::Result<Outcome> {
    let doc = load_problem(problem)?;
    let spec = problem_spectrum(&doc)?;
    let p = predict_limit(&spec, mu)?;
    let mut t = String::new();
    writeln!(t, "mu = {mu}").unwrap();
    writeln!(t, "state\te\ts\tfactor").unwrap();
    for (i, ((e, s), f)) in spec.pairs.iter().zip(&p.factors).enumerate() {
        let mark = if p.tied_indices.contains(&i) {
            " *"
        } else {
            ""
        };
        writeln!(t, "{}\t{e}\t{s}\t{f:.6}{mark}", i + 1).unwrap();
    }
    if p.is_degenerate() {
        let tied: Vec<String> = p.tied_indices.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(
            t,
            "degenerate: states {} tie; no unique limit",
            tied.join(", ")
        )
        .unwrap();
    } else {
        let (e, s) = spec.pairs[p.winner_index];
        writeln!(t, "limit: state {} (e = {e}, s = {s})", p.winner_index + 1).unwrap();
    }
    writeln!(t, "rate ratio: {:.6}", p.rate_ratio).unwrap();
    Ok(Outcome::ok(t))
}

pub fn cmd_reproduce(target: Target, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let r = reproduce(target)?;
    let mut text = r.summary();
    if let Some(out) = out {
        r.write_csv(create(out)?)
            .with_context(|| format!("cannot write {}", out.display()))?;
        writeln!(text, "csv: {}", out.display()).unwrap();
    } else {
        let mut buf = Vec::new();
        r.write_csv(&mut buf)?;
        text.push_str(&String::from_utf8(buf)?);
    }
    Ok(Outcome {
        text,
        checks_passed: r.all_pass(),
    })
}

pub fn cmd_oracle(problem: &Path) -> anyhow::Result<Outcome> {
    let doc = load_problem(problem)?;
    let mut t = String::new();
    for (name, op) in [("H", doc.pair.h()), ("S", doc.pair.s())] {
        let dec = jacobi_eigensolve(op)?;
        writeln!(t, "{name} eigenvalues (residual {:.3e}):", dec.residual).unwrap();
        for (i, x) in dec.eigenvalues.iter().enumerate() {
            writeln!(t, "  {}\t{x:.12}", i + 1).unwrap();
        }
    }
    writeln!(t, "simultaneous pairs:").unwrap();
    writeln!(t, "  state\te\ts").unwrap();
    for (i, p) in simultaneous_spectrum(&doc.pair)?.iter().enumerate() {
        writeln!(t, "  {}\t{:.12}\t{:.12}", i + 1, p.e, p.s).unwrap();
    }
    writeln!(t, "commutator norm: {:.3e}", doc.pair.commutator_norm()).unwrap();
    Ok(Outcome::ok(t))
}
