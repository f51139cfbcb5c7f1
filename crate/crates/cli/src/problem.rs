//! Problem documents: a TOML description of a commuting pair (by spectrum or
//! by explicit matrices) plus the iteration settings for one run.
//!
//! ```toml
//! method = "extended"
//! pairs = [[1.0, 1.5], [2.0, 1.0], [3.0, 0.5]]
//! preselected_s = 1.0
//! shift_mu = 0.9
//! ```

use serde::Deserialize;
use thiserror::Error;
use xpower::{
    build_commuting_pair, normalize, Basis, CommutingPair, IterationConfig, RitzMode, SolveMethod,
    SpectrumSpec, SymmetricOperator,
};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("malformed problem document: {0}")]
    Syntax(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Operator(#[from] xpower::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Power,
    Inverse,
    Rr2x2,
    Extended,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Power => "power",
            Method::Inverse => "inverse",
            Method::Rr2x2 => "rr2x2",
            Method::Extended => "extended",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SolverName {
    #[serde(rename = "direct-gauss", alias = "gauss")]
    DirectGauss,
    #[serde(rename = "jacobi")]
    Jacobi,
    #[serde(rename = "gauss-seidel")]
    GaussSeidel,
}

impl From<SolverName> for SolveMethod {
    fn from(s: SolverName) -> Self {
        match s {
            SolverName::DirectGauss => SolveMethod::DirectGauss,
            SolverName::Jacobi => SolveMethod::Jacobi,
            SolverName::GaussSeidel => SolveMethod::GaussSeidel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RitzName {
    Lower,
    Upper,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    dim: Option<usize>,
    pairs: Option<Vec<[f64; 2]>>,
    rotation_seed: Option<u64>,
    matrix_h: Option<Vec<Vec<f64>>>,
    matrix_s: Option<Vec<Vec<f64>>>,
    method: Method,
    preselected_s: Option<f64>,
    shift_mu: Option<f64>,
    tolerance: Option<f64>,
    max_steps: Option<usize>,
    solver: Option<SolverName>,
    start: Option<Vec<f64>>,
    commutator_tolerance: Option<f64>,
    ritz_mode: Option<RitzName>,
    warm_start: Option<bool>,
}

/// Where the operators came from.
#[derive(Debug, Clone)]
pub enum ProblemSource {
    Spectrum { spec: SpectrumSpec, basis: Basis },
    Matrices,
}

/// A validated problem, ready to run.
#[derive(Debug, Clone)]
pub struct ProblemDocument {
    pub source: ProblemSource,
    pub pair: CommutingPair,
    pub method: Method,
    pub config: IterationConfig,
}

impl ProblemDocument {
    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    pub fn spectrum(&self) -> Option<&SpectrumSpec> {
        match &self.source {
            ProblemSource::Spectrum { spec, .. } => Some(spec),
            ProblemSource::Matrices => None,
        }
    }
}

fn syntax_error(text: &str, e: &toml::de::Error) -> ProblemError {
    let message = e.message().trim().replace('\n', "; ");
    match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            ProblemError::Syntax(format!("line {line}, column {column}: {message}"))
        }
        None => ProblemError::Syntax(message),
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemDocument, ProblemError> {
    let raw: RawProblem = toml::from_str(text).map_err(|e| syntax_error(text, &e))?;

    let (source, pair) = match (&raw.pairs, &raw.matrix_h, &raw.matrix_s) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(ProblemError::Schema(
                "give either `pairs` or `matrix_h`/`matrix_s`, not both".into(),
            ))
        }
        (Some(pairs), None, None) => {
            let spec = SpectrumSpec {
                pairs: pairs.iter().map(|p| (p[0], p[1])).collect(),
                rotation_seed: raw.rotation_seed,
            };
            if spec.pairs.is_empty() {
                return Err(ProblemError::Schema("`pairs` must not be empty".into()));
            }
            let (pair, basis) = build_commuting_pair(&spec)?;
            (ProblemSource::Spectrum { spec, basis }, pair)
        }
        (None, Some(h), Some(s)) => {
            if raw.rotation_seed.is_some() {
                return Err(ProblemError::Schema(
                    "`rotation_seed` only applies to `pairs`".into(),
                ));
            }
            if h.len() != s.len() {
                return Err(ProblemError::Dimension(format!(
                    "matrix_h is {}x{}, matrix_s is {}x{}",
                    h.len(),
                    h.len(),
                    s.len(),
                    s.len()
                )));
            }
            let h = SymmetricOperator::from_rows(h)?;
            let s = SymmetricOperator::from_rows(s)?;
            let pair = match raw.commutator_tolerance {
                Some(tol) => CommutingPair::with_tolerance(h, s, tol)?,
                None => CommutingPair::new(h, s)?,
            };
            (ProblemSource::Matrices, pair)
        }
        (None, Some(_), None) => {
            return Err(ProblemError::Schema("missing field `matrix_s`".into()))
        }
        (None, None, Some(_)) => {
            return Err(ProblemError::Schema("missing field `matrix_h`".into()))
        }
        (None, None, None) => {
            return Err(ProblemError::Schema(
                "missing field `pairs` (or `matrix_h` and `matrix_s`)".into(),
            ))
        }
    };

    let n = pair.dim();
    if let Some(dim) = raw.dim {
        if dim != n {
            return Err(ProblemError::Dimension(format!(
                "`dim` is {dim} but the operators are {n}x{n}"
            )));
        }
    }

    let mut config = IterationConfig::default();
    match raw.method {
        Method::Extended => {
            let s = raw.preselected_s.ok_or_else(|| {
                ProblemError::Schema(
                    "missing field `preselected_s` required by method `extended`".into(),
                )
            })?;
            let mu = raw.shift_mu.ok_or_else(|| {
                ProblemError::Schema(
                    "missing field `shift_mu` required by method `extended`".into(),
                )
            })?;
            if s - mu == 0.0 {
                return Err(ProblemError::Schema(format!(
                    "`preselected_s` and `shift_mu` must differ (both {s})"
                )));
            }
            config.preselected_s = s;
            config.shift_mu = mu;
        }
        Method::Inverse => {
            config.shift_mu = raw.shift_mu.ok_or_else(|| {
                ProblemError::Schema("missing field `shift_mu` required by method `inverse`".into())
            })?;
        }
        Method::Power | Method::Rr2x2 => {
            if let Some(s) = raw.preselected_s {
                config.preselected_s = s;
            }
            if let Some(mu) = raw.shift_mu {
                config.shift_mu = mu;
            }
        }
    }
    if let Some(tol) = raw.tolerance {
        if tol.is_nan() || tol <= 0.0 {
            return Err(ProblemError::Schema(format!(
                "`tolerance` must be positive, got {tol}"
            )));
        }
        config.residual_tolerance = tol;
    }
    if let Some(steps) = raw.max_steps {
        config.max_full_steps = steps;
    }
    if let Some(solver) = raw.solver {
        config.solve_options.method = solver.into();
    }
    if let Some(warm) = raw.warm_start {
        config.solve_options.warm_start = warm;
    }
    if let Some(mode) = raw.ritz_mode {
        config.ritz_mode = match mode {
            RitzName::Lower => RitzMode::Lower,
            RitzName::Upper => RitzMode::Upper,
        };
    }
    if let Some(start) = raw.start {
        if start.len() != n {
            return Err(ProblemError::Dimension(format!(
                "`start` has {} components, expected {n}",
                start.len()
            )));
        }
        config.start = Some(normalize(&start)?.0);
    }

    Ok(ProblemDocument {
        source,
        pair,
        method: raw.method,
        config,
    })
}
