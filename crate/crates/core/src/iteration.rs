//! Power method, shifted inverse iteration, 2×2 Rayleigh–Ritz and the
//! extended (pre-selecting) power method for commuting pairs.
//!
//! Each run loop returns an [`IterationTrace`]: a start record followed by one
//! record per half-step. The extended method alternates a power half
//! (`w = Hv`) and an inverse half (`(S − μE)x = (s − μ)w`), so it produces two
//! records per full step. Reported eigenvalue estimates are always Rayleigh
//! quotients of the recorded state; the normalization constants of each half
//! are kept in [`StepRecord::step_norm`].

use crate::error::{Error, Result};
use crate::operator::{
    apply, dot, norm2, normalize, shifted, CommutingPair, StateVector, SymmetricOperator, ZERO_NORM,
};
use crate::solve::{solve_from, SolveMethod, SolveOptions, SolveReport};

/// Which Ritz pair the 2×2 scheme keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RitzMode {
    /// Smaller Ritz value (ground-state search).
    #[default]
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationConfig {
    /// Target eigenvalue `s` of `S`.
    pub preselected_s: f64,
    /// Spectral shift `μ`.
    pub shift_mu: f64,
    pub residual_tolerance: f64,
    pub max_full_steps: usize,
    pub solve_options: SolveOptions,
    /// Start vector; `None` means the normalized all-ones vector.
    pub start: Option<StateVector>,
    pub ritz_mode: RitzMode,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            preselected_s: 1.0,
            shift_mu: 0.0,
            residual_tolerance: 1e-10,
            max_full_steps: 10_000,
            solve_options: SolveOptions::default(),
            start: None,
            ritz_mode: RitzMode::Lower,
        }
    }
}

impl IterationConfig {
    /// Configuration for the extended method with pre-selection `s` and shift `mu`.
    pub fn extended(preselected_s: f64, shift_mu: f64) -> Self {
        Self {
            preselected_s,
            shift_mu,
            ..Self::default()
        }
    }

    /// Configuration for shifted inverse iteration with shift `mu`.
    pub fn inverse(shift_mu: f64) -> Self {
        Self {
            shift_mu,
            ..Self::default()
        }
    }

    pub fn with_start(mut self, start: StateVector) -> Self {
        self.start = Some(start);
        self
    }

    pub fn with_max_steps(mut self, steps: usize) -> Self {
        self.max_full_steps = steps;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.residual_tolerance = tol;
        self
    }

    pub fn with_solver(mut self, method: SolveMethod) -> Self {
        self.solve_options.method = method;
        self
    }

    fn start_vector(&self, dim: usize) -> Result<StateVector> {
        match &self.start {
            Some(v) if v.dim() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.dim(),
            }),
            Some(v) => Ok(v.clone()),
            None => StateVector::ones(dim),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.residual_tolerance.is_nan() || self.residual_tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "residual tolerance must be positive, got {}",
                self.residual_tolerance
            )));
        }
        if !self.preselected_s.is_finite() || !self.shift_mu.is_finite() {
            return Err(Error::InvalidConfig("s and mu must be finite".into()));
        }
        self.solve_options.validate()
    }

    fn validate_extended(&self) -> Result<()> {
        self.validate()?;
        if self.preselected_s - self.shift_mu == 0.0 {
            return Err(Error::InvalidConfig(format!(
                "preselected s ({}) must differ from shift mu ({})",
                self.preselected_s, self.shift_mu
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Start,
    Power,
    Inverse,
    Rr2x2,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Start => "start",
            Phase::Power => "power",
            Phase::Inverse => "inverse",
            Phase::Rr2x2 => "rr2x2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub full_step: usize,
    pub phase: Phase,
    pub state: StateVector,
    /// `⟨v|H|v⟩`.
    pub e_estimate: f64,
    /// `⟨v|S|v⟩`, when an `S` is being observed.
    pub s_estimate: Option<f64>,
    /// `‖Hv − ⟨H⟩v‖`.
    pub h_residual: f64,
    /// `‖Sv − ⟨S⟩v‖`.
    pub s_residual: Option<f64>,
    /// `‖Hv‖`.
    pub p2n: f64,
    /// Normalization constant of this half-step (`e_n`); absent for the start record.
    pub step_norm: Option<f64>,
    /// Relative residual of the linear solve behind an inverse half.
    pub solve_residual: Option<f64>,
    pub matvec_count: usize,
    pub solve_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    /// Residuals vanished on an eigenpair whose `S` eigenvalue is not the pre-selected one.
    ConvergedElsewhere,
    MaxSteps,
    Collapse,
    SingularShift,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::ConvergedElsewhere => "converged-elsewhere",
            Termination::MaxSteps => "max-steps",
            Termination::Collapse => "collapse",
            Termination::SingularShift => "singular-shift",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub start: StepRecord,
    pub records: Vec<StepRecord>,
    pub converged: bool,
    pub termination: Termination,
}

impl IterationTrace {
    /// Start record followed by every step record.
    pub fn all_records(&self) -> impl Iterator<Item = &StepRecord> {
        std::iter::once(&self.start).chain(&self.records)
    }

    pub fn last(&self) -> &StepRecord {
        self.records.last().unwrap_or(&self.start)
    }

    pub fn final_state(&self) -> &StateVector {
        &self.last().state
    }

    pub fn full_steps(&self) -> usize {
        self.last().full_step
    }

    /// Last record of the given phase at `full_step`.
    pub fn record_at(&self, full_step: usize, phase: Phase) -> Option<&StepRecord> {
        self.all_records()
            .filter(|r| r.full_step == full_step && r.phase == phase)
            .last()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Work {
    matvecs: usize,
    solves: usize,
}

impl Work {
    fn add_solve(&mut self, report: &SolveReport, opts: &SolveOptions) {
        self.solves += 1;
        if opts.method != SolveMethod::DirectGauss {
            self.matvecs += report.sweeps_used;
        }
    }
}

struct Observer<'a> {
    h: &'a SymmetricOperator,
    s: Option<&'a SymmetricOperator>,
}

impl Observer<'_> {
    fn record(
        &self,
        state: StateVector,
        full_step: usize,
        phase: Phase,
        step_norm: Option<f64>,
        solve_residual: Option<f64>,
        work: Work,
    ) -> Result<StepRecord> {
        let hv = apply(self.h, state.components())?;
        let (e_estimate, h_residual) = moment(state.components(), &hv);
        let p2n = norm2(&hv);
        let (s_estimate, s_residual) = match self.s {
            Some(s) => {
                let sv = apply(s, state.components())?;
                let (est, res) = moment(state.components(), &sv);
                (Some(est), Some(res))
            }
            None => (None, None),
        };
        Ok(StepRecord {
            full_step,
            phase,
            state,
            e_estimate,
            s_estimate,
            h_residual,
            s_residual,
            p2n,
            step_norm,
            solve_residual,
            matvec_count: work.matvecs,
            solve_count: work.solves,
        })
    }
}

// Rayleigh quotient and residual norm of a unit vector given its image.
fn moment(v: &[f64], av: &[f64]) -> (f64, f64) {
    let q = dot(v, av);
    let r = av
        .iter()
        .zip(v)
        .map(|(a, x)| (a - q * x) * (a - q * x))
        .sum::<f64>()
        .sqrt();
    (q, r)
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        Err(Error::DimensionMismatch { expected, actual })
    } else {
        Ok(())
    }
}

fn check_normalized(v: &StateVector) -> Result<()> {
    StateVector::from_normalized(v.components().to_vec()).map(|_| ())
}

/// One power step: returns `‖Hv‖` and `Hv/‖Hv‖`.
pub fn power_step(h: &SymmetricOperator, v: &StateVector) -> Result<(f64, StateVector)> {
    check_dim(h.dim(), v.dim())?;
    check_normalized(v)?;
    let hv = apply(h, v.components())?;
    let (next, norm) = normalize(&hv)?;
    Ok((norm, next))
}

/// Power method on `h` until `‖Hv − ⟨H⟩v‖ ≤ residual_tolerance`.
pub fn power_run(h: &SymmetricOperator, config: &IterationConfig) -> Result<IterationTrace> {
    power_run_observed(h, None, config)
}

/// [`power_run`] that also records `⟨S⟩` estimates for an observed `s`.
pub fn power_run_observed(
    h: &SymmetricOperator,
    s: Option<&SymmetricOperator>,
    config: &IterationConfig,
) -> Result<IterationTrace> {
    config.validate()?;
    if let Some(s) = s {
        check_dim(h.dim(), s.dim())?;
    }
    let obs = Observer { h, s };
    simple_loop(&obs, config, Phase::Power, |v, work| {
        let (norm, next) = power_step(h, v)?;
        work.matvecs += 1;
        Ok((norm, next, None))
    })
}

/// One step of shifted inverse iteration: solves `(A − μE)x = v`, returning
/// `‖x‖` and `x/‖x‖`.
pub fn inverse_step(
    a: &SymmetricOperator,
    mu: f64,
    v: &StateVector,
    opts: &SolveOptions,
) -> Result<(f64, StateVector)> {
    inverse_step_report(a, mu, v, opts).map(|(growth, next, _)| (growth, next))
}

fn inverse_step_report(
    a: &SymmetricOperator,
    mu: f64,
    v: &StateVector,
    opts: &SolveOptions,
) -> Result<(f64, StateVector, SolveReport)> {
    check_dim(a.dim(), v.dim())?;
    check_normalized(v)?;
    let shifted_a = shifted(a, mu);
    let guess = warm_guess(&shifted_a, v.components(), v.components(), opts)?;
    let report = solve_from(&shifted_a, v.components(), guess.as_deref(), opts)?;
    let (next, growth) = normalize(&report.solution)?;
    Ok((growth, next, report))
}

/// Shifted inverse iteration on `a` with shift `config.shift_mu`.
pub fn inverse_run(a: &SymmetricOperator, config: &IterationConfig) -> Result<IterationTrace> {
    inverse_run_observed(a, None, config)
}

/// [`inverse_run`] that also records `⟨S⟩` estimates for an observed `s`.
pub fn inverse_run_observed(
    a: &SymmetricOperator,
    s: Option<&SymmetricOperator>,
    config: &IterationConfig,
) -> Result<IterationTrace> {
    config.validate()?;
    if let Some(s) = s {
        check_dim(a.dim(), s.dim())?;
    }
    let obs = Observer { h: a, s };
    let opts = &config.solve_options;
    simple_loop(&obs, config, Phase::Inverse, |v, work| {
        let (growth, next, report) = inverse_step_report(a, config.shift_mu, v, opts)?;
        work.add_solve(&report, opts);
        Ok((growth, next, Some(report.relative_residual)))
    })
}

/// One 2×2 Rayleigh–Ritz step on `span{v, Hv}`, keeping the Ritz pair selected by `mode`.
pub fn rr2x2_step(
    h: &SymmetricOperator,
    v: &StateVector,
    mode: RitzMode,
) -> Result<(f64, StateVector)> {
    check_dim(h.dim(), v.dim())?;
    check_normalized(v)?;
    let hv = apply(h, v.components())?;
    let hv_norm = norm2(&hv);
    if hv_norm.is_nan() || hv_norm <= ZERO_NORM {
        return Err(Error::ZeroVector { norm: hv_norm });
    }
    let a = dot(v.components(), &hv);
    let mut w: Vec<f64> = hv
        .iter()
        .zip(v.components())
        .map(|(y, x)| y - a * x)
        .collect();
    // second Gram-Schmidt pass; the first loses orthogonality near convergence
    let drift = dot(v.components(), &w);
    for (y, x) in w.iter_mut().zip(v.components()) {
        *y -= drift * x;
    }
    let w_norm = norm2(&w);
    if w_norm <= 1e-14 * hv_norm {
        return Ok((a, v.clone()));
    }
    let q: Vec<f64> = w.iter().map(|x| x / w_norm).collect();
    let hq = apply(h, &q)?;
    let b = dot(&q, &hv);
    let c = dot(&q, &hq);

    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    let value = match mode {
        RitzMode::Lower => mean - radius,
        RitzMode::Upper => mean + radius,
    };
    // Eigenvector of [[a, b], [b, c]] for `value`; pick the better-conditioned form.
    let (y1, y2) = if (value - c).abs() >= (value - a).abs() {
        (value - c, b)
    } else {
        (b, value - a)
    };
    let combined: Vec<f64> = v
        .components()
        .iter()
        .zip(&q)
        .map(|(x, z)| y1 * x + y2 * z)
        .collect();
    let (next, _) = normalize(&combined)?;
    Ok((value, next))
}

/// Repeated [`rr2x2_step`] until the Ritz vector's residual meets tolerance.
pub fn rr2x2_run(h: &SymmetricOperator, config: &IterationConfig) -> Result<IterationTrace> {
    rr2x2_run_observed(h, None, config)
}

pub fn rr2x2_run_observed(
    h: &SymmetricOperator,
    s: Option<&SymmetricOperator>,
    config: &IterationConfig,
) -> Result<IterationTrace> {
    config.validate()?;
    if let Some(s) = s {
        check_dim(h.dim(), s.dim())?;
    }
    let obs = Observer { h, s };
    simple_loop(&obs, config, Phase::Rr2x2, |v, work| {
        let (value, next) = rr2x2_step(h, v, config.ritz_mode)?;
        work.matvecs += 2;
        Ok((value, next, None))
    })
}

fn simple_loop(
    obs: &Observer<'_>,
    config: &IterationConfig,
    phase: Phase,
    mut step: impl FnMut(&StateVector, &mut Work) -> Result<(f64, StateVector, Option<f64>)>,
) -> Result<IterationTrace> {
    let start_vec = config.start_vector(obs.h.dim())?;
    let mut work = Work::default();
    let start = obs.record(start_vec, 0, Phase::Start, None, None, work)?;
    let tol = config.residual_tolerance;
    let mut records = Vec::new();
    let mut termination = if start.h_residual <= tol {
        Termination::Converged
    } else {
        Termination::MaxSteps
    };
    if termination == Termination::MaxSteps {
        let mut current = start.state.clone();
        for k in 1..=config.max_full_steps {
            let (norm, next, solve_residual) = match step(&current, &mut work) {
                Ok(out) => out,
                Err(e) => {
                    termination = classify(e)?;
                    break;
                }
            };
            let rec = obs.record(next, k, phase, Some(norm), solve_residual, work)?;
            let done = rec.h_residual <= tol;
            current = rec.state.clone();
            records.push(rec);
            if done {
                termination = Termination::Converged;
                break;
            }
        }
    }
    Ok(IterationTrace {
        start,
        records,
        converged: termination == Termination::Converged,
        termination,
    })
}

// Mid-run failures that end a trace rather than abort it.
fn classify(e: Error) -> Result<Termination> {
    match e {
        Error::ZeroVector { .. } => Ok(Termination::Collapse),
        Error::SingularSystem { .. } => Ok(Termination::SingularShift),
        other => Err(other),
    }
}

// Start vector for an iterative solve of `A x = b`: `v` scaled to minimize
// the residual along its own direction.
fn warm_guess(
    a: &SymmetricOperator,
    v: &[f64],
    b: &[f64],
    opts: &SolveOptions,
) -> Result<Option<Vec<f64>>> {
    if !opts.warm_start || opts.method == SolveMethod::DirectGauss {
        return Ok(None);
    }
    let av = apply(a, v)?;
    let denom = dot(&av, &av);
    if denom <= ZERO_NORM {
        return Ok(None);
    }
    let alpha = dot(&av, b) / denom;
    Ok(Some(v.iter().map(|x| alpha * x).collect()))
}

/// One full extended step from `v`: power half `w = Hv`, then the inverse
/// half solving `(S − μE)x = (s − μ)w`. Returns the new iterate and the two
/// half-step records (numbered as full step 1).
pub fn extended_step(
    pair: &CommutingPair,
    config: &IterationConfig,
    v: &StateVector,
) -> Result<(StateVector, [StepRecord; 2])> {
    config.validate_extended()?;
    check_dim(pair.dim(), v.dim())?;
    check_normalized(v)?;
    let obs = Observer {
        h: pair.h(),
        s: Some(pair.s()),
    };
    let shifted_s = shifted(pair.s(), config.shift_mu);
    let mut work = Work::default();
    let records = extended_half_steps(pair, &shifted_s, config, &obs, v, 1, &mut work)?;
    Ok((records[1].state.clone(), records))
}

fn extended_half_steps(
    pair: &CommutingPair,
    shifted_s: &SymmetricOperator,
    config: &IterationConfig,
    obs: &Observer<'_>,
    v: &StateVector,
    full_step: usize,
    work: &mut Work,
) -> Result<[StepRecord; 2]> {
    let w = apply(pair.h(), v.components())?;
    work.matvecs += 1;
    let (w_unit, w_norm) = normalize(&w)?;
    let power = obs.record(w_unit, full_step, Phase::Power, Some(w_norm), None, *work)?;

    let factor = config.preselected_s - config.shift_mu;
    let rhs: Vec<f64> = w.iter().map(|x| factor * x).collect();
    let opts = &config.solve_options;
    let guess = warm_guess(shifted_s, v.components(), &rhs, opts)?;
    let report = solve_from(shifted_s, &rhs, guess.as_deref(), opts)?;
    work.add_solve(&report, opts);
    let (x_unit, x_norm) = normalize(&report.solution)?;
    let inverse = obs.record(
        x_unit,
        full_step,
        Phase::Inverse,
        Some(x_norm),
        Some(report.relative_residual),
        *work,
    )?;
    Ok([power, inverse])
}

/// Extended power method: iterate until both `‖Hv − ⟨H⟩v‖` and
/// `‖Sv − s·v‖` (with `s` the pre-selected value) drop below tolerance.
///
/// When the residuals vanish on an eigenpair whose `S` eigenvalue differs from
/// the pre-selection by more than `100·tol`, the run ends with
/// [`Termination::ConvergedElsewhere`].
pub fn extended_run(pair: &CommutingPair, config: &IterationConfig) -> Result<IterationTrace> {
    config.validate_extended()?;
    let obs = Observer {
        h: pair.h(),
        s: Some(pair.s()),
    };
    let shifted_s = shifted(pair.s(), config.shift_mu);
    let start_vec = config.start_vector(pair.dim())?;
    let mut work = Work::default();
    let start = obs.record(start_vec, 0, Phase::Start, None, None, work)?;
    let mut records = Vec::new();
    let mut termination = extended_status(pair, config, &start)?;
    if termination == Termination::MaxSteps {
        let mut current = start.state.clone();
        for k in 1..=config.max_full_steps {
            let halves =
                match extended_half_steps(pair, &shifted_s, config, &obs, &current, k, &mut work) {
                    Ok(h) => h,
                    Err(e) => {
                        termination = classify(e)?;
                        break;
                    }
                };
            let [power, inverse] = halves;
            records.push(power);
            termination = extended_status(pair, config, &inverse)?;
            current = inverse.state.clone();
            records.push(inverse);
            if termination != Termination::MaxSteps {
                break;
            }
        }
    }
    Ok(IterationTrace {
        start,
        records,
        converged: termination == Termination::Converged,
        termination,
    })
}

fn extended_status(
    pair: &CommutingPair,
    config: &IterationConfig,
    rec: &StepRecord,
) -> Result<Termination> {
    let tol = config.residual_tolerance;
    if rec.h_residual > tol {
        return Ok(Termination::MaxSteps);
    }
    let target = config.preselected_s;
    let sv = apply(pair.s(), rec.state.components())?;
    let preselected_residual = sv
        .iter()
        .zip(rec.state.components())
        .map(|(a, x)| (a - target * x) * (a - target * x))
        .sum::<f64>()
        .sqrt();
    if preselected_residual <= tol {
        return Ok(Termination::Converged);
    }
    let s_est = rec.s_estimate.unwrap_or(target);
    let s_res = rec.s_residual.unwrap_or(f64::INFINITY);
    if s_res <= tol && (s_est - target).abs() > 100.0 * tol {
        return Ok(Termination::ConvergedElsewhere);
    }
    Ok(Termination::MaxSteps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> SymmetricOperator {
        SymmetricOperator::diagonal(v).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn table1_pair() -> CommutingPair {
        CommutingPair::new(diag(&[1.0, 2.0, 3.0]), diag(&[1.5, 1.0, 0.5])).unwrap()
    }

    #[test]
    fn power_step_examples() {
        let h = diag(&[1.0, 2.0, 3.0]);
        let v = StateVector::ones(3).unwrap();
        let (e, next) = power_step(&h, &v).unwrap();
        assert!((e - (14.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let r14 = 14f64.sqrt();
        assert!(close(
            next.components(),
            &[1.0 / r14, 2.0 / r14, 3.0 / r14],
            1e-15
        ));

        let top = StateVector::basis(3, 2).unwrap();
        let (e, next) = power_step(&h, &top).unwrap();
        assert_eq!(e, 3.0);
        assert_eq!(next, top);

        let (e, next) = power_step(&SymmetricOperator::identity(3).unwrap(), &v).unwrap();
        assert_eq!(e, 1.0);
        assert!(close(next.components(), v.components(), 1e-16));
    }

    #[test]
    fn power_step_collapses_in_null_space() {
        let h = diag(&[0.0, 1.0]);
        let v = StateVector::basis(2, 0).unwrap();
        assert!(matches!(power_step(&h, &v), Err(Error::ZeroVector { .. })));
        let trace = power_run(&h, &IterationConfig::default().with_start(v)).unwrap();
        // e_1 is already an eigenvector (of eigenvalue 0): converged at start.
        assert_eq!(trace.termination, Termination::Converged);
    }

    #[test]
    fn power_run_reaches_dominant_state() {
        let h = diag(&[1.0, 2.0, 3.0]);
        let trace = power_run(&h, &IterationConfig::default()).unwrap();
        assert!(trace.converged);
        assert!((trace.last().e_estimate - 3.0).abs() < 1e-12);
        assert!((trace.final_state().canonical().components()[2] - 1.0).abs() < 1e-10);
        assert!(trace.records.iter().all(|r| r.phase == Phase::Power));
    }

    #[test]
    fn power_run_stays_in_invariant_subspace() {
        let h = diag(&[1.0, 2.0, 3.0]);
        let start = normalize(&[1.0, 1.0, 0.0]).unwrap().0;
        let trace = power_run(&h, &IterationConfig::default().with_start(start)).unwrap();
        assert!(trace.converged);
        assert!((trace.last().e_estimate - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_step_examples() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let v = StateVector::ones(3).unwrap();
        let opts = SolveOptions::default();
        let (_, next) = inverse_step(&a, 0.0, &v, &opts).unwrap();
        let expect = normalize(&[1.0, 0.5, 1.0 / 3.0]).unwrap().0;
        assert!(close(next.components(), expect.components(), 1e-15));

        let trace = inverse_run(&a, &IterationConfig::inverse(1.9)).unwrap();
        assert!(trace.converged);
        assert!((trace.final_state().canonical().components()[1] - 1.0).abs() < 1e-10);

        assert!(matches!(
            inverse_step(&a, 2.0, &v, &opts),
            Err(Error::SingularSystem { .. })
        ));
        let trace = inverse_run(&a, &IterationConfig::inverse(2.0)).unwrap();
        assert_eq!(trace.termination, Termination::SingularShift);
        assert!(trace.records.is_empty());
    }

    #[test]
    fn rr2x2_examples() {
        let h = diag(&[1.0, 2.0, 3.0]);
        let e2 = StateVector::basis(3, 1).unwrap();
        let (value, next) = rr2x2_step(&h, &e2, RitzMode::Lower).unwrap();
        assert_eq!(value, 2.0);
        assert_eq!(next, e2);

        let h2 = diag(&[1.0, 3.0]);
        let (value, next) =
            rr2x2_step(&h2, &StateVector::ones(2).unwrap(), RitzMode::Lower).unwrap();
        assert!((value - 1.0).abs() < 1e-15);
        assert!(close(next.canonical().components(), &[1.0, 0.0], 1e-15));
        let (value, _) = rr2x2_step(&h2, &StateVector::ones(2).unwrap(), RitzMode::Upper).unwrap();
        assert!((value - 3.0).abs() < 1e-15);

        let v = StateVector::ones(3).unwrap();
        let (value, next) = rr2x2_step(&h, &v, RitzMode::Lower).unwrap();
        assert!(value <= 2.0);
        let rq = crate::operator::rayleigh(&h, next.components()).unwrap();
        assert!((rq - value).abs() < 1e-14);
    }

    #[test]
    fn extended_step_table1_first_step() {
        let pair = table1_pair();
        let cfg = IterationConfig::extended(1.0, 0.9);
        let v = StateVector::ones(3).unwrap();
        let (next, [power, inverse]) = extended_step(&pair, &cfg, &v).unwrap();
        let expect = normalize(&[1.0 / 0.6, 20.0, -7.5]).unwrap().0;
        assert!(close(next.components(), expect.components(), 1e-14));
        assert_eq!(power.phase, Phase::Power);
        assert_eq!(inverse.phase, Phase::Inverse);
        assert_eq!((inverse.matvec_count, inverse.solve_count), (1, 1));
        // e_n of the explicit-inverse form: ‖(s−μ)(S−μE)⁻¹Hv‖.
        let e_n = 0.1
            * (1.0f64 / 0.6 / 3f64.sqrt())
                .hypot(20.0 / 3f64.sqrt())
                .hypot(7.5 / 3f64.sqrt());
        assert!((inverse.step_norm.unwrap() - e_n).abs() < 1e-13);
    }

    #[test]
    fn extended_rejects_zero_gap() {
        let pair = table1_pair();
        let cfg = IterationConfig::extended(1.0, 1.0);
        assert!(matches!(
            extended_run(&pair, &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn extended_singular_shift_ends_trace() {
        let pair = table1_pair();
        let trace = extended_run(&pair, &IterationConfig::extended(1.1, 1.0)).unwrap();
        assert_eq!(trace.termination, Termination::SingularShift);
        assert!(!trace.converged);
    }

    #[test]
    fn extended_fixed_point_converges_immediately() {
        let pair = table1_pair();
        let cfg = IterationConfig::extended(1.0, 0.9).with_start(StateVector::basis(3, 1).unwrap());
        let trace = extended_run(&pair, &cfg).unwrap();
        assert_eq!(trace.termination, Termination::Converged);
        assert!(trace.full_steps() <= 1);
    }

    #[test]
    fn zero_steps_yields_start_record_only() {
        let pair = table1_pair();
        let trace = extended_run(
            &pair,
            &IterationConfig::extended(1.0, 0.9).with_max_steps(0),
        )
        .unwrap();
        assert!(trace.records.is_empty());
        assert_eq!(trace.termination, Termination::MaxSteps);
        assert_eq!(trace.start.phase, Phase::Start);
    }

    #[test]
    fn iterative_solvers_drive_extended_run_on_diagonal_pair() {
        let pair = table1_pair();
        for method in [SolveMethod::Jacobi, SolveMethod::GaussSeidel] {
            let mut cfg = IterationConfig::extended(1.0, 0.9).with_solver(method);
            cfg.solve_options.warm_start = true;
            let trace = extended_run(&pair, &cfg).unwrap();
            assert!(trace.converged, "{method:?}");
            assert!((trace.last().e_estimate - 2.0).abs() < 1e-12);
            let last = trace.last();
            assert!(last.matvec_count >= last.solve_count + last.full_step);
        }
    }

    #[test]
    fn start_dimension_is_checked() {
        let pair = table1_pair();
        let cfg = IterationConfig::extended(1.0, 0.9).with_start(StateVector::ones(2).unwrap());
        assert!(matches!(
            extended_run(&pair, &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rr2x2_reaches_tight_tolerance() {
        use crate::spectrum::{
            build_commuting_pair, pseudo_convergence_fixture, start_from_coefficients,
        };
        let (spec, coeffs) = pseudo_convergence_fixture();
        let (pair, basis) = build_commuting_pair(&spec).unwrap();
        let start = start_from_coefficients(&basis, &coeffs).unwrap();
        let trace = rr2x2_run(pair.h(), &IterationConfig::default().with_start(start)).unwrap();
        assert!(trace.converged);
        assert!(trace.full_steps() < 100, "{} steps", trace.full_steps());
    }
}
