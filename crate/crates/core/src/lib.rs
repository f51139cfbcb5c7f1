//! Dense iterative eigensolvers for real symmetric operators.
//!
//! Alongside the classical power method, shifted inverse iteration and 2×2
//! Rayleigh–Ritz iteration, the crate implements an extended power method for
//! a commuting pair `(H, S)`: pick an eigenvalue `s` of `S` and a shift `μ`,
//! and each step applies `(s − μ)(S − μE)⁻¹H` (realized as a linear solve)
//! so that the iterate converges to the simultaneous eigenvector of `H` and
//! `S` whose `S` eigenvalue is `s`.
//!
//! ```
//! use xpower::{build_commuting_pair, extended_run, table1_fixture, IterationConfig};
//!
//! let (pair, _) = build_commuting_pair(&table1_fixture()).unwrap();
//! let trace = extended_run(&pair, &IterationConfig::extended(1.0, 0.9)).unwrap();
//! assert!(trace.converged);
//! assert!((trace.last().e_estimate - 2.0).abs() < 1e-12);
//! ```

pub mod diagnostics;
pub mod error;
pub mod iteration;
pub mod operator;
pub mod solve;
pub mod spectrum;

pub use diagnostics::{
    cost_summary, detect_pseudo_convergence, detect_pseudo_convergence_default, predict_limit,
    ConvergencePrediction, CostSummary, PlateauCriterion, PseudoConvergenceReport,
};
pub use error::{Error, Result};
pub use iteration::{
    extended_run, extended_step, inverse_run, inverse_run_observed, inverse_step, power_run,
    power_run_observed, power_step, rr2x2_run, rr2x2_run_observed, rr2x2_step, IterationConfig,
    IterationTrace, Phase, RitzMode, StepRecord, Termination,
};
pub use operator::{
    apply, commutator_norm, normalize, rayleigh, shifted, CommutingPair, StateVector,
    SymmetricOperator,
};
pub use solve::{
    solve, solve_gauss, solve_gauss_seidel, solve_jacobi, SolveMethod, SolveOptions, SolveReport,
};
pub use spectrum::{
    build_commuting_pair, jacobi_eigensolve, pseudo_convergence_fixture, random_orthogonal,
    simultaneous_spectrum, start_from_coefficients, table1_fixture, table2_fixture, Basis,
    EigenDecomposition, SimultaneousEigenpair, SpectrumSpec,
};
