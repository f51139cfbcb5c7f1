//! Dense solvers for the inhomogeneous system `(S − μE)x = b` met in each
//! extended-iteration step: Gaussian elimination with partial pivoting, and
//! the classical Jacobi and Gauss–Seidel sweeps.

use crate::error::{Error, Result};
use crate::operator::{apply, norm2, SymmetricOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMethod {
    #[default]
    DirectGauss,
    Jacobi,
    GaussSeidel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub method: SolveMethod,
    /// Target relative residual for the iterative methods.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Pivots below `pivot_threshold · max|A_ij|` mark the system singular.
    pub pivot_threshold: f64,
    /// Start iterative solves from a scaled copy of the current iterate
    /// instead of the zero vector.
    pub warm_start: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: SolveMethod::DirectGauss,
            tolerance: 1e-12,
            max_sweeps: 10_000,
            pivot_threshold: 1e-12,
            warm_start: false,
        }
    }
}

impl SolveOptions {
    pub fn with_method(method: SolveMethod) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "solver tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be at least 1".into()));
        }
        if self.pivot_threshold.is_nan() || self.pivot_threshold <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "pivot threshold must be positive, got {}",
                self.pivot_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    /// `‖A·x − b‖₂ / max(‖b‖₂, 1e-300)`, recomputed from the returned solution.
    pub relative_residual: f64,
    /// Zero for the direct method.
    pub sweeps_used: usize,
}

/// Relative residual `‖A·x − b‖₂ / max(‖b‖₂, 1e-300)`.
pub fn relative_residual(a: &SymmetricOperator, x: &[f64], b: &[f64]) -> Result<f64> {
    let ax = apply(a, x)?;
    let r: Vec<f64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    Ok(norm2(&r) / norm2(b).max(1e-300))
}

/// Dispatches on `opts.method`.
pub fn solve(a: &SymmetricOperator, b: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    solve_from(a, b, None, opts)
}

/// As [`solve`], with an optional start vector for the iterative methods.
pub fn solve_from(
    a: &SymmetricOperator,
    b: &[f64],
    guess: Option<&[f64]>,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    match opts.method {
        SolveMethod::DirectGauss => solve_gauss(a, b, opts),
        SolveMethod::Jacobi => sweep(a, b, guess, opts, Splitting::Jacobi),
        SolveMethod::GaussSeidel => sweep(a, b, guess, opts, Splitting::GaussSeidel),
    }
}

/// Gaussian elimination with partial pivoting.
pub fn solve_gauss(a: &SymmetricOperator, b: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    check_rhs(a, b)?;
    opts.validate()?;
    let n = a.dim();
    let scale = a.max_abs_entry();
    let threshold = opts.pivot_threshold * scale;
    let mut m = a.entries().to_vec();
    let mut rhs = b.to_vec();

    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, m[i * n + k].abs()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pivot < threshold || pivot == 0.0 {
            return Err(Error::SingularSystem {
                row: k,
                pivot,
                threshold,
            });
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            rhs.swap(k, p);
        }
        let d = m[k * n + k];
        for i in (k + 1)..n {
            let f = m[i * n + k] / d;
            if f == 0.0 {
                continue;
            }
            m[i * n + k] = 0.0;
            for j in (k + 1)..n {
                m[i * n + j] -= f * m[k * n + j];
            }
            rhs[i] -= f * rhs[k];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = ((i + 1)..n).map(|j| m[i * n + j] * x[j]).sum();
        x[i] = (rhs[i] - tail) / m[i * n + i];
    }
    let relative_residual = relative_residual(a, &x, b)?;
    Ok(SolveReport {
        solution: x,
        relative_residual,
        sweeps_used: 0,
    })
}

/// Classical Jacobi sweeps from the zero vector.
pub fn solve_jacobi(a: &SymmetricOperator, b: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    sweep(a, b, None, opts, Splitting::Jacobi)
}

/// Forward Gauss–Seidel sweeps from the zero vector.
pub fn solve_gauss_seidel(
    a: &SymmetricOperator,
    b: &[f64],
    opts: &SolveOptions,
) -> Result<SolveReport> {
    sweep(a, b, None, opts, Splitting::GaussSeidel)
}

#[derive(Clone, Copy)]
enum Splitting {
    Jacobi,
    GaussSeidel,
}

fn sweep(
    a: &SymmetricOperator,
    b: &[f64],
    guess: Option<&[f64]>,
    opts: &SolveOptions,
    splitting: Splitting,
) -> Result<SolveReport> {
    check_rhs(a, b)?;
    opts.validate()?;
    let n = a.dim();
    let diag = a.diag();
    if let Some(row) = diag.iter().position(|d| *d == 0.0) {
        return Err(Error::UnusableSplitting { row });
    }
    let mut x = match guess {
        Some(g) => {
            check_rhs(a, g)?;
            g.to_vec()
        }
        None => vec![0.0; n],
    };
    let mut next = x.clone();
    let mut residual = relative_residual(a, &x, b)?;
    for sweeps in 1..=opts.max_sweeps {
        match splitting {
            Splitting::Jacobi => {
                for i in 0..n {
                    let off: f64 = a
                        .row(i)
                        .iter()
                        .zip(&x)
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, (aij, xj))| aij * xj)
                        .sum();
                    next[i] = (b[i] - off) / diag[i];
                }
                std::mem::swap(&mut x, &mut next);
            }
            Splitting::GaussSeidel => {
                for i in 0..n {
                    let off: f64 = a
                        .row(i)
                        .iter()
                        .zip(&x)
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, (aij, xj))| aij * xj)
                        .sum();
                    x[i] = (b[i] - off) / diag[i];
                }
            }
        }
        residual = relative_residual(a, &x, b)?;
        if residual <= opts.tolerance {
            return Ok(SolveReport {
                solution: x,
                relative_residual: residual,
                sweeps_used: sweeps,
            });
        }
        if !residual.is_finite() {
            return Err(Error::NonConvergence {
                sweeps,
                residual,
                last_iterate: x,
            });
        }
    }
    Err(Error::NonConvergence {
        sweeps: opts.max_sweeps,
        residual,
        last_iterate: x,
    })
}

fn check_rhs(a: &SymmetricOperator, b: &[f64]) -> Result<()> {
    if a.dim() != b.len() {
        Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.len(),
        })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(rows: &[&[f64]]) -> SymmetricOperator {
        SymmetricOperator::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn gauss_examples() {
        let o = SolveOptions::default();
        let r = solve_gauss(&SymmetricOperator::identity(2).unwrap(), &[5.0, -2.0], &o).unwrap();
        assert_eq!(r.solution, vec![5.0, -2.0]);
        assert_eq!(r.sweeps_used, 0);
        let r = solve_gauss(
            &SymmetricOperator::diagonal(&[2.0, 4.0]).unwrap(),
            &[2.0, 4.0],
            &o,
        )
        .unwrap();
        assert_eq!(r.solution, vec![1.0, 1.0]);
        let a = SymmetricOperator::diagonal(&[0.6, 0.1, -0.4]).unwrap();
        let r = solve_gauss(&a, &[1.0, 2.0, 3.0], &o).unwrap();
        assert_close(&r.solution, &[1.0 / 0.6, 20.0, -7.5], 1e-12);
        assert!(r.relative_residual < 1e-15);
    }

    #[test]
    fn gauss_flags_rank_deficiency() {
        let a = op(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let err = solve_gauss(&a, &[1.0, 0.0], &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { row: 1, .. }));
        let zero = SymmetricOperator::diagonal(&[0.0, 0.0]).unwrap();
        assert!(solve_gauss(&zero, &[1.0, 0.0], &SolveOptions::default()).is_err());
    }

    #[test]
    fn jacobi_examples() {
        let o = SolveOptions::default();
        let r = solve_jacobi(
            &SymmetricOperator::identity(3).unwrap(),
            &[1.0, -4.0, 2.5],
            &o,
        )
        .unwrap();
        assert_eq!(r.solution, vec![1.0, -4.0, 2.5]);
        assert_eq!(r.sweeps_used, 1);

        let a = op(&[&[4.0, 1.0], &[1.0, 3.0]]);
        let direct = solve_gauss(&a, &[1.0, 2.0], &o).unwrap();
        let jac = solve_jacobi(&a, &[1.0, 2.0], &o).unwrap();
        assert_close(&jac.solution, &direct.solution, 1e-10);
        let gs = solve_gauss_seidel(&a, &[1.0, 2.0], &o).unwrap();
        assert_close(&gs.solution, &direct.solution, 1e-10);
        assert!(gs.sweeps_used <= jac.sweeps_used);
    }

    #[test]
    fn jacobi_diverges_when_spectral_radius_exceeds_one() {
        // Iteration matrix -D⁻¹(L+U) = [[0,-2],[-2,0]] has spectral radius 2.
        let a = op(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let err = solve_jacobi(&a, &[1.0, 1.0], &SolveOptions::default()).unwrap_err();
        match err {
            Error::NonConvergence {
                residual,
                last_iterate,
                ..
            } => {
                assert!(residual.is_nan() || residual > 1e-12);
                assert_eq!(last_iterate.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_diagonal_is_an_unusable_splitting() {
        let a = op(&[&[0.0, 1.0], &[1.0, 2.0]]);
        let err = solve_gauss_seidel(&a, &[1.0, 1.0], &SolveOptions::default()).unwrap_err();
        assert_eq!(err, Error::UnusableSplitting { row: 0 });
    }

    #[test]
    fn gauss_seidel_diagonal_system_in_one_sweep() {
        let a = SymmetricOperator::diagonal(&[2.0, -3.0, 5.0]).unwrap();
        let r = solve_gauss_seidel(&a, &[2.0, 3.0, 5.0], &SolveOptions::default()).unwrap();
        assert_eq!(r.solution, vec![1.0, -1.0, 1.0]);
        assert_eq!(r.sweeps_used, 1);
    }

    #[test]
    fn sweep_limit_reports_last_iterate() {
        let a = op(&[&[4.0, 1.0], &[1.0, 3.0]]);
        let opts = SolveOptions {
            method: SolveMethod::Jacobi,
            max_sweeps: 2,
            ..SolveOptions::default()
        };
        match solve(&a, &[1.0, 2.0], &opts).unwrap_err() {
            Error::NonConvergence { sweeps, .. } => assert_eq!(sweeps, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn options_are_validated() {
        let a = SymmetricOperator::identity(2).unwrap();
        let bad = SolveOptions {
            tolerance: 0.0,
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve(&a, &[1.0, 1.0], &bad),
            Err(Error::InvalidConfig(_))
        ));
        let bad = SolveOptions {
            max_sweeps: 0,
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve_jacobi(&a, &[1.0, 1.0], &bad),
            Err(Error::InvalidConfig(_))
        ));
    }
}
