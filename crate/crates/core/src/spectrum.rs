//! Commuting-pair problems built from declared spectra, the reference
//! fixtures, and a cyclic Jacobi eigensolver used as an independent oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::operator::{
    apply, dot, norm2, normalize, CommutingPair, StateVector, SymmetricOperator,
};

/// Paired simultaneous eigenvalues `(e_i, s_i)` of `H` and `S`, plus an
/// optional seed for rotating the shared eigenbasis away from the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub pairs: Vec<(f64, f64)>,
    pub rotation_seed: Option<u64>,
}

impl SpectrumSpec {
    pub fn new(pairs: Vec<(f64, f64)>) -> Self {
        Self {
            pairs,
            rotation_seed: None,
        }
    }

    pub fn rotated(mut self, seed: u64) -> Self {
        self.rotation_seed = Some(seed);
        self
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn e_values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn s_values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

/// Dense square matrix whose columns form an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    dim: usize,
    // column-major: column j is data[j*dim..(j+1)*dim]
    data: Vec<f64>,
}

impl Basis {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    fn from_columns(dim: usize, data: Vec<f64>) -> Self {
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.dim + row]
    }

    /// `Q·c`: maps eigenbasis coefficients to standard coordinates.
    pub fn to_standard(&self, coefficients: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (j, c) in coefficients.iter().enumerate() {
            for (o, q) in out.iter_mut().zip(self.column(j)) {
                *o += c * q;
            }
        }
        out
    }

    /// `Qᵀ·v`: coefficients of `v` along each basis column.
    pub fn coefficients(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|j| dot(self.column(j), v)).collect()
    }

    /// `‖QᵀQ − I‖_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let g = dot(self.column(i), self.column(j)) - if i == j { 1.0 } else { 0.0 };
                acc += g * g;
            }
        }
        acc.sqrt()
    }

    /// `Q·diag(values)·Qᵀ`, symmetrized exactly.
    pub fn conjugate_diagonal(&self, values: &[f64]) -> SymmetricOperator {
        let n = self.dim;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for (k, lam) in values.iter().enumerate() {
                    acc += self.get(i, k) * lam * self.get(j, k);
                }
                m[i * n + j] = acc;
                m[j * n + i] = acc;
            }
        }
        SymmetricOperator::from_symmetric_unchecked(n, m)
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Basis,
    /// `‖A·V − V·diag(λ)‖_F`.
    pub residual: f64,
}

/// Builds `H = Q·diag(e)·Qᵀ`, `S = Q·diag(s)·Qᵀ` and returns the pair with `Q`.
pub fn build_commuting_pair(spec: &SpectrumSpec) -> Result<(CommutingPair, Basis)> {
    if spec.pairs.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if spec
        .pairs
        .iter()
        .any(|(e, s)| !e.is_finite() || !s.is_finite())
    {
        return Err(Error::NonFinite);
    }
    let n = spec.dim();
    let basis = match spec.rotation_seed {
        Some(seed) => random_orthogonal(n, seed)?,
        None => Basis::identity(n),
    };
    let h = basis.conjugate_diagonal(&spec.e_values());
    let s = basis.conjugate_diagonal(&spec.s_values());
    let pair = CommutingPair::new(h, s)?;
    Ok((pair, basis))
}

/// Deterministic random orthogonal matrix.
///
/// Entries of an `n × n` matrix are drawn from a standard normal distribution
/// fed by ChaCha8 seeded with `seed_from_u64(seed)`, filled column by column;
/// the columns are then orthonormalized by modified Gram–Schmidt with one
/// reorthogonalization pass.
pub fn random_orthogonal(n: usize, seed: u64) -> Result<Basis> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<f64> = (0..n * n)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = data.split_at_mut(j * n);
                let qk = &done[k * n..(k + 1) * n];
                let col = &mut rest[..n];
                let proj = dot(qk, col);
                for (c, q) in col.iter_mut().zip(qk) {
                    *c -= proj * q;
                }
            }
        }
        let col = &mut data[j * n..(j + 1) * n];
        let norm = norm2(col);
        if norm <= 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "random matrix is numerically rank deficient at column {j}"
            )));
        }
        for c in col.iter_mut() {
            *c /= norm;
        }
    }
    Ok(Basis::from_columns(n, data))
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most
/// `1e-12·‖A‖_F`.
pub fn jacobi_eigensolve(a: &SymmetricOperator) -> Result<EigenDecomposition> {
    let n = a.dim();
    let scale = a.frobenius_norm();
    let mut m = a.entries().to_vec();
    let mut v = Basis::identity(n).data;
    let off = |m: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += m[i * n + j] * m[i * n + j];
                }
            }
        }
        acc.sqrt()
    };
    let target = 1e-12 * scale;
    let mut sweeps = 0;
    while off(&m) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::OracleFailure {
                sweeps,
                off_norm: off(&m),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J, rotating rows/columns p and q.
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                // columns p and q of V
                for k in 0..n {
                    let vkp = v[p * n + k];
                    let vkq = v[q * n + k];
                    v[p * n + k] = c * vkp - s * vkq;
                    v[q * n + k] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut data = Vec::with_capacity(n * n);
    for &i in &order {
        data.extend_from_slice(&v[i * n..(i + 1) * n]);
    }
    let eigenvectors = Basis::from_columns(n, data);

    let mut residual = 0.0;
    for (j, lam) in eigenvalues.iter().enumerate() {
        let col = eigenvectors.column(j);
        let av = apply(a, col)?;
        residual += av
            .iter()
            .zip(col)
            .map(|(x, y)| (x - lam * y).powi(2))
            .sum::<f64>();
    }
    let residual = residual.sqrt();
    if residual > 1e-9 * scale || eigenvectors.orthonormality_residual() > 1e-10 {
        return Err(Error::OracleFailure {
            sweeps,
            off_norm: off(&m),
        });
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        residual,
    })
}

/// A simultaneous eigenpair recovered from a commuting pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousEigenpair {
    pub e: f64,
    pub s: f64,
    pub vector: StateVector,
}

/// Simultaneous eigenpairs of a commuting pair, from the Jacobi decomposition
/// of `H + c·S` for a generic mixing constant `c`. Sorted by `e`, then `s`.
pub fn simultaneous_spectrum(pair: &CommutingPair) -> Result<Vec<SimultaneousEigenpair>> {
    let h = pair.h();
    let s = pair.s();
    let (hn, sn) = (h.frobenius_norm(), s.frobenius_norm());
    let c = if sn > 0.0 {
        0.618_033_988_749_894_8 * hn.max(1.0) / sn
    } else {
        0.0
    };
    let n = h.dim();
    let mixed: Vec<f64> = h
        .entries()
        .iter()
        .zip(s.entries())
        .map(|(a, b)| a + c * b)
        .collect();
    let mixed = SymmetricOperator::from_symmetric_unchecked(n, mixed);
    let dec = jacobi_eigensolve(&mixed)?;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let (vector, _) = normalize(dec.eigenvectors.column(j))?;
        let e = dot(vector.components(), &apply(h, vector.components())?);
        let sv = dot(vector.components(), &apply(s, vector.components())?);
        out.push(SimultaneousEigenpair {
            e,
            s: sv,
            vector: vector.canonical(),
        });
    }
    out.sort_by(|a, b| a.e.total_cmp(&b.e).then(a.s.total_cmp(&b.s)));
    Ok(out)
}

/// The 3-dimensional diagonal problem: `e = (1, 2, 3)`, `s = (1.5, 1, 0.5)`.
pub fn table1_fixture() -> SpectrumSpec {
    SpectrumSpec::new(vec![(1.0, 1.5), (2.0, 1.0), (3.0, 0.5)])
}

/// Anchor states (1-based position, e, s) of the 15-dimensional problem.
pub const TABLE2_ANCHORS: [(usize, f64, f64); 7] = [
    (1, 3.4, 0.3),
    (5, 1.0, 1.5),
    (6, -0.1, 1.8),
    (7, -0.2, 1.9),
    (8, -2.0, 2.0),
    (11, -3.8, 2.9),
    (15, -5.4, 4.1),
];

/// The 15-dimensional diagonal problem: the seven anchor states with the
/// remaining positions filled by linear interpolation between neighbours.
pub fn table2_fixture() -> SpectrumSpec {
    let mut pairs = Vec::with_capacity(15);
    for w in TABLE2_ANCHORS.windows(2) {
        let (p0, e0, s0) = w[0];
        let (p1, e1, s1) = w[1];
        let span = (p1 - p0) as f64;
        for p in p0..p1 {
            if p == p0 {
                pairs.push((e0, s0));
            } else {
                let t = (p - p0) as f64 / span;
                pairs.push((e0 + t * (e1 - e0), s0 + t * (s1 - s0)));
            }
        }
    }
    let (_, e, s) = TABLE2_ANCHORS[TABLE2_ANCHORS.len() - 1];
    pairs.push((e, s));
    SpectrumSpec::new(pairs)
}

/// An 8-state rotated problem with a dominant, lowest ground state
/// (`e = −5`, `s = 0.5`) and two nearly degenerate high states (`e = 3.0`
/// and `3.03`) that the start vector over-weights by `10⁶`.
pub fn pseudo_convergence_fixture() -> (SpectrumSpec, Vec<f64>) {
    let spec = SpectrumSpec::new(vec![
        (-5.0, 0.5),
        (-2.5, 1.0),
        (-1.0, 1.5),
        (0.5, 2.0),
        (1.0, 2.5),
        (2.0, 3.0),
        (3.0, 3.5),
        (3.03, 4.0),
    ])
    .rotated(1979);
    let coefficients = vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1e6, 1e6];
    (spec, coefficients)
}

/// Builds a unit start vector with the given eigenbasis coefficients.
pub fn start_from_coefficients(basis: &Basis, coefficients: &[f64]) -> Result<StateVector> {
    if coefficients.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            actual: coefficients.len(),
        });
    }
    normalize(&basis.to_standard(coefficients)).map(|(v, _)| v)
}
