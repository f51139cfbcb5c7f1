//! Dense real symmetric operators and unit state vectors.
//!
//! Every scheme in this crate reduces to matrix–vector products, Rayleigh
//! quotients and normalization on these two types. Values are immutable once
//! built; all operations return fresh values.

use std::ops::Index;

use crate::error::{Error, Result};

/// Largest Frobenius-norm correction the symmetrizing constructor accepts.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;
/// Norm below which a vector is treated as zero.
pub const ZERO_NORM: f64 = 1e-300;
/// Deviation from unit norm allowed for a [`StateVector`].
pub const NORMALIZED_TOLERANCE: f64 = 1e-12;
/// Deviation from unit norm accepted by [`rayleigh`].
pub const RAYLEIGH_NORM_TOLERANCE: f64 = 1e-9;
/// Default commutator tolerance for [`CommutingPair`].
pub const DEFAULT_COMMUTATOR_TOLERANCE: f64 = 1e-10;

/// Dense `dim × dim` real symmetric matrix, stored row-major.
///
/// A diagonal shift applied through [`shifted`] is kept alongside the
/// unshifted entries, so shifting by `mu` and then by `-mu` restores the
/// original entries bit for bit.
#[derive(Debug, Clone)]
pub struct SymmetricOperator {
    dim: usize,
    base: Vec<f64>,
    shift: f64,
    entries: Vec<f64>,
}

impl PartialEq for SymmetricOperator {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl SymmetricOperator {
    /// Builds an operator from row-major entries, symmetrizing as `(A + Aᵀ)/2`.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if entries.len() != dim * dim {
            return Err(Error::BadShape {
                dim,
                count: entries.len(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut sym = entries.clone();
        let mut correction = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i];
                let avg = 0.5 * (a + b);
                correction += (a - avg).powi(2) + (b - avg).powi(2);
                sym[i * dim + j] = avg;
                sym[j * dim + i] = avg;
            }
        }
        let correction = correction.sqrt();
        if correction > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric { correction });
        }
        Ok(Self::from_symmetric_unchecked(dim, sym))
    }

    /// Builds an operator from a list of rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::BadShape {
                    dim,
                    count: dim * (dim - 1) + row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_row_major(dim, entries)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, v) in values.iter().enumerate() {
            entries[i * dim + i] = *v;
        }
        Self::from_row_major(dim, entries)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; dim])
    }

    // Caller guarantees exact symmetry.
    pub(crate) fn from_symmetric_unchecked(dim: usize, entries: Vec<f64>) -> Self {
        Self {
            dim,
            base: entries.clone(),
            shift: 0.0,
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries (with any diagonal shift already applied).
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Dense product `self · other` as row-major entries (not symmetric in general).
    pub fn matmul(&self, other: &SymmetricOperator) -> Result<Vec<f64>> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for SymmetricOperator {
    type Output = f64;

    fn index(&self, (row, col): (usize, usize)) -> &f64 {
        &self.entries[row * self.dim + col]
    }
}

/// Unit-norm real vector: an iterate of one of the eigen-iteration schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: Vec<f64>,
}

impl StateVector {
    /// Wraps components that are already normalized to within 1e-12.
    pub fn from_normalized(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let norm = norm2(&components);
        if (norm - 1.0).abs() > NORMALIZED_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { components })
    }

    /// Normalized all-ones vector, the default start vector.
    pub fn ones(dim: usize) -> Result<Self> {
        normalize(&vec![1.0; dim]).map(|(v, _)| v)
    }

    /// Unit basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index + 1,
            });
        }
        let mut c = vec![0.0; dim];
        c[index] = 1.0;
        Ok(Self { components: c })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.components
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.components)
    }

    /// Sign representative with the largest-magnitude component positive.
    pub fn canonical(&self) -> StateVector {
        let mut best = 0;
        for (i, c) in self.components.iter().enumerate() {
            if c.abs() > self.components[best].abs() {
                best = i;
            }
        }
        if self.components[best] < 0.0 {
            Self {
                components: self.components.iter().map(|c| -c).collect(),
            }
        } else {
            self.clone()
        }
    }

    /// Overlap `⟨self|other⟩`.
    pub fn overlap(&self, other: &[f64]) -> Result<f64> {
        check_dim(self.dim(), other.len())?;
        Ok(dot(&self.components, other))
    }
}

impl AsRef<[f64]> for StateVector {
    fn as_ref(&self) -> &[f64] {
        &self.components
    }
}

/// An `(H, S)` pair whose commutator has been certified small.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingPair {
    h: SymmetricOperator,
    s: SymmetricOperator,
    commutator_tolerance: f64,
    commutator_norm: f64,
}

impl CommutingPair {
    pub fn new(h: SymmetricOperator, s: SymmetricOperator) -> Result<Self> {
        Self::with_tolerance(h, s, DEFAULT_COMMUTATOR_TOLERANCE)
    }

    pub fn with_tolerance(
        h: SymmetricOperator,
        s: SymmetricOperator,
        commutator_tolerance: f64,
    ) -> Result<Self> {
        if commutator_tolerance.is_nan() || commutator_tolerance < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "commutator tolerance must be nonnegative, got {commutator_tolerance}"
            )));
        }
        let norm = commutator_norm(&h, &s)?;
        if norm > commutator_tolerance {
            return Err(Error::NotCommuting {
                norm,
                tolerance: commutator_tolerance,
            });
        }
        Ok(Self {
            h,
            s,
            commutator_tolerance,
            commutator_norm: norm,
        })
    }

    pub fn h(&self) -> &SymmetricOperator {
        &self.h
    }

    pub fn s(&self) -> &SymmetricOperator {
        &self.s
    }

    pub fn dim(&self) -> usize {
        self.h.dim
    }

    pub fn commutator_tolerance(&self) -> f64 {
        self.commutator_tolerance
    }

    /// Measured Frobenius norm of `HS − SH` at construction.
    pub fn commutator_norm(&self) -> f64 {
        self.commutator_norm
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        Err(Error::DimensionMismatch { expected, actual })
    } else {
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Matrix–vector product `A·v`.
pub fn apply(a: &SymmetricOperator, v: &[f64]) -> Result<Vec<f64>> {
    check_dim(a.dim, v.len())?;
    Ok((0..a.dim).map(|i| dot(a.row(i), v)).collect())
}

/// Rayleigh quotient `⟨v|A|v⟩` of a unit vector.
pub fn rayleigh(a: &SymmetricOperator, v: &[f64]) -> Result<f64> {
    let norm = norm2(v);
    if (norm - 1.0).abs() > RAYLEIGH_NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    let av = apply(a, v)?;
    Ok(dot(v, &av))
}

/// Scales `v` to unit length, returning the unit vector and the original norm.
pub fn normalize(v: &[f64]) -> Result<(StateVector, f64)> {
    if v.is_empty() {
        return Err(Error::EmptyDimension);
    }
    let norm = norm2(v);
    if norm.is_nan() || norm <= ZERO_NORM {
        return Err(Error::ZeroVector { norm });
    }
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    let components = v.iter().map(|x| x / norm).collect();
    Ok((StateVector { components }, norm))
}

/// Frobenius norm of `HS − SH`.
pub fn commutator_norm(h: &SymmetricOperator, s: &SymmetricOperator) -> Result<f64> {
    let hs = h.matmul(s)?;
    let sh = s.matmul(h)?;
    Ok(hs
        .iter()
        .zip(&sh)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// `S − μE`.
pub fn shifted(s: &SymmetricOperator, mu: f64) -> SymmetricOperator {
    let shift = s.shift + mu;
    let n = s.dim;
    let mut entries = s.base.clone();
    if shift != 0.0 {
        for i in 0..n {
            entries[i * n + i] -= shift;
        }
    }
    SymmetricOperator {
        dim: n,
        base: s.base.clone(),
        shift,
        entries,
    }
}
