//! Dense symmetric eigendecomposition.
//!
//! The heavy lifting (Householder tridiagonalization followed by a
//! tridiagonal eigensolver) is done by `faer`, built without its rayon
//! feature so every decomposition runs on one thread and is bit-reproducible.
//! This module fixes the ordering and sign conventions on top of it.

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::matrix::SymmetricMatrix;
use crate::error::{Error, Result};

/// Largest accepted `‖Mv − λv‖₂`, relative to the spectral radius.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Largest accepted `|⟨v_i, v_j⟩ − δ_ij|`.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Two eigenvalues closer than this are treated as one repeated eigenvalue.
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// Smallest first; used for Laplacians.
    Ascending,
    /// Largest first; used for adjacency matrices.
    Descending,
}

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix.
///
/// Column `k` of the eigenvector matrix belongs to `eigenvalues[k]`. In every
/// column the entry of largest magnitude is positive (ties, up to a relative
/// `1e-12`, go to the lowest index).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Column-major: column `k` is `vectors[k*n..(k+1)*n]`.
    vectors: Vec<f64>,
    ordering: Ordering,
    max_residual: f64,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// Unit eigenvector `k`.
    pub fn vector(&self, k: usize) -> &[f64] {
        let n = self.n();
        &self.vectors[k * n..(k + 1) * n]
    }

    /// Entry `i` of eigenvector `k`.
    pub fn entry(&self, i: usize, k: usize) -> f64 {
        self.vectors[k * self.n() + i]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.vectors.chunks_exact(self.n().max(1)).take(self.n())
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `max |⟨v_i, v_j⟩ − δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.n();
        let v = Mat::from_fn(n, n, |i, k| self.entry(i, k));
        let gram = v.transpose() * &v;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// `V Λ Vᵀ`.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        let n = self.n();
        let v = Mat::from_fn(n, n, |i, k| self.entry(i, k));
        let vl = Mat::from_fn(n, n, |i, k| self.entry(i, k) * self.eigenvalues[k]);
        let r = &vl * v.transpose();
        SymmetricMatrix::from_lower_fn(n, |i, j| 0.5 * (r[(i, j)] + r[(j, i)]))
    }

    /// True when eigenvalue `k` is within [`DEGENERACY_GAP`] of a neighbour.
    pub fn is_degenerate(&self, k: usize) -> bool {
        let ev = &self.eigenvalues;
        (k > 0 && (ev[k] - ev[k - 1]).abs() < DEGENERACY_GAP)
            || (k + 1 < ev.len() && (ev[k + 1] - ev[k]).abs() < DEGENERACY_GAP)
    }
}

fn check_finite(m: &SymmetricMatrix) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::Numeric("matrix has non-finite entries".into()))
    }
}

fn is_diagonal(m: &SymmetricMatrix) -> bool {
    let n = m.n();
    (0..n).all(|i| (0..i).all(|j| m.get(i, j) == 0.0))
}

/// Stable permutation putting `values` in the requested order; ties keep
/// their original relative order.
fn order_permutation(values: &[f64], ordering: Ordering) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    match ordering {
        Ordering::Ascending => idx.sort_by(|&a, &b| values[a].total_cmp(&values[b])),
        Ordering::Descending => idx.sort_by(|&a, &b| values[b].total_cmp(&values[a])),
    }
    idx
}

fn fix_sign(column: &mut [f64]) {
    let max = column.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let cutoff = max * (1.0 - 1e-12);
    let pivot = column.iter().position(|x| x.abs() >= cutoff).unwrap();
    if column[pivot] < 0.0 {
        column.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Eigenvalues only, sorted per `ordering`.
pub fn eigenvalues(m: &SymmetricMatrix, ordering: Ordering) -> Result<Vec<f64>> {
    check_finite(m)?;
    let mut values = if is_diagonal(m) {
        (0..m.n()).map(|i| m.get(i, i)).collect()
    } else {
        m.to_faer()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numeric(format!("eigenvalue iteration failed: {e:?}")))?
    };
    match ordering {
        Ordering::Ascending => values.sort_by(f64::total_cmp),
        Ordering::Descending => values.sort_by(|a, b| b.total_cmp(a)),
    }
    Ok(values)
}

/// Full eigendecomposition with the ordering and sign conventions of
/// [`SpectralDecomposition`].
pub fn eig_sym(m: &SymmetricMatrix, ordering: Ordering) -> Result<SpectralDecomposition> {
    check_finite(m)?;
    let n = m.n();
    let (raw_values, raw_vectors): (Vec<f64>, Mat<f64>) = if is_diagonal(m) {
        ((0..n).map(|i| m.get(i, i)).collect(), Mat::identity(n, n))
    } else {
        let evd = m
            .to_faer()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numeric(format!("eigendecomposition failed: {e:?}")))?;
        let s = evd.S().column_vector();
        ((0..n).map(|k| s[k]).collect(), evd.U().to_owned())
    };

    let perm = order_permutation(&raw_values, ordering);
    let eigenvalues: Vec<f64> = perm.iter().map(|&k| raw_values[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in perm.iter().enumerate() {
        let column = &mut vectors[dst * n..(dst + 1) * n];
        for (i, x) in column.iter_mut().enumerate() {
            *x = raw_vectors[(i, src)];
        }
        fix_sign(column);
    }

    let mut decomposition = SpectralDecomposition {
        eigenvalues,
        vectors,
        ordering,
        max_residual: 0.0,
    };
    decomposition.max_residual = residual(m, &decomposition);
    Ok(decomposition)
}

/// `max_k ‖M v_k − λ_k v_k‖₂`.
fn residual(m: &SymmetricMatrix, d: &SpectralDecomposition) -> f64 {
    let n = m.n();
    if n == 0 {
        return 0.0;
    }
    let v = Mat::from_fn(n, n, |i, k| d.entry(i, k));
    let mv = m.to_faer() * &v;
    (0..n)
        .map(|k| {
            let lambda = d.eigenvalues[k];
            (0..n)
                .map(|i| {
                    let r = mv[(i, k)] - lambda * v[(i, k)];
                    r * r
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}
