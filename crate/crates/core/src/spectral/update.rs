//! Exact eigenvalues of a symmetric matrix after a low-rank symmetric update.
//!
//! Given `X = V Λ Vᵀ` and an update `X' = X + Y M Yᵀ` with `Y` of rank at
//! most [`MAX_RANK`], the count of eigenvalues of `X'` below `μ` follows from
//! Haynsworth inertia additivity applied to
//!
//! ```text
//!     B(μ) = [ Λ − μ     Z   ]      Z = Vᵀ Y,
//!            [  Zᵀ    −M⁻¹   ]
//! ```
//!
//! Taking Schur complements in both orders gives
//! `neg(X' − μ) = neg(Λ − μ) + neg(K(μ)) − neg(−M⁻¹)` with
//! `K(μ) = −M⁻¹ − Σ_i z_i z_iᵀ / (λ_i − μ)`. Each count costs `O(n k²)`, so any
//! single eigenvalue of `X'` is found by bisection to full working precision
//! without forming or factoring `X'`. Nothing here is a perturbative
//! approximation: the only error sources are rounding and the accuracy of
//! `(Λ, V)` itself.

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 4;

/// `Y M Yᵀ` expressed in the eigenbasis: row `i` of `z` holds `v_iᵀ Y`.
#[derive(Debug, Clone)]
pub struct LowRankUpdate {
    rank: usize,
    /// Row-major `n × rank`.
    z: Vec<f64>,
    /// `−M⁻¹`, row-major `rank × rank`.
    neg_m_inv: [f64; MAX_RANK * MAX_RANK],
    neg_m_inv_negatives: usize,
    /// Upper bound on `‖Y M Yᵀ‖₂`.
    norm_bound: f64,
}

impl LowRankUpdate {
    /// `z` is row-major `n × rank`, `m` row-major `rank × rank` symmetric and
    /// invertible.
    pub fn new(rank: usize, z: Vec<f64>, m: &[f64]) -> Result<Self> {
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::Parameter(format!("update rank must be in 1..={MAX_RANK}, got {rank}")));
        }
        if m.len() != rank * rank || z.len() % rank != 0 {
            return Err(Error::Parameter("update factor dimensions disagree".into()));
        }
        let inv = invert_small(rank, m)?;
        let mut neg_m_inv = [0.0; MAX_RANK * MAX_RANK];
        for (dst, src) in neg_m_inv.iter_mut().zip(&inv) {
            *dst = -src;
        }
        let neg_m_inv_negatives = negative_count(rank, &neg_m_inv);
        let m_norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        let z_norm2 = z.iter().map(|x| x * x).sum::<f64>();
        Ok(LowRankUpdate {
            rank,
            z,
            neg_m_inv,
            neg_m_inv_negatives,
            norm_bound: m_norm * z_norm2,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of eigenvalues of `X'` strictly below `mu`.
    pub fn count_below(&self, base: &[f64], mu: f64) -> usize {
        let k = self.rank;
        let mut kmat = self.neg_m_inv;
        let mut below = 0usize;
        for (i, &lambda) in base.iter().enumerate() {
            let mut gap = lambda - mu;
            if gap < 0.0 {
                below += 1;
            }
            if gap == 0.0 {
                // μ sits exactly on a base eigenvalue; nudge the pole.
                gap = f64::MIN_POSITIVE.max(mu.abs() * f64::EPSILON);
            }
            let row = &self.z[i * k..(i + 1) * k];
            let w = 1.0 / gap;
            for a in 0..k {
                let za = row[a] * w;
                if za == 0.0 {
                    continue;
                }
                for b in 0..k {
                    kmat[a * k + b] -= za * row[b];
                }
            }
        }
        let neg_k = negative_count(k, &kmat);
        (below + neg_k).saturating_sub(self.neg_m_inv_negatives)
    }

    /// Eigenvalue `index` (0-based, ascending) of `X'`, where `base` holds the
    /// eigenvalues of `X` in ascending order.
    pub fn eigenvalue(&self, base: &[f64], index: usize) -> Result<f64> {
        let n = base.len();
        if index >= n {
            return Err(Error::Parameter(format!("eigenvalue index {index} out of range for n = {n}")));
        }
        let scale = base.iter().fold(0.0f64, |m, x| m.max(x.abs())) + self.norm_bound;
        let slack = 1e-12 * scale.max(1e-300);
        // Weyl plus rank-k interlacing.
        let mut lo = base[index] - self.norm_bound;
        if index >= self.rank {
            lo = lo.max(base[index - self.rank]);
        }
        let mut hi = base[index] + self.norm_bound;
        if index + self.rank < n {
            hi = hi.min(base[index + self.rank]);
        }
        lo -= slack;
        hi += slack;
        let mut widen = slack;
        while self.count_below(base, lo) > index {
            widen *= 2.0;
            lo -= widen.max(self.norm_bound);
            if !lo.is_finite() {
                return Err(Error::Numeric("bisection bracket diverged".into()));
            }
        }
        widen = slack;
        while self.count_below(base, hi) <= index {
            widen *= 2.0;
            hi += widen.max(self.norm_bound);
            if !hi.is_finite() {
                return Err(Error::Numeric("bisection bracket diverged".into()));
            }
        }
        let tol = 2.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(base, mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Gauss–Jordan inverse with partial pivoting for `k ≤ 4`.
fn invert_small(k: usize, m: &[f64]) -> Result<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; k * k];
    for i in 0..k {
        inv[i * k + i] = 1.0;
    }
    let scale = m.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x * k + col].abs().total_cmp(&a[y * k + col].abs()))
            .unwrap();
        if a[pivot * k + col].abs() <= 1e-14 * scale {
            return Err(Error::Numeric("update core matrix is singular".into()));
        }
        if pivot != col {
            for j in 0..k {
                a.swap(pivot * k + j, col * k + j);
                inv.swap(pivot * k + j, col * k + j);
            }
        }
        let d = a[col * k + col];
        for j in 0..k {
            a[col * k + j] /= d;
            inv[col * k + j] /= d;
        }
        for r in 0..k {
            if r != col {
                let f = a[r * k + col];
                if f != 0.0 {
                    for j in 0..k {
                        a[r * k + j] -= f * a[col * k + j];
                        inv[r * k + j] -= f * inv[col * k + j];
                    }
                }
            }
        }
    }
    // symmetrize away rounding
    for i in 0..k {
        for j in 0..i {
            let s = 0.5 * (inv[i * k + j] + inv[j * k + i]);
            inv[i * k + j] = s;
            inv[j * k + i] = s;
        }
    }
    Ok(inv)
}

/// Number of negative eigenvalues of a small symmetric matrix, via cyclic
/// Jacobi rotations.
fn negative_count(k: usize, m: &[f64; MAX_RANK * MAX_RANK]) -> usize {
    let mut a = *m;
    for _sweep in 0..50 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..k {
            diag += a[i * k + i] * a[i * k + i];
            for j in 0..k {
                if i != j {
                    off += a[i * k + j] * a[i * k + j];
                }
            }
        }
        if off <= 1e-30 * diag || off == 0.0 {
            break;
        }
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * k + p];
                let aqq = a[q * k + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let arp = a[r * k + p];
                    let arq = a[r * k + q];
                    a[r * k + p] = c * arp - s * arq;
                    a[r * k + q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[p * k + r];
                    let aqr = a[q * k + r];
                    a[p * k + r] = c * apr - s * aqr;
                    a[q * k + r] = s * apr + c * aqr;
                }
            }
        }
    }
    (0..k).filter(|&i| a[i * k + i] < 0.0).count()
}
