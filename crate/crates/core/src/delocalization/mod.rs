//! Entry-magnitude profiles of eigenvectors, and small-ball concentration
//! estimates for weighted Bernoulli sums ([`conc`]).

pub mod conc;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::graph::Graph;
use crate::spectral::{adjacency_matrix, eig_sym, normalized_adjacency, Ordering, SpectralDecomposition};

pub const HISTOGRAM_BINS: usize = 64;
pub const HISTOGRAM_LOW: f64 = 1e-6;
pub const HISTOGRAM_HIGH: f64 = 1e2;
/// Accepted deviation of `‖v‖₂` from 1.
pub const UNIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    A,
    Ahat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorId {
    pub matrix: MatrixKind,
    /// 0-based position in descending eigenvalue order.
    pub index: usize,
}

/// Magnitude cutoff for "large" entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// `1/(√n (log n)^C)`.
    Exponent(f64),
    /// `c/√n`.
    Scaled(f64),
}

impl Threshold {
    pub fn value(self, n: usize) -> f64 {
        let sqrt_n = (n as f64).sqrt();
        match self {
            Threshold::Exponent(c) => 1.0 / (sqrt_n * (n as f64).ln().powf(c)),
            Threshold::Scaled(c) => c / sqrt_n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelocalizationProfile {
    pub vector_id: Option<VectorId>,
    pub n: usize,
    pub threshold: f64,
    /// `#{i : |v(i)| ≥ threshold} / n`.
    pub fraction_above: f64,
    /// `‖v‖_∞ √n`.
    pub linf_ratio: f64,
    /// Keys `"2"`, `"4"`, `"inf"`.
    pub lq_norms: BTreeMap<String, f64>,
    /// Counts of `√n |v(i)|` in [`histogram_edges`] bins; values outside the
    /// range land in the end bins.
    pub histogram: Vec<u64>,
    /// The eigenvalue belonging to `v` is repeated, so `v` is one arbitrary
    /// basis vector of its eigenspace.
    pub degenerate: bool,
}

/// `HISTOGRAM_BINS + 1` log-spaced edges spanning `[HISTOGRAM_LOW, HISTOGRAM_HIGH]`.
pub fn histogram_edges() -> Vec<f64> {
    let (lo, hi) = (HISTOGRAM_LOW.log10(), HISTOGRAM_HIGH.log10());
    (0..=HISTOGRAM_BINS)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / HISTOGRAM_BINS as f64))
        .collect()
}

fn histogram_bin(x: f64) -> usize {
    if !(x > HISTOGRAM_LOW) {
        return 0;
    }
    let (lo, hi) = (HISTOGRAM_LOW.log10(), HISTOGRAM_HIGH.log10());
    let k = ((x.log10() - lo) / (hi - lo) * HISTOGRAM_BINS as f64).floor();
    (k.max(0.0) as usize).min(HISTOGRAM_BINS - 1)
}

fn check_unit(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(param("empty vector"));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= UNIT_TOL) {
        return Err(param(format!("vector must have unit norm, got {norm}")));
    }
    Ok(())
}

/// Profile at the threshold `1/(√n (log n)^C)`.
pub fn profile(v: &[f64], c_exponent: f64) -> Result<DelocalizationProfile> {
    profile_at(v, Threshold::Exponent(c_exponent))
}

pub fn profile_at(v: &[f64], threshold: Threshold) -> Result<DelocalizationProfile> {
    check_unit(v)?;
    let n = v.len();
    let threshold = threshold.value(n);
    let sqrt_n = (n as f64).sqrt();
    let mut histogram = vec![0u64; HISTOGRAM_BINS];
    let (mut above, mut l2, mut l4, mut linf) = (0usize, 0.0f64, 0.0f64, 0.0f64);
    for &x in v {
        let a = x.abs();
        if a >= threshold {
            above += 1;
        }
        l2 += a * a;
        l4 += a.powi(4);
        linf = linf.max(a);
        histogram[histogram_bin(sqrt_n * a)] += 1;
    }
    let lq_norms = BTreeMap::from([
        ("2".to_string(), l2.sqrt()),
        ("4".to_string(), l4.powf(0.25)),
        ("inf".to_string(), linf),
    ]);
    Ok(DelocalizationProfile {
        vector_id: None,
        n,
        threshold,
        fraction_above: above as f64 / n as f64,
        linf_ratio: linf * sqrt_n,
        lq_norms,
        histogram,
        degenerate: false,
    })
}

fn profile_of(d: &SpectralDecomposition, matrix: MatrixKind, index: usize, threshold: Threshold) -> Result<DelocalizationProfile> {
    let mut p = profile_at(d.vector(index), threshold)?;
    p.vector_id = Some(VectorId { matrix, index });
    p.degenerate = d.is_degenerate(index);
    Ok(p)
}

/// Profiles of every eigenvector of `A` after the top one.
pub fn adjacency_profiles(g: &Graph, c_exponent: f64) -> Result<Vec<DelocalizationProfile>> {
    adjacency_profiles_at(g, Threshold::Exponent(c_exponent))
}

pub fn adjacency_profiles_at(g: &Graph, threshold: Threshold) -> Result<Vec<DelocalizationProfile>> {
    let d = eig_sym(&adjacency_matrix(g), Ordering::Descending)?;
    profiles_from(&d, MatrixKind::A, 1..g.n(), threshold)
}

/// Profiles of the eigenvectors at `indices` (descending order) of a decomposition.
pub fn profiles_from(
    d: &SpectralDecomposition,
    matrix: MatrixKind,
    indices: std::ops::Range<usize>,
    threshold: Threshold,
) -> Result<Vec<DelocalizationProfile>> {
    indices
        .into_par_iter()
        .map(|j| profile_of(d, matrix, j, threshold))
        .collect()
}

/// Profile of `v₂(Â)`, which is also the second eigenvector of `𝓛`.
pub fn second_eigenvector_profile(g: &Graph, threshold: Threshold) -> Result<DelocalizationProfile> {
    if g.n() < 2 {
        return Err(param("need at least two vertices"));
    }
    let d = eig_sym(&normalized_adjacency(g)?, Ordering::Descending)?;
    profile_of(&d, MatrixKind::Ahat, 1, threshold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinfCheck {
    pub c: f64,
    /// Every eigenvector satisfies `‖v‖_∞ ≤ (log n)^C/√n`.
    pub holds: bool,
    /// Largest `‖v‖_∞ √n` over all eigenvectors.
    pub worst_linf_ratio: f64,
    pub worst_index: usize,
    /// `(log n)^C`, the admissible value of `‖v‖_∞ √n`.
    pub allowed_ratio: f64,
}

/// Whether `g` belongs to the family where every unit eigenvector of `A`
/// has `‖v‖_∞ ≤ (log n)^C/√n`.
pub fn linf_family_check(g: &Graph, c: f64) -> Result<LinfCheck> {
    let d = eig_sym(&adjacency_matrix(g), Ordering::Descending)?;
    Ok(linf_check_vectors(d.vectors(), g.n(), c))
}

pub fn linf_check_vectors<'a>(vectors: impl Iterator<Item = &'a [f64]>, n: usize, c: f64) -> LinfCheck {
    let sqrt_n = (n as f64).sqrt();
    let (mut worst, mut worst_index) = (0.0f64, 0usize);
    for (k, v) in vectors.enumerate() {
        let r = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) * sqrt_n;
        if r > worst {
            worst = r;
            worst_index = k;
        }
    }
    let allowed = (n as f64).ln().powf(c);
    LinfCheck {
        c,
        holds: worst <= allowed,
        worst_linf_ratio: worst,
        worst_index,
        allowed_ratio: allowed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub c: f64,
    pub threshold: f64,
    pub fraction_above: f64,
}

/// `fraction_above` over a grid of exponents.
pub fn c_sweep(v: &[f64], grid: &[f64]) -> Result<Vec<SweepPoint>> {
    grid.iter()
        .map(|&c| {
            let p = profile(v, c)?;
            Ok(SweepPoint {
                c,
                threshold: p.threshold,
                fraction_above: p.fraction_above,
            })
        })
        .collect()
}

/// Smallest grid exponent whose fraction reaches `target`.
pub fn smallest_exponent(sweep: &[SweepPoint], target: f64) -> Option<f64> {
    sweep
        .iter()
        .filter(|s| s.fraction_above >= target)
        .map(|s| s.c)
        .min_by(f64::total_cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_gnp, GnpSpec};
    use proptest::prelude::*;

    fn basis(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    fn flat(n: usize) -> Vec<f64> {
        vec![1.0 / (n as f64).sqrt(); n]
    }

    #[test]
    fn basis_and_flat_vectors() {
        for c in [0.0, 0.5, 2.0] {
            assert_eq!(profile(&basis(10, 3), c).unwrap().fraction_above, 0.1);
            assert_eq!(profile(&flat(10), c).unwrap().fraction_above, 1.0);
        }
        assert!(profile(&[0.5, 0.5], 1.0).is_err());
        let p = profile(&basis(16, 0), 1.0).unwrap();
        assert_eq!(p.linf_ratio, 4.0);
        assert_eq!(p.histogram.iter().sum::<u64>(), 16);
        // zeros fall into the first bin
        assert_eq!(p.histogram[0], 15);
    }

    #[test]
    fn histogram_geometry() {
        let e = histogram_edges();
        assert_eq!(e.len(), HISTOGRAM_BINS + 1);
        assert!((e[0] - 1e-6).abs() < 1e-18 && (e[64] - 1e2).abs() < 1e-10);
        assert_eq!(histogram_bin(1.0), 48);
        assert_eq!(histogram_bin(1e9), 63);
    }

    #[test]
    fn adjacency_profiles_small_graphs() {
        let k3 = adjacency_profiles(&Graph::complete(3), 0.0).unwrap();
        assert_eq!(k3.len(), 2);
        for p in &k3 {
            assert!(p.fraction_above >= 1.0 / 3.0);
            assert!(p.degenerate);
        }
        let empty = adjacency_profiles(&Graph::empty(5), 1.0).unwrap();
        assert_eq!(empty.len(), 4);
        assert!(empty.iter().all(|p| p.fraction_above == 0.2));
    }

    #[test]
    fn linf_examples() {
        let c = linf_check_vectors([flat(50).as_slice()].into_iter(), 50, 0.0);
        assert!(c.holds && (c.worst_linf_ratio - 1.0).abs() < 1e-12);
        let c = linf_check_vectors([basis(4096, 0).as_slice()].into_iter(), 4096, 1.0);
        assert!(!c.holds);
    }

    #[test]
    fn sweep_and_smallest_exponent() {
        let g = sample_gnp(&GnpSpec::new(200, 0.5, 1)).unwrap();
        let p = second_eigenvector_profile(&g, Threshold::Scaled(0.1)).unwrap();
        assert!(p.fraction_above > 0.5);
        let v = eig_sym(&normalized_adjacency(&g).unwrap(), Ordering::Descending).unwrap();
        let grid: Vec<f64> = (0..=8).map(|k| k as f64 * 0.5).collect();
        let sweep = c_sweep(v.vector(1), &grid).unwrap();
        assert!(sweep.windows(2).all(|w| w[0].fraction_above <= w[1].fraction_above));
        let c = smallest_exponent(&sweep, 0.45).unwrap();
        assert!(sweep.iter().find(|s| s.c == c).unwrap().fraction_above >= 0.45);
        assert_eq!(smallest_exponent(&sweep, 1.1), None);
    }

    proptest! {
        #[test]
        fn norm_chain_and_monotonicity(raw in prop::collection::vec(-1.0f64..1.0, 3..200), c1 in 0.0f64..4.0, dc in 0.0f64..4.0) {
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let v: Vec<f64> = raw.iter().map(|x| x / norm).collect();
            let n = v.len() as f64;
            let a = profile(&v, c1).unwrap();
            let b = profile(&v, c1 + dc).unwrap();
            prop_assert!(a.fraction_above <= b.fraction_above);
            prop_assert!((0.0..=1.0).contains(&a.fraction_above));
            let (l2, l4, li) = (a.lq_norms["2"], a.lq_norms["4"], a.lq_norms["inf"]);
            prop_assert!((l2 - 1.0).abs() < 1e-10);
            prop_assert!(li <= l4 + 1e-12 && l4 <= l2 + 1e-12);
            prop_assert!(l4 >= n.powf(-0.25) - 1e-12);
            prop_assert!(li >= n.powf(-0.5) - 1e-12);
        }
    }
}
