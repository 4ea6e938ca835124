//! Concentration function `conc(Z, t) = max_q P(‖Z − q‖₂ ≤ t)` for sums of
//! weighted Bernoulli variables and their random projections.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::rng::{derive_seed, rng_for, stream};

/// Largest admissible number of weights for the exact route.
pub const MAX_EXACT_WEIGHTS: usize = 10_000;
/// Largest pmf support the exact route will allocate.
pub const MAX_EXACT_SUPPORT: usize = 1 << 22;
/// Monte Carlo trials per seeded chunk.
pub const CHUNK: u64 = 1 << 15;
/// Ball centers tried in the multi-dimensional estimate.
pub const CANDIDATE_CENTERS: usize = 512;
pub const MAX_PROJECTION_DIM: usize = 20;

/// `X = Σ aᵢ βᵢ` with independent `βᵢ ~ Ber(p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernoulliSumSpec {
    pub weights: Vec<f64>,
    pub p: f64,
}

impl BernoulliSumSpec {
    pub fn new(weights: Vec<f64>, p: f64) -> Result<Self> {
        let s = BernoulliSumSpec { weights, p };
        s.validate()?;
        Ok(s)
    }

    pub fn ones(m: usize, p: f64) -> Result<Self> {
        Self::new(vec![1.0; m], p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(param(format!("p must lie in (0,1), got {}", self.p)));
        }
        if let Some(w) = self.weights.iter().find(|w| !w.is_finite()) {
            return Err(param(format!("non-finite weight {w}")));
        }
        Ok(())
    }

    /// `#{i : |aᵢ| ≥ 1}`.
    pub fn large_weight_count(&self) -> usize {
        self.weights.iter().filter(|w| w.abs() >= 1.0).count()
    }

    /// `max |X|`.
    pub fn abs_bound(&self) -> f64 {
        let pos: f64 = self.weights.iter().filter(|w| **w > 0.0).sum();
        let neg: f64 = self.weights.iter().filter(|w| **w < 0.0).sum();
        pos.max(-neg)
    }

    pub fn is_integer(&self) -> bool {
        self.weights.iter().all(|w| w.fract() == 0.0 && w.abs() <= (1u64 << 52) as f64)
    }

    fn sample(&self, rng: &mut impl Rng, fast: Option<(f64, Binomial)>) -> f64 {
        match fast {
            Some((w, b)) => w * b.sample(rng) as f64,
            None => self
                .weights
                .iter()
                .filter(|_| rng.random::<f64>() < self.p)
                .sum(),
        }
    }

    /// `X = w·Bin(m, p)` when all weights are equal.
    fn binomial_form(&self) -> Option<(f64, Binomial)> {
        let w = *self.weights.first()?;
        if self.weights.iter().all(|x| *x == w) {
            Binomial::new(self.weights.len() as u64, self.p).ok().map(|b| (w, b))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcMethod {
    ExactConvolution,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcEstimate {
    pub t: f64,
    pub value: f64,
    pub method: ConcMethod,
    /// Zero for the exact method.
    pub trials: u64,
    pub seed: Option<u64>,
    pub standard_error: f64,
}

fn check_radius(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(param(format!("radius must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// Exact pmf of an integer-weight sum, as `(offset, probabilities)` where
/// entry `k` is `P(X = offset + k)`.
pub fn exact_pmf(spec: &BernoulliSumSpec) -> Result<(i64, Vec<f64>)> {
    spec.validate()?;
    if !spec.is_integer() {
        return Err(param("exact conc needs integer weights; use monte_carlo instead"));
    }
    if spec.weights.len() > MAX_EXACT_WEIGHTS {
        return Err(param(format!(
            "{} weights exceed the exact limit of {MAX_EXACT_WEIGHTS}; use monte_carlo instead",
            spec.weights.len()
        )));
    }
    let lo: f64 = spec.weights.iter().filter(|w| **w < 0.0).sum();
    let hi: f64 = spec.weights.iter().filter(|w| **w > 0.0).sum();
    let span = hi - lo + 1.0;
    if span > MAX_EXACT_SUPPORT as f64 {
        return Err(param(format!(
            "pmf support of {span} points is too large for exact convolution; use monte_carlo instead"
        )));
    }
    let (p, q) = (spec.p, 1.0 - spec.p);
    let mut pmf = vec![0.0; span as usize];
    // Partial sums stay inside [cur_lo, cur_hi].
    let origin = (-lo) as usize;
    pmf[origin] = 1.0;
    let (mut cur_lo, mut cur_hi) = (origin, origin);
    for &w in &spec.weights {
        let s = w as i64;
        if s == 0 {
            continue;
        }
        if s > 0 {
            let s = s as usize;
            for k in (cur_lo..=cur_hi).rev() {
                let m = pmf[k];
                pmf[k + s] += p * m;
                pmf[k] = q * m;
            }
            cur_hi += s;
        } else {
            let s = (-s) as usize;
            for k in cur_lo..=cur_hi {
                let m = pmf[k];
                pmf[k - s] += p * m;
                pmf[k] = q * m;
            }
            cur_lo -= s;
        }
    }
    Ok((lo as i64, pmf))
}

/// Largest mass of `w` consecutive entries.
fn max_window(values: &[f64], w: usize) -> f64 {
    let w = w.min(values.len()).max(1);
    let mut sum: f64 = values[..w].iter().sum();
    let mut best = sum;
    for k in w..values.len() {
        sum += values[k] - values[k - w];
        best = best.max(sum);
    }
    best.min(1.0)
}

/// Number of lattice points a closed interval of length `2t` can cover.
fn lattice_window(t: f64) -> usize {
    let w = (2.0 * t).floor();
    if w >= (usize::MAX / 2) as f64 {
        usize::MAX / 2
    } else {
        w as usize + 1
    }
}

/// Exact `conc(X, t)` for integer weights.
pub fn conc_exact_1d(spec: &BernoulliSumSpec, t: f64) -> Result<ConcEstimate> {
    check_radius(t)?;
    let (_, pmf) = exact_pmf(spec)?;
    Ok(ConcEstimate {
        t,
        value: max_window(&pmf, lattice_window(t)),
        method: ConcMethod::ExactConvolution,
        trials: 0,
        seed: None,
        standard_error: 0.0,
    })
}

fn chunks(trials: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let count = trials.div_ceil(CHUNK) as usize;
    (0..count).into_par_iter().map(move |c| {
        let c = c as u64;
        (c, CHUNK.min(trials - c * CHUNK))
    })
}

fn standard_error(value: f64, trials: u64) -> f64 {
    (value * (1.0 - value) / trials as f64).sqrt()
}

/// Samples of `X`, chunked with derived seeds so the sequence does not depend
/// on the worker count.
pub fn sample_sums(spec: &BernoulliSumSpec, trials: u64, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    let fast = spec.binomial_form();
    let parts: Vec<Vec<f64>> = chunks(trials)
        .map(|(c, len)| {
            let mut rng = rng_for(derive_seed(seed, c), stream::MONTE_CARLO);
            (0..len).map(|_| spec.sample(&mut rng, fast)).collect()
        })
        .collect();
    Ok(parts.concat())
}

/// Monte Carlo `conc(X, t)`: the densest interval of length `2t` among the samples.
pub fn conc_monte_carlo_1d(spec: &BernoulliSumSpec, t: f64, trials: u64, seed: u64) -> Result<ConcEstimate> {
    check_radius(t)?;
    if trials == 0 {
        return Err(param("trials must be positive"));
    }
    let mut xs = sample_sums(spec, trials, seed)?;
    xs.sort_by(f64::total_cmp);
    let width = 2.0 * t * (1.0 + 1e-12);
    let (mut best, mut lo) = (0usize, 0usize);
    for hi in 0..xs.len() {
        while xs[hi] - xs[lo] > width {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    let value = best as f64 / trials as f64;
    Ok(ConcEstimate {
        t,
        value,
        method: ConcMethod::MonteCarlo,
        trials,
        seed: Some(seed),
        standard_error: standard_error(value, trials),
    })
}

/// Exact when the weights allow it, Monte Carlo otherwise.
pub fn conc_1d(spec: &BernoulliSumSpec, t: f64, trials: u64, seed: u64) -> Result<ConcEstimate> {
    match conc_exact_1d(spec, t) {
        Ok(e) => Ok(e),
        Err(_) if spec.validate().is_ok() && check_radius(t).is_ok() => conc_monte_carlo_1d(spec, t, trials, seed),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoBoundCheck {
    pub estimate: ConcEstimate,
    pub r: f64,
    /// `#{i : |aᵢ| ≥ 1}`.
    pub m: usize,
    /// `√(m p (1−p))`.
    pub denominator: f64,
    /// `estimate · √(m p (1−p)) / r`.
    pub implied_c: f64,
}

impl LoBoundCheck {
    /// `C r / √(m p (1−p))`.
    pub fn bound(&self, c: f64) -> f64 {
        c * self.r / self.denominator
    }

    pub fn holds_with(&self, c: f64) -> bool {
        self.estimate.value <= self.bound(c)
    }
}

/// Compares `conc(X, r)` with the `1/√m` small-ball bound for weighted sums.
/// `trials` and `seed` are used only when the weights rule out the exact route.
pub fn lo_bound_check(spec: &BernoulliSumSpec, r: f64, trials: u64, seed: u64) -> Result<LoBoundCheck> {
    spec.validate()?;
    check_lo_radius(r)?;
    let estimate = conc_1d(spec, r, trials, seed)?;
    lo_bound_with(spec, r, estimate)
}

fn check_lo_radius(r: f64) -> Result<()> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(param(format!("r must be at least 1, got {r}")));
    }
    Ok(())
}

/// The bound comparison for an estimate computed elsewhere at radius `r`.
pub fn lo_bound_with(spec: &BernoulliSumSpec, r: f64, estimate: ConcEstimate) -> Result<LoBoundCheck> {
    spec.validate()?;
    check_lo_radius(r)?;
    if estimate.t != r {
        return Err(param("estimate radius does not match r"));
    }
    let m = spec.large_weight_count();
    if m == 0 {
        return Err(param("no weight has magnitude at least 1"));
    }
    let denominator = (m as f64 * spec.p * (1.0 - spec.p)).sqrt();
    Ok(LoBoundCheck {
        implied_c: estimate.value * denominator / r,
        estimate,
        r,
        m,
        denominator,
    })
}

/// An isometric embedding `T: ℝᵈ → ℝⁿ` and the unit normal of a hyperplane `H ⊂ ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSetup {
    pub d: usize,
    pub n: usize,
    /// Row-major `n × d`, orthonormal columns.
    pub embedding: Vec<f64>,
    pub normal: Vec<f64>,
}

fn check_dims(d: usize, n: usize) -> Result<()> {
    if d == 0 || d >= n || n > MAX_PROJECTION_DIM {
        return Err(param(format!("need 1 ≤ d < n ≤ {MAX_PROJECTION_DIM}, got d = {d}, n = {n}")));
    }
    Ok(())
}

impl ProjectionSetup {
    /// Gaussian columns orthonormalized by Gram–Schmidt, and a Gaussian normal.
    pub fn random(d: usize, n: usize, seed: u64) -> Result<Self> {
        check_dims(d, n)?;
        let mut rng = rng_for(seed, stream::GEOMETRY);
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
        while cols.len() < d {
            let mut c: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            // two passes for numerical orthogonality
            for _ in 0..2 {
                for b in &cols {
                    let proj: f64 = c.iter().zip(b).map(|(x, y)| x * y).sum();
                    c.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                cols.push(c.into_iter().map(|x| x / norm).collect());
            }
        }
        let normal = loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        };
        let embedding = (0..n).flat_map(|i| cols.iter().map(move |c| c[i])).collect();
        Ok(ProjectionSetup { d, n, embedding, normal })
    }

    pub fn explicit(d: usize, n: usize, embedding: Vec<f64>, normal: Vec<f64>) -> Result<Self> {
        check_dims(d, n)?;
        if embedding.len() != n * d || normal.len() != n {
            return Err(param("embedding must be n × d and the normal must have length n"));
        }
        let s = ProjectionSetup { d, n, embedding, normal };
        let nn: f64 = s.normal.iter().map(|x| x * x).sum();
        if (nn - 1.0).abs() > 1e-10 {
            return Err(param("hyperplane normal must be a unit vector"));
        }
        for a in 0..d {
            for b in 0..d {
                let g: f64 = (0..n).map(|i| s.embedding[i * d + a] * s.embedding[i * d + b]).sum();
                if (g - if a == b { 1.0 } else { 0.0 }).abs() > 1e-10 {
                    return Err(param("embedding columns must be orthonormal"));
                }
            }
        }
        Ok(s)
    }

    /// Row-major `n × d` matrix of `P_H T`.
    pub fn projected_embedding(&self) -> Vec<f64> {
        let (n, d) = (self.n, self.d);
        let nt: Vec<f64> = (0..d)
            .map(|a| (0..n).map(|i| self.normal[i] * self.embedding[i * d + a]).sum())
            .collect();
        (0..n)
            .flat_map(|i| (0..d).map(move |a| (i, a)))
            .map(|(i, a)| self.embedding[i * d + a] - self.normal[i] * nt[a])
            .collect()
    }

    /// `(P_H T)ᵀ(P_H T)`, row-major `d × d`.
    fn gram(&self) -> Vec<f64> {
        let m = self.projected_embedding();
        let (n, d) = (self.n, self.d);
        (0..d * d)
            .map(|ab| (0..n).map(|i| m[i * d + ab / d] * m[i * d + ab % d]).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionCheck {
    pub d: usize,
    pub n: usize,
    pub t: f64,
    /// `t √d`.
    pub radius: f64,
    /// Monte Carlo `conc(P_H T X, t√d)`. Centers are restricted to sample
    /// points, so this can only under-estimate the true value.
    pub estimate: ConcEstimate,
    /// Per-coordinate `conc(Xᵢ, t)`.
    pub q: ConcEstimate,
    /// `max |Xᵢ|`.
    pub k: f64,
    /// Smallest `C` with `estimate ≤ (C q)^d (K/t + 1) √d`.
    pub fitted_c: f64,
    pub distinct_points: usize,
    pub candidate_centers: usize,
}

impl ProjectionCheck {
    /// `(C q)^d (K/t + 1) √d`.
    pub fn bound(&self, c: f64) -> f64 {
        (c * self.q.value).powi(self.d as i32) * (self.k / self.t + 1.0) * (self.d as f64).sqrt()
    }

    pub fn holds_with(&self, c: f64) -> bool {
        self.estimate.value <= self.bound(c)
    }
}

/// Estimates `conc(P_H T X, t√d)` for `X ∈ ℝᵈ` with independent coordinates,
/// each distributed as `spec`.
pub fn rv_projection_check(
    setup: &ProjectionSetup,
    spec: &BernoulliSumSpec,
    t: f64,
    trials: u64,
    seed: u64,
) -> Result<ProjectionCheck> {
    check_dims(setup.d, setup.n)?;
    spec.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(param(format!("t must be positive, got {t}")));
    }
    if trials == 0 {
        return Err(param("trials must be positive"));
    }
    let d = setup.d;
    let q = conc_1d(spec, t, trials, derive_seed(seed, u64::MAX))?;
    let fast = spec.binomial_form();

    // Points are tallied by their exact coordinates; merging counts is order independent.
    let tallies: Vec<HashMap<Vec<u64>, u64>> = chunks(trials)
        .map(|(c, len)| {
            let mut rng = rng_for(derive_seed(seed, c), stream::MONTE_CARLO);
            let mut map = HashMap::new();
            for _ in 0..len {
                let key: Vec<u64> = (0..d).map(|_| (spec.sample(&mut rng, fast) + 0.0).to_bits()).collect();
                *map.entry(key).or_insert(0) += 1;
            }
            map
        })
        .collect();
    let mut merged: HashMap<Vec<u64>, u64> = HashMap::new();
    for map in tallies {
        for (k, c) in map {
            *merged.entry(k).or_insert(0) += c;
        }
    }
    let mut points: Vec<(Vec<f64>, u64)> = merged
        .into_iter()
        .map(|(k, c)| (k.into_iter().map(f64::from_bits).collect(), c))
        .collect();
    points.sort_by(|a, b| {
        b.1.cmp(&a.1).then_with(|| {
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });

    let gram = setup.gram();
    let radius = t * (d as f64).sqrt();
    let r2 = radius * radius * (1.0 + 1e-12);
    let candidates = points.len().min(CANDIDATE_CENTERS);
    let best = points[..candidates]
        .par_iter()
        .map(|(center, _)| {
            let mut diff = vec![0.0; d];
            points
                .iter()
                .filter(|(x, _)| {
                    diff.iter_mut().zip(x.iter().zip(center)).for_each(|(o, (a, b))| *o = a - b);
                    let mut s = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            s += diff[a] * gram[a * d + b] * diff[b];
                        }
                    }
                    s <= r2
                })
                .map(|(_, c)| *c)
                .sum::<u64>()
        })
        .max()
        .unwrap_or(0);
    let value = best as f64 / trials as f64;
    let k = spec.abs_bound();
    let scale = (k / t + 1.0) * (d as f64).sqrt();
    let fitted_c = if q.value > 0.0 {
        (value / scale).powf(1.0 / d as f64) / q.value
    } else {
        f64::INFINITY
    };
    Ok(ProjectionCheck {
        d,
        n: setup.n,
        t,
        radius,
        estimate: ConcEstimate {
            t: radius,
            value,
            method: ConcMethod::MonteCarlo,
            trials,
            seed: Some(seed),
            standard_error: standard_error(value, trials),
        },
        q,
        k,
        fitted_c,
        distinct_points: points.len(),
        candidate_centers: candidates,
    })
}
