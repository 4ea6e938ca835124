//! Single-edge perturbations of the normalized Laplacian spectral gap.
//!
//! The predicates here are evaluated from the second eigenvector `f` of
//! `𝓛_G` alone; [`PerturbationAnalyzer`] then compares them with the exact
//! `λ₂` of the perturbed graph. Two exact routes are available for the latter
//! (see [`GapSolver`]): a full re-decomposition of `𝓛_{G±e}`, or bisection on
//! the inertia of the rank-4 update `𝓛_{G±e} − 𝓛_G` in the eigenbasis of
//! `𝓛_G` (see [`crate::spectral::update`]). Both are exact up to rounding.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, precondition, Error, Result};
use crate::graph::{pair, Graph, Pair};
use crate::rng::{rng_for, stream};
use crate::spectral::update::LowRankUpdate;
use crate::spectral::{
    combinatorial_laplacian, eig_sym, eigenvalues, normalized_laplacian, rayleigh_quotient, Ordering,
    SpectralDecomposition, DEGENERACY_GAP,
};

/// `|Δλ₂|` at or below this is classified as no change.
pub const ZERO_TOLERANCE: f64 = 1e-10;
/// The lemma inequality must hold by at least this much.
pub const LEMMA_MARGIN: f64 = 1e-12;
/// Strict margin for [`sufficient_predicate`].
pub const SUFFICIENT_MARGIN: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    Addition,
    Removal,
}

/// How `λ₂` of the perturbed graph is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapSolver {
    /// Full eigendecomposition of the perturbed matrix.
    Full,
    /// Inertia bisection on the low-rank update of the cached spectrum.
    #[default]
    LowRank,
}

/// `(√(d+1) − √d)/√(d+1)`, written without cancellation.
fn degree_coefficient(d: f64) -> f64 {
    let s1 = (d + 1.0).sqrt();
    1.0 / (s1 * (s1 + d.sqrt()))
}

/// `√(d+1) − √d`.
fn sqrt_step(d: f64) -> f64 {
    1.0 / ((d + 1.0).sqrt() + d.sqrt())
}

/// Closed form of `fᵀ𝓛_{G₊}f` after adding `{u, v}`, given `λ₂(𝓛_G)`,
/// `f(u)`, `f(v)` and the degrees in `G`.
pub fn dirichlet_closed_form(lambda2: f64, fu: f64, fv: f64, du: f64, dv: f64) -> f64 {
    let bracket = degree_coefficient(du) * fu * fu + degree_coefficient(dv) * fv * fv;
    lambda2 + 2.0 * (1.0 - lambda2) * bracket - 2.0 * fu * fv / ((du + 1.0) * (dv + 1.0)).sqrt()
}

/// `p_f = ⟨f, f₁⁺⟩` for `f ⊥ D^{1/2}𝟙`, from the degrees in `G`.
pub fn projection_closed_form(fu: f64, fv: f64, du: f64, dv: f64, degree_sum: f64) -> f64 {
    (fu * sqrt_step(du) + fv * sqrt_step(dv)) / (2.0 + degree_sum).sqrt()
}

/// Right side minus left side of the lemma inequality; positive when it holds.
pub fn lemma_margin(lambda2: f64, fu: f64, fv: f64, du: f64, dv: f64, pf: f64) -> f64 {
    let lhs = pf * pf * lambda2 + 2.0 * (1.0 - lambda2) * (degree_coefficient(du) * fu * fu + degree_coefficient(dv) * fv * fv);
    let rhs = 2.0 * fu * fv / ((du + 1.0).sqrt() * (dv + 1.0).sqrt());
    rhs - lhs
}

fn check_addition_pair(g: &Graph, u: usize, v: usize) -> Result<()> {
    if u >= g.n() || v >= g.n() {
        return Err(param(format!("pair ({u}, {v}) out of range for n = {}", g.n())));
    }
    if u == v {
        return Err(precondition(format!("pair ({u}, {v}) is a self-loop")));
    }
    if g.has_edge(u, v) {
        return Err(precondition(format!("{{{u}, {v}}} is already an edge")));
    }
    Ok(())
}

fn check_removal_pair(g: &Graph, u: usize, v: usize) -> Result<()> {
    if u >= g.n() || v >= g.n() {
        return Err(param(format!("pair ({u}, {v}) out of range for n = {}", g.n())));
    }
    if !g.has_edge(u, v) {
        return Err(precondition(format!("{{{u}, {v}}} is not an edge")));
    }
    Ok(())
}

/// `fᵀ𝓛_{G₊}f` by the closed form, with `λ₂` taken as the Rayleigh quotient
/// of `f` on `𝓛_G`. Meaningful when `f` is the unit second eigenvector.
pub fn dirichlet_form_plus(g: &Graph, f: &[f64], u: usize, v: usize) -> Result<f64> {
    check_addition_pair(g, u, v)?;
    let lambda2 = rayleigh_quotient(&normalized_laplacian(g)?, f)?;
    Ok(dirichlet_closed_form(lambda2, f[u], f[v], g.degree(u) as f64, g.degree(v) as f64))
}

/// Projection of `f` onto the unit top eigenvector of `𝓛_{G₊}`, by the closed
/// form valid for `f ⊥ D^{1/2}𝟙`.
pub fn projection_pf(g: &Graph, f: &[f64], u: usize, v: usize) -> Result<f64> {
    check_addition_pair(g, u, v)?;
    if let Some(vertex) = g.isolated_vertex() {
        return Err(Error::IsolatedVertex { vertex });
    }
    if f.len() != g.n() {
        return Err(param("vector length does not match vertex count"));
    }
    Ok(projection_closed_form(
        f[u],
        f[v],
        g.degree(u) as f64,
        g.degree(v) as f64,
        g.degree_sum() as f64,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaOutcome {
    pub holds: bool,
    /// Right side minus left side.
    pub margin: f64,
    /// `λ₂(𝓛_G)` is not simple, so `f` is not well defined.
    pub degenerate: bool,
    pub f_u: f64,
    pub f_v: f64,
}

/// Whether the lemma's inequality predicts that adding `{u, v}` lowers the
/// spectral gap. Decomposes `𝓛_G`; use [`PerturbationAnalyzer`] for many pairs.
pub fn lemma_predicate(g: &Graph, u: usize, v: usize) -> Result<LemmaOutcome> {
    check_addition_pair(g, u, v)?;
    PerturbationAnalyzer::new(g)?.lemma(u, v)
}

/// `8(np)^{-2} + 32(np)^{-1/2}(f_u² + f_v²) < f_u f_v`, by at least
/// [`SUFFICIENT_MARGIN`].
pub fn sufficient_predicate(fu: f64, fv: f64, n: usize, p: f64) -> bool {
    sufficient_margin(fu, fv, n, p) > SUFFICIENT_MARGIN
}

pub fn sufficient_margin(fu: f64, fv: f64, n: usize, p: f64) -> f64 {
    let np = n as f64 * p;
    fu * fv - (8.0 / (np * np) + 32.0 / np.sqrt() * (fu * fu + fv * fv))
}

/// The same inequality before `|1 − λ₂|` is replaced by its typical bound:
/// `8(np)^{-2} + 4(1 − λ₂)(f_u² + f_v²) < f_u f_v`.
pub fn gap_aware_predicate(fu: f64, fv: f64, n: usize, p: f64, lambda2: f64) -> bool {
    gap_aware_margin(fu, fv, n, p, lambda2) > SUFFICIENT_MARGIN
}

pub fn gap_aware_margin(fu: f64, fv: f64, n: usize, p: f64, lambda2: f64) -> f64 {
    let np = n as f64 * p;
    fu * fv - (8.0 / (np * np) + 4.0 * (1.0 - lambda2) * (fu * fu + fv * fv))
}

/// `n^{-0.51} ≤ |f_u|, |f_v| ≤ n^{-0.49}` and `f_u f_v > 0`.
pub fn window_predicate(fu: f64, fv: f64, n: usize) -> bool {
    let n = n as f64;
    let lo = n.powf(-0.51);
    let hi = n.powf(-0.49);
    let inside = |x: f64| (lo..=hi).contains(&x.abs());
    inside(fu) && inside(fv) && fu * fv > 0.0
}

/// Outcome of one perturbation, judged against the exact gap change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationVerdict {
    pub pair: Pair,
    pub kind: PerturbationKind,
    /// Additions only.
    pub lemma_predicate: Option<bool>,
    pub lemma_margin: Option<f64>,
    pub sufficient_predicate: Option<bool>,
    pub gap_aware_predicate: Option<bool>,
    pub window_predicate: Option<bool>,
    pub f_u: f64,
    pub f_v: f64,
    pub gap_before: f64,
    pub gap_after: f64,
    pub gap_delta: f64,
    pub degenerate: bool,
    /// `λ₂(L)` before and after, when the combinatorial cross-check ran.
    pub combinatorial_gap_before: Option<f64>,
    pub combinatorial_gap_after: Option<f64>,
    pub solver: GapSolver,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapChange {
    Decrease,
    Increase,
    Zero,
}

impl PerturbationVerdict {
    pub fn classify(&self, tolerance: f64) -> GapChange {
        if self.gap_delta < -tolerance {
            GapChange::Decrease
        } else if self.gap_delta > tolerance {
            GapChange::Increase
        } else {
            GapChange::Zero
        }
    }

    /// `Some(false)` when the lemma predicted a decrease on a non-degenerate
    /// instance and the exact gap did not drop by more than [`LEMMA_MARGIN`].
    pub fn lemma_sound(&self) -> Option<bool> {
        match self.lemma_predicate {
            Some(true) if !self.degenerate => Some(self.gap_delta < -LEMMA_MARGIN),
            _ => None,
        }
    }

    /// `λ₂(L)` did not increase on a removal (tolerance [`ZERO_TOLERANCE`]).
    pub fn combinatorial_monotone(&self) -> Option<bool> {
        match (self.kind, self.combinatorial_gap_before, self.combinatorial_gap_after) {
            (PerturbationKind::Removal, Some(b), Some(a)) => Some(a <= b + ZERO_TOLERANCE),
            _ => None,
        }
    }
}

/// Caches the spectrum of one graph and judges perturbations of it.
pub struct PerturbationAnalyzer<'g> {
    g: &'g Graph,
    laplacian: SpectralDecomposition,
    combinatorial: Option<SpectralDecomposition>,
    p_model: f64,
}

impl<'g> PerturbationAnalyzer<'g> {
    /// Decomposes `𝓛_G`. Fails on isolated vertices or `n < 2`.
    pub fn new(g: &'g Graph) -> Result<Self> {
        if g.n() < 2 {
            return Err(param("perturbation analysis needs at least two vertices"));
        }
        let laplacian = eig_sym(&normalized_laplacian(g)?, Ordering::Ascending)?;
        Ok(PerturbationAnalyzer {
            g,
            laplacian,
            combinatorial: None,
            p_model: g.density(),
        })
    }

    /// Also decompose `L` so every verdict carries `λ₂(L)` before and after.
    pub fn with_combinatorial(mut self) -> Result<Self> {
        self.combinatorial = Some(eig_sym(&combinatorial_laplacian(self.g), Ordering::Ascending)?);
        Ok(self)
    }

    /// Edge probability used by [`sufficient_predicate`]; defaults to the
    /// graph's density.
    pub fn with_p_model(mut self, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(param(format!("model edge probability must lie in (0, 1), got {p}")));
        }
        self.p_model = p;
        Ok(self)
    }

    pub fn graph(&self) -> &Graph {
        self.g
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.laplacian
    }

    pub fn gap(&self) -> f64 {
        self.laplacian.eigenvalue(1)
    }

    /// The second eigenvector `f`.
    pub fn f(&self) -> &[f64] {
        self.laplacian.vector(1)
    }

    pub fn degenerate(&self) -> bool {
        let ev = self.laplacian.eigenvalues();
        ev.len() > 2 && ev[2] - ev[1] < DEGENERACY_GAP
    }

    pub fn lemma(&self, u: usize, v: usize) -> Result<LemmaOutcome> {
        check_addition_pair(self.g, u, v)?;
        let f = self.f();
        let (du, dv) = (self.g.degree(u) as f64, self.g.degree(v) as f64);
        let pf = projection_closed_form(f[u], f[v], du, dv, self.g.degree_sum() as f64);
        let margin = lemma_margin(self.gap(), f[u], f[v], du, dv, pf);
        Ok(LemmaOutcome {
            holds: margin > LEMMA_MARGIN,
            margin,
            degenerate: self.degenerate(),
            f_u: f[u],
            f_v: f[v],
        })
    }

    fn normalized_update(&self, u: usize, v: usize, kind: PerturbationKind) -> Result<LowRankUpdate> {
        let (du, dv) = (self.g.degree(u) as f64, self.g.degree(v) as f64);
        let step = match kind {
            PerturbationKind::Addition => 1.0,
            PerturbationKind::Removal => -1.0,
        };
        let (du1, dv1) = (du + step, dv + step);
        // Row/column scale √(d/d') − 1 for the changed endpoints.
        let delta = |d: f64, d1: f64| (d - d1) / ((d * d1).sqrt() + d1);
        let (delta_u, delta_v) = (delta(du, du1), delta(dv, dv1));
        let (target, current) = match kind {
            PerturbationKind::Addition => (1.0 / (du1 * dv1).sqrt(), 0.0),
            PerturbationKind::Removal => (0.0, 1.0 / (du * dv).sqrt()),
        };
        let kappa = target - (1.0 + delta_u + delta_v) * current;
        // Â' = Â + Y M Yᵀ with Y = [e_u, e_v, Âe_u, Âe_v]; 𝓛' = 𝓛 − Y M Yᵀ.
        #[rustfmt::skip]
        let core = [
            0.0,      -kappa,   -delta_u, 0.0,
            -kappa,   0.0,      0.0,      -delta_v,
            -delta_u, 0.0,      0.0,      0.0,
            0.0,      -delta_v, 0.0,      0.0,
        ];
        let n = self.g.n();
        let mut z = Vec::with_capacity(4 * n);
        for i in 0..n {
            let (xu, xv) = (self.laplacian.entry(u, i), self.laplacian.entry(v, i));
            let a = 1.0 - self.laplacian.eigenvalue(i);
            z.extend_from_slice(&[xu, xv, a * xu, a * xv]);
        }
        LowRankUpdate::new(4, z, &core)
    }

    fn combinatorial_update(d: &SpectralDecomposition, u: usize, v: usize, kind: PerturbationKind) -> Result<f64> {
        let z: Vec<f64> = (0..d.n()).map(|i| d.entry(u, i) - d.entry(v, i)).collect();
        let sign = match kind {
            PerturbationKind::Addition => 1.0,
            PerturbationKind::Removal => -1.0,
        };
        LowRankUpdate::new(1, z, &[sign])?.eigenvalue(d.eigenvalues(), 1)
    }

    fn perturbed(&self, u: usize, v: usize, kind: PerturbationKind) -> Result<Graph> {
        match kind {
            PerturbationKind::Addition => self.g.add_edge(u, v),
            PerturbationKind::Removal => self.g.remove_edge(u, v),
        }
    }

    fn check_pair(&self, u: usize, v: usize, kind: PerturbationKind) -> Result<()> {
        match kind {
            PerturbationKind::Addition => check_addition_pair(self.g, u, v),
            PerturbationKind::Removal => check_removal_pair(self.g, u, v),
        }
    }

    /// `λ₂(𝓛)` of the perturbed graph.
    pub fn gap_after(&self, u: usize, v: usize, kind: PerturbationKind, solver: GapSolver) -> Result<f64> {
        self.check_pair(u, v, kind)?;
        if kind == PerturbationKind::Removal {
            for w in [u, v] {
                if self.g.degree(w) == 1 {
                    return Err(Error::IsolatedVertex { vertex: w });
                }
            }
        }
        match solver {
            GapSolver::Full => {
                let h = self.perturbed(u, v, kind)?;
                Ok(eigenvalues(&normalized_laplacian(&h)?, Ordering::Ascending)?[1])
            }
            GapSolver::LowRank => self.normalized_update(u, v, kind)?.eigenvalue(self.laplacian.eigenvalues(), 1),
        }
    }

    fn combinatorial_after(&self, u: usize, v: usize, kind: PerturbationKind, solver: GapSolver) -> Result<Option<f64>> {
        let Some(d) = &self.combinatorial else {
            return Ok(None);
        };
        let value = match solver {
            GapSolver::Full => {
                let h = self.perturbed(u, v, kind)?;
                eigenvalues(&combinatorial_laplacian(&h), Ordering::Ascending)?[1]
            }
            GapSolver::LowRank => Self::combinatorial_update(d, u, v, kind)?,
        };
        Ok(Some(value))
    }

    /// Full verdict for one pair. A removal that isolates a vertex is an
    /// error here; see [`Self::batch_verdict`].
    pub fn verdict(&self, u: usize, v: usize, kind: PerturbationKind, solver: GapSolver) -> Result<PerturbationVerdict> {
        let gap_after = self.gap_after(u, v, kind, solver)?;
        self.assemble(u, v, kind, solver, gap_after, None)
    }

    /// Like [`Self::verdict`], but a removal that isolates a vertex is recorded
    /// in the verdict (with `gap_after = 0`) instead of failing.
    pub fn batch_verdict(&self, u: usize, v: usize, kind: PerturbationKind, solver: GapSolver) -> Result<PerturbationVerdict> {
        match self.gap_after(u, v, kind, solver) {
            Ok(after) => self.assemble(u, v, kind, solver, after, None),
            Err(Error::IsolatedVertex { vertex }) if kind == PerturbationKind::Removal => {
                let note = format!("removal isolates vertex {vertex}; normalized Laplacian undefined, gap recorded as 0");
                self.assemble(u, v, kind, solver, 0.0, Some(note))
            }
            Err(e) => Err(e),
        }
    }

    fn assemble(
        &self,
        u: usize,
        v: usize,
        kind: PerturbationKind,
        solver: GapSolver,
        gap_after: f64,
        note: Option<String>,
    ) -> Result<PerturbationVerdict> {
        let f = self.f();
        let (fu, fv) = (f[u], f[v]);
        let gap_before = self.gap();
        let n = self.g.n();
        let (lemma, margin, sufficient, gap_aware, window) = match kind {
            PerturbationKind::Addition => {
                let outcome = self.lemma(u, v)?;
                (
                    Some(outcome.holds),
                    Some(outcome.margin),
                    Some(sufficient_predicate(fu, fv, n, self.p_model)),
                    Some(gap_aware_predicate(fu, fv, n, self.p_model, gap_before)),
                    Some(window_predicate(fu, fv, n)),
                )
            }
            PerturbationKind::Removal => (None, None, None, None, None),
        };
        Ok(PerturbationVerdict {
            pair: pair(u, v),
            kind,
            lemma_predicate: lemma,
            lemma_margin: margin,
            sufficient_predicate: sufficient,
            gap_aware_predicate: gap_aware,
            window_predicate: window,
            f_u: fu,
            f_v: fv,
            gap_before,
            gap_after,
            gap_delta: gap_after - gap_before,
            degenerate: self.degenerate(),
            combinatorial_gap_before: self.combinatorial.as_ref().map(|d| d.eigenvalue(1)),
            combinatorial_gap_after: self.combinatorial_after(u, v, kind, solver)?,
            solver,
            note,
        })
    }
}

/// Ground truth for one pair by full re-decomposition of both graphs.
/// Removals additionally carry the combinatorial `λ₂(L)` before and after.
pub fn exact_gap_change(g: &Graph, u: usize, v: usize, kind: PerturbationKind) -> Result<PerturbationVerdict> {
    match kind {
        PerturbationKind::Addition => check_addition_pair(g, u, v)?,
        PerturbationKind::Removal => check_removal_pair(g, u, v)?,
    }
    let mut analyzer = PerturbationAnalyzer::new(g)?;
    if kind == PerturbationKind::Removal {
        analyzer = analyzer.with_combinatorial()?;
    }
    analyzer.verdict(u, v, kind, GapSolver::Full)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub solver: GapSolver,
    /// Edge probability for [`sufficient_predicate`]; `None` uses the density.
    pub p_model: Option<f64>,
    /// Track `λ₂(L)` alongside `λ₂(𝓛)`.
    pub combinatorial: bool,
    pub zero_tolerance: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            solver: GapSolver::LowRank,
            p_model: None,
            combinatorial: true,
            zero_tolerance: ZERO_TOLERANCE,
        }
    }
}

/// Class fractions over the sampled pairs plus bookkeeping for the
/// predicate cross-checks.
///
/// For additions `a_minus + a_plus + a_zero = 1`. For removals the zero class
/// is folded into `r_minus` (so `r_minus + r_plus = 1`) and also reported on
/// its own as `r_zero`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxEstimate {
    pub kind: PerturbationKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_zero: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_zero: Option<f64>,
    pub decreases: usize,
    pub increases: usize,
    pub zeros: usize,
    pub sample_count: usize,
    /// Number of candidate pairs sampled from.
    pub population: usize,
    pub zero_tolerance: f64,
    pub seed: u64,
    pub solver: GapSolver,
    pub gap_before: f64,
    pub degenerate: bool,
    pub lemma_true: usize,
    /// Non-degenerate verdicts where the lemma held but the gap did not drop.
    pub lemma_failures: usize,
    pub window_true: usize,
    pub window_decreases: usize,
    pub sufficient_true: usize,
    pub gap_aware_true: usize,
    pub isolating_removals: usize,
    pub combinatorial_checked: usize,
    pub combinatorial_violations: usize,
}

impl ParadoxEstimate {
    pub fn from_verdicts(
        kind: PerturbationKind,
        verdicts: &[PerturbationVerdict],
        population: usize,
        seed: u64,
        solver: GapSolver,
        zero_tolerance: f64,
    ) -> Result<Self> {
        let total = verdicts.len();
        if total == 0 {
            return Err(param("no verdicts to summarize"));
        }
        let mut count = [0usize; 3];
        for v in verdicts {
            match v.classify(zero_tolerance) {
                GapChange::Decrease => count[0] += 1,
                GapChange::Increase => count[1] += 1,
                GapChange::Zero => count[2] += 1,
            }
        }
        let frac = |c: usize| c as f64 / total as f64;
        let tally = |pred: &dyn Fn(&PerturbationVerdict) -> bool| verdicts.iter().filter(|v| pred(v)).count();
        let adding = kind == PerturbationKind::Addition;
        Ok(ParadoxEstimate {
            kind,
            a_minus: adding.then(|| frac(count[0])),
            a_plus: adding.then(|| frac(count[1])),
            a_zero: adding.then(|| frac(count[2])),
            r_minus: (!adding).then(|| frac(count[0] + count[2])),
            r_plus: (!adding).then(|| frac(count[1])),
            r_zero: (!adding).then(|| frac(count[2])),
            decreases: count[0],
            increases: count[1],
            zeros: count[2],
            sample_count: total,
            population,
            zero_tolerance,
            seed,
            solver,
            gap_before: verdicts[0].gap_before,
            degenerate: verdicts[0].degenerate,
            lemma_true: tally(&|v| v.lemma_predicate == Some(true)),
            lemma_failures: tally(&|v| v.lemma_sound() == Some(false)),
            window_true: tally(&|v| v.window_predicate == Some(true)),
            window_decreases: tally(&|v| v.window_predicate == Some(true) && v.gap_delta < 0.0),
            sufficient_true: tally(&|v| v.sufficient_predicate == Some(true)),
            gap_aware_true: tally(&|v| v.gap_aware_predicate == Some(true)),
            isolating_removals: tally(&|v| v.note.is_some()),
            combinatorial_checked: tally(&|v| v.combinatorial_monotone().is_some()),
            combinatorial_violations: tally(&|v| v.combinatorial_monotone() == Some(false)),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ParadoxRun {
    pub estimate: ParadoxEstimate,
    /// One verdict per sampled pair, in lexicographic pair order.
    pub verdicts: Vec<PerturbationVerdict>,
}

/// Uniform sample of `k` items without replacement (Algorithm R), returned in
/// stream order. Takes everything when the stream has at most `k` items.
pub fn reservoir_sample<I: Iterator<Item = Pair>>(items: I, k: usize, seed: u64) -> Vec<Pair> {
    let mut rng = rng_for(seed, stream::PAIR_SAMPLING);
    let mut reservoir = Vec::with_capacity(k);
    for (i, item) in items.enumerate() {
        if i < k {
            reservoir.push(item);
        } else {
            let j = rng.random_range(0..=i);
            if j < k {
                reservoir[j] = item;
            }
        }
    }
    reservoir.sort_unstable();
    reservoir
}

pub fn estimate_add(g: &Graph, sample_size: usize, seed: u64) -> Result<ParadoxRun> {
    estimate_add_with(g, sample_size, seed, &EstimateOptions::default())
}

pub fn estimate_remove(g: &Graph, sample_size: usize, seed: u64) -> Result<ParadoxRun> {
    estimate_remove_with(g, sample_size, seed, &EstimateOptions::default())
}

/// Classifies a uniform sample of non-edges by the sign of the exact gap change.
pub fn estimate_add_with(g: &Graph, sample_size: usize, seed: u64, options: &EstimateOptions) -> Result<ParadoxRun> {
    if g.non_edge_count() == 0 {
        return Err(param("graph has no non-edges to add"));
    }
    let pairs = reservoir_sample(g.non_edges_iter(), sample_size, seed);
    run_estimate(g, PerturbationKind::Addition, pairs, g.non_edge_count(), seed, options)
}

/// Classifies a uniform sample of edges by the sign of the exact gap change
/// on removal.
pub fn estimate_remove_with(g: &Graph, sample_size: usize, seed: u64, options: &EstimateOptions) -> Result<ParadoxRun> {
    if g.edge_count() == 0 {
        return Err(param("graph has no edges to remove"));
    }
    let pairs = reservoir_sample(g.edges(), sample_size, seed);
    run_estimate(g, PerturbationKind::Removal, pairs, g.edge_count(), seed, options)
}

fn run_estimate(
    g: &Graph,
    kind: PerturbationKind,
    pairs: Vec<Pair>,
    population: usize,
    seed: u64,
    options: &EstimateOptions,
) -> Result<ParadoxRun> {
    if pairs.is_empty() {
        return Err(param("sample size must be positive"));
    }
    if !(options.zero_tolerance >= 0.0) {
        return Err(param("zero tolerance must be non-negative"));
    }
    let mut analyzer = PerturbationAnalyzer::new(g)?;
    if let Some(p) = options.p_model {
        analyzer = analyzer.with_p_model(p)?;
    }
    if options.combinatorial {
        analyzer = analyzer.with_combinatorial()?;
    }
    let verdicts = pairs
        .par_iter()
        .map(|&(u, v)| analyzer.batch_verdict(u, v, kind, options.solver))
        .collect::<Result<Vec<_>>>()?;
    let estimate = ParadoxEstimate::from_verdicts(kind, &verdicts, population, seed, options.solver, options.zero_tolerance)?;
    Ok(ParadoxRun { estimate, verdicts })
}
