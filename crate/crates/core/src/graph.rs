//! Simple undirected graphs, seeded `G(n, p)` sampling and single-edge
//! perturbations.
//!
//! Vertices are `0..n`. Graphs are immutable values: [`Graph::add_edge`] and
//! [`Graph::remove_edge`] return new graphs and leave the receiver untouched.
//! Adjacency is kept as one bitset row per vertex, which is the natural
//! storage for constant `p` where the edge count is `Θ(n²)` anyway.

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, precondition, Error, Result};
use crate::rng::{rng_for, stream};

/// An unordered vertex pair, always stored with `.0 < .1`.
pub type Pair = (usize, usize);

/// Normalizes `{u, v}` to `(min, max)`.
pub fn pair(u: usize, v: usize) -> Pair {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<FixedBitSet>,
    degrees: Vec<usize>,
    edge_count: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edge_count)
            .finish()
    }
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
            degrees: vec![0; n],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.insert_unchecked(u, v);
            }
        }
        g
    }

    /// Path `0 – 1 – … – (n-1)`.
    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 1..n {
            g.insert_unchecked(u - 1, u);
        }
        g
    }

    /// Complete bipartite graph with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = Graph::empty(a + b);
        for u in 0..a {
            for v in a..(a + b) {
                g.insert_unchecked(u, v);
            }
        }
        g
    }

    /// Vertex-disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Self {
        let mut g = Graph::empty(self.n + other.n);
        for (u, v) in self.edges() {
            g.insert_unchecked(u, v);
        }
        for (u, v) in other.edges() {
            g.insert_unchecked(u + self.n, v + self.n);
        }
        g
    }

    /// Builds a graph from an edge list. Endpoint order is irrelevant;
    /// self-loops, out-of-range endpoints and repeated pairs are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                return Err(precondition(format!("self-loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(precondition(format!("duplicate edge {{{u}, {v}}}")));
            }
            g.insert_unchecked(u, v);
        }
        Ok(g)
    }

    fn insert_unchecked(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.degrees[u] += 1;
        self.degrees[v] += 1;
        self.edge_count += 1;
    }

    fn delete_unchecked(&mut self, u: usize, v: usize) {
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
        self.degrees[u] -= 1;
        self.degrees[v] -= 1;
        self.edge_count -= 1;
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(param(format!("vertex {v} out of range for n = {}", self.n)))
        } else {
            Ok(())
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree_sum(&self) -> usize {
        2 * self.edge_count
    }

    /// First vertex of degree zero, if any.
    pub fn isolated_vertex(&self) -> Option<usize> {
        self.degrees.iter().position(|&d| d == 0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(v)
    }

    /// Number of pairs `C(n, 2)`.
    pub fn pair_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    /// Edge density `|E| / C(n, 2)`.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.edge_count as f64 / self.pair_count() as f64
        }
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].ones()
    }

    /// Adjacency row of `u` as a bitset.
    pub fn adjacency_row(&self, u: usize) -> &FixedBitSet {
        &self.adj[u]
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Pair> + '_ {
        (0..self.n).flat_map(move |u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Non-adjacent pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn non_edges_iter(&self) -> impl Iterator<Item = Pair> + '_ {
        (0..self.n).flat_map(move |u| {
            ((u + 1)..self.n).filter(move |&v| !self.adj[u].contains(v)).map(move |v| (u, v))
        })
    }

    /// All non-edges in lexicographic order; `C(n,2) - |E|` entries.
    pub fn non_edges(&self) -> Vec<Pair> {
        self.non_edges_iter().collect()
    }

    pub fn non_edge_count(&self) -> usize {
        self.pair_count() - self.edge_count
    }

    /// `G + {u, v}`.
    pub fn add_edge(&self, u: usize, v: usize) -> Result<Graph> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(precondition(format!("cannot add self-loop at {u}")));
        }
        if self.has_edge(u, v) {
            return Err(precondition(format!("edge {{{u}, {v}}} already present")));
        }
        let mut g = self.clone();
        g.insert_unchecked(u, v);
        Ok(g)
    }

    /// `G - {u, v}`.
    pub fn remove_edge(&self, u: usize, v: usize) -> Result<Graph> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if !self.has_edge(u, v) {
            return Err(precondition(format!("edge {{{u}, {v}}} absent")));
        }
        let mut g = self.clone();
        g.delete_unchecked(u, v);
        Ok(g)
    }

    /// `|E(S)|`: edges with both endpoints in `subset`. Repeated vertices in
    /// `subset` are counted once.
    pub fn edges_within_subset(&self, subset: &[usize]) -> Result<usize> {
        let mut mask = FixedBitSet::with_capacity(self.n);
        for &v in subset {
            self.check_vertex(v)?;
            mask.insert(v);
        }
        Ok(self.edges_within_mask(&mask))
    }

    /// `|E(S)|` for `S` given as a bitset over `0..n`.
    pub fn edges_within_mask(&self, mask: &FixedBitSet) -> usize {
        let twice: usize = mask.ones().map(|u| self.adj[u].intersection_count(mask)).sum();
        twice / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut stack = vec![0usize];
        seen.insert(0);
        while let Some(u) = stack.pop() {
            for w in self.adj[u].ones() {
                if !seen.contains(w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        seen.count_ones(..) == self.n
    }

    /// Serializes to the fixture format `{"n": .., "edges": [[u, v], ..]}`
    /// with edges sorted lexicographically.
    pub fn to_fixture_json(&self) -> String {
        let fixture = GraphFixture {
            n: self.n,
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&fixture).expect("fixture serialization cannot fail")
    }

    /// Parses and validates a graph fixture.
    pub fn from_fixture_json(text: &str) -> Result<Graph> {
        let fixture: GraphFixture =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph fixture: {e}")))?;
        fixture.into_graph()
    }

    /// Byte-level entry point used by the fuzz targets.
    pub fn from_fixture_bytes(bytes: &[u8]) -> Result<Graph> {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse(format!("graph fixture: {e}")))?;
        Graph::from_fixture_json(text)
    }
}

/// On-disk graph format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFixture {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

/// Fixtures above this many vertices are rejected before allocating.
pub const MAX_FIXTURE_VERTICES: usize = 1 << 16;

impl GraphFixture {
    pub fn into_graph(self) -> Result<Graph> {
        if self.n > MAX_FIXTURE_VERTICES {
            return Err(Error::Parse(format!(
                "graph fixture: n = {} exceeds the supported maximum {MAX_FIXTURE_VERTICES}",
                self.n
            )));
        }
        Graph::from_edges(self.n, self.edges.into_iter().map(|[u, v]| (u, v))).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(m),
            other => Error::Parse(format!("graph fixture: {other}")),
        })
    }
}

/// Parameters of one `G(n, p)` draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnpSpec {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl GnpSpec {
    pub fn new(n: usize, p: f64, seed: u64) -> Self {
        GnpSpec { n, p, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(param(format!("G(n, p) needs n >= 2, got {}", self.n)));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(param(format!("G(n, p) needs 0 < p < 1, got {}", self.p)));
        }
        Ok(())
    }
}

/// Samples `G(n, p)`: pairs are visited in lexicographic order and each gets
/// one uniform `f64` draw from stream [`stream::GRAPH`] of the seed; the pair
/// is an edge iff the draw is `< p`.
pub fn sample_gnp(spec: &GnpSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed, stream::GRAPH);
    let mut g = Graph::empty(spec.n);
    for u in 0..spec.n {
        for v in (u + 1)..spec.n {
            if rng.random::<f64>() < spec.p {
                g.insert_unchecked(u, v);
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::complete(3)
    }

    #[test]
    fn gnp_limits() {
        let g = sample_gnp(&GnpSpec::new(5, 1e-15, 3)).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = sample_gnp(&GnpSpec::new(5, 1.0 - 1e-15, 3)).unwrap();
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g, Graph::complete(5));
    }

    #[test]
    fn gnp_rejects_bad_params() {
        assert!(matches!(sample_gnp(&GnpSpec::new(1, 0.5, 0)), Err(Error::Parameter(_))));
        assert!(sample_gnp(&GnpSpec::new(5, 0.0, 0)).is_err());
        assert!(sample_gnp(&GnpSpec::new(5, 1.0, 0)).is_err());
        assert!(sample_gnp(&GnpSpec::new(5, f64::NAN, 0)).is_err());
    }

    #[test]
    fn gnp_is_deterministic() {
        let spec = GnpSpec::new(60, 0.3, 99);
        assert_eq!(sample_gnp(&spec).unwrap(), sample_gnp(&spec).unwrap());
        let other = GnpSpec::new(60, 0.3, 100);
        assert_ne!(sample_gnp(&spec).unwrap(), sample_gnp(&other).unwrap());
    }

    #[test]
    fn gnp_edge_count_matches_binomial() {
        // |E| ~ Bin(C(1000,2), 1/2): mean 249750, sd sqrt(249750/2)
        let pairs = 1000.0 * 999.0 / 2.0;
        let sd = (pairs * 0.25f64).sqrt();
        let seeds = 100;
        let mean: f64 = (0..seeds)
            .map(|s| sample_gnp(&GnpSpec::new(1000, 0.5, s)).unwrap().edge_count() as f64)
            .sum::<f64>()
            / seeds as f64;
        // the mean of 100 draws has sd / 10; the stated check uses 3 sd of one draw
        assert!((mean - pairs * 0.5).abs() <= 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn add_edge_path_to_triangle() {
        let path = Graph::path(3);
        let tri = path.add_edge(0, 2).unwrap();
        assert_eq!(tri.degrees(), &[2, 2, 2]);
        assert_eq!(tri, triangle());
        assert_eq!(path.edge_count(), 2, "input untouched");
        let g = Graph::empty(2).add_edge(0, 1).unwrap();
        assert_eq!(g.degrees(), &[1, 1]);
    }

    #[test]
    fn add_edge_errors() {
        assert!(matches!(triangle().add_edge(0, 1), Err(Error::Precondition(_))));
        assert!(matches!(triangle().add_edge(1, 1), Err(Error::Precondition(_))));
        assert!(matches!(triangle().add_edge(0, 7), Err(Error::Parameter(_))));
        assert!(matches!(Graph::path(3).remove_edge(0, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn remove_edge_examples() {
        assert_eq!(triangle().remove_edge(2, 0).unwrap(), Graph::path(3));
        let g = Graph::complete(4).remove_edge(1, 3).unwrap();
        assert_eq!(g.edge_count(), 5);
        let mut degs = g.degrees().to_vec();
        degs.sort();
        assert_eq!(degs, vec![2, 2, 3, 3]);
    }

    #[test]
    fn non_edges_examples() {
        assert!(Graph::complete(5).non_edges().is_empty());
        assert_eq!(Graph::empty(4).non_edges().len(), 6);
        assert_eq!(Graph::path(3).non_edges(), vec![(0, 2)]);
    }

    #[test]
    fn edges_within_subset_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.edges_within_subset(&[]).unwrap(), 0);
        assert_eq!(k4.edges_within_subset(&[2]).unwrap(), 0);
        assert_eq!(k4.edges_within_subset(&[0, 1, 2, 3]).unwrap(), 6);
        assert!(matches!(k4.edges_within_subset(&[4]), Err(Error::Parameter(_))));
    }

    #[test]
    fn edges_within_subset_matches_pair_enumeration() {
        use rand::seq::SliceRandom;
        let g = sample_gnp(&GnpSpec::new(50, 0.5, 11)).unwrap();
        let mut rng = rng_for(5, 0);
        for _ in 0..20 {
            let mut verts: Vec<usize> = (0..50).collect();
            verts.shuffle(&mut rng);
            let s = &verts[..20];
            let mut brute = 0;
            for i in 0..s.len() {
                for j in (i + 1)..s.len() {
                    if g.has_edge(s[i], s[j]) {
                        brute += 1;
                    }
                }
            }
            assert_eq!(g.edges_within_subset(s).unwrap(), brute);
        }
    }

    #[test]
    fn fixture_format() {
        let g = Graph::path(3);
        let text = g.to_fixture_json();
        assert_eq!(text, r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        assert_eq!(Graph::from_fixture_json(&text).unwrap(), g);
        for bad in [
            r#"{"n":3,"edges":[[0,0]]}"#,
            r#"{"n":3,"edges":[[0,3]]}"#,
            r#"{"n":3,"edges":[[0,1],[1,0]]}"#,
            r#"{"n":3,"edges":[[0,1]],"extra":1}"#,
            r#"{"n":-1,"edges":[]}"#,
            r#"[1,2]"#,
        ] {
            assert!(matches!(Graph::from_fixture_json(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..24, 0.05f64..0.95, any::<u64>())
            .prop_map(|(n, p, seed)| sample_gnp(&GnpSpec::new(n, p, seed)).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn degree_sum_and_partition(g in arb_graph()) {
            prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
            prop_assert_eq!(g.non_edges().len() + g.edges().count(), g.pair_count());
            for (u, v) in g.non_edges() {
                prop_assert!(!g.has_edge(u, v));
            }
        }

        #[test]
        fn perturbations_are_local_and_inverse(g in arb_graph(), k in any::<prop::sample::Index>()) {
            let pairs: Vec<Pair> = g.non_edges();
            if !pairs.is_empty() {
                let (u, v) = pairs[k.index(pairs.len())];
                let plus = g.add_edge(v, u).unwrap();
                for w in 0..g.n() {
                    let expected = g.degree(w) + usize::from(w == u || w == v);
                    prop_assert_eq!(plus.degree(w), expected);
                }
                prop_assert_eq!(plus.remove_edge(u, v).unwrap(), g.clone());
            }
        }

        #[test]
        fn fixture_round_trip(g in arb_graph()) {
            prop_assert_eq!(Graph::from_fixture_json(&g.to_fixture_json()).unwrap(), g);
        }
    }
}
