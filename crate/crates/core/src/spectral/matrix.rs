use faer::Mat;

use crate::error::{param, Error, Result};
use crate::graph::Graph;

/// Dense real symmetric matrix, row-major. Symmetry is exact: every
/// constructor writes `(i, j)` and `(j, i)` from the same value.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl std::fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "SymmetricMatrix({}x{})", self.n, self.n)?;
        if self.n <= 8 {
            for i in 0..self.n {
                writeln!(f, "  {:?}", self.row(i))?;
            }
        }
        Ok(())
    }
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the lower triangle
    /// (`j <= i`) and mirrored.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let x = f(i, j);
                m.data[i * n + j] = x;
                m.data[j * n + i] = x;
            }
        }
        m
    }

    /// Accepts row-major data only if it is exactly symmetric.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(param(format!("expected {} entries, got {}", n * n, data.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(param(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SymmetricMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `xᵀ M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| x[i] * dot(self.row(i), x)).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub(crate) fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.n, self.n, |i, j| self.data[i * self.n + j])
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `A`: 1 on edges, 0 elsewhere.
pub fn adjacency_matrix(g: &Graph) -> SymmetricMatrix {
    let n = g.n();
    let mut m = SymmetricMatrix::zeros(n);
    for (u, v) in g.edges() {
        m.set(u, v, 1.0);
    }
    m
}

/// `L = D - A`.
pub fn combinatorial_laplacian(g: &Graph) -> SymmetricMatrix {
    let mut m = SymmetricMatrix::zeros(g.n());
    for (u, v) in g.edges() {
        m.set(u, v, -1.0);
    }
    for v in 0..g.n() {
        m.set(v, v, g.degree(v) as f64);
    }
    m
}

fn inv_sqrt_degrees(g: &Graph) -> Result<Vec<f64>> {
    if let Some(vertex) = g.isolated_vertex() {
        return Err(Error::IsolatedVertex { vertex });
    }
    Ok(g.degrees().iter().map(|&d| 1.0 / (d as f64).sqrt()).collect())
}

/// `Â = D^{-1/2} A D^{-1/2}`; fails on isolated vertices.
pub fn normalized_adjacency(g: &Graph) -> Result<SymmetricMatrix> {
    let s = inv_sqrt_degrees(g)?;
    let mut m = SymmetricMatrix::zeros(g.n());
    for (u, v) in g.edges() {
        m.set(u, v, s[u] * s[v]);
    }
    Ok(m)
}

/// `𝓛 = I - Â`; fails on isolated vertices.
pub fn normalized_laplacian(g: &Graph) -> Result<SymmetricMatrix> {
    let s = inv_sqrt_degrees(g)?;
    let mut m = SymmetricMatrix::identity(g.n());
    for (u, v) in g.edges() {
        m.set(u, v, -s[u] * s[v]);
    }
    Ok(m)
}

/// `D^{1/2} 𝟙`, the (unnormalized) bottom eigenvector of `𝓛`.
pub fn sqrt_degree_vector(g: &Graph) -> Vec<f64> {
    g.degrees().iter().map(|&d| (d as f64).sqrt()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_gnp, GnpSpec};

    #[test]
    fn adjacency_examples() {
        assert_eq!(adjacency_matrix(&Graph::empty(4)), SymmetricMatrix::zeros(4));
        let k3 = adjacency_matrix(&Graph::complete(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(k3.get(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        let g = sample_gnp(&GnpSpec::new(30, 0.4, 1)).unwrap();
        let sums = adjacency_matrix(&g).row_sums();
        for v in 0..30 {
            assert_eq!(sums[v], g.degree(v) as f64);
        }
    }

    #[test]
    fn normalized_adjacency_examples() {
        let k3 = normalized_adjacency(&Graph::complete(3)).unwrap();
        assert!((k3.get(0, 1) - 0.5).abs() < 1e-15);
        assert!((k3.get(1, 2) - 0.5).abs() < 1e-15);
        let p3 = normalized_adjacency(&Graph::path(3)).unwrap();
        assert!((p3.get(0, 1) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((p3.get(1, 2) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(p3.get(0, 2), 0.0);
        let with_isolated = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(normalized_adjacency(&with_isolated), Err(Error::IsolatedVertex { vertex: 3 }));
        assert_eq!(normalized_laplacian(&with_isolated), Err(Error::IsolatedVertex { vertex: 3 }));
    }

    #[test]
    fn laplacian_examples() {
        let l = combinatorial_laplacian(&Graph::complete(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), if i == j { 2.0 } else { -1.0 });
            }
        }
        assert_eq!(combinatorial_laplacian(&Graph::empty(3)), SymmetricMatrix::zeros(3));
        let g = sample_gnp(&GnpSpec::new(40, 0.3, 2)).unwrap();
        assert!(combinatorial_laplacian(&g).row_sums().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn normalized_laplacian_kills_sqrt_degrees() {
        let g = sample_gnp(&GnpSpec::new(40, 0.5, 3)).unwrap();
        let l = normalized_laplacian(&g).unwrap();
        let r = l.matvec(&sqrt_degree_vector(&g));
        assert!(r.iter().all(|x| x.abs() < 1e-12), "{r:?}");
    }

    #[test]
    fn from_rows_requires_symmetry() {
        assert!(SymmetricMatrix::from_rows(2, vec![1.0, 2.0, 2.0, 1.0]).is_ok());
        assert!(SymmetricMatrix::from_rows(2, vec![1.0, 2.0, 2.5, 1.0]).is_err());
        assert!(SymmetricMatrix::from_rows(2, vec![1.0]).is_err());
    }
}
