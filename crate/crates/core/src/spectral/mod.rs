//! Graph matrices and their spectra.

pub mod eigen;
pub mod matrix;
pub mod update;

pub use eigen::{eig_sym, eigenvalues, Ordering, SpectralDecomposition, DEGENERACY_GAP, ORTHONORMALITY_TOL, RESIDUAL_TOL};
pub use matrix::{
    adjacency_matrix, combinatorial_laplacian, normalized_adjacency, normalized_laplacian, sqrt_degree_vector,
    SymmetricMatrix,
};

use crate::error::{param, Result};
use crate::graph::Graph;

/// `λ₂(𝓛_G)`. Zero (to rounding) iff `g` is disconnected.
pub fn spectral_gap(g: &Graph) -> Result<f64> {
    let l = normalized_laplacian(g)?;
    if g.n() < 2 {
        return Err(param("spectral gap needs at least two vertices"));
    }
    Ok(eigenvalues(&l, Ordering::Ascending)?[1])
}

#[derive(Debug, Clone)]
pub struct SecondEigenvector {
    /// Unit vector, sign fixed by the decomposition convention.
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
    /// `λ₃ − λ₂ < DEGENERACY_GAP`: the eigenvector is not well defined.
    pub degenerate: bool,
}

/// Second eigenvector `f` of `𝓛_G`.
pub fn second_eigenvector(g: &Graph) -> Result<SecondEigenvector> {
    let l = normalized_laplacian(g)?;
    if g.n() < 2 {
        return Err(param("second eigenvector needs at least two vertices"));
    }
    let d = eig_sym(&l, Ordering::Ascending)?;
    Ok(second_of(&d))
}

pub(crate) fn second_of(d: &SpectralDecomposition) -> SecondEigenvector {
    let ev = d.eigenvalues();
    SecondEigenvector {
        vector: d.vector(1).to_vec(),
        eigenvalue: ev[1],
        degenerate: ev.len() > 2 && ev[2] - ev[1] < DEGENERACY_GAP,
    }
}

/// `xᵀMx / xᵀx`.
pub fn rayleigh_quotient(m: &SymmetricMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != m.n() {
        return Err(param(format!("vector length {} does not match matrix size {}", x.len(), m.n())));
    }
    let norm2 = matrix::dot(x, x);
    if norm2 == 0.0 {
        return Err(param("Rayleigh quotient of the zero vector"));
    }
    Ok(m.quadratic_form(x) / norm2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_gnp, GnpSpec};
    use crate::rng::{rng_for, stream};
    use rand::Rng;

    #[test]
    fn gap_examples() {
        assert!((spectral_gap(&Graph::complete(4)).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        let triangles = Graph::complete(3).disjoint_union(&Graph::complete(3));
        assert!(spectral_gap(&triangles).unwrap().abs() < 1e-9);
        assert!((spectral_gap(&Graph::path(3)).unwrap() - 1.0).abs() < 1e-12);
        let isolated = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(spectral_gap(&isolated).is_err());
    }

    #[test]
    fn normalized_laplacian_closed_forms() {
        let ev = eigenvalues(&normalized_laplacian(&Graph::complete(4)).unwrap(), Ordering::Ascending).unwrap();
        let want = [0.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let ev = eigenvalues(&normalized_laplacian(&Graph::path(3)).unwrap(), Ordering::Ascending).unwrap();
        for (a, b) in ev.iter().zip([0.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn second_eigenvector_examples() {
        let s = second_eigenvector(&Graph::path(3)).unwrap();
        let h = 0.5f64.sqrt();
        assert!((s.eigenvalue - 1.0).abs() < 1e-12);
        assert!(!s.degenerate);
        for (a, b) in s.vector.iter().zip([h, 0.0, -h]) {
            assert!((a - b).abs() < 1e-12, "{:?}", s.vector);
        }
        assert!(second_eigenvector(&Graph::complete(4)).unwrap().degenerate);

        let g = sample_gnp(&GnpSpec::new(200, 0.5, 9)).unwrap();
        let s = second_eigenvector(&g).unwrap();
        let top = sqrt_degree_vector(&g);
        let top_norm = matrix::norm2(&top);
        assert!((matrix::dot(&s.vector, &top) / top_norm).abs() < 1e-9);
        let l = normalized_laplacian(&g).unwrap();
        let r: f64 = l
            .matvec(&s.vector)
            .iter()
            .zip(&s.vector)
            .map(|(a, b)| (a - s.eigenvalue * b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(r < 1e-9);
    }

    #[test]
    fn rayleigh_examples() {
        let m = normalized_laplacian(&Graph::path(3)).unwrap();
        let d = eig_sym(&m, Ordering::Ascending).unwrap();
        for k in 0..3 {
            assert!((rayleigh_quotient(&m, d.vector(k)).unwrap() - d.eigenvalue(k)).abs() < 1e-12);
        }
        let l = combinatorial_laplacian(&sample_gnp(&GnpSpec::new(20, 0.3, 1)).unwrap());
        assert_eq!(rayleigh_quotient(&l, &[1.0; 20]).unwrap(), 0.0);
        assert!(rayleigh_quotient(&l, &[0.0; 20]).is_err());

        let mut rng = rng_for(5, stream::MATRICES);
        for _ in 0..20 {
            let m = SymmetricMatrix::from_lower_fn(15, |_, _| rng.random_range(-1.0..1.0));
            let x: Vec<f64> = (0..15).map(|_| rng.random_range(-1.0..1.0)).collect();
            let ev = eigenvalues(&m, Ordering::Ascending).unwrap();
            let q = rayleigh_quotient(&m, &x).unwrap();
            assert!(q >= ev[0] - 1e-12 && q <= ev[14] + 1e-12);
        }
    }

    #[test]
    fn spectral_invariants_on_random_graphs() {
        for seed in 0..5 {
            let g = sample_gnp(&GnpSpec::new(60, 0.3, seed)).unwrap();
            if g.isolated_vertex().is_some() {
                continue;
            }
            let l = eigenvalues(&normalized_laplacian(&g).unwrap(), Ordering::Ascending).unwrap();
            assert!(l.iter().all(|&x| x >= -1e-10));
            if g.is_connected() {
                assert!(l[0].abs() < 1e-10);
            }
            let a = eigenvalues(&normalized_adjacency(&g).unwrap(), Ordering::Descending).unwrap();
            assert!(a.iter().all(|&x| (-1.0 - 1e-10..=1.0 + 1e-10).contains(&x)));
            let c = eigenvalues(&combinatorial_laplacian(&g), Ordering::Ascending).unwrap();
            assert!(c.iter().all(|&x| x >= -1e-10));
            let picked = g.edges().nth(seed as usize);
            if let Some((u, v)) = picked {
                let after = eigenvalues(&combinatorial_laplacian(&g.remove_edge(u, v).unwrap()), Ordering::Ascending)
                    .unwrap();
                for (b, a) in c.iter().zip(&after) {
                    assert!(*a <= b + 1e-10);
                }
            }
        }
    }
}
