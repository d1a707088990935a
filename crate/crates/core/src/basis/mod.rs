//! Per-cell polynomial algebra shared by the discontinuous Galerkin code.
//!
//! A cell function of degree ℓ is stored by its values at the ℓ+1
//! Gauss–Legendre nodes of the reference cell (−1, 1). The same function can
//! be expanded in Legendre polynomials normalized to be orthonormal on the
//! reference cell,
//!
//! ```text
//! u(ξ) = Σ_j c_j p_j(ξ),    c_j = ∫ u p_j dξ ≈ Σ_m w_m u(ξ_m) p_j(ξ_m),
//! ```
//!
//! and the quadrature is exact because u p_j has degree at most 2ℓ. Orthonormal
//! scaling makes the L² projection onto degree ℓ a plain truncation and the
//! cell integral equal to √2 · c_0.

pub mod quadrature;

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;

pub use quadrature::{gauss_legendre, legendre_all, orthonormal_legendre_all, orthonormal_legendre_into};

/// Largest polynomial degree accepted by [`CellBasis::new`].
pub const MAX_DEGREE: usize = 8;

/// Gauss–Legendre nodes, weights and the nodal ↔ modal transforms for one
/// polynomial degree.
#[derive(Debug, Clone, PartialEq)]
pub struct CellBasis {
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `vandermonde[(m, j)] = p_j(ξ_m)`: Legendre coefficients → node values.
    vandermonde: Matrix,
    /// `projection[(j, m)] = w_m p_j(ξ_m)`: node values → Legendre coefficients.
    projection: Matrix,
}

impl CellBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::Config(format!(
                "polynomial degree {degree} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        let n = degree + 1;
        let (nodes, weights) = gauss_legendre(n);
        let vandermonde = Matrix::from_fn(n, n, |m, j| orthonormal_legendre_all(degree, nodes[m])[j]);
        let projection = Matrix::from_fn(n, n, |j, m| weights[m] * vandermonde[(m, j)]);
        Ok(Self {
            degree,
            nodes,
            weights,
            vandermonde,
            projection,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of nodes per cell, ℓ + 1.
    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vandermonde(&self) -> &Matrix {
        &self.vandermonde
    }

    pub fn projection(&self) -> &Matrix {
        &self.projection
    }

    /// Orthonormal Legendre coefficients of the cell polynomial with the given
    /// node values.
    pub fn nodes_to_legendre(&self, values: &[f64]) -> Result<Vec<f64>> {
        check_len("nodes_to_legendre", self.len(), values.len())?;
        Ok(self.projection.mul_vec(values))
    }

    /// Node values of the expansion with the given Legendre coefficients.
    pub fn legendre_to_nodes(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len("legendre_to_nodes", self.len(), coeffs.len())?;
        Ok(self.vandermonde.mul_vec(coeffs))
    }

    /// Evaluates the cell polynomial given by node values at reference
    /// coordinate `xi`.
    pub fn evaluate(&self, values: &[f64], xi: f64) -> f64 {
        let coeffs = self.projection.mul_vec(values);
        orthonormal_legendre_all(self.degree, xi)
            .iter()
            .zip(&coeffs)
            .map(|(p, c)| p * c)
            .sum()
    }

    /// Matrix mapping node values to values at the reference points `points`.
    pub fn evaluation_matrix(&self, points: &[f64]) -> Matrix {
        let modal = Matrix::from_fn(points.len(), self.len(), |r, j| {
            orthonormal_legendre_all(self.degree, points[r])[j]
        });
        modal.matmul(&self.projection)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_is_midpoint_rule() {
        let b = CellBasis::new(0).unwrap();
        assert_eq!(b.nodes(), &[0.0]);
        assert!((b.weights()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn degree_one_is_two_point_rule() {
        let b = CellBasis::new(1).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((b.nodes()[0] + r).abs() < 1e-15);
        assert!((b.nodes()[1] - r).abs() < 1e-15);
        assert!((b.weights()[0] - 1.0).abs() < 1e-15);
        assert!((b.weights()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_large_degree() {
        assert!(matches!(CellBasis::new(9), Err(Error::Config(_))));
        assert!(CellBasis::new(8).is_ok());
    }

    #[test]
    fn constant_maps_to_first_coefficient() {
        for degree in 0..=MAX_DEGREE {
            let b = CellBasis::new(degree).unwrap();
            let c = b.nodes_to_legendre(&vec![3.0; degree + 1]).unwrap();
            assert!((c[0] - 3.0 * 2f64.sqrt()).abs() < 1e-13);
            assert!(c[1..].iter().all(|v| v.abs() < 1e-13));
            let mut coeffs = vec![0.0; degree + 1];
            coeffs[0] = 2f64.sqrt() * 1.5;
            let back = b.legendre_to_nodes(&coeffs).unwrap();
            assert!(back.iter().all(|v| (v - 1.5).abs() < 1e-14));
        }
    }

    #[test]
    fn first_basis_function_maps_to_unit_vector() {
        for degree in 1..=MAX_DEGREE {
            let b = CellBasis::new(degree).unwrap();
            let vals: Vec<f64> = b.nodes().iter().map(|&x| (1.5f64).sqrt() * x).collect();
            let c = b.nodes_to_legendre(&vals).unwrap();
            for (j, cj) in c.iter().enumerate() {
                let expected = if j == 1 { 1.0 } else { 0.0 };
                assert!((cj - expected).abs() < 1e-13, "degree {degree} coeff {j}: {cj}");
            }
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let b = CellBasis::new(2).unwrap();
        assert!(matches!(
            b.nodes_to_legendre(&[1.0, 2.0]),
            Err(Error::ShapeMismatch { expected: 3, actual: 2, .. })
        ));
        assert!(b.legendre_to_nodes(&[1.0; 4]).is_err());
    }

    #[test]
    fn evaluation_matrix_reproduces_polynomials() {
        let b = CellBasis::new(3).unwrap();
        let poly = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let vals: Vec<f64> = b.nodes().iter().map(|&x| poly(x)).collect();
        let pts = [-1.0, -0.2, 0.7, 1.0];
        let m = b.evaluation_matrix(&pts);
        let out = m.mul_vec(&vals);
        for (p, o) in pts.iter().zip(&out) {
            assert!((poly(*p) - o).abs() < 1e-13);
            assert!((b.evaluate(&vals, *p) - o).abs() < 1e-13);
        }
    }
}
