//! Semi-Lagrangian discontinuous Galerkin translation.
//!
//! A row of cellwise polynomials is translated by a constant displacement and
//! L²-projected back onto the cellwise polynomials of the same degree. Writing
//! the displacement as `(q + β) h` with integer `q` and `β ∈ [0, 1)`, every
//! target cell overlaps exactly two source cells, so the update is a two-cell
//! stencil independent of the polynomial degree.

use rayon::prelude::*;

use crate::basis::{orthonormal_legendre_into, CellBasis, MAX_DEGREE};
use crate::error::{check_len, Error, Result};
use crate::grid::{transpose, DistributionField};
use crate::linalg::Matrix;

/// Translation-plus-projection stencil for one displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    degree: usize,
    beta: f64,
    q: i64,
    /// Acts on the Legendre coefficients of source cell `i − q − 1`.
    mat_left: Matrix,
    /// Acts on the Legendre coefficients of source cell `i − q`.
    mat_right: Matrix,
    node_left: Matrix,
    node_right: Matrix,
}

impl ShiftOperator {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Fractional part of the displacement in cell units, in `[0, 1)`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Whole-cell part of the displacement.
    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn mat_left(&self) -> &Matrix {
        &self.mat_left
    }

    pub fn mat_right(&self) -> &Matrix {
        &self.mat_right
    }

    /// `true` when the displacement is a whole number of cells.
    pub fn is_permutation(&self) -> bool {
        self.beta == 0.0
    }
}

/// Builds the stencil for translating by `delta` on cells of width `h`.
pub fn build_shift(delta: f64, h: f64, basis: &CellBasis) -> ShiftOperator {
    assert!(h > 0.0, "cell width must be positive");
    assert!(delta.is_finite(), "displacement must be finite");
    let n = basis.len();
    let degree = basis.degree();
    let s = delta / h;
    let mut q = s.floor();
    let mut beta = s - q;
    if beta >= 1.0 {
        // s just below an integer can round up here
        q += 1.0;
        beta = 0.0;
    }
    let q = q as i64;

    if beta == 0.0 {
        let id = Matrix::identity(n);
        return ShiftOperator {
            degree,
            beta,
            q,
            mat_left: Matrix::zeros(n, n),
            mat_right: id.clone(),
            node_left: Matrix::zeros(n, n),
            node_right: id,
        };
    }

    // The (ℓ+1)-point rule is exact for the degree-2ℓ integrands below.
    let (t, w) = (basis.nodes(), basis.weights());
    // Target sub-interval ξ ∈ [−1, −1 + 2β] is fed by the right end of the
    // left source cell (ξ_src = ξ + 2 − 2β); the rest, ξ ∈ [−1 + 2β, 1], by the
    // left part of the right source cell (ξ_src = ξ − 2β).
    let mut mat_left = Matrix::zeros(n, n);
    let mut mat_right = Matrix::zeros(n, n);
    let mut target = [0.0; MAX_DEGREE + 1];
    let mut source = [0.0; MAX_DEGREE + 1];
    for (tr, wr) in t.iter().zip(w) {
        let xi = -1.0 + beta * (1.0 + tr);
        orthonormal_legendre_into(xi, &mut target[..n]);
        orthonormal_legendre_into(xi + 2.0 - 2.0 * beta, &mut source[..n]);
        accumulate_outer(&mut mat_left, beta * wr, &target[..n], &source[..n]);

        let xi = -1.0 + 2.0 * beta + (1.0 - beta) * (1.0 + tr);
        orthonormal_legendre_into(xi, &mut target[..n]);
        orthonormal_legendre_into(xi - 2.0 * beta, &mut source[..n]);
        accumulate_outer(&mut mat_right, (1.0 - beta) * wr, &target[..n], &source[..n]);
    }
    let node_left = basis.vandermonde().matmul(&mat_left).matmul(basis.projection());
    let node_right = basis.vandermonde().matmul(&mat_right).matmul(basis.projection());
    ShiftOperator {
        degree,
        beta,
        q,
        mat_left,
        mat_right,
        node_left,
        node_right,
    }
}

fn accumulate_outer(m: &mut Matrix, scale: f64, a: &[f64], b: &[f64]) {
    for (k, ak) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            m[(k, j)] += scale * ak * bj;
        }
    }
}

/// Writes the translated row into `out`. Both slices hold node values.
pub fn advect_row_into(row: &[f64], op: &ShiftOperator, out: &mut [f64]) -> Result<()> {
    let n = op.degree + 1;
    if row.len() % n != 0 || row.is_empty() {
        return Err(Error::ShapeMismatch {
            context: "advect_row",
            expected: n * (row.len() / n).max(1),
            actual: row.len(),
        });
    }
    check_len("advect_row output", row.len(), out.len())?;
    let cells = (row.len() / n) as i64;
    for (i, target) in out.chunks_exact_mut(n).enumerate() {
        let right = (i as i64 - op.q).rem_euclid(cells) as usize;
        let src_right = &row[right * n..(right + 1) * n];
        if op.is_permutation() {
            target.copy_from_slice(src_right);
            continue;
        }
        let left = (i as i64 - op.q - 1).rem_euclid(cells) as usize;
        let src_left = &row[left * n..(left + 1) * n];
        for (m, t) in target.iter_mut().enumerate() {
            let a = op.node_left.row(m);
            let b = op.node_right.row(m);
            let mut acc = 0.0;
            for k in 0..n {
                acc += a[k] * src_left[k] + b[k] * src_right[k];
            }
            *t = acc;
        }
    }
    Ok(())
}

/// Translates one row of node values: `u_new(x) = P u(x − delta)`.
pub fn advect_row(row: &[f64], op: &ShiftOperator) -> Result<Vec<f64>> {
    let mut out = vec![0.0; row.len()];
    advect_row_into(row, op, &mut out)?;
    Ok(out)
}

fn require_dg(f: &DistributionField) -> Result<(&CellBasis, &CellBasis)> {
    match (f.grid().basis_x(), f.grid().basis_v()) {
        (Some(bx), Some(bv)) => Ok((bx, bv)),
        _ => Err(Error::Config("dG transport requires a dG grid".into())),
    }
}

/// Free streaming `f(x, v) ← f(x − τ v, v)`, one stencil per velocity row.
pub fn advect_x(f: &DistributionField, tau: f64) -> Result<DistributionField> {
    let (bx, _) = require_dg(f)?;
    let h = f.grid().h_x();
    let vs = f.grid().v_positions();
    let n_cols = f.n_cols();
    let mut out = vec![0.0; f.values().len()];
    out.par_chunks_mut(n_cols)
        .zip(f.values().par_chunks(n_cols))
        .zip(vs.par_iter())
        .try_for_each(|((dst, src), &v)| {
            let op = build_shift(tau * v, h, bx);
            advect_row_into(src, &op, dst)
        })?;
    f.with_values(out)
}

/// Acceleration `f(x, v) ← f(x, v − τ E(x))` with `E` given at every position
/// degree of freedom.
pub fn advect_v(f: &DistributionField, e_at_dofs: &[f64], tau: f64) -> Result<DistributionField> {
    let (_, bv) = require_dg(f)?;
    check_len("advect_v field", f.n_cols(), e_at_dofs.len())?;
    let h = f.grid().h_v();
    let (rows, cols) = (f.n_rows(), f.n_cols());
    let columns = f.transposed();
    let mut out = vec![0.0; columns.len()];
    out.par_chunks_mut(rows)
        .zip(columns.par_chunks(rows))
        .zip(e_at_dofs.par_iter())
        .try_for_each(|((dst, src), &e)| {
            let op = build_shift(tau * e, h, bv);
            advect_row_into(src, &op, dst)
        })?;
    f.with_values(transpose(&out, cols, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(l: usize) -> CellBasis {
        CellBasis::new(l).unwrap()
    }

    #[test]
    fn zero_shift_is_identity_stencil() {
        let op = build_shift(0.0, 0.5, &basis(3));
        assert_eq!(op.q(), 0);
        assert_eq!(op.beta(), 0.0);
        assert_eq!(op.mat_right(), &Matrix::identity(4));
        assert_eq!(op.mat_left(), &Matrix::zeros(4, 4));
    }

    #[test]
    fn whole_cell_shift_permutes_cells() {
        let b = basis(2);
        let op = build_shift(3.0 * 0.25, 0.25, &b);
        assert_eq!((op.q(), op.beta()), (3, 0.0));
        let row: Vec<f64> = (0..24).map(|i| (i as f64).sin()).collect();
        let out = advect_row(&row, &op).unwrap();
        for i in 0..8 {
            let src = (i + 8 - 3) % 8;
            assert_eq!(&out[i * 3..i * 3 + 3], &row[src * 3..src * 3 + 3]);
        }
    }

    #[test]
    fn negative_shift_decomposition() {
        let op = build_shift(-0.3, 1.0, &basis(1));
        assert_eq!(op.q(), -1);
        assert!((op.beta() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn constant_row_is_unchanged() {
        for l in 0..=8 {
            let b = basis(l);
            for &delta in &[0.37, -1.91, 12.3] {
                let op = build_shift(delta, 0.7, &b);
                let row = vec![2.5; 10 * (l + 1)];
                let out = advect_row(&row, &op).unwrap();
                assert!(out.iter().all(|v| (v - 2.5).abs() < 1e-14), "degree {l}");
            }
        }
    }

    #[test]
    fn stencil_reproduces_translated_linear_function() {
        // f(x) = 2 + 0.5 x on a periodic domain is not globally periodic, so
        // check the cells away from the wrap instead.
        let b = basis(1);
        let h = 1.0;
        let cells = 8;
        let row: Vec<f64> = (0..cells)
            .flat_map(|i| b.nodes().iter().map(move |xi| 2.0 + 0.5 * (i as f64 + 0.5 * (xi + 1.0))))
            .collect();
        let op = build_shift(0.25 * h, h, &b);
        let out = advect_row(&row, &op).unwrap();
        for i in 1..cells {
            for (m, xi) in b.nodes().iter().enumerate() {
                let x = i as f64 + 0.5 * (xi + 1.0);
                let exact = 2.0 + 0.5 * (x - 0.25);
                assert!((out[i * 2 + m] - exact).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn wrong_row_length_is_rejected() {
        let op = build_shift(0.1, 1.0, &basis(2));
        assert!(advect_row(&[1.0; 7], &op).is_err());
        let mut out = vec![0.0; 6];
        assert!(advect_row_into(&[1.0; 9], &op, &mut out).is_err());
    }
}
