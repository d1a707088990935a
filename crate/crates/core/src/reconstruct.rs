//! Point evaluation of a discrete distribution anywhere in phase space.
//!
//! dG data are evaluated as tensor-product polynomials in their cell; spline
//! data through the tensor-product periodic cubic spline interpolant.

use rayon::prelude::*;

use crate::basis::orthonormal_legendre_all;
use crate::error::Result;
use crate::grid::{Axis, DistributionField};
use crate::spline::{bspline_weights, tensor_coefficients};

/// Continuous representation of a [`DistributionField`].
#[derive(Debug, Clone)]
pub struct Reconstruction {
    x: Axis,
    v: Axis,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    /// Modal coefficients, `[cell_v][cell_x][a][b]` flattened, with `a` the
    /// v-degree and `b` the x-degree.
    Dg { lx: usize, lv: usize, modal: Vec<f64> },
    /// Tensor B-spline coefficients, row-major like the field.
    Spline { omega: Vec<f64> },
}

impl Reconstruction {
    pub fn new(f: &DistributionField) -> Result<Self> {
        let grid = f.grid();
        let (x, v) = (*grid.x(), *grid.v());
        let kind = match (grid.basis_x(), grid.basis_v()) {
            (Some(bx), Some(bv)) => {
                let (nx, nv) = (bx.len(), bv.len());
                let (px, pv) = (bx.projection(), bv.projection());
                let n_cols = f.n_cols();
                let block = nx * nv;
                let mut modal = vec![0.0; x.cells * v.cells * block];
                modal.par_chunks_mut(x.cells * block).enumerate().for_each(|(cv, out)| {
                    for cx in 0..x.cells {
                        let dst = &mut out[cx * block..(cx + 1) * block];
                        // tmp[a][m] = Σ_r Pv[a][r] f[r][m]
                        let mut tmp = vec![0.0; nv * nx];
                        for a in 0..nv {
                            for r in 0..nv {
                                let row = &f.values()[(cv * nv + r) * n_cols + cx * nx..][..nx];
                                let p = pv[(a, r)];
                                for (t, fv) in tmp[a * nx..(a + 1) * nx].iter_mut().zip(row) {
                                    *t += p * fv;
                                }
                            }
                        }
                        for a in 0..nv {
                            for b in 0..nx {
                                dst[a * nx + b] = (0..nx).map(|m| tmp[a * nx + m] * px[(b, m)]).sum();
                            }
                        }
                    }
                });
                Kind::Dg {
                    lx: bx.degree(),
                    lv: bv.degree(),
                    modal,
                }
            }
            _ => {
                Kind::Spline {
                    omega: tensor_coefficients(f.values(), f.n_rows(), f.n_cols())?,
                }
            }
        };
        Ok(Self { x, v, kind })
    }

    /// Value at `(x, v)`, with periodic wrapping in both directions.
    pub fn eval(&self, x: f64, v: f64) -> f64 {
        let (ix, sx) = locate(&self.x, x);
        let (iv, sv) = locate(&self.v, v);
        match &self.kind {
            Kind::Dg { lx, lv, modal } => {
                let (nx, nv) = (lx + 1, lv + 1);
                let px = orthonormal_legendre_all(*lx, 2.0 * sx - 1.0);
                let pv = orthonormal_legendre_all(*lv, 2.0 * sv - 1.0);
                let c = &modal[(iv * self.x.cells + ix) * nx * nv..][..nx * nv];
                let mut acc = 0.0;
                for a in 0..nv {
                    let row: f64 = (0..nx).map(|b| c[a * nx + b] * px[b]).sum();
                    acc += pv[a] * row;
                }
                acc
            }
            Kind::Spline { omega } => {
                let (nx, nv) = (self.x.cells as isize, self.v.cells as isize);
                let wx = bspline_weights(sx);
                let wv = bspline_weights(sv);
                let mut acc = 0.0;
                for (a, wa) in wv.iter().enumerate() {
                    let r = (iv as isize + a as isize - 1).rem_euclid(nv) as usize;
                    let row = &omega[r * nx as usize..];
                    let mut s = 0.0;
                    for (b, wb) in wx.iter().enumerate() {
                        let c = (ix as isize + b as isize - 1).rem_euclid(nx) as usize;
                        s += wb * row[c];
                    }
                    acc += wa * s;
                }
                acc
            }
        }
    }

    /// Values at the midpoints of an `nx × nv` uniform partition of the box,
    /// row-major with one row per velocity.
    pub fn sample_midpoints(&self, nx: usize, nv: usize) -> Vec<f64> {
        let hx = self.x.length() / nx as f64;
        let hv = self.v.length() / nv as f64;
        let mut out = vec![0.0; nx * nv];
        out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            let v = self.v.min + (j as f64 + 0.5) * hv;
            for (i, o) in row.iter_mut().enumerate() {
                *o = self.eval(self.x.min + (i as f64 + 0.5) * hx, v);
            }
        });
        out
    }
}

/// Cell (or knot interval) index and fractional position in `[0, 1)`.
fn locate(axis: &Axis, x: f64) -> (usize, f64) {
    let n = axis.cells;
    let t = ((x - axis.min) / axis.h()).rem_euclid(n as f64);
    let k = t.floor();
    if k as usize >= n {
        return (0, 0.0);
    }
    (k as usize, t - k)
}

/// `‖a − b‖₂` over the box, by the midpoint rule on an `nx × nv` partition.
pub fn l2_distance(a: &Reconstruction, b: &Reconstruction, nx: usize, nv: usize) -> f64 {
    let sa = a.sample_midpoints(nx, nv);
    let sb = b.sample_midpoints(nx, nv);
    let cell = a.x.length() / nx as f64 * a.v.length() / nv as f64;
    (cell * sa.iter().zip(&sb).map(|(p, q)| (p - q).powi(2)).sum::<f64>()).sqrt()
}
