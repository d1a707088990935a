//! Backward semi-Lagrangian advection with periodic cubic splines.
//!
//! A periodic cubic spline through `n` equally spaced samples is written in
//! the B-spline basis, `u(x) = Σ_k ω_k S(x − x_k)`, with
//!
//! ```text
//! 6 S(x) = 4 − 6 (x/h)² + 3 |x/h|³    for |x| ≤ h
//! 6 S(x) = (2 − |x/h|)³               for h ≤ |x| ≤ 2h
//! ```
//!
//! Interpolation gives the cyclic system `(ω_{i−1} + 4 ω_i + ω_{i+1}) / 6 = u_i`.
//! Because the B-splines sum to one, `Σ_i u(x_i − s) = Σ_k ω_k = Σ_i u_i` for
//! every shift `s`, so translation conserves the discrete mass.

use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::grid::{transpose, DistributionField};

/// Pre-factored solver for the constant-coefficient cyclic tridiagonal system
/// `lower · x_{i−1} + diag · x_i + upper · x_{i+1} = r_i` (indices mod n).
///
/// Uses the Sherman–Morrison rank-one correction around a Thomas solve.
#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    n: usize,
    lower: f64,
    gamma: f64,
    /// Modified super-diagonal from the forward sweep.
    c_prime: Vec<f64>,
    /// Reciprocal pivots from the forward sweep.
    inv_pivot: Vec<f64>,
    /// Solution of the modified system for the correction vector.
    z: Vec<f64>,
}

impl CyclicTridiagonal {
    pub fn new(n: usize, lower: f64, diag: f64, upper: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config(format!("cyclic system needs n >= 3, got {n}")));
        }
        let gamma = -diag;
        let mut d = vec![diag; n];
        d[0] = diag - gamma;
        d[n - 1] = diag - lower * upper / gamma;
        let mut c_prime = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        inv_pivot[0] = 1.0 / d[0];
        c_prime[0] = upper * inv_pivot[0];
        for i in 1..n {
            let pivot = d[i] - lower * c_prime[i - 1];
            inv_pivot[i] = 1.0 / pivot;
            c_prime[i] = upper * inv_pivot[i];
        }
        let mut solver = Self {
            n,
            lower,
            gamma,
            c_prime,
            inv_pivot,
            z: Vec::new(),
        };
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = upper;
        solver.thomas(&mut u);
        solver.z = u;
        Ok(solver)
    }

    fn thomas(&self, r: &mut [f64]) {
        let n = self.n;
        r[0] *= self.inv_pivot[0];
        for i in 1..n {
            r[i] = (r[i] - self.lower * r[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            r[i] -= self.c_prime[i] * r[i + 1];
        }
    }

    /// Solves in place.
    pub fn solve_in_place(&self, r: &mut [f64]) -> Result<()> {
        check_len("cyclic tridiagonal rhs", self.n, r.len())?;
        self.thomas(r);
        let n = self.n;
        let z = &self.z;
        // corner entries: A[0][n−1] = lower, A[n−1][0] = upper
        let fact = (r[0] + self.lower * r[n - 1] / self.gamma)
            / (1.0 + z[0] + self.lower * z[n - 1] / self.gamma);
        for (ri, zi) in r.iter_mut().zip(z) {
            *ri -= fact * zi;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// B-spline weights of the four splines overlapping a point at fraction
/// `s ∈ [0, 1)` between knots `k` and `k + 1`, for knots `k−1 ..= k+2`.
#[inline]
pub fn bspline_weights(s: f64) -> [f64; 4] {
    let r = 1.0 - s;
    [
        r * r * r / 6.0,
        (4.0 - 6.0 * s * s + 3.0 * s * s * s) / 6.0,
        (4.0 - 6.0 * r * r + 3.0 * r * r * r) / 6.0,
        s * s * s / 6.0,
    ]
}

/// Cubic B-spline kernel `S` for unit spacing.
pub fn bspline_kernel(u: f64) -> f64 {
    let a = u.abs();
    if a <= 1.0 {
        (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
    } else if a <= 2.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        0.0
    }
}

/// A periodic cubic spline on the knots `origin + i h`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline {
    h: f64,
    origin: f64,
    omega: Vec<f64>,
}

impl PeriodicSpline {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// B-spline coefficients.
    pub fn coefficients(&self) -> &[f64] {
        &self.omega
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    /// Evaluates the spline at `x`, wrapping periodically.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.omega.len();
        let t = ((x - self.origin) / self.h).rem_euclid(n as f64);
        let mut k = t.floor();
        let mut s = t - k;
        if k as usize >= n {
            k = 0.0;
            s = 0.0;
        }
        let k = k as usize;
        let w = bspline_weights(s);
        let idx = |d: isize| ((k as isize + d).rem_euclid(n as isize)) as usize;
        w[0] * self.omega[idx(-1)] + w[1] * self.omega[idx(0)] + w[2] * self.omega[idx(1)] + w[3] * self.omega[idx(2)]
    }
}

/// Interpolating periodic cubic spline through `data` sampled with spacing `h`.
pub fn build_spline(data: &[f64], h: f64) -> Result<PeriodicSpline> {
    if data.len() < 4 {
        return Err(Error::Config(format!(
            "a periodic cubic spline needs at least 4 points, got {}",
            data.len()
        )));
    }
    let solver = CyclicTridiagonal::new(data.len(), 1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0)?;
    let mut omega = data.to_vec();
    solver.solve_in_place(&mut omega)?;
    Ok(PeriodicSpline {
        h,
        origin: 0.0,
        omega,
    })
}

/// `∫ S(x) S(x − m h) dx / h` for `m = 0, 1, 2, 3`; zero beyond.
pub const BSPLINE_GRAM: [f64; 4] = [151.0 / 315.0, 397.0 / 1680.0, 1.0 / 42.0, 1.0 / 5040.0];

/// Tensor-product B-spline coefficients of a row-major `rows × cols` array of
/// periodic samples.
pub fn tensor_coefficients(values: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    check_len("spline samples", rows * cols, values.len())?;
    let sx = CyclicTridiagonal::new(cols, 1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0)?;
    let sv = CyclicTridiagonal::new(rows, 1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0)?;
    let mut omega = values.to_vec();
    omega.par_chunks_mut(cols).try_for_each(|row| sx.solve_in_place(row))?;
    let mut columns = transpose(&omega, rows, cols);
    columns.par_chunks_mut(rows).try_for_each(|col| sv.solve_in_place(col))?;
    Ok(transpose(&columns, cols, rows))
}

/// Applies the periodic B-spline Gram stencil to `src`.
fn gram_apply(src: &[f64], out: &mut [f64]) {
    let n = src.len() as isize;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = BSPLINE_GRAM[0] * src[i];
        for (m, g) in BSPLINE_GRAM.iter().enumerate().skip(1) {
            let m = m as isize;
            let l = (i as isize - m).rem_euclid(n) as usize;
            let r = (i as isize + m).rem_euclid(n) as usize;
            acc += g * (src[l] + src[r]);
        }
        *o = acc;
    }
}

/// `∫∫ s²` of the tensor-product periodic cubic spline through the grid values
/// of `f`. Unlike `h_x h_v Σ f²`, this is the squared L² norm of the function
/// the scheme actually represents.
pub fn interpolant_norm_squared(f: &DistributionField) -> Result<f64> {
    require_spline(f)?;
    let (rows, cols) = (f.n_rows(), f.n_cols());
    let omega = tensor_coefficients(f.values(), rows, cols)?;
    let mut mx = vec![0.0; omega.len()];
    mx.par_chunks_mut(cols)
        .zip(omega.par_chunks(cols))
        .for_each(|(dst, src)| gram_apply(src, dst));
    let mx_cols = transpose(&mx, rows, cols);
    let omega_cols = transpose(&omega, rows, cols);
    let partial: Vec<f64> = mx_cols
        .par_chunks(rows)
        .zip(omega_cols.par_chunks(rows))
        .map(|(src, w)| {
            let mut g = vec![0.0; rows];
            gram_apply(src, &mut g);
            g.iter().zip(w).map(|(a, b)| a * b).sum::<f64>()
        })
        .collect();
    Ok(f.grid().h_x() * f.grid().h_v() * partial.iter().sum::<f64>())
}

/// Reusable spline translation for rows of a fixed length.
#[derive(Debug, Clone)]
pub struct SplineShifter {
    solver: CyclicTridiagonal,
}

impl SplineShifter {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::Config(format!(
                "a periodic cubic spline needs at least 4 points, got {n}"
            )));
        }
        Ok(Self {
            solver: CyclicTridiagonal::new(n, 1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0)?,
        })
    }

    /// `out[i] = u(x_i − delta)` where `u` interpolates `row` with spacing `h`.
    pub fn shift_into(&self, row: &[f64], delta: f64, h: f64, out: &mut [f64]) -> Result<()> {
        let n = self.solver.len();
        check_len("spline row", n, row.len())?;
        check_len("spline row output", n, out.len())?;
        let s = delta / h;
        let mut q = s.floor();
        let mut beta = s - q;
        if beta >= 1.0 {
            q += 1.0;
            beta = 0.0;
        }
        let q = q as i64;
        let ni = n as i64;
        if beta == 0.0 {
            for (i, o) in out.iter_mut().enumerate() {
                *o = row[(i as i64 - q).rem_euclid(ni) as usize];
            }
            return Ok(());
        }
        // ω padded with one entry on the left and two on the right
        let mut omega = Vec::with_capacity(n + 3);
        omega.push(0.0);
        omega.extend_from_slice(row);
        self.solver.solve_in_place(&mut omega[1..])?;
        omega[0] = omega[n];
        omega.push(omega[1]);
        omega.push(omega[2]);
        // x_i − delta = x_{i−q−1} + (1 − β) h
        let w = bspline_weights(1.0 - beta);
        let mut base = (-q - 1).rem_euclid(ni) as usize;
        for o in out.iter_mut() {
            let c = &omega[base..base + 4];
            *o = w[0] * c[0] + w[1] * c[1] + w[2] * c[2] + w[3] * c[3];
            base += 1;
            if base == n {
                base = 0;
            }
        }
        Ok(())
    }
}

/// Translates one row of equidistant samples: `u_new(x_i) = u(x_i − delta)`.
pub fn advect_row_spline(row: &[f64], delta: f64, h: f64) -> Result<Vec<f64>> {
    let shifter = SplineShifter::new(row.len())?;
    let mut out = vec![0.0; row.len()];
    shifter.shift_into(row, delta, h, &mut out)?;
    Ok(out)
}

fn require_spline(f: &DistributionField) -> Result<()> {
    if f.grid().is_dg() {
        Err(Error::Config("spline transport requires an equidistant grid".into()))
    } else {
        Ok(())
    }
}

/// Free streaming `f(x, v) ← f(x − τ v, v)` on the equidistant grid.
pub fn advect_x_spline(f: &DistributionField, tau: f64) -> Result<DistributionField> {
    require_spline(f)?;
    let h = f.grid().h_x();
    let n_cols = f.n_cols();
    let shifter = SplineShifter::new(n_cols)?;
    let vs = f.grid().v_positions();
    let mut out = vec![0.0; f.values().len()];
    out.par_chunks_mut(n_cols)
        .zip(f.values().par_chunks(n_cols))
        .zip(vs.par_iter())
        .try_for_each(|((dst, src), &v)| shifter.shift_into(src, tau * v, h, dst))?;
    f.with_values(out)
}

/// Acceleration `f(x, v) ← f(x, v − τ E(x))` on the equidistant grid.
pub fn advect_v_spline(f: &DistributionField, e_at_dofs: &[f64], tau: f64) -> Result<DistributionField> {
    require_spline(f)?;
    check_len("advect_v field", f.n_cols(), e_at_dofs.len())?;
    let h = f.grid().h_v();
    let (rows, cols) = (f.n_rows(), f.n_cols());
    let shifter = SplineShifter::new(rows)?;
    let columns = f.transposed();
    let mut out = vec![0.0; columns.len()];
    out.par_chunks_mut(rows)
        .zip(columns.par_chunks(rows))
        .zip(e_at_dofs.par_iter())
        .try_for_each(|((dst, src), &e)| shifter.shift_into(src, tau * e, h, dst))?;
    f.with_values(transpose(&out, cols, rows))
}
