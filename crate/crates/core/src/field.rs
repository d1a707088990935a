//! Charge density, the periodic Poisson solve and the dG ↔ equidistant
//! transfer layer.
//!
//! The field satisfies `E' = ρ − ρ_ion` on the periodic x-domain with zero
//! mean. It is computed spectrally on an equidistant grid. dG data are first
//! evaluated on `ℓ + 1` equidistant points per cell, at the sub-cell midpoints
//! `x_left + (m + ½) h / (ℓ + 1)`, which form one globally uniform grid; the
//! field is brought back to the Gauss–Legendre nodes by degree-ℓ interpolation
//! through the same points.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::basis::CellBasis;
use crate::error::{check_len, Error, Result};
use crate::grid::{DistributionField, PhaseSpaceGrid};
use crate::linalg::{lagrange_matrix, Matrix};

/// Relative tolerance of the neutrality check in the Poisson solve.
pub const NEUTRALITY_TOL: f64 = 1e-10;

/// `ρ(x) = ∫ f dv` at every position degree of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeDensity {
    pub values: Vec<f64>,
}

/// Zero-mean periodic electric field.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectricField1D {
    values_equidistant: Vec<f64>,
    values_at_dg_nodes: Option<Vec<f64>>,
    dx: f64,
}

impl ElectricField1D {
    pub fn values_equidistant(&self) -> &[f64] {
        &self.values_equidistant
    }

    pub fn values_at_dg_nodes(&self) -> Option<&[f64]> {
        self.values_at_dg_nodes.as_deref()
    }

    /// Values at the position degrees of freedom of the grid the field was
    /// computed for.
    pub fn at_dofs(&self) -> &[f64] {
        self.values_at_dg_nodes
            .as_deref()
            .unwrap_or(&self.values_equidistant)
    }

    pub fn mean(&self) -> f64 {
        self.values_equidistant.iter().sum::<f64>() / self.values_equidistant.len() as f64
    }

    /// Spacing of the equidistant grid.
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// `∫ E² / 2 dx` by the trapezoidal rule on the equidistant grid, which is
    /// spectrally accurate for the periodic field.
    pub fn energy(&self) -> f64 {
        0.5 * self.dx * self.values_equidistant.iter().map(|e| e * e).sum::<f64>()
    }

    /// Zero field on `n` equidistant points.
    pub fn zeros(n: usize, dx: f64, dg_dofs: Option<usize>) -> Self {
        Self {
            values_equidistant: vec![0.0; n],
            values_at_dg_nodes: dg_dofs.map(|m| vec![0.0; m]),
            dx,
        }
    }
}

/// Velocity integral of `f` at every position degree of freedom.
///
/// dG: `Σ_j (w_j h_v / 2) f_j`; spline: `h_v Σ_j f_j`.
pub fn density(f: &DistributionField) -> ChargeDensity {
    let weights = f.grid().v_weights();
    let mut values = vec![0.0; f.n_cols()];
    for (j, w) in weights.iter().enumerate() {
        for (acc, fv) in values.iter_mut().zip(f.row(j)) {
            *acc += w * fv;
        }
    }
    ChargeDensity { values }
}

/// Spectral solver for `E' = ρ − background` on `n` equidistant points of a
/// periodic domain of length `length`.
#[derive(Clone)]
pub struct PoissonSolver {
    n: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PoissonSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoissonSolver")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PoissonSolver {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n == 0 || !(length > 0.0) {
            return Err(Error::Config(format!(
                "Poisson solver needs n > 0 and a positive length (n = {n}, L = {length})"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            length,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Field values on the same points as `rho`, after checking that the
    /// rectangle-rule charge matches the background.
    pub fn solve(&self, rho: &[f64], background: f64) -> Result<Vec<f64>> {
        check_len("Poisson density", self.n, rho.len())?;
        let dx = self.dx();
        let weights = vec![dx; self.n];
        check_neutral(rho, &weights, background)?;
        self.solve_unchecked(rho, background)
    }

    /// Field values without the neutrality check. Any net charge only shifts
    /// the discarded zero mode.
    pub fn solve_unchecked(&self, rho: &[f64], background: f64) -> Result<Vec<f64>> {
        check_len("Poisson density", self.n, rho.len())?;
        let mut buf: Vec<Complex64> = rho
            .iter()
            .map(|r| Complex64::new(r - background, 0.0))
            .collect();
        self.forward.process(&mut buf);
        let n = self.n;
        for (m, c) in buf.iter_mut().enumerate() {
            let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
            if m == 0 || (n % 2 == 0 && m == n / 2) {
                *c = Complex64::new(0.0, 0.0);
            } else {
                let kappa = 2.0 * PI * signed / self.length;
                // Ê = ρ̂ / (i κ)
                *c = Complex64::new(c.im / kappa, -c.re / kappa);
            }
        }
        self.inverse.process(&mut buf);
        let inv_n = 1.0 / n as f64;
        Ok(buf.iter().map(|c| c.re * inv_n).collect())
    }
}

/// Fails unless `|∫(ρ − background)| ≤ NEUTRALITY_TOL · max(1, ∫|ρ|)`, with the
/// integrals taken by the quadrature `weights`.
pub fn check_neutral(rho: &[f64], weights: &[f64], background: f64) -> Result<()> {
    let imbalance: f64 = rho.iter().zip(weights).map(|(r, w)| (r - background) * w).sum();
    let scale: f64 = rho.iter().zip(weights).map(|(r, w)| r.abs() * w).sum::<f64>().max(1.0);
    let tolerance = NEUTRALITY_TOL * scale;
    if imbalance.abs() <= tolerance {
        Ok(())
    } else {
        Err(Error::NonNeutral {
            imbalance,
            tolerance,
        })
    }
}

/// Solves `E' = ρ − 1` for a density given on an equidistant grid covering a
/// periodic domain of length `length`.
pub fn solve_poisson(rho: &ChargeDensity, length: f64) -> Result<ElectricField1D> {
    let solver = PoissonSolver::new(rho.values.len(), length)?;
    let values = solver.solve(&rho.values, 1.0)?;
    Ok(ElectricField1D {
        values_equidistant: values,
        values_at_dg_nodes: None,
        dx: solver.dx(),
    })
}

/// Per-cell maps between Gauss–Legendre node values and values at the
/// `ℓ + 1` sub-cell midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    n: usize,
    to_equidistant: Matrix,
    to_nodes: Matrix,
}

impl Transfer {
    pub fn new(basis: &CellBasis) -> Self {
        let n = basis.len();
        let points = equidistant_reference_points(n);
        Self {
            n,
            to_equidistant: basis.evaluation_matrix(&points),
            to_nodes: lagrange_matrix(&points, basis.nodes()),
        }
    }

    fn apply(&self, m: &Matrix, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() % self.n != 0 {
            return Err(Error::ShapeMismatch {
                context: "transfer",
                expected: self.n * (values.len() / self.n + 1),
                actual: values.len(),
            });
        }
        let mut out = vec![0.0; values.len()];
        for (src, dst) in values.chunks_exact(self.n).zip(out.chunks_exact_mut(self.n)) {
            m.mul_vec_into(src, dst);
        }
        Ok(out)
    }

    pub fn to_equidistant(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.apply(&self.to_equidistant, values)
    }

    pub fn to_nodes(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.apply(&self.to_nodes, values)
    }

    pub fn to_equidistant_matrix(&self) -> &Matrix {
        &self.to_equidistant
    }

    pub fn to_nodes_matrix(&self) -> &Matrix {
        &self.to_nodes
    }
}

/// Sub-cell midpoints on the reference cell: `−1 + (2m + 1) / n`.
pub fn equidistant_reference_points(n: usize) -> Vec<f64> {
    (0..n).map(|m| -1.0 + (2 * m + 1) as f64 / n as f64).collect()
}

/// Evaluates a cellwise polynomial (node values) on the global equidistant grid.
pub fn dg_to_equidistant(values: &[f64], basis: &CellBasis) -> Result<Vec<f64>> {
    Transfer::new(basis).to_equidistant(values)
}

/// Interpolates equidistant values back to the Gauss–Legendre nodes, cell by cell.
pub fn equidistant_to_dg(values: &[f64], basis: &CellBasis) -> Result<Vec<f64>> {
    Transfer::new(basis).to_nodes(values)
}

/// Density → Poisson → field at the degrees of freedom, for one grid.
#[derive(Debug, Clone)]
pub struct FieldSolver {
    poisson: PoissonSolver,
    transfer: Option<Transfer>,
    /// Quadrature weights of the position degrees of freedom.
    weights: Vec<f64>,
    background: f64,
}

impl FieldSolver {
    /// Solver with the ion background density `background`.
    pub fn new(grid: &PhaseSpaceGrid, background: f64) -> Result<Self> {
        Ok(Self {
            poisson: PoissonSolver::new(grid.dofs_x(), grid.x().length())?,
            transfer: grid.basis_x().map(Transfer::new),
            weights: grid.x_weights(),
            background,
        })
    }

    /// Solver whose background neutralizes the total charge of `f`.
    pub fn neutralizing(f: &DistributionField) -> Result<Self> {
        let rho = density(f);
        let weights = f.grid().x_weights();
        let total: f64 = rho.values.iter().zip(&weights).map(|(r, w)| r * w).sum();
        Self::new(f.grid(), total / f.grid().x().length())
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    /// Field of a density given at the position degrees of freedom.
    ///
    /// Neutrality is checked on the exact integral of the density (Gauss–Legendre
    /// for dG), which the transport conserves, rather than on the resampled
    /// equidistant values.
    pub fn field_from_density(&self, rho: &ChargeDensity) -> Result<ElectricField1D> {
        check_len("charge density", self.weights.len(), rho.values.len())?;
        check_neutral(&rho.values, &self.weights, self.background)?;
        let equidistant = match &self.transfer {
            Some(t) => t.to_equidistant(&rho.values)?,
            None => rho.values.clone(),
        };
        let values = self.poisson.solve_unchecked(&equidistant, self.background)?;
        let at_nodes = match &self.transfer {
            Some(t) => Some(t.to_nodes(&values)?),
            None => None,
        };
        Ok(ElectricField1D {
            values_equidistant: values,
            values_at_dg_nodes: at_nodes,
            dx: self.poisson.dx(),
        })
    }

    pub fn field(&self, f: &DistributionField) -> Result<ElectricField1D> {
        self.field_from_density(&density(f))
    }
}
