//! Phase-space geometry and the discrete distribution function.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::CellBasis;
use crate::error::{check_len, Error, Result};

/// How the distribution function is represented along both axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Discretization {
    /// Cellwise polynomials stored at Gauss–Legendre nodes.
    Dg { degree_x: usize, degree_v: usize },
    /// Point values on a uniform grid, interpolated with periodic cubic splines.
    Spline,
}

/// Storage layout of a [`DistributionField`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    DgNodes,
    Equidistant,
}

impl Layout {
    pub fn code(self) -> u8 {
        match self {
            Layout::DgNodes => 0,
            Layout::Equidistant => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Layout::DgNodes),
            1 => Some(Layout::Equidistant),
            _ => None,
        }
    }
}

/// One periodic axis `[min, max)` split into `cells` uniform cells (or
/// `cells` uniform points for the spline representation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub cells: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, cells: usize) -> Self {
        Self { min, max, cells }
    }

    pub fn length(&self) -> f64 {
        self.max - self.min
    }

    pub fn h(&self) -> f64 {
        self.length() / self.cells as f64
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::Config(format!(
                "{name} bounds must satisfy min < max (got [{}, {}])",
                self.min, self.max
            )));
        }
        if self.cells == 0 {
            return Err(Error::Config(format!("{name} needs at least one cell")));
        }
        Ok(())
    }
}

/// Tensor-product periodic grid on `[x_min, x_max) × [v_min, v_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    x: Axis,
    v: Axis,
    discretization: Discretization,
    basis_x: Option<CellBasis>,
    basis_v: Option<CellBasis>,
}

impl PhaseSpaceGrid {
    pub fn new(x: Axis, v: Axis, discretization: Discretization) -> Result<Self> {
        x.validate("x")?;
        v.validate("v")?;
        let (basis_x, basis_v) = match discretization {
            Discretization::Dg { degree_x, degree_v } => {
                (Some(CellBasis::new(degree_x)?), Some(CellBasis::new(degree_v)?))
            }
            Discretization::Spline => {
                if x.cells < 4 || v.cells < 4 {
                    return Err(Error::Config(
                        "the spline representation needs at least 4 points per axis".into(),
                    ));
                }
                (None, None)
            }
        };
        Ok(Self {
            x,
            v,
            discretization,
            basis_x,
            basis_v,
        })
    }

    /// dG grid with `cells_x × cells_v` cells of degrees `degree_x`, `degree_v`.
    pub fn dg(x: Axis, v: Axis, degree_x: usize, degree_v: usize) -> Result<Self> {
        Self::new(x, v, Discretization::Dg { degree_x, degree_v })
    }

    /// Spline grid with `x.cells × v.cells` points.
    pub fn spline(x: Axis, v: Axis) -> Result<Self> {
        Self::new(x, v, Discretization::Spline)
    }

    pub fn x(&self) -> &Axis {
        &self.x
    }

    pub fn v(&self) -> &Axis {
        &self.v
    }

    pub fn discretization(&self) -> Discretization {
        self.discretization
    }

    pub fn is_dg(&self) -> bool {
        matches!(self.discretization, Discretization::Dg { .. })
    }

    pub fn layout(&self) -> Layout {
        if self.is_dg() {
            Layout::DgNodes
        } else {
            Layout::Equidistant
        }
    }

    pub fn h_x(&self) -> f64 {
        self.x.h()
    }

    pub fn h_v(&self) -> f64 {
        self.v.h()
    }

    pub fn basis_x(&self) -> Option<&CellBasis> {
        self.basis_x.as_ref()
    }

    pub fn basis_v(&self) -> Option<&CellBasis> {
        self.basis_v.as_ref()
    }

    /// Nodes per cell along x (1 for the spline grid).
    pub fn nodes_per_cell_x(&self) -> usize {
        self.basis_x.as_ref().map_or(1, CellBasis::len)
    }

    pub fn nodes_per_cell_v(&self) -> usize {
        self.basis_v.as_ref().map_or(1, CellBasis::len)
    }

    /// Degrees of freedom along x: `cells · (ℓ + 1)` for dG, points for spline.
    pub fn dofs_x(&self) -> usize {
        self.x.cells * self.nodes_per_cell_x()
    }

    pub fn dofs_v(&self) -> usize {
        self.v.cells * self.nodes_per_cell_v()
    }

    fn positions(axis: &Axis, basis: Option<&CellBasis>) -> Vec<f64> {
        let h = axis.h();
        match basis {
            Some(b) => (0..axis.cells)
                .flat_map(|i| {
                    let left = axis.min + i as f64 * h;
                    b.nodes().iter().map(move |xi| left + 0.5 * (xi + 1.0) * h)
                })
                .collect(),
            None => (0..axis.cells).map(|i| axis.min + i as f64 * h).collect(),
        }
    }

    fn dof_weights(axis: &Axis, basis: Option<&CellBasis>) -> Vec<f64> {
        let h = axis.h();
        match basis {
            Some(b) => (0..axis.cells)
                .flat_map(|_| b.weights().iter().map(move |w| 0.5 * w * h))
                .collect(),
            None => vec![h; axis.cells],
        }
    }

    /// Positions of the x degrees of freedom.
    pub fn x_positions(&self) -> Vec<f64> {
        Self::positions(&self.x, self.basis_x.as_ref())
    }

    /// Positions of the v degrees of freedom.
    pub fn v_positions(&self) -> Vec<f64> {
        Self::positions(&self.v, self.basis_v.as_ref())
    }

    /// Quadrature weight attached to each x degree of freedom.
    pub fn x_weights(&self) -> Vec<f64> {
        Self::dof_weights(&self.x, self.basis_x.as_ref())
    }

    pub fn v_weights(&self) -> Vec<f64> {
        Self::dof_weights(&self.v, self.basis_v.as_ref())
    }

    /// Effective velocity spacing that sets the recurrence time:
    /// `h_v / (ℓ_v + 1)` for dG, `h_v` for splines.
    pub fn effective_dv(&self) -> f64 {
        self.h_v() / self.nodes_per_cell_v() as f64
    }
}

/// The discrete distribution function `f(x, v)`.
///
/// `values` is row-major with one row per velocity degree of freedom and one
/// column per position degree of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    grid: Arc<PhaseSpaceGrid>,
    layout: Layout,
    values: Vec<f64>,
    pub time: f64,
}

impl DistributionField {
    pub fn zeros(grid: Arc<PhaseSpaceGrid>) -> Self {
        let len = grid.dofs_x() * grid.dofs_v();
        let layout = grid.layout();
        Self {
            grid,
            layout,
            values: vec![0.0; len],
            time: 0.0,
        }
    }

    pub fn from_values(grid: Arc<PhaseSpaceGrid>, values: Vec<f64>) -> Result<Self> {
        check_len("DistributionField", grid.dofs_x() * grid.dofs_v(), values.len())?;
        let layout = grid.layout();
        Ok(Self {
            grid,
            layout,
            values,
            time: 0.0,
        })
    }

    /// Samples `f(x, v)` at every degree of freedom.
    pub fn from_fn(grid: Arc<PhaseSpaceGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let xs = grid.x_positions();
        let vs = grid.v_positions();
        let values = vs
            .iter()
            .flat_map(|&v| xs.iter().map(move |&x| (x, v)))
            .map(|(x, v)| f(x, v))
            .collect();
        let layout = grid.layout();
        Self {
            grid,
            layout,
            values,
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<PhaseSpaceGrid> {
        &self.grid
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn n_rows(&self) -> usize {
        self.grid.dofs_v()
    }

    pub fn n_cols(&self) -> usize {
        self.grid.dofs_x()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.n_cols();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols() + col]
    }

    /// A copy with the same grid and time but new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        check_len("DistributionField", self.values.len(), values.len())?;
        Ok(Self {
            grid: Arc::clone(&self.grid),
            layout: self.layout,
            values,
            time: self.time,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Column-major copy (one row per position DoF).
    pub fn transposed(&self) -> Vec<f64> {
        transpose(&self.values, self.n_rows(), self.n_cols())
    }
}

/// Transposes a row-major `rows × cols` array.
pub(crate) fn transpose(src: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    const BLOCK: usize = 32;
    for rb in (0..rows).step_by(BLOCK) {
        for cb in (0..cols).step_by(BLOCK) {
            for r in rb..(rb + BLOCK).min(rows) {
                for c in cb..(cb + BLOCK).min(cols) {
                    out[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
    out
}
