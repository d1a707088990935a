//! Semi-Lagrangian solvers for the 1+1 dimensional Vlasov–Poisson system.
//!
//! The distribution function lives either on cellwise polynomials
//! (discontinuous Galerkin, [`dg`]) or on a uniform grid with periodic cubic
//! spline interpolation ([`spline`]). Both are advanced by operator splitting
//! ([`splitting`]) with a spectral field solve ([`field`]), and monitored
//! through the invariants in [`diagnostics`].
//!
//! ```
//! use vlasov::prelude::*;
//!
//! let scenario = ScenarioConfig::builtin("nonlinear_landau")?;
//! let grid = scenario.grid(Discretization::Dg { degree_x: 2, degree_v: 2 }, 16, 16)?;
//! let f0 = initial_condition(&scenario, grid)?;
//! let stepper = Stepper::neutralizing(SplittingScheme::Strang, &f0)?;
//! let out = stepper.run(StepperState::new(f0), &RunOptions::new(0.1, 1.0), &mut ())?;
//! let drift = (out.records.last().unwrap().mass - out.records[0].mass).abs();
//! assert!(drift < 1e-12);
//! # Ok::<(), vlasov::Error>(())
//! ```

pub mod basis;
pub mod dg;
pub mod diagnostics;
mod error;
pub mod field;
pub mod grid;
pub mod linalg;
pub mod reconstruct;
pub mod scenarios;
pub mod spline;
pub mod splitting;

pub use error::{Error, Result};

// the guide's snippets run as doc-tests
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/representations.md")]
    struct Representations;
    #[doc = include_str!("../../../book/src/transport.md")]
    struct Transport;
    #[doc = include_str!("../../../book/src/field.md")]
    struct Field;
    #[doc = include_str!("../../../book/src/splitting.md")]
    struct Splitting;
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    struct Diagnostics;
    #[doc = include_str!("../../../book/src/scenarios.md")]
    struct Scenarios;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
    #[doc = include_str!("../../../book/src/validation.md")]
    struct Validation;
}

/// The types needed to set up and run a simulation.
pub mod prelude {
    pub use crate::diagnostics::{error_series, invariants, ErrorOptions, Invariant, InvariantRecord};
    pub use crate::field::FieldSolver;
    pub use crate::grid::{Axis, Discretization, DistributionField, Layout, PhaseSpaceGrid};
    pub use crate::scenarios::{initial_condition, ScenarioConfig};
    pub use crate::splitting::{Backend, RunOptions, SplittingScheme, Stepper, StepperState};
    pub use crate::{Error, Result};
}
