//! Lie and Strang time stepping.
//!
//! With `A` the free-streaming operator and `B` the acceleration in a frozen
//! field, one step is `e^{τB} e^{τA}` (Lie) or `e^{τA/2} e^{τB} e^{τA/2}`
//! (Strang). The field is computed once per step from the distribution that
//! enters `B`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{invariants, InvariantRecord};
use crate::dg;
use crate::error::{Error, Result};
use crate::field::{ElectricField1D, FieldSolver};
use crate::grid::DistributionField;
use crate::scenarios::{apply_echo_kick, filament_filter, EchoKick, FilterConfig};
use crate::spline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplittingScheme {
    Lie,
    Strang,
}

impl FromStr for SplittingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lie" => Ok(Self::Lie),
            "strang" => Ok(Self::Strang),
            _ => Err(Error::Config(format!("unknown splitting scheme `{s}` (lie or strang)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dg,
    Spline,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dg" => Ok(Self::Dg),
            "spline" => Ok(Self::Spline),
            _ => Err(Error::Config(format!("unknown backend `{s}` (dg or spline)"))),
        }
    }
}

/// Where the acceleration step takes its field from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldMode {
    /// Poisson solve from the current density.
    SelfConsistent,
    /// `E ≡ 0`: pure free streaming.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepperState {
    pub f: DistributionField,
    pub t: f64,
    pub step_index: usize,
}

impl StepperState {
    pub fn new(f: DistributionField) -> Self {
        let t = f.time;
        Self { f, t, step_index: 0 }
    }

    pub fn backend(&self) -> Backend {
        if self.f.grid().is_dg() {
            Backend::Dg
        } else {
            Backend::Spline
        }
    }
}

/// Free streaming by `tau` on either backend.
pub fn advect_x(f: &DistributionField, tau: f64) -> Result<DistributionField> {
    if f.grid().is_dg() {
        dg::advect_x(f, tau)
    } else {
        spline::advect_x_spline(f, tau)
    }
}

/// Acceleration by `tau` in the field `e` on either backend.
pub fn advect_v(f: &DistributionField, e: &ElectricField1D, tau: f64) -> Result<DistributionField> {
    if f.grid().is_dg() {
        dg::advect_v(f, e.at_dofs(), tau)
    } else {
        spline::advect_v_spline(f, e.at_dofs(), tau)
    }
}

/// Stepper for one grid: scheme plus the field solver.
#[derive(Debug, Clone)]
pub struct Stepper {
    scheme: SplittingScheme,
    solver: FieldSolver,
    mode: FieldMode,
}

impl Stepper {
    pub fn new(scheme: SplittingScheme, solver: FieldSolver) -> Self {
        Self {
            scheme,
            solver,
            mode: FieldMode::SelfConsistent,
        }
    }

    /// Stepper whose ion background neutralizes the charge of `f`.
    pub fn neutralizing(scheme: SplittingScheme, f: &DistributionField) -> Result<Self> {
        Ok(Self::new(scheme, FieldSolver::neutralizing(f)?))
    }

    pub fn with_field_mode(mut self, mode: FieldMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn scheme(&self) -> SplittingScheme {
        self.scheme
    }

    pub fn solver(&self) -> &FieldSolver {
        &self.solver
    }

    /// Field of `f` under this stepper's field mode.
    pub fn field(&self, f: &DistributionField) -> Result<ElectricField1D> {
        match self.mode {
            FieldMode::SelfConsistent => self.solver.field(f),
            FieldMode::Zero => {
                let g = f.grid();
                let dg_dofs = g.is_dg().then(|| g.dofs_x());
                Ok(ElectricField1D::zeros(g.dofs_x(), g.x().length() / g.dofs_x() as f64, dg_dofs))
            }
        }
    }

    /// Advances `f` by `tau` without touching any bookkeeping.
    pub fn advance(&self, f: &DistributionField, tau: f64) -> Result<DistributionField> {
        if !(tau > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {tau}")));
        }
        let mut out = match self.scheme {
            SplittingScheme::Lie => {
                let g = advect_x(f, tau)?;
                let e = self.field(&g)?;
                advect_v(&g, &e, tau)?
            }
            SplittingScheme::Strang => {
                let g = advect_x(f, 0.5 * tau)?;
                let e = self.field(&g)?;
                let g = advect_v(&g, &e, tau)?;
                advect_x(&g, 0.5 * tau)?
            }
        };
        out.time = f.time + tau;
        Ok(out)
    }

    /// One step of length `tau`.
    pub fn step(&self, state: &StepperState, tau: f64) -> Result<StepperState> {
        let f = self.advance(&state.f, tau)?;
        let step_index = state.step_index + 1;
        if !f.is_finite() {
            return Err(Error::NonFinite { step: step_index });
        }
        Ok(StepperState {
            t: f.time,
            f,
            step_index,
        })
    }

    /// Invariants of `f` with its own field.
    pub fn record(&self, f: &DistributionField) -> Result<InvariantRecord> {
        Ok(invariants(f, &self.field(f)?))
    }

    /// Integrates from `state` to `state.t + options.t_final`.
    ///
    /// The last step is shortened to land on the final time. Records are taken
    /// at the start, every `record_every` steps and at the end.
    pub fn run(
        &self,
        state: StepperState,
        options: &RunOptions,
        observer: &mut dyn Observer,
    ) -> Result<RunOutput> {
        options.validate()?;
        let tau = options.tau;
        let t0 = state.t;
        let n_steps = options.n_steps();
        let mut state = state;
        let mut kicked = false;
        let mut records = Vec::new();

        let mut take_record = |state: &StepperState, observer: &mut dyn Observer| -> Result<()> {
            let r = self.record(&state.f)?;
            observer.on_record(state, &r)?;
            records.push(r);
            Ok(())
        };

        if let Some(kick) = options.echo_kick {
            if (kick.time - t0).abs() <= 0.5 * tau && n_steps > 0 {
                state.f = apply_echo_kick(&state.f, &kick);
                kicked = true;
            }
        }
        take_record(&state, observer)?;

        let first_index = state.step_index;
        for i in 1..=n_steps {
            let dt = if i == n_steps {
                options.t_final - (n_steps - 1) as f64 * tau
            } else {
                tau
            };
            let mut next = self.step(&state, dt)?;
            // exact bookkeeping instead of accumulated sums
            next.t = if i == n_steps {
                t0 + options.t_final
            } else {
                t0 + i as f64 * tau
            };
            next.f.time = next.t;

            if let Some(filter) = options.filter {
                if i % filter.every == 0 {
                    let t = next.f.time;
                    next.f = filament_filter(&next.f, &filter)?;
                    next.f.time = t;
                }
            }
            if let Some(kick) = options.echo_kick {
                if !kicked && (next.t - kick.time).abs() <= 0.5 * tau {
                    let t = next.f.time;
                    next.f = apply_echo_kick(&next.f, &kick);
                    next.f.time = t;
                    kicked = true;
                }
            }
            state = next;
            observer.after_step(&state)?;
            let steps_done = state.step_index - first_index;
            if steps_done % options.record_every == 0 || i == n_steps {
                take_record(&state, observer)?;
            }
        }
        Ok(RunOutput { state, records })
    }
}

/// Time-loop parameters of [`Stepper::run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub tau: f64,
    /// Length of the integration interval.
    pub t_final: f64,
    pub record_every: usize,
    pub echo_kick: Option<EchoKick>,
    pub filter: Option<FilterConfig>,
}

impl RunOptions {
    pub fn new(tau: f64, t_final: f64) -> Self {
        Self {
            tau,
            t_final,
            record_every: 1,
            echo_kick: None,
            filter: None,
        }
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }

    pub fn with_echo_kick(mut self, kick: Option<EchoKick>) -> Self {
        self.echo_kick = kick;
        self
    }

    pub fn with_filter(mut self, filter: Option<FilterConfig>) -> Self {
        self.filter = filter;
        self
    }

    /// `⌈T/τ⌉`, ignoring a trailing sliver below `1e-9 τ`.
    pub fn n_steps(&self) -> usize {
        if self.t_final <= 0.0 {
            return 0;
        }
        (self.t_final / self.tau - 1e-9).ceil().max(1.0) as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::Config(format!("time step must be positive, got {}", self.tau)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::Config(format!("final time must be >= 0, got {}", self.t_final)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        if let Some(filter) = self.filter {
            if filter.every == 0 {
                return Err(Error::Config("filter cadence must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// Receives read-only views of the run as it progresses.
pub trait Observer {
    fn on_record(&mut self, _state: &StepperState, _record: &InvariantRecord) -> Result<()> {
        Ok(())
    }

    fn after_step(&mut self, _state: &StepperState) -> Result<()> {
        Ok(())
    }
}

impl Observer for () {}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: StepperState,
    pub records: Vec<InvariantRecord>,
}
