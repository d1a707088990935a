//! Benchmark initial conditions, the echo kick and the filamentation filter.
//!
//! Scenario files are TOML. Numbers may be written as multiples of π, e.g.
//! `x_max = "4pi"` or `k = "12pi/100"`.
//!
//! ```toml
//! name = "nonlinear_landau"
//!
//! [domain]
//! x_min = 0.0
//! x_max = "4pi"
//! v_min = -6.0
//! v_max = 6.0
//!
//! [initial]
//! kind = "landau"
//! alpha = 0.5
//! k = 0.5
//! ```

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize};

use crate::basis::CellBasis;
use crate::error::{Error, Result};
use crate::field::Transfer;
use crate::grid::{transpose, Axis, Discretization, DistributionField, PhaseSpaceGrid};

/// Names of the scenarios that ship with the library.
pub const BUILTIN_SCENARIOS: [&str; 5] = [
    "nonlinear_landau",
    "linear_landau",
    "bump_on_tail",
    "blob",
    "plasma_echo",
];

/// Periodic phase-space box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    #[serde(deserialize_with = "number")]
    pub x_min: f64,
    #[serde(deserialize_with = "number")]
    pub x_max: f64,
    #[serde(deserialize_with = "number")]
    pub v_min: f64,
    #[serde(deserialize_with = "number")]
    pub v_max: f64,
}

impl Domain {
    pub fn x_length(&self) -> f64 {
        self.x_max - self.x_min
    }
}

/// Initial distribution, without the normalization-free details of each case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `e^{−v²/2}(1 + α cos kx) / √(2π)`.
    Landau {
        #[serde(deserialize_with = "number")]
        alpha: f64,
        #[serde(deserialize_with = "number")]
        k: f64,
    },
    /// `(α e^{−v²/2} + β e^{−4(v−2.5)²}(1 + γ cos kx)) / √(2π)`.
    BumpOnTail {
        #[serde(deserialize_with = "number")]
        alpha: f64,
        #[serde(deserialize_with = "number")]
        beta: f64,
        #[serde(deserialize_with = "number")]
        gamma: f64,
        #[serde(deserialize_with = "number", default = "one")]
        k: f64,
    },
    /// `e^{−v²/2} e^{−(x−c)²/2} / (2π)`, a Maxwellian blob centred at `c`.
    Blob {
        #[serde(deserialize_with = "number")]
        center: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl InitialCondition {
    pub fn eval(&self, x: f64, v: f64) -> f64 {
        let s = 1.0 / (2.0 * PI).sqrt();
        match *self {
            InitialCondition::Landau { alpha, k } => s * (-0.5 * v * v).exp() * (1.0 + alpha * (k * x).cos()),
            InitialCondition::BumpOnTail { alpha, beta, gamma, k } => {
                s * (alpha * (-0.5 * v * v).exp()
                    + beta * (-4.0 * (v - 2.5).powi(2)).exp() * (1.0 + gamma * (k * x).cos()))
            }
            InitialCondition::Blob { center } => {
                (-0.5 * v * v).exp() * (-0.5 * (x - center).powi(2)).exp() / (2.0 * PI)
            }
        }
    }
}

/// Second perturbation `(α/√(2π)) e^{−v²/2} cos(k x)` added once at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoKick {
    #[serde(deserialize_with = "number")]
    pub time: f64,
    #[serde(deserialize_with = "number")]
    pub amplitude: f64,
    #[serde(deserialize_with = "number")]
    pub wavenumber: f64,
}

/// Spectral cutoff along v applied every `every` steps.
///
/// With `conservative` set the removed part is faded out near `±v_max` and
/// corrected so that it carries no mass, current or kinetic energy; otherwise
/// the cutoff is a bare projector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    #[serde(deserialize_with = "number", default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_every")]
    pub every: usize,
    #[serde(default = "default_conservative")]
    pub conservative: bool,
}

fn default_eta() -> f64 {
    2.0 / 3.0
}

fn default_every() -> usize {
    1
}

fn default_conservative() -> bool {
    true
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            eta: default_eta(),
            every: default_every(),
            conservative: default_conservative(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub domain: Domain,
    pub initial: InitialCondition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub echo_kick: Option<EchoKick>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterConfig>,
}

impl ScenarioConfig {
    /// One of [`BUILTIN_SCENARIOS`].
    pub fn builtin(name: &str) -> Result<Self> {
        let standard = Domain {
            x_min: 0.0,
            x_max: 4.0 * PI,
            v_min: -6.0,
            v_max: 6.0,
        };
        let cfg = match name {
            "nonlinear_landau" => Self::plain(name, standard, InitialCondition::Landau { alpha: 0.5, k: 0.5 }),
            "linear_landau" => Self::plain(name, standard, InitialCondition::Landau { alpha: 0.01, k: 0.5 }),
            "bump_on_tail" => Self::plain(
                name,
                standard,
                InitialCondition::BumpOnTail {
                    alpha: 0.8,
                    beta: 0.2,
                    gamma: 0.1,
                    k: 1.0,
                },
            ),
            "blob" => Self::plain(name, standard, InitialCondition::Blob { center: 2.0 * PI }),
            "plasma_echo" => Self {
                name: name.into(),
                // smallest length on which both wavenumbers are periodic
                domain: Domain {
                    x_max: 200.0,
                    ..standard
                },
                initial: InitialCondition::Landau {
                    alpha: 1e-3,
                    k: 12.0 * PI / 100.0,
                },
                echo_kick: Some(EchoKick {
                    time: 200.0,
                    amplitude: 1e-3,
                    wavenumber: 25.0 * PI / 100.0,
                }),
                filter: None,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown scenario `{other}` (known: {})",
                    BUILTIN_SCENARIOS.join(", ")
                )))
            }
        };
        Ok(cfg)
    }

    fn plain(name: &str, domain: Domain, initial: InitialCondition) -> Self {
        Self {
            name: name.into(),
            domain,
            initial,
            echo_kick: None,
            filter: None,
        }
    }

    /// Parses and validates a scenario file's contents.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    /// Every wavenumber `k` in the configuration, paired with its role.
    pub fn wavenumbers(&self) -> Vec<(&'static str, f64)> {
        let mut ks = match self.initial {
            InitialCondition::Landau { k, .. } => vec![("k", k)],
            InitialCondition::BumpOnTail { k, .. } => vec![("k", k)],
            InitialCondition::Blob { .. } => vec![],
        };
        if let Some(kick) = self.echo_kick {
            ks.push(("echo_kick.wavenumber", kick.wavenumber));
        }
        ks
    }

    /// Wavenumber that sets the recurrence time: the perturbation's, or the
    /// domain's fundamental mode when there is none.
    pub fn fundamental_wavenumber(&self) -> f64 {
        self.wavenumbers()
            .first()
            .map(|(_, k)| *k)
            .unwrap_or(2.0 * PI / self.domain.x_length())
    }

    /// Checks the box and that `k L ∈ 2πℤ` for every wavenumber.
    pub fn validate(&self) -> Result<()> {
        let d = &self.domain;
        if !(d.x_max > d.x_min) || !(d.v_max > d.v_min) {
            return Err(Error::Config(format!("scenario `{}`: empty domain", self.name)));
        }
        let l = d.x_length();
        for (role, k) in self.wavenumbers() {
            let periods = k * l / (2.0 * PI);
            if !k.is_finite() || (periods - periods.round()).abs() > 1e-9 * periods.abs().max(1.0) {
                return Err(Error::Config(format!(
                    "scenario `{}`: {role} = {k} is not commensurate with the x-domain length {l} \
                     ({periods} periods)",
                    self.name
                )));
            }
        }
        if let Some(filter) = self.filter {
            if !(filter.eta > 0.0 && filter.eta <= 1.0) || filter.every == 0 {
                return Err(Error::Config(format!(
                    "scenario `{}`: filter needs 0 < eta <= 1 and every >= 1",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Grid over this scenario's domain. For splines `cells_*` are point counts.
    pub fn grid(&self, discretization: Discretization, cells_x: usize, cells_v: usize) -> Result<Arc<PhaseSpaceGrid>> {
        let d = &self.domain;
        PhaseSpaceGrid::new(
            Axis::new(d.x_min, d.x_max, cells_x),
            Axis::new(d.v_min, d.v_max, cells_v),
            discretization,
        )
        .map(Arc::new)
    }
}

/// Samples the scenario's initial distribution at the grid's degrees of freedom.
pub fn initial_condition(config: &ScenarioConfig, grid: Arc<PhaseSpaceGrid>) -> Result<DistributionField> {
    config.validate()?;
    let (gx, gv) = (grid.x(), grid.v());
    let d = &config.domain;
    if gx.min != d.x_min || gx.max != d.x_max || gv.min != d.v_min || gv.max != d.v_max {
        return Err(Error::Config(format!(
            "grid box [{}, {}] x [{}, {}] does not match scenario `{}`",
            gx.min, gx.max, gv.min, gv.max, config.name
        )));
    }
    let ic = config.initial;
    Ok(DistributionField::from_fn(grid, move |x, v| ic.eval(x, v)))
}

/// Adds the echo perturbation at every degree of freedom.
pub fn apply_echo_kick(f: &DistributionField, kick: &EchoKick) -> DistributionField {
    let xs = f.grid().x_positions();
    let vs = f.grid().v_positions();
    let s = kick.amplitude / (2.0 * PI).sqrt();
    let cos_kx: Vec<f64> = xs.iter().map(|x| (kick.wavenumber * x).cos()).collect();
    let mut out = f.clone();
    let n_cols = f.n_cols();
    for (row, v) in out.values_mut().chunks_exact_mut(n_cols).zip(&vs) {
        let a = s * (-0.5 * v * v).exp();
        for (fv, c) in row.iter_mut().zip(&cos_kx) {
            *fv += a * c;
        }
    }
    out
}

/// Removes velocity Fourier modes with `|m| > eta · n_v / 2` in every column.
///
/// Spline data are filtered directly. dG columns are evaluated on the uniform
/// transfer grid, the discarded high-frequency part is mapped back to the
/// nodes and subtracted, and its cell averages are fixed so that the removed
/// part carries exactly zero mass.
///
/// A sharp cutoff spreads ripple of relative size `1/(π·distance)` over the
/// whole column, including the velocity tails where `f` should stay at
/// Maxwellian-tail level. The periodic spline shift conserves the current only
/// while `f` vanishes at the `±v_max` seam, so in conservative mode the removed
/// part is dropped in the outer sixteenth of the velocity range at each end,
/// faded in over the next sixteenth, and then corrected by `(a₀ + a₁v + a₂v²)·|f|` so that it carries no mass,
/// current or kinetic energy. `eta = 1` is the identity.
pub fn filament_filter(f: &DistributionField, config: &FilterConfig) -> Result<DistributionField> {
    let eta = config.eta;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Config(format!("filter cutoff must lie in (0, 1], got {eta}")));
    }
    let (rows, cols) = (f.n_rows(), f.n_cols());
    let columns = f.transposed();
    let transfer = f.grid().basis_v().map(|b| (b.clone(), Transfer::new(b)));
    let low_pass = LowPass::new(rows, eta);
    let moments = (config.conservative && low_pass.is_active())
        .then(|| MomentFix::new(f.grid().v(), &f.grid().v_positions(), &f.grid().v_weights()));
    let h_v = f.grid().h_v();
    let mut out = vec![0.0; columns.len()];
    out.par_chunks_mut(rows)
        .zip(columns.par_chunks(rows))
        .try_for_each(|(dst, src)| -> Result<()> {
            match &transfer {
                None => {
                    dst.copy_from_slice(src);
                    low_pass.apply(dst);
                }
                Some((basis, t)) => {
                    let g = t.to_equidistant(src)?;
                    let mut low = g.clone();
                    low_pass.apply(&mut low);
                    let high: Vec<f64> = g.iter().zip(&low).map(|(a, b)| a - b).collect();
                    let mut q = t.to_nodes(&high)?;
                    match_cell_integrals(&mut q, &high, basis, h_v);
                    for ((d, s), q) in dst.iter_mut().zip(src).zip(&q) {
                        *d = s - q;
                    }
                }
            }
            if let Some(m) = &moments {
                m.apply(src, dst);
            }
            Ok(())
        })?;
    f.with_values(transpose(&out, cols, rows))
}

/// Tapers the removed part of a column and restores its first three moments.
struct MomentFix {
    /// Velocities scaled to `[-1, 1]` for conditioning.
    s: Vec<f64>,
    w: Vec<f64>,
    taper: Vec<f64>,
}

impl MomentFix {
    fn new(axis: &Axis, v: &[f64], w: &[f64]) -> Self {
        let scale = v.iter().fold(0.0_f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
        let margin = axis.length() / 16.0;
        let taper = v
            .iter()
            .map(|v| {
                let d = ((v - axis.min).min(axis.max - v) / margin - 1.0).clamp(0.0, 1.0);
                (0.5 * PI * d).sin().powi(2)
            })
            .collect();
        Self {
            s: v.iter().map(|v| v / scale).collect(),
            w: w.to_vec(),
            taper,
        }
    }

    /// Adjusts `filtered` so that `original − filtered` vanishes at the seam
    /// and has zero moments of order 0, 1 and 2. Columns whose `|f|` has
    /// fewer than three nonzero values cannot carry the correction and keep
    /// only the taper.
    fn apply(&self, original: &[f64], filtered: &mut [f64]) {
        for ((f, o), t) in filtered.iter_mut().zip(original).zip(&self.taper) {
            *f = o - t * (o - *f);
        }
        let mut gram = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for (((&s, &w), &o), &f) in self.s.iter().zip(&self.w).zip(original).zip(filtered.iter()) {
            let p = [1.0, s, s * s];
            let g = w * o.abs();
            for k in 0..3 {
                rhs[k] += w * p[k] * (o - f);
                for l in 0..3 {
                    gram[k][l] += g * p[k] * p[l];
                }
            }
        }
        let Some(a) = solve3(gram, rhs) else { return };
        for ((&s, &o), f) in self.s.iter().zip(original).zip(filtered.iter_mut()) {
            *f += (a[0] + a[1] * s + a[2] * s * s) * o.abs();
        }
    }
}

/// Cramer's rule, refusing near-singular systems.
fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    let scale = m[0][0] * m[1][1] * m[2][2];
    if !(d.abs() > 1e-12 * scale) {
        return None;
    }
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut mk = m;
        for r in 0..3 {
            mk[r][k] = b[r];
        }
        *xk = det(&mk) / d;
    }
    Some(x)
}

/// Shifts each cell of `q` by a constant so its Gauss–Legendre integral equals
/// the midpoint-rule integral of the equidistant samples `c`.
fn match_cell_integrals(q: &mut [f64], c: &[f64], basis: &CellBasis, h: f64) {
    let n = basis.len();
    let w = basis.weights();
    for (qc, cc) in q.chunks_exact_mut(n).zip(c.chunks_exact(n)) {
        let target = h / n as f64 * cc.iter().sum::<f64>();
        let current: f64 = 0.5 * h * qc.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        let shift = (target - current) / h;
        qc.iter_mut().for_each(|v| *v += shift);
    }
}

struct LowPass {
    n: usize,
    cutoff: f64,
    forward: Arc<dyn rustfft::Fft<f64>>,
    inverse: Arc<dyn rustfft::Fft<f64>>,
}

impl LowPass {
    fn new(n: usize, eta: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            cutoff: eta * n as f64 / 2.0,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn is_active(&self) -> bool {
        self.cutoff < self.n as f64 / 2.0
    }

    fn apply(&self, data: &mut [f64]) {
        if !self.is_active() {
            return;
        }
        let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        for (m, c) in buf.iter_mut().enumerate() {
            let mode = if m <= self.n / 2 { m } else { self.n - m } as f64;
            if mode > self.cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (d, c) in data.iter_mut().zip(&buf) {
            *d = c.re * scale;
        }
    }
}

/// Accepts a plain number or a string such as `"4pi"`, `"2*pi"` or `"12pi/100"`.
fn number<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Float(f64),
        Int(i64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Float(x) => Ok(x),
        Raw::Int(i) => Ok(i as f64),
        Raw::Text(s) => parse_number(&s).ok_or_else(|| serde::de::Error::custom(format!("cannot parse `{s}` as a number"))),
    }
}

/// Parses `[coef][*]pi[/denom]` or a plain float.
pub fn parse_number(s: &str) -> Option<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('π', "pi");
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().ok()?),
        None => (s.clone(), 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().ok()?,
            };
            c * PI
        }
        None => num.parse::<f64>().ok()?,
    };
    (den != 0.0).then_some(value / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_with_pi() {
        assert_eq!(parse_number("4pi"), Some(4.0 * PI));
        assert_eq!(parse_number("2 * pi"), Some(2.0 * PI));
        assert_eq!(parse_number("12pi/100"), Some(12.0 * PI / 100.0));
        assert_eq!(parse_number("-pi"), Some(-PI));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("pie"), None);
        assert_eq!(parse_number("1/0"), None);
    }

    #[test]
    fn builtins_validate_and_round_trip() {
        for name in BUILTIN_SCENARIOS {
            let cfg = ScenarioConfig::builtin(name).unwrap();
            cfg.validate().unwrap();
            let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            assert_eq!(back, cfg);
        }
        assert!(ScenarioConfig::builtin("nope").is_err());
    }

    #[test]
    fn incommensurate_wavenumber_is_rejected() {
        let mut cfg = ScenarioConfig::builtin("nonlinear_landau").unwrap();
        cfg.initial = InitialCondition::Landau { alpha: 0.5, k: 0.3 };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let grid = ScenarioConfig::builtin("nonlinear_landau")
            .unwrap()
            .grid(Discretization::Spline, 8, 8)
            .unwrap();
        assert!(initial_condition(&cfg, grid).is_err());
    }

    #[test]
    fn echo_domain_needs_both_wavenumbers() {
        let mut cfg = ScenarioConfig::builtin("plasma_echo").unwrap();
        cfg.domain.x_max = 100.0;
        // k1 fits 6 periods, k2 only 12.5
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"
            name = "x"
            [domain]
            x_min = 0
            x_max = "4pi"
            v_min = -6
            v_max = 6
            [initial]
            kind = "landau"
            alpha = 0.5
            k = 0.5
            wavenumber = 1.0
        "#;
        assert!(ScenarioConfig::from_toml_str(text).is_err());
    }

    #[test]
    fn grid_must_match_domain() {
        let cfg = ScenarioConfig::builtin("blob").unwrap();
        let grid = Arc::new(
            PhaseSpaceGrid::spline(Axis::new(0.0, 1.0, 8), Axis::new(-6.0, 6.0, 8)).unwrap(),
        );
        assert!(initial_condition(&cfg, grid).is_err());
    }

    #[test]
    fn zero_amplitude_kick_is_identity() {
        let cfg = ScenarioConfig::builtin("plasma_echo").unwrap();
        let grid = cfg.grid(Discretization::Spline, 32, 16).unwrap();
        let f = initial_condition(&cfg, grid).unwrap();
        let kick = EchoKick {
            amplitude: 0.0,
            ..cfg.echo_kick.unwrap()
        };
        assert_eq!(apply_echo_kick(&f, &kick), f);
    }

    fn moments(f: &DistributionField) -> [f64; 3] {
        let (xw, vw, vs) = (f.grid().x_weights(), f.grid().v_weights(), f.grid().v_positions());
        let mut m = [0.0; 3];
        for (j, (w, v)) in vw.iter().zip(&vs).enumerate() {
            let row: f64 = f.row(j).iter().zip(&xw).map(|(a, b)| a * b).sum();
            for (k, mk) in m.iter_mut().enumerate() {
                *mk += w * v.powi(k as i32) * row;
            }
        }
        m
    }

    fn filamented(disc: Discretization) -> DistributionField {
        let cfg = ScenarioConfig::builtin("nonlinear_landau").unwrap();
        let grid = cfg.grid(disc, 16, 32).unwrap();
        // free streaming up to t = 7 leaves fine structure in v
        DistributionField::from_fn(grid, |x, v| {
            (-0.5 * v * v).exp() * (1.0 + 0.5 * (0.5 * (x - 7.0 * v)).cos()) + 0.3 * (-(v - 1.0).powi(2)).exp()
        })
    }

    #[test]
    fn filter_with_full_cutoff_is_identity() {
        for disc in [Discretization::Spline, Discretization::Dg { degree_x: 2, degree_v: 3 }] {
            let f = filamented(disc);
            let config = FilterConfig { eta: 1.0, ..FilterConfig::default() };
            let g = filament_filter(&f, &config).unwrap();
            let err = f.values().iter().zip(g.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-13, "{disc:?}: {err:e}");
        }
    }

    #[test]
    fn bare_cutoff_keeps_low_and_removes_high_modes() {
        let grid = Arc::new(PhaseSpaceGrid::spline(Axis::new(0.0, 1.0, 4), Axis::new(0.0, 1.0, 32)).unwrap());
        let mode = |m: f64| DistributionField::from_fn(grid.clone(), move |_, v| (2.0 * PI * m * v).cos());
        let config = FilterConfig { eta: 0.5, conservative: false, ..FilterConfig::default() };
        // cutoff at |m| > 8
        let low = mode(3.0);
        let kept = filament_filter(&low, &config).unwrap();
        let err = low.values().iter().zip(kept.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-13);
        let high = filament_filter(&mode(11.0), &config).unwrap();
        assert!(high.values().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn filter_preserves_mass_and_conservative_filter_preserves_moments() {
        for disc in [Discretization::Spline, Discretization::Dg { degree_x: 1, degree_v: 3 }] {
            let f = filamented(disc);
            let before = moments(&f);
            for conservative in [false, true] {
                let config = FilterConfig { conservative, ..FilterConfig::default() };
                let g = filament_filter(&f, &config).unwrap();
                let after = moments(&g);
                let changed = f.values().iter().zip(g.values()).any(|(a, b)| (a - b).abs() > 1e-6);
                assert!(changed, "{disc:?}: the test data must have modes to remove");
                assert!((after[0] - before[0]).abs() <= 1e-12 * before[0], "{disc:?} mass");
                if conservative {
                    for k in 1..3 {
                        assert!((after[k] - before[k]).abs() <= 1e-12 * before[0], "{disc:?} moment {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn conservative_filter_leaves_the_velocity_seam_alone() {
        let f = filamented(Discretization::Spline);
        let bare = FilterConfig { conservative: false, ..FilterConfig::default() };
        let g = filament_filter(&f, &FilterConfig::default()).unwrap();
        let h = filament_filter(&f, &bare).unwrap();
        let seam = |f: &DistributionField| f.row(0).to_vec();
        // the bare cutoff leaks into the tails, the conservative one does not
        let leak = seam(&h).iter().zip(seam(&f)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(leak > 1e-6, "{leak:e}");
        let kept = seam(&g).iter().zip(seam(&f)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        // only the moment correction, proportional to the tail value, remains
        assert!(kept < 1e-3 * leak, "{kept:e} vs {leak:e}");
    }

    #[test]
    fn bare_cutoff_shifts_kinetic_moment_of_filamented_data() {
        // the reason the conservative correction exists
        let f = filamented(Discretization::Spline);
        let config = FilterConfig { conservative: false, ..FilterConfig::default() };
        let g = filament_filter(&f, &config).unwrap();
        assert!((moments(&g)[2] - moments(&f)[2]).abs() > 1e-10);
    }

    #[test]
    fn filter_rejects_bad_cutoff() {
        let cfg = ScenarioConfig::builtin("linear_landau").unwrap();
        let f = initial_condition(&cfg, cfg.grid(Discretization::Spline, 8, 8).unwrap()).unwrap();
        for eta in [0.0, 1.5] {
            let config = FilterConfig { eta, ..FilterConfig::default() };
            assert!(filament_filter(&f, &config).is_err());
        }
    }
}
