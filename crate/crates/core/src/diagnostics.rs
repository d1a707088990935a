//! Invariants of the Vlasov–Poisson system and their drift.
//!
//! dG integrals use the Gauss–Legendre weights of each cell; spline integrals
//! use `h_x h_v Σ f`, which equals the integral of the interpolating spline
//! for linear quantities. The spline L² norm is the exact norm of the
//! interpolant, computed from its B-spline coefficients and Gram matrix.
//! The entropy is clipped, `S = −∫ max(f, 0) log f`, with `0 log 0 = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ElectricField1D;
use crate::grid::{DistributionField, PhaseSpaceGrid};
use crate::spline;

/// One time sample of every tracked quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub t: f64,
    pub mass: f64,
    pub current: f64,
    pub kinetic: f64,
    pub electric: f64,
    pub total_energy: f64,
    pub entropy: f64,
    pub l1: f64,
    pub l2: f64,
    pub min_value: f64,
}

/// Quantities whose drift is reported by [`error_series`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Invariant {
    Mass,
    Current,
    Kinetic,
    Electric,
    TotalEnergy,
    Entropy,
    L1,
    L2,
}

impl Invariant {
    pub const ALL: [Invariant; 8] = [
        Invariant::Mass,
        Invariant::Current,
        Invariant::Kinetic,
        Invariant::Electric,
        Invariant::TotalEnergy,
        Invariant::Entropy,
        Invariant::L1,
        Invariant::L2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Invariant::Mass => "mass",
            Invariant::Current => "current",
            Invariant::Kinetic => "kinetic",
            Invariant::Electric => "electric",
            Invariant::TotalEnergy => "total_energy",
            Invariant::Entropy => "entropy",
            Invariant::L1 => "l1",
            Invariant::L2 => "l2",
        }
    }

    pub fn value(self, r: &InvariantRecord) -> f64 {
        match self {
            Invariant::Mass => r.mass,
            Invariant::Current => r.current,
            Invariant::Kinetic => r.kinetic,
            Invariant::Electric => r.electric,
            Invariant::TotalEnergy => r.total_energy,
            Invariant::Entropy => r.entropy,
            Invariant::L1 => r.l1,
            Invariant::L2 => r.l2,
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Partial {
    mass: f64,
    current: f64,
    kinetic: f64,
    f_log_f: f64,
    l1: f64,
    l2sq: f64,
    min: f64,
}

/// Integrates every invariant of `f`; `e` must be the field of the same `f`.
pub fn invariants(f: &DistributionField, e: &ElectricField1D) -> InvariantRecord {
    let grid: &PhaseSpaceGrid = f.grid();
    let wx = grid.x_weights();
    let wv = grid.v_weights();
    let vs = grid.v_positions();
    let n_cols = f.n_cols();
    let partials: Vec<Partial> = f
        .values()
        .par_chunks(n_cols)
        .zip(wv.par_iter().zip(vs.par_iter()))
        .map(|(row, (&w_v, &v))| {
            let mut p = Partial {
                min: f64::INFINITY,
                ..Partial::default()
            };
            let mut m = 0.0;
            for (&fv, &w_x) in row.iter().zip(&wx) {
                let w = w_x * w_v;
                m += w * fv;
                p.l1 += w * fv.abs();
                p.l2sq += w * fv * fv;
                if fv > 0.0 {
                    p.f_log_f += w * fv * fv.ln();
                }
                p.min = p.min.min(fv);
            }
            p.mass = m;
            p.current = v * m;
            p.kinetic = 0.5 * v * v * m;
            p
        })
        .collect();
    // fixed-order reduction keeps results independent of the thread count
    let mut total = Partial {
        min: f64::INFINITY,
        ..Partial::default()
    };
    for p in &partials {
        total.mass += p.mass;
        total.current += p.current;
        total.kinetic += p.kinetic;
        total.f_log_f += p.f_log_f;
        total.l1 += p.l1;
        total.l2sq += p.l2sq;
        total.min = total.min.min(p.min);
    }
    let electric = e.energy();
    let l2 = if grid.is_dg() {
        total.l2sq.sqrt()
    } else {
        spline::interpolant_norm_squared(f)
            .expect("spline grids have at least four points per axis")
            .sqrt()
    };
    InvariantRecord {
        t: f.time,
        mass: total.mass,
        current: total.current,
        kinetic: total.kinetic,
        electric,
        total_energy: total.kinetic + electric,
        entropy: -total.f_log_f,
        l1: total.l1,
        l2,
        min_value: total.min,
    }
}

/// How drift is measured against the reference record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorOptions {
    /// Denominator floor for relative errors.
    pub floor: f64,
    /// The current error is absolute when `|j(0)| ≤ current_absolute_below · |mass(0)|`.
    /// The default sits well above the tail truncation of a Maxwellian on
    /// `[-6, 6]` (about `e^{-18}`), which is all a "zero" current amounts to.
    pub current_absolute_below: f64,
}

impl Default for ErrorOptions {
    fn default() -> Self {
        Self {
            floor: 1e-30,
            current_absolute_below: 1e-6,
        }
    }
}

/// Per-invariant drift series relative to a reference record.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub t: Vec<f64>,
    series: Vec<(Invariant, Vec<f64>)>,
    current_is_absolute: bool,
}

impl ErrorSeries {
    pub fn get(&self, inv: Invariant) -> &[f64] {
        &self
            .series
            .iter()
            .find(|(i, _)| *i == inv)
            .expect("every invariant has a series")
            .1
    }

    pub fn max(&self, inv: Invariant) -> f64 {
        self.get(inv).iter().copied().fold(0.0, f64::max)
    }

    pub fn last(&self, inv: Invariant) -> f64 {
        self.get(inv).last().copied().unwrap_or(0.0)
    }

    /// Largest error among samples with `t ∈ [t0, t1]`.
    pub fn max_in(&self, inv: Invariant, t0: f64, t1: f64) -> f64 {
        self.t
            .iter()
            .zip(self.get(inv))
            .filter(|(t, _)| **t >= t0 && **t <= t1)
            .map(|(_, e)| *e)
            .fold(0.0, f64::max)
    }

    pub fn current_is_absolute(&self) -> bool {
        self.current_is_absolute
    }
}

/// `|q(t) − q(0)| / max(|q(0)|, floor)` for every invariant, with the current
/// switching to absolute error when it starts at (numerically) zero.
pub fn error_series(records: &[InvariantRecord], options: ErrorOptions) -> ErrorSeries {
    let Some(first) = records.first() else {
        return ErrorSeries {
            t: Vec::new(),
            series: Invariant::ALL.iter().map(|i| (*i, Vec::new())).collect(),
            current_is_absolute: false,
        };
    };
    error_series_against(records, first, options)
}

/// Like [`error_series`] but against an explicit reference record.
pub fn error_series_against(
    records: &[InvariantRecord],
    reference: &InvariantRecord,
    options: ErrorOptions,
) -> ErrorSeries {
    let current_is_absolute =
        reference.current.abs() <= options.current_absolute_below * reference.mass.abs();
    let series = Invariant::ALL
        .iter()
        .map(|&inv| {
            let q0 = inv.value(reference);
            let denom = if inv == Invariant::Current && current_is_absolute {
                1.0
            } else {
                q0.abs().max(options.floor)
            };
            let s = records
                .iter()
                .map(|r| (inv.value(r) - q0).abs() / denom)
                .collect();
            (inv, s)
        })
        .collect();
    ErrorSeries {
        t: records.iter().map(|r| r.t).collect(),
        series,
        current_is_absolute,
    }
}

/// Least-squares rate γ of `W(t) ∝ e^{−2γt}` over samples with `t ∈ window`.
///
/// `W` is the electric energy; the returned γ is the damping rate of the
/// field amplitude.
pub fn fit_damping_rate(times: &[f64], energy: &[f64], window: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(energy)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, w)| (*t, *w))
        .collect();
    fit_log_slope(&pts).map(|slope| -0.5 * slope)
}

/// Damping rate fitted through the local maxima of the electric energy in the
/// window, which removes the oscillation at the plasma frequency.
pub fn fit_envelope_damping_rate(times: &[f64], energy: &[f64], window: (f64, f64)) -> Result<f64> {
    let peaks: Vec<(f64, f64)> = local_maxima(times, energy)
        .into_iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .collect();
    fit_log_slope(&peaks).map(|slope| -0.5 * slope)
}

/// Interior strict local maxima `(t, value)` of a sampled series.
pub fn local_maxima(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .map(|i| (times[i], values[i]))
        .collect()
}

fn fit_log_slope(pts: &[(f64, f64)]) -> Result<f64> {
    if pts.len() < 2 {
        return Err(Error::Fit(format!("need at least two samples, got {}", pts.len())));
    }
    if let Some((t, w)) = pts.iter().find(|(_, w)| !(*w > 0.0)) {
        return Err(Error::Fit(format!("non-positive value {w} at t = {t}")));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1.ln() - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all samples at the same time".into()));
    }
    Ok(sxy / sxx)
}

/// Recurrence time `2π / (k Δv)` of free streaming on the velocity grid.
pub fn recurrence_time(grid: &PhaseSpaceGrid, k: f64) -> f64 {
    2.0 * std::f64::consts::PI / (k * grid.effective_dv())
}

/// Steps where the L² norm grew by more than `slack`.
pub fn l2_increases(records: &[InvariantRecord], slack: f64) -> Vec<usize> {
    records
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1].l2 > w[0].l2 + slack)
        .map(|(i, _)| i + 1)
        .collect()
}

/// Records that contradict `min < −tol ⇒ ‖f‖₁ > mass`.
pub fn l1_violations(records: &[InvariantRecord], tol: f64) -> Vec<usize> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.min_value < -tol && !(r.l1 - r.mass > 0.0))
        .map(|(i, _)| i)
        .collect()
}

/// Number of sign changes among consecutive increments of `series`, ignoring
/// increments with magnitude at most `threshold`.
pub fn increment_sign_changes(series: &[f64], threshold: f64) -> usize {
    let signs: Vec<bool> = series
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.abs() > threshold)
        .map(|d| d > 0.0)
        .collect();
    signs.windows(2).filter(|s| s[0] != s[1]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, mass: f64, current: f64) -> InvariantRecord {
        InvariantRecord {
            t,
            mass,
            current,
            kinetic: 1.0,
            electric: 0.5,
            total_energy: 1.5,
            entropy: 2.0,
            l1: mass,
            l2: 1.0,
            min_value: 0.0,
        }
    }

    #[test]
    fn single_record_gives_zero_errors() {
        let s = error_series(&[rec(0.0, 2.0, 0.3)], ErrorOptions::default());
        for inv in Invariant::ALL {
            assert_eq!(s.get(inv), &[0.0]);
        }
    }

    #[test]
    fn drifting_series() {
        let rs = [rec(0.0, 2.0, 0.5), rec(1.0, 2.002, 0.5005), rec(2.0, 1.99, 0.49)];
        let s = error_series(&rs, ErrorOptions::default());
        let m = s.get(Invariant::Mass);
        assert!((m[1] - 0.001).abs() < 1e-12);
        assert!((m[2] - 0.005).abs() < 1e-12);
        let c = s.get(Invariant::Current);
        assert!((c[1] - 0.001).abs() < 1e-12);
        assert!((c[2] - 0.02).abs() < 1e-12);
        assert!(!s.current_is_absolute());
    }

    #[test]
    fn zero_current_uses_absolute_error() {
        let rs = [rec(0.0, 2.0, 0.0), rec(1.0, 2.0, 3e-12)];
        let s = error_series(&rs, ErrorOptions::default());
        assert!(s.current_is_absolute());
        assert!((s.get(Invariant::Current)[1] - 3e-12).abs() < 1e-25);
    }

    #[test]
    fn exact_exponential_rate() {
        let gamma = 0.1533;
        let t: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        let w: Vec<f64> = t.iter().map(|t| 3.0 * (-2.0 * gamma * t).exp()).collect();
        let fit = fit_damping_rate(&t, &w, (1.0, 10.0)).unwrap();
        assert!((fit - gamma).abs() < 1e-10);
    }

    #[test]
    fn fit_rejects_non_positive() {
        let t = [0.0, 1.0, 2.0];
        assert!(fit_damping_rate(&t, &[1.0, 0.0, 1.0], (0.0, 2.0)).is_err());
        assert!(fit_damping_rate(&t, &[1.0, 0.5, 0.2], (5.0, 6.0)).is_err());
    }

    #[test]
    fn sign_changes_ignore_noise() {
        let s = [1.0, 0.9, 0.8, 0.8 + 1e-16, 0.7];
        assert_eq!(increment_sign_changes(&s, 1e-13), 0);
        let s = [1.0, 0.9, 0.95, 0.7];
        assert_eq!(increment_sign_changes(&s, 1e-13), 2);
    }
}
