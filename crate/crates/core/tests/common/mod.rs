#![allow(dead_code)]

use vlasov::diagnostics::{error_series, ErrorOptions, ErrorSeries};
use vlasov::prelude::*;
use vlasov::splitting::RunOutput;

/// Backend plus polynomial degree, sized by degrees of freedom per dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Dg(usize),
    Spline,
}

impl Method {
    pub fn discretization(self) -> Discretization {
        match self {
            Method::Dg(l) => Discretization::Dg { degree_x: l, degree_v: l },
            Method::Spline => Discretization::Spline,
        }
    }

    /// Cells (or spline points) giving `dofs` degrees of freedom.
    pub fn cells(self, dofs: usize) -> usize {
        match self {
            Method::Dg(l) => {
                assert_eq!(dofs % (l + 1), 0, "{dofs} DoF is not a multiple of {}", l + 1);
                dofs / (l + 1)
            }
            Method::Spline => dofs,
        }
    }

    pub fn label(self) -> String {
        match self {
            Method::Dg(l) => format!("dG{}", l + 1),
            Method::Spline => "spline".into(),
        }
    }
}

pub fn initial(scenario: &ScenarioConfig, method: Method, dofs_x: usize, dofs_v: usize) -> DistributionField {
    let grid = scenario
        .grid(method.discretization(), method.cells(dofs_x), method.cells(dofs_v))
        .unwrap();
    initial_condition(scenario, grid).unwrap()
}

pub fn run_from(f0: DistributionField, scenario: &ScenarioConfig, tau: f64, t_final: f64) -> RunOutput {
    run_sparse(f0, scenario, tau, t_final, 1)
}

/// Like [`run_from`], recording only every `record_every` steps.
pub fn run_sparse(
    f0: DistributionField,
    scenario: &ScenarioConfig,
    tau: f64,
    t_final: f64,
    record_every: usize,
) -> RunOutput {
    let stepper = Stepper::neutralizing(SplittingScheme::Strang, &f0).unwrap();
    let options = RunOptions::new(tau, t_final)
        .record_every(record_every)
        .with_echo_kick(scenario.echo_kick)
        .with_filter(scenario.filter);
    stepper.run(StepperState::new(f0), &options, &mut ()).unwrap()
}

pub fn run(name: &str, method: Method, dofs: usize, tau: f64, t_final: f64) -> RunOutput {
    let scenario = ScenarioConfig::builtin(name).unwrap();
    run_scenario(&scenario, method, dofs, dofs, tau, t_final)
}

pub fn run_scenario(
    scenario: &ScenarioConfig,
    method: Method,
    dofs_x: usize,
    dofs_v: usize,
    tau: f64,
    t_final: f64,
) -> RunOutput {
    run_from(initial(scenario, method, dofs_x, dofs_v), scenario, tau, t_final)
}

pub fn errors(out: &RunOutput) -> ErrorSeries {
    error_series(&out.records, ErrorOptions::default())
}

/// Writes one verdict line and returns whether it passed.
pub fn report(id: u32, title: &str, pass: bool, detail: impl AsRef<str>) -> bool {
    emit(&verdict(id, title, pass, detail.as_ref()));
    pass
}

fn verdict(id: u32, title: &str, pass: bool, detail: &str) -> String {
    let status = if pass { "PASS" } else { "FAIL" };
    format!("criterion {id:>2} [{status}] {title}: {detail}")
}

/// Goes straight to stderr: the test harness captures only the print macros,
/// so verdicts show up without `--nocapture`.
fn emit(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stderr().lock(), "{line}");
}

/// Reports a criterion whose `gap` part is known to be unattainable here.
///
/// The line shows the full verdict, so a criterion with an open gap prints
/// `FAIL`. Only the `required` part fails the test, which keeps every
/// attainable check enforced while the gap stays visible.
pub fn report_with_gap(id: u32, title: &str, required: bool, gap: (bool, &str), detail: impl AsRef<str>) {
    let (gap_met, why) = gap;
    let mut text = verdict(id, title, required && gap_met, detail.as_ref());
    if !gap_met {
        text += &format!("\n             known gap: {why}");
    }
    emit(&text);
    assert!(required, "criterion {id}: an attainable check failed");
}
