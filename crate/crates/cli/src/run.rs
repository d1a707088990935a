//! The `run` command: integrate one configuration and write its artifacts.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use vlasov::field::FieldSolver;
use vlasov::prelude::*;
use vlasov::splitting::Observer;

use crate::config::RunConfig;
use crate::output::{write_manifest, write_snapshot, write_snapshot_csv, DiagnosticsWriter, Manifest};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug)]
pub struct RunSummary {
    pub records: usize,
    pub snapshots: Vec<PathBuf>,
    pub first: InvariantRecord,
    pub last: InvariantRecord,
}

struct Writer<'a> {
    csv: DiagnosticsWriter,
    out_dir: &'a Path,
    pending: Vec<f64>,
    tau: f64,
    snapshots: Vec<PathBuf>,
    completed_steps: Option<usize>,
    first: Option<InvariantRecord>,
    last: Option<InvariantRecord>,
    records: usize,
}

impl Writer<'_> {
    fn snapshot_if_due(&mut self, state: &StepperState) -> Result<()> {
        let due: Vec<f64> = self.pending.iter().copied().filter(|t| (t - state.t).abs() <= 0.5 * self.tau).collect();
        if due.is_empty() {
            return Ok(());
        }
        self.pending.retain(|t| !due.contains(t));
        let stem = format!("snapshot_t{:.4}", state.t);
        let bin = self.out_dir.join(format!("{stem}.vlsv"));
        write_snapshot(&bin, &state.f)?;
        write_snapshot_csv(&self.out_dir.join(format!("{stem}.csv")), &state.f)?;
        self.snapshots.push(bin);
        Ok(())
    }
}

impl Observer for Writer<'_> {
    fn on_record(&mut self, state: &StepperState, record: &InvariantRecord) -> vlasov::Result<()> {
        self.csv.write(record).map_err(|e| vlasov::Error::Config(e.to_string()))?;
        self.first.get_or_insert(*record);
        self.last = Some(*record);
        self.records += 1;
        if self.completed_steps.is_none() {
            self.completed_steps = Some(state.step_index);
            self.snapshot_if_due(state).map_err(|e| vlasov::Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    fn after_step(&mut self, state: &StepperState) -> vlasov::Result<()> {
        self.completed_steps = Some(state.step_index);
        self.snapshot_if_due(state).map_err(|e| vlasov::Error::Config(e.to_string()))
    }
}

/// Runs `config`, writing the diagnostics CSV, snapshots and manifest into
/// its output directory. Progress lines go to `log`.
pub fn execute(config: &RunConfig, log: &mut dyn Write) -> Result<RunSummary> {
    config.validate()?;
    let scenario = config.resolve_scenario()?;
    let threads = config.resolved_threads()?;
    let grid = scenario.grid(config.discretization(), config.cells_x, config.cells_v)?;
    let f0 = initial_condition(&scenario, grid)?;
    let solver = match config.background {
        Some(b) => FieldSolver::new(f0.grid(), b)?,
        None => FieldSolver::neutralizing(&f0)?,
    };
    let (dofs_x, dofs_v) = config.dofs();
    writeln!(
        log,
        "{}: {} backend, {} x {} DoF per dimension, tau {}, T {}, {} splitting, {} thread(s)",
        scenario.name,
        format!("{:?}", config.backend).to_lowercase(),
        dofs_x,
        dofs_v,
        config.tau,
        config.t_final,
        format!("{:?}", config.scheme).to_lowercase(),
        threads
    )?;

    let out_dir = &config.output_dir;
    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        threads,
        dofs_x,
        dofs_v,
        background: solver.background(),
        run: config,
        scenario: &scenario,
    };
    write_manifest(&out_dir.join(MANIFEST_FILE), &manifest)?;

    let stepper = Stepper::new(config.scheme, solver);
    let options = RunOptions::new(config.tau, config.t_final)
        .record_every(config.record_every)
        .with_echo_kick(scenario.echo_kick)
        .with_filter(scenario.filter);
    let mut writer = Writer {
        csv: DiagnosticsWriter::create(&out_dir.join(DIAGNOSTICS_FILE))?,
        out_dir,
        pending: config.snapshot_times.clone(),
        tau: config.tau,
        snapshots: Vec::new(),
        completed_steps: None,
        first: None,
        last: None,
        records: 0,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let result = pool.install(|| stepper.run(StepperState::new(f0), &options, &mut writer));
    if let Err(e) = result {
        let step = match writer.completed_steps {
            Some(n) => format!("step {}", n + 1),
            None => "step 0 (initial state)".into(),
        };
        // keep what was recorded before the failure
        writer.csv.finish()?;
        return Err(anyhow!(e).context(format!("run failed at {step}")));
    }
    let Writer { csv, snapshots, first, last, records, .. } = writer;
    csv.finish()?;
    let (first, last) = (first.expect("initial record"), last.expect("final record"));
    writeln!(
        log,
        "{records} records written to {}; relative mass drift {:.3e}, total-energy drift {:.3e}",
        out_dir.join(DIAGNOSTICS_FILE).display(),
        ((last.mass - first.mass) / first.mass).abs(),
        ((last.total_energy - first.total_energy) / first.total_energy).abs(),
    )?;
    Ok(RunSummary { records, snapshots, first, last })
}
