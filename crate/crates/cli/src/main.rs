use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use vlasov::prelude::*;
use vpsim::compare::{align, parse_invariant, render_summary, render_table, summarize};
use vpsim::config::RunConfig;
use vpsim::output::read_diagnostics;
use vpsim::plot::{extract, render_svg, Quantity, Series};

/// Semi-Lagrangian Vlasov–Poisson simulations in 1+1 dimensions.
#[derive(Parser)]
#[command(name = "vpsim", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write diagnostics, snapshots and a manifest.
    Run(RunArgs),
    /// Compare the diagnostics of two runs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Also print the time-resolved errors of this invariant.
        #[arg(long)]
        detail: Option<String>,
        /// Row stride of the detail table.
        #[arg(long, default_value_t = 10)]
        every: usize,
    },
    /// Plot one quantity of one or more runs on a log scale as SVG.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// Column to plot, e.g. `electric`.
        #[arg(long, default_value = "electric")]
        quantity: String,
        /// Plot the error relative to the first record instead of the value.
        #[arg(long)]
        error: bool,
        #[arg(short, long, default_value = "plot.svg")]
        output: PathBuf,
        #[arg(long)]
        title: Option<String>,
    },
    /// List the built-in scenarios.
    Scenarios,
}

/// Flags override the values of `--config`.
#[derive(Args)]
struct RunArgs {
    /// Run configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario file (TOML); takes precedence over `--scenario`.
    #[arg(long)]
    scenario_file: Option<PathBuf>,
    #[arg(long)]
    backend: Option<Backend>,
    /// Polynomial degree of the dG backend.
    #[arg(long)]
    degree: Option<usize>,
    /// Cells (dG) or points (spline) in both directions.
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    cells_x: Option<usize>,
    #[arg(long)]
    cells_v: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    /// Length of the integration interval.
    #[arg(long = "T", alias = "t-final")]
    t_final: Option<f64>,
    #[arg(long)]
    scheme: Option<SplittingScheme>,
    #[arg(long)]
    record_every: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: config, then $VLASOV_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Ion background (default: neutralizes the initial charge).
    #[arg(long)]
    background: Option<f64>,
    /// Write a snapshot at this time; repeatable.
    #[arg(long = "snapshot-at")]
    snapshot_at: Vec<f64>,
    /// Enable the velocity filter with default settings.
    #[arg(long)]
    filter: bool,
    #[arg(long)]
    filter_eta: Option<f64>,
    #[arg(long)]
    filter_every: Option<usize>,
    /// Use the bare spectral cutoff without the conservative correction.
    #[arg(long)]
    bare_filter: bool,
    /// Disable any filter, including one set by the scenario.
    #[arg(long, conflicts_with_all = ["filter", "filter_eta", "filter_every", "bare_filter"])]
    no_filter: bool,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.scenario {
            c.scenario = s;
            c.scenario_file = None;
        }
        if let Some(p) = self.scenario_file {
            c.scenario_file = Some(p);
        }
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {$(
                if let Some(v) = self.$flag {
                    c.$field = v;
                }
            )*};
        }
        set!(backend => backend, degree => degree, cells => cells_x, cells => cells_v, cells_x => cells_x,
             cells_v => cells_v, tau => tau, t_final => t_final, scheme => scheme,
             record_every => record_every, out => output_dir);
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if self.background.is_some() {
            c.background = self.background;
        }
        if !self.snapshot_at.is_empty() {
            c.snapshot_times = self.snapshot_at;
        }
        if self.no_filter {
            c.no_filter = true;
            c.filter = None;
        } else if self.filter || self.filter_eta.is_some() || self.filter_every.is_some() || self.bare_filter {
            let mut f = c.filter.unwrap_or_default();
            f.eta = self.filter_eta.unwrap_or(f.eta);
            f.every = self.filter_every.unwrap_or(f.every);
            f.conservative &= !self.bare_filter;
            c.filter = Some(f);
            c.no_filter = false;
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let config = args.resolve()?;
            vpsim::run::execute(&config, &mut io::stdout())?;
        }
        Command::Compare { a, b, detail, every } => {
            let aligned = align(&read_diagnostics(&a)?, &read_diagnostics(&b)?)?;
            println!("A = {}\nB = {}", a.display(), b.display());
            print!("{}", render_summary(&summarize(&aligned), aligned.a.len()));
            if let Some(name) = detail {
                println!();
                print!("{}", render_table(&aligned, parse_invariant(&name)?, every));
            }
        }
        Command::Plot { csv, quantity, error, output, title } => {
            let q = Quantity::parse(&quantity, error)?;
            let series = csv
                .iter()
                .map(|path| {
                    let records = read_diagnostics(path)?;
                    let label = path.parent().and_then(|p| p.file_name()).unwrap_or(path.as_os_str());
                    Ok(Series {
                        label: label.to_string_lossy().into_owned(),
                        points: extract(&records, q),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let title = title.unwrap_or_else(|| q.label());
            let svg = render_svg(&series, &title, &q.label())?;
            std::fs::write(&output, svg).with_context(|| format!("cannot write {}", output.display()))?;
            println!("wrote {}", output.display());
        }
        Command::Scenarios => {
            for name in vlasov::scenarios::BUILTIN_SCENARIOS {
                println!("{name}");
            }
        }
    }
    Ok(())
}

