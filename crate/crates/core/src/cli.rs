//! Command-line front end. Exit status 0 on success, 2 for configuration
//! errors, 3 for missing or malformed input data.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::ilp::{export_lp, Weights};
use crate::planner::{self, Approach, ScenarioConfig};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "eonplan", version, about = "Multi-period spectrum planning for elastic optical networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay the test period with one approach and write summary/epoch CSVs.
    Run {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run every approach for every horizon and write one consolidated CSV.
    Compare {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated approaches.
        #[arg(long, value_delimiter = ',', default_value = "ilp-sc1,ilp-sc2,mmd,mad")]
        approaches: Vec<String>,
        /// Comma-separated horizons.
        #[arg(long = "us", value_delimiter = ',', default_value = "1,2,4")]
        horizons: Vec<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write windowed training sets for the forecaster plus a manifest.
    ExportDataset {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, default_value = "dataset")]
        out: PathBuf,
    },
    /// Load and check every input of a scenario without planning.
    Validate {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write the integer program of one planning round in LP format.
    ExportLp {
        #[command(flatten)]
        overrides: Overrides,
        /// Test interval of the round.
        #[arg(long, default_value_t = 0)]
        epoch: usize,
        #[arg(long, default_value = "model.lp")]
        out: PathBuf,
    },
}

/// Scenario file plus flags that take precedence over its values.
#[derive(Debug, Clone, Args)]
pub struct Overrides {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub approach: Option<String>,
    #[arg(long)]
    pub u: Option<usize>,
    /// Five comma-separated weights; selects the `custom` approach.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub weights: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-round limit for the exact solver, in seconds.
    #[arg(long = "time-limit")]
    pub time_limit: Option<f64>,
    /// Record wall times in the reports.
    #[arg(long)]
    pub timing: bool,
}

impl Overrides {
    pub fn apply(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::load(&self.scenario)?;
        if let Some(w) = &self.weights {
            let w: [f64; 5] = w
                .as_slice()
                .try_into()
                .map_err(|_| Error::Config(format!("--weights needs 5 values, got {}", w.len())))?;
            Weights::new(w)?;
            cfg.weights = Some(w);
            cfg.approach = Approach::Custom;
        }
        if let Some(a) = &self.approach {
            let a: Approach = a.parse()?;
            if self.weights.is_some() && a != Approach::Custom {
                return Err(Error::Config("--weights only applies to the custom approach".into()));
            }
            cfg.approach = a;
        }
        if let Some(u) = self.u {
            cfg.u = u;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.time_limit {
            cfg.time_limit_s = Some(t);
        }
        cfg.timing |= self.timing;
        cfg.check()?;
        Ok(cfg)
    }
}

fn execute(command: &Command) -> Result<String> {
    match command {
        Command::Run { overrides, out } => {
            let cfg = overrides.apply()?;
            let report = planner::run(&cfg)?;
            planner::emit_reports(std::slice::from_ref(&report), out)?;
            Ok(planner::summary_csv(&[report]))
        }
        Command::Compare { overrides, approaches, horizons, out } => {
            let cfg = overrides.apply()?;
            let approaches = approaches.iter().map(|a| a.parse()).collect::<Result<Vec<Approach>>>()?;
            if approaches.is_empty() || horizons.is_empty() || horizons.contains(&0) {
                return Err(Error::Config("compare needs approaches and horizons >= 1".into()));
            }
            let reports = planner::compare(&cfg, &approaches, horizons)?;
            planner::emit_reports(&reports, out)?;
            Ok(planner::summary_csv(&reports))
        }
        Command::ExportDataset { overrides, out } => {
            let cfg = overrides.apply()?;
            let m = planner::export_dataset(&cfg, out)?;
            Ok(format!(
                "wrote {} dataset files and manifest.json to {}\n",
                m.connections.len(),
                out.display()
            ))
        }
        Command::Validate { overrides } => {
            let cfg = overrides.apply()?;
            let inputs = planner::load_inputs(&cfg)?;
            planner::load_predictions(&cfg, &inputs)?;
            let rounds = inputs.test_intervals.div_ceil(cfg.u);
            Ok(format!(
                "ok: {} nodes, {} links, {} connections ({} routable), {} test intervals, {} rounds\n",
                inputs.topology.node_count(),
                inputs.topology.link_count(),
                inputs.demands.len(),
                inputs.routable().len(),
                inputs.test_intervals,
                rounds
            ))
        }
        Command::ExportLp { overrides, epoch, out } => {
            let cfg = overrides.apply()?;
            let inst = planner::epoch_instance(&cfg, *epoch)?;
            write_lp(&inst, out)?;
            Ok(format!(
                "wrote {} variables, {} constraints to {}\n",
                inst.variable_count(),
                inst.constraint_count(),
                out.display()
            ))
        }
    }
}

fn write_lp(inst: &crate::ilp::IlpInstance, out: &Path) -> Result<()> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    export_lp(inst, out).map_err(|e| Error::io(out, e))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
