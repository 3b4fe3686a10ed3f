use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, RunOptions};
use crate::config::{describe_keys, Settings};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "percofpp", version, about = "Generalized first-passage percolation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Weight law F, e.g. `dirac:1`, `atoms:1:0.5,2:0.5`, `uniform:0.5:1.5`.
    #[arg(long)]
    pub dist: Option<String>,
    /// Comma-separated p grid.
    #[arg(long, visible_alias = "grid")]
    pub p: Option<String>,
    /// Comma-separated n grid.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub replicas: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Lattice dimension.
    #[arg(long)]
    pub d: Option<String>,
    /// Any configuration key; repeatable. See `percofpp keys`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Parent directory of the run directory.
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

impl Common {
    fn overrides(&self) -> CliResult<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (k, v) in [("dist", &self.dist), ("p", &self.p), ("n", &self.n), ("replicas", &self.replicas)]
            .into_iter()
            .chain([("seed", &self.seed), ("d", &self.d)])
        {
            if let Some(v) = v {
                out.push((k.to_string(), v.clone()));
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    pub fn settings(&self, extra: &[(String, String)]) -> CliResult<Settings> {
        let mut overrides = self.overrides()?;
        overrides.extend_from_slice(extra);
        Settings::resolve(self.config.as_deref(), std::env::vars(), &overrides)
    }

    fn options(&self) -> RunOptions {
        RunOptions { out: self.out.clone(), threads: self.threads }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-replica truncated passage times and a table of edge weights.
    Sample(Common),
    /// Time constant estimates over the p and n grids.
    Mu(Common),
    /// μ̂ on a p grid under common random numbers, with adjacent slopes.
    Lipschitz(Common),
    /// Exact derivative identity on a tiny built-in graph.
    Russo {
        #[command(flatten)]
        common: Common,
        /// edge | 2x2 | 2x3 | all
        #[arg(long)]
        instance: Option<String>,
    },
    /// Finite-difference derivative of E[T] against the summed edge effects.
    Delta {
        #[command(flatten)]
        common: Common,
        /// zero | resample
        #[arg(long)]
        delta_mode: Option<String>,
        /// Finite-difference half width.
        #[arg(long)]
        h: Option<String>,
    },
    /// Effective radius ensemble and its survival table.
    RadiusTails(Common),
    /// Truncation gap against the regularized passage time.
    Gap(Common),
    /// Greedy lattice animal bound on i.i.d. indicators.
    Animals(Common),
    /// Builds and verifies bypasses around geodesic edges.
    BypassDemo(Common),
    /// Single-environment trajectory of T/n and translate means.
    Slln(Common),
    /// Hole, chemical, geodesic-length and path-weight survival tables.
    Tails(Common),
    /// Re-runs a recorded run and compares output digests.
    Replay {
        /// Run directory or manifest.json.
        manifest: PathBuf,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Lists configuration keys with defaults.
    Keys,
}

fn opt_pair(key: &str, v: &Option<String>) -> Vec<(String, String)> {
    v.iter().map(|v| (key.to_string(), v.clone())).collect()
}

/// Executes a parsed command; returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let (name, common, extra) = match cli.command {
        Command::Keys => {
            print!("{}", describe_keys());
            return Ok(());
        }
        Command::Replay { manifest, out, threads } => {
            let r = commands::replay(&manifest, &RunOptions { out, threads })?;
            println!("{}", r.rerun.dir.display());
            if r.identical() {
                println!("identical: {} file(s)", r.original.outputs.len());
                return Ok(());
            }
            return Err(CliError::Runtime(format!("outputs differ: {}", r.mismatches.join(", "))));
        }
        Command::Sample(c) => ("sample", c, vec![]),
        Command::Mu(c) => ("mu", c, vec![]),
        Command::Lipschitz(c) => ("lipschitz", c, vec![]),
        Command::Russo { common, instance } => ("russo", common, opt_pair("instance", &instance)),
        Command::Delta { common, delta_mode, h } => {
            let mut extra = opt_pair("delta_mode", &delta_mode);
            extra.extend(opt_pair("h", &h));
            ("delta", common, extra)
        }
        Command::RadiusTails(c) => ("radius-tails", c, vec![]),
        Command::Gap(c) => ("gap", c, vec![]),
        Command::Animals(c) => ("animals", c, vec![]),
        Command::BypassDemo(c) => ("bypass-demo", c, vec![]),
        Command::Slln(c) => ("slln", c, vec![]),
        Command::Tails(c) => ("tails", c, vec![]),
    };
    let settings = common.settings(&extra)?;
    let outcome = commands::run(name, &settings, &common.options())?;
    println!("{}", outcome.dir.display());
    Ok(())
}
