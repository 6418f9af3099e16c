//! `neel`: batch front end for wall energies, micromagnetic runs and the acceptance suite.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use neel_core::geometry::{Model, Sign};

use config::{parse_walls, Format, RunConfig};

#[derive(Parser)]
#[command(name = "neel", version, about = "Néel-wall energies: renormalised energies, potentials and reduced micromagnetics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate W(a, d) and its gradient.
    EvalW {
        #[command(flatten)]
        walls: WallArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Minimise W over the positions, optionally from several random starts.
    MinimizeW {
        #[command(flatten)]
        walls: WallArgs,
        /// Number of seeded random starts (1 uses the given positions).
        #[arg(long)]
        starts: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate W along a one-parameter family of positions.
    Scan {
        #[command(flatten)]
        walls: WallArgs,
        /// uniform, pair:I, subblock:K:L or subblock (first collapsing block).
        #[arg(long)]
        path: Option<String>,
        #[arg(long)]
        eta_min: Option<f64>,
        #[arg(long)]
        eta_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Minimise the discretised micromagnetic energy for one ε.
    Simulate {
        #[command(flatten)]
        walls: WallArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Initial profile (CSV with columns x, phi).
        #[arg(long)]
        init: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit E(ε) ≈ A/L + B/L² over a range of ε.
    Fit {
        #[command(flatten)]
        walls: WallArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
        /// Positions of a second configuration with the same signs, for a paired fit.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        compare_positions: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Run acceptance criteria and report measured against expected values.
    Verify {
        /// specfun, renorm, potentials, micromag, profiles or all.
        #[arg(long)]
        suite: Option<String>,
        /// Grid size of the full-energy fits.
        #[arg(long)]
        nodes: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Default)]
struct Common {
    /// JSON config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long = "out")]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write SVG charts.
    #[arg(long)]
    svg: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Default)]
struct WallArgs {
    #[arg(long)]
    model: Option<Model>,
    /// Angle α in radians.
    #[arg(long)]
    alpha: Option<f64>,
    /// Walls as position:sign pairs, e.g. -0.3:+1,0.4:-1.
    #[arg(long, allow_hyphen_values = true)]
    walls: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    positions: Option<Vec<f64>>,
    /// Number of walls when positions are not given.
    #[arg(long)]
    n: Option<usize>,
    /// Signs, e.g. +,- ; a single sign alternates.
    #[arg(long = "d", value_delimiter = ',', allow_hyphen_values = true)]
    signs: Option<Vec<Sign>>,
}

#[derive(Args, Default)]
struct SimArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    pad_factor: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    pin_separation: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    trace_every: Option<usize>,
}

impl Common {
    fn apply(&self, c: &mut RunConfig) {
        c.out_dir = self.out_dir.clone();
        c.format = self.format;
        c.svg = self.svg.then_some(true);
        c.seed = self.seed;
    }
}

impl WallArgs {
    fn apply(&self, c: &mut RunConfig) -> Result<()> {
        c.model = self.model;
        c.alpha = self.alpha;
        c.n = self.n;
        c.positions = self.positions.clone();
        c.signs = self.signs.clone();
        if let Some(w) = &self.walls {
            let (a, d) = parse_walls(w)?;
            c.positions = Some(a);
            c.signs = Some(d);
        }
        Ok(())
    }
}

impl SimArgs {
    fn apply(&self, c: &mut RunConfig) {
        c.epsilon = self.epsilon;
        c.nodes = self.nodes;
        c.pad_factor = self.pad_factor;
        c.half_width = self.half_width;
        c.pin_separation = self.pin_separation;
        c.tol = self.tol;
        c.max_iter = self.max_iter;
        c.trace_every = self.trace_every;
    }
}

/// Flags as a partial config, the config file they point to, and the command name.
fn flags(cmd: &Command) -> Result<(RunConfig, &Common, &'static str)> {
    let mut c = RunConfig::default();
    let (common, name) = match cmd {
        Command::EvalW { walls, common } => {
            walls.apply(&mut c)?;
            (common, "eval-w")
        }
        Command::MinimizeW { walls, starts, common } => {
            walls.apply(&mut c)?;
            c.starts = *starts;
            (common, "minimize-w")
        }
        Command::Scan { walls, path, eta_min, eta_max, points, common } => {
            walls.apply(&mut c)?;
            c.path = path.clone();
            c.eta_min = *eta_min;
            c.eta_max = *eta_max;
            c.points = *points;
            (common, "scan")
        }
        Command::Simulate { walls, sim, init, common } => {
            walls.apply(&mut c)?;
            sim.apply(&mut c);
            c.init = init.clone();
            (common, "simulate")
        }
        Command::Fit { walls, sim, epsilons, compare_positions, common } => {
            walls.apply(&mut c)?;
            sim.apply(&mut c);
            c.epsilons = epsilons.clone();
            c.compare_positions = compare_positions.clone();
            (common, "fit")
        }
        Command::Verify { suite, nodes, common } => {
            c.suite = suite.clone();
            c.nodes = *nodes;
            (common, "verify")
        }
    };
    common.apply(&mut c);
    c.command = Some(name.to_string());
    Ok((c, common, name))
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("NEEL_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("NEEL_THREADS must be a thread count, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    let (overlay, common, name) = flags(&cli.command)?;
    let base = match &common.config {
        Some(p) => RunConfig::read(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &base.command {
        if c != name {
            anyhow::bail!("config file is for '{c}' but the command is '{name}'");
        }
    }
    let cfg = base.overlay(&overlay);
    match name {
        "eval-w" => commands::eval_w(&cfg),
        "minimize-w" => commands::minimize_w(&cfg),
        "scan" => commands::scan(&cfg),
        "simulate" => commands::simulate(&cfg),
        "fit" => commands::fit(&cfg),
        _ => commands::verify(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
