// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! `otto-dbn`: scans, table reproduction and validation for the qubit Otto
//! engine.

mod commands;
mod config;
mod context;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use otto_dbn::cycle::Regime;
use otto_dbn::tpm::TpmCycle;
use otto_dbn::validation::Fault;

use crate::config::RunConfig;
use crate::context::{Context, Failure};

#[derive(Debug, Parser)]
#[command(name = "otto-dbn", version, about = "Finite-time qubit Otto engine: limit cycles, DBN/TPM statistics, scans")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root directory.
    #[arg(long, global = true, env = "OTTO_DBN_OUT")]
    out: Option<PathBuf>,
    /// Worker threads (0 = all logical cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Fail on non-converged cells (exit 3) or out-of-tolerance comparisons (exit 4).
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true, value_enum)]
    regime: Option<RegimeArg>,
    /// Override a configuration key, e.g. `--set cycle.pe_c=0.4`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    Positive,
    Inverted,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Positive => Regime::Positive,
            RegimeArg::Inverted => Regime::Inverted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table1,
    Table2,
    Table3,
    Fig2,
    Fig3,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanArg {
    Population,
    Time,
    DriveLine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    FlipUpRate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TpmArg {
    Dephased,
    Coherent,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Regenerate the data behind a table or figure.
    Reproduce { target: Target },
    /// Solve a single operating point and print its record as JSON.
    Point {
        /// Pick the drive time on the tau_drive grid that maximizes power.
        #[arg(long)]
        optimize_drive: bool,
    },
    /// Run a scan over the configured grids.
    Scan { kind: ScanArg },
    /// Run the invariant battery.
    Validate {
        #[arg(long, default_value_t = 1)]
        step_multiplier: usize,
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
    },
    /// Compare DBN and TPM statistics along the drive-time axis.
    TpmCompare {
        #[arg(long, value_enum)]
        tpm_cycle: Option<TpmArg>,
    },
}

fn build_context(cli: &Cli) -> Result<Context, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| Failure::Usage(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    let regime = cli.regime.map(Regime::from);
    if let Some(r) = regime {
        cfg.cycle = cfg.cycle.with_regime(r);
    }
    for s in &cli.set {
        cfg.apply_override(s).map_err(|e| Failure::Usage(format!("{e:#}")))?;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output));
    Context::new(cfg, out, regime, cli.strict)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut ctx = build_context(&cli)?;
    match cli.command {
        Command::Reproduce { target } => commands::reproduce(&mut ctx, target),
        Command::Point { optimize_drive } => commands::point(&mut ctx, optimize_drive),
        Command::Scan { kind } => commands::scan(&mut ctx, kind),
        Command::Validate {
            step_multiplier,
            inject_fault,
        } => commands::validate(
            &mut ctx,
            step_multiplier,
            inject_fault.map(|FaultArg::FlipUpRate| Fault::FlipUpRate),
        ),
        Command::TpmCompare { tpm_cycle } => {
            let v = tpm_cycle.map(|t| match t {
                TpmArg::Dephased => TpmCycle::Dephased,
                TpmArg::Coherent => TpmCycle::Coherent,
            });
            commands::tpm_compare(&mut ctx, v)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
