// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! `qgrade` command-line driver: calibration, simulation sweeps, OpenQASM
//! export, hardware-counts ingestion and Q-grade reports.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qgrade_core::circuit::QasmVersion;
use qgrade_core::Backend;

pub mod commands;
pub mod config;
pub mod formats;

use commands::{IngestOptions, SimulateOptions};
use config::{ConfigFile, Overrides, Settings};

/// Invalid invocation; reported with exit status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Parser)]
#[command(name = "qgrade", version, about = "Twisted Ising ring many-body coherence benchmark")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Ring sizes: `6`, `4,6,8` or `4..12` (even, inclusive).
    #[arg(long = "L", value_name = "SIZES")]
    pub sizes: Option<String>,
    /// Lindblad rate of the isotropic bath.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_parser = parse_backend)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Q-grade cutoff on R.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Trajectories per branch for the trajectory backend.
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Flat `key = value` config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse::<Backend>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum QasmVersionArg {
    #[value(name = "2")]
    V2,
    #[value(name = "3")]
    V3,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find t_max and N_opt and store the noiseless reference.
    Calibrate {
        #[command(flatten)]
        common: Common,
    },
    /// Run both branches for one ring size.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Calibration file; defaults to `<out>/calibration_L{L}.json`.
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Include full occupation traces in the run record.
        #[arg(long)]
        traces: bool,
        /// Also write sampled counts files for both branches.
        #[arg(long)]
        emit_counts: bool,
        /// Record wall-clock time (breaks byte reproducibility).
        #[arg(long)]
        stamp: bool,
    },
    /// Simulate several ring sizes and write a Q-grade report.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// The sweep reached the largest size of interest.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        traces: bool,
        #[arg(long)]
        stamp: bool,
    },
    /// Write the calibrated circuits as OpenQASM.
    ExportQasm {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "3")]
        qasm_version: QasmVersionArg,
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Grade measured counts against stored noiseless references.
    Ingest {
        #[command(flatten)]
        common: Common,
        /// Counts files (qgrade-counts/1); repeated branches are pooled.
        #[arg(required = true)]
        counts: Vec<PathBuf>,
        /// Calibration files; defaults to `<out>/calibration_L{L}.json`.
        #[arg(long)]
        calibration: Vec<PathBuf>,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        stamp: bool,
    },
    /// Merge run records and reports into one Q-grade report.
    Report {
        #[command(flatten)]
        common: Common,
        /// Run records (qgrade-run/1) or reports (qgrade-report/1).
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        label: Option<String>,
    },
}

fn settings(common: &Common) -> anyhow::Result<Settings> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    Settings::resolve(
        &file,
        &Overrides {
            sizes: common.sizes.clone(),
            noise_rate: common.gamma,
            backend: common.backend,
            shots: common.shots,
            seed: common.seed,
            threshold: common.threshold,
            trajectories: common.trajectories,
        },
    )
}

fn print_report(report: &qgrade_core::metrics::QGradeReport) {
    println!("{:>4} {:>10} {:>10}", "L", "R", "dR");
    for r in &report.rows {
        println!("{:>4} {:>10.4} {:>10.4}", r.size, r.ratio, r.stderr);
    }
    println!("Q-grade ({}, threshold {}): {}", report.label, report.threshold, report.qgrade);
}

/// Execute a parsed command line.
pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Calibrate { common } => {
            let s = settings(&common)?;
            for r in commands::calibrate(&s, &common.out)? {
                println!(
                    "L = {:>2}: t_max = {:>3} (peak {:.2}), N_opt = {:>3}, delta = {:.4}",
                    r.size, r.t_max, r.t_peak, r.n_opt, r.delta
                );
            }
        }
        Command::Simulate {
            common,
            calibration,
            traces,
            emit_counts,
            stamp,
        } => {
            let s = settings(&common)?;
            let size = s.single_size()?;
            let opts = SimulateOptions {
                calibration,
                with_traces: traces,
                emit_counts,
                stamp,
            };
            let r = commands::simulate_one(&s, size, &common.out, &opts)?;
            println!(
                "L = {size}, gamma = {}, {}: n_v = {:.5}, n_nov = {:.5}, R = {:.4} +- {:.4}",
                r.config.noise_rate, r.backend, r.occupations.vison, r.occupations.no_vison, r.ratio, r.ratio_stderr
            );
        }
        Command::Sweep {
            common,
            exhaustive,
            traces,
            stamp,
        } => {
            let s = settings(&common)?;
            let opts = SimulateOptions {
                calibration: None,
                with_traces: traces,
                emit_counts: false,
                stamp,
            };
            print_report(&commands::sweep(&s, &common.out, &opts, exhaustive)?);
        }
        Command::ExportQasm {
            common,
            qasm_version,
            calibration,
        } => {
            let s = settings(&common)?;
            let version = match qasm_version {
                QasmVersionArg::V2 => QasmVersion::V2,
                QasmVersionArg::V3 => QasmVersion::V3,
            };
            for p in commands::export(&s, version, calibration.as_deref(), &common.out)? {
                println!("{}", p.display());
            }
        }
        Command::Ingest {
            common,
            counts,
            calibration,
            exhaustive,
            label,
            stamp,
        } => {
            let s = settings(&common)?;
            let opts = IngestOptions {
                calibrations: calibration,
                exhaustive,
                label,
                stamp,
            };
            let report = commands::ingest(&s, &counts, &common.out, &opts, &mut |w| eprintln!("warning: {w}"))?;
            print_report(&report);
        }
        Command::Report {
            common,
            inputs,
            exhaustive,
            label,
        } => {
            let s = settings(&common)?;
            print_report(&commands::report(&s, &inputs, &common.out, exhaustive, label)?);
        }
    }
    Ok(())
}
