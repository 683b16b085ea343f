//! `demonsteer`: compile circuits, run steering sweeps, tomography, noise
//! fits and randomized benchmarking, each with a replayable manifest.

mod commands;
mod error;
mod manifest;

use clap::{Parser, Subcommand};
use commands::{compile, fit, rb, replay, steer, tomo};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "demonsteer", version, about = "Demon-assisted EPR steering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transpile a circuit onto a coupling graph and check equivalence.
    Compile(compile::CompileArgs),
    /// Sweep the demon probability and estimate S2.
    Steer(steer::SteerArgs),
    /// Pauli tomography of the heralded Bob/Alice pair.
    Tomo(tomo::TomoArgs),
    /// Fit the CZ depolarizing rate to a target S2 at p = 1.
    FitNoise(fit::FitArgs),
    /// Randomized benchmarking (single-qubit or CZ-interleaved).
    Rb(rb::RbArgs),
    /// Re-run the command recorded in a manifest and compare payloads.
    Replay(replay::ReplayArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Compile(a) => compile::run(&a),
        Command::Steer(a) => steer::run(&a),
        Command::Tomo(a) => tomo::run(&a),
        Command::FitNoise(a) => fit::run(&a),
        Command::Rb(a) => rb::run(&a),
        Command::Replay(a) => replay::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

