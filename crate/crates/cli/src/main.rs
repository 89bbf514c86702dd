//! `istsat`: pipelines over the simulation core — instance generation,
//! certified brute force, windowed quantum runs, classical descent, scaling
//! fits, and full sweep orchestration. Every command is a deterministic
//! function of its flags and the master `--seed`.

mod brute;
mod chr;
mod common;
mod fit;
mod gen;
mod run;
mod sgc;
mod sweep;
mod tts;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use istsat_core::engine::SchedulePreset;

use crate::common::Global;

#[derive(Parser, Debug)]
#[command(
    name = "istsat",
    version,
    about = "Exact-simulation pipelines for seeded annealing on planted MAX-3-XORSAT"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed; every stochastic quantity in a command derives from it.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads for data-parallel stages (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Output file, or output directory for `sweep`.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,

    /// Drive-frequency preset for quantum schedules.
    #[arg(long, global = true, value_enum, default_value = "default")]
    preset: PresetArg,
}

/// Drive-frequency presets exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    /// omega = 12 pi ln n.
    Default,
    /// omega = 10 pi ln n, for energy-quality runs.
    Lowfreq,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate planted instances as JSON Lines.
    Gen(gen::GenArgs),
    /// Certify ground states by brute force (n <= 26), optionally with
    /// ensemble degeneracy statistics.
    Brute(brute::BruteArgs),
    /// Windowed quantum runs: plain anneal, seeded single patterns, or the
    /// iterated feedback loop.
    Run(run::RunArgs),
    /// Semi-greedy classical descent trials over an instance file.
    Sgc(sgc::SgcArgs),
    /// Exponential scaling fits P(n) = a 2^(b n) over a results table.
    Fit(fit::FitArgs),
    /// Composed time-to-solution exponents for the four solver pipelines.
    Tts(tts::TtsArgs),
    /// Convergence-horizon radius from a fit table.
    Chr(chr::ChrArgs),
    /// Full pipeline per density: generate, certify, run, aggregate.
    Sweep(sweep::SweepArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    #[cfg(feature = "parallel")]
    if cli.workers > 0 {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
        {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    }
    #[cfg(not(feature = "parallel"))]
    if cli.workers > 1 {
        eprintln!("note: built without the parallel feature; --workers is ignored");
    }

    let global = Global {
        seed: cli.seed,
        out: cli.out,
        force: cli.force,
        preset: match cli.preset {
            PresetArg::Default => SchedulePreset::Default,
            PresetArg::Lowfreq => SchedulePreset::LowFrequency,
        },
    };

    let result = match cli.command {
        Command::Gen(args) => gen::execute(&args, &global),
        Command::Brute(args) => brute::execute(&args, &global),
        Command::Run(args) => run::execute(&args, &global),
        Command::Sgc(args) => sgc::execute(&args, &global),
        Command::Fit(args) => fit::execute(&args, &global),
        Command::Tts(args) => tts::execute(&args, &global),
        Command::Chr(args) => chr::execute(&args, &global),
        Command::Sweep(args) => sweep::execute(&args, &global),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
