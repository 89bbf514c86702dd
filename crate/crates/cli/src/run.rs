//! `run`: windowed quantum runs over an instance file — the plain-anneal
//! baseline, seeded single-pattern runs, and the iterated feedback loop.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use istsat_core::engine::{PhasePattern, ScheduleParams, SchedulePreset};
use istsat_core::formats::{read_jsonl, write_csv, write_jsonl, EnergyRow, Frac, ResultRow};
use istsat_core::instance::{BitString, Instance, SolutionSet};
use istsat_core::protocol::{
    corrupt_pattern, hamming_profile, istsat_iterate, mean_energy, run_windowed, AnalysisMode,
    HammingProfile, IterationTrace, RunConfig, SelectRule,
};
use istsat_core::util::{derive_seed, tag};

use crate::common::{
    frac_list, lookup, parse_unit_frac, preset_label, provenance, require_out, solutions_index,
    targets, try_map_ordered, CliError, CliResult, Global,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RunMode {
    /// Plain anneal without the oscillating drive, profiled at --thresholds.
    Taqc,
    /// Seeded anneal per corruption fraction r, profiled at its own radius.
    Istsat,
    /// Iterated seeded loop with sampling and feedback; writes JSONL traces.
    IstsatIterate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SelectArg {
    /// Lowest-energy sample, ties broken uniformly.
    MinEnergy,
    /// Uniform over the pooled samples.
    Random,
    /// Per-bit majority vote over the pooled samples.
    BitwiseMajority,
}

impl From<SelectArg> for SelectRule {
    fn from(arg: SelectArg) -> SelectRule {
        match arg {
            SelectArg::MinEnergy => SelectRule::MinEnergy,
            SelectArg::Random => SelectRule::Random,
            SelectArg::BitwiseMajority => SelectRule::BitwiseMajority,
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Instance JSONL produced by `gen`.
    #[arg(long)]
    pub instances: PathBuf,

    /// Certified solutions JSONL; distances fall back to the planted string
    /// when omitted.
    #[arg(long)]
    pub solutions: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub mode: RunMode,

    /// Corruption fractions for seeded modes (default "0,1/8,1/4,3/10,1/3";
    /// the iterated mode takes exactly one, default "1/2").
    #[arg(long, value_delimiter = ',', value_parser = parse_unit_frac)]
    pub r: Option<Vec<Frac>>,

    /// Distance fractions for the plain-anneal profile
    /// (default "0,1/8,1/4,3/10,1/3").
    #[arg(long, value_delimiter = ',', value_parser = parse_unit_frac)]
    pub thresholds: Option<Vec<Frac>>,

    /// Samples per window point in the iterated mode.
    #[arg(long, default_value_t = 1000)]
    pub shots: usize,

    /// Iteration cap for the iterated mode.
    #[arg(long, default_value_t = 20)]
    pub iters: usize,

    /// Seed-string selection rule for the iterated mode.
    #[arg(long, value_enum, default_value = "min-energy")]
    pub select: SelectArg,

    /// Optional second CSV with exact window-averaged mean energies per
    /// instance, normalized by the ground-truth energy (quantum modes only).
    #[arg(long)]
    pub energy_out: Option<PathBuf>,
}

/// The grid shared by corruption fractions and distance thresholds:
/// the ground state plus the four standard radii.
pub fn default_grid() -> Vec<Frac> {
    ["0", "1/8", "1/4", "3/10", "1/3"]
        .iter()
        .map(|s| Frac::parse(s).expect("static grid"))
        .collect()
}

pub fn execute(args: &RunArgs, global: &Global) -> CliResult<()> {
    let out = require_out(global)?;
    let instances: Vec<Instance> = read_jsonl(&args.instances)?;
    let index = args.solutions.as_deref().map(solutions_index).transpose()?;
    let truth = if index.is_some() { "certified" } else { "planted" };

    match args.mode {
        RunMode::Taqc => {
            if args.r.is_some() {
                return Err(CliError::usage(
                    "--r applies to seeded modes; the plain anneal takes --thresholds",
                ));
            }
            let thresholds = args.thresholds.clone().unwrap_or_else(default_grid);
            let per_instance = try_map_ordered(&instances, |inst| {
                taqc_rows(
                    inst,
                    lookup(index.as_ref(), inst)?,
                    &thresholds,
                    global.seed,
                    global.preset,
                )
            })?;
            let mut rows = Vec::new();
            let mut energies = Vec::new();
            for (r, e) in per_instance {
                rows.extend(r);
                energies.push(e);
            }
            let params = [
                ("mode", "taqc".to_string()),
                ("preset", preset_label(global.preset).into()),
                ("thresholds", frac_list(&thresholds)),
                ("truth", truth.into()),
                ("seed", global.seed.to_string()),
            ];
            write_csv(out, &provenance("run", &params), &rows, global.force)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            write_energy_table(args, &params, &energies, global.force)?;
        }
        RunMode::Istsat => {
            if args.thresholds.is_some() {
                return Err(CliError::usage(
                    "seeded runs are profiled at their own corruption radius; use --r",
                ));
            }
            let grid = args.r.clone().unwrap_or_else(default_grid);
            let per_instance = try_map_ordered(&instances, |inst| {
                istsat_rows(
                    inst,
                    lookup(index.as_ref(), inst)?,
                    &grid,
                    global.seed,
                    global.preset,
                )
            })?;
            let mut rows = Vec::new();
            let mut energies = Vec::new();
            for (r, e) in per_instance {
                rows.extend(r);
                energies.extend(e);
            }
            let params = [
                ("mode", "istsat".to_string()),
                ("preset", preset_label(global.preset).into()),
                ("r", frac_list(&grid)),
                ("truth", truth.into()),
                ("seed", global.seed.to_string()),
            ];
            write_csv(out, &provenance("run", &params), &rows, global.force)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            write_energy_table(args, &params, &energies, global.force)?;
        }
        RunMode::IstsatIterate => {
            if args.energy_out.is_some() {
                return Err(CliError::usage(
                    "--energy-out applies to the exact quantum modes; iterated traces already carry per-iteration energies",
                ));
            }
            let grid = args
                .r
                .clone()
                .unwrap_or_else(|| vec![Frac::parse("1/2").expect("static fraction")]);
            let &[r] = grid.as_slice() else {
                return Err(CliError::usage("the iterated mode takes exactly one --r"));
            };
            let traces: Vec<IterationTrace> = try_map_ordered(&instances, |inst| {
                iterate_trace(
                    inst,
                    lookup(index.as_ref(), inst)?,
                    r,
                    args.shots,
                    args.iters,
                    args.select.into(),
                    global.seed,
                    global.preset,
                )
            })?;
            write_jsonl(out, &traces, global.force)?;
            let solved = traces.iter().filter(|t| t.succeeded).count();
            println!(
                "wrote {} traces to {} ({} reached the ground truth)",
                traces.len(),
                out.display(),
                solved
            );
        }
    }
    Ok(())
}

/// Writes the companion mean-energy table when `--energy-out` was given.
fn write_energy_table(
    args: &RunArgs,
    params: &[(&str, String)],
    rows: &[EnergyRow],
    force: bool,
) -> CliResult<()> {
    let Some(path) = &args.energy_out else {
        return Ok(());
    };
    write_csv(path, &provenance("run-energy", params), rows, force)?;
    println!("wrote {} energy rows to {}", rows.len(), path.display());
    Ok(())
}

/// Plain-anneal rows: one exact windowed run per instance, profiled at each
/// threshold in both radius conventions round(d n) and round(d n / 2),
/// plus the window-averaged mean energy of the same distribution.
pub fn taqc_rows(
    instance: &Instance,
    solutions: Option<&SolutionSet>,
    thresholds: &[Frac],
    master: u64,
    preset: SchedulePreset,
) -> CliResult<(Vec<ResultRow>, EnergyRow)> {
    let mut params = ScheduleParams::for_size(instance.n, preset)?;
    params.ac_enabled = false;
    let seed = derive_seed(master, &[tag("run"), tag(&instance.instance_id), tag("-")]);
    let config = RunConfig {
        params,
        mode: AnalysisMode::Exact,
        shots: 1,
        seed,
    };
    let values: Vec<f64> = thresholds.iter().map(Frac::value).collect();
    let tgt = targets(instance, solutions);
    let (profile, energy) =
        profile_and_energy(instance, solutions, None, &config, &tgt, &values, "TAQC", "-")?;
    Ok((
        profile_rows(
            instance,
            "TAQC",
            "-",
            thresholds,
            &profile,
            params.window_points,
            seed,
        ),
        energy,
    ))
}

/// Seeded-run rows: per corruption fraction r, one exact windowed run with
/// the corrupted planted pattern, profiled at threshold d = r; each run also
/// yields the window-averaged mean energy.
pub fn istsat_rows(
    instance: &Instance,
    solutions: Option<&SolutionSet>,
    grid: &[Frac],
    master: u64,
    preset: SchedulePreset,
) -> CliResult<(Vec<ResultRow>, Vec<EnergyRow>)> {
    let params = ScheduleParams::for_size(instance.n, preset)?;
    let tgt = targets(instance, solutions);
    let mut rows = Vec::with_capacity(2 * grid.len());
    let mut energies = Vec::with_capacity(grid.len());
    for &r in grid {
        let label = r.to_string();
        let pattern_seed = derive_seed(
            master,
            &[tag("pattern"), tag(&instance.instance_id), tag(&label)],
        );
        let pattern = corrupt_pattern(&instance.planted, r.value(), pattern_seed)?;
        let seed = derive_seed(master, &[tag("run"), tag(&instance.instance_id), tag(&label)]);
        let config = RunConfig {
            params,
            mode: AnalysisMode::Exact,
            shots: 1,
            seed,
        };
        let (profile, energy) = profile_and_energy(
            instance,
            solutions,
            Some(&pattern),
            &config,
            &tgt,
            &[r.value()],
            "ISTSAT",
            &label,
        )?;
        rows.extend(profile_rows(
            instance,
            "ISTSAT",
            &label,
            &[r],
            &profile,
            params.window_points,
            seed,
        ));
        energies.push(energy);
    }
    Ok((rows, energies))
}

/// Runs one exact windowed evolution and reads off both the Hamming profile
/// and the expected energy of the averaged distribution.
#[allow(clippy::too_many_arguments)]
fn profile_and_energy(
    instance: &Instance,
    solutions: Option<&SolutionSet>,
    pattern: Option<&PhasePattern>,
    config: &RunConfig,
    tgt: &[BitString],
    values: &[f64],
    mode: &str,
    r_or_source: &str,
) -> CliResult<(HammingProfile, EnergyRow)> {
    let run = run_windowed(instance, pattern, config)?;
    let dist = run.averaged().expect("exact mode");
    let profile = hamming_profile(dist, tgt, values)?;
    let energies = instance.diagonal_energies()?;
    let mean = mean_energy(dist, &energies)?;
    let ground = solutions
        .map(|s| s.ground_energy)
        .unwrap_or_else(|| instance.planted_energy());
    let energy = EnergyRow {
        instance_id: instance.instance_id.clone(),
        n: instance.n,
        density: instance.density,
        epsilon: instance.epsilon,
        mode: mode.to_string(),
        r_or_source: r_or_source.to_string(),
        mean_energy: mean,
        ground_energy: ground,
        energy_ratio: mean / ground as f64,
        window_points: config.params.window_points,
        seed: config.seed,
    };
    Ok((profile, energy))
}

/// One full iterated run on one instance, starting from the planted string
/// corrupted at fraction r.
#[allow(clippy::too_many_arguments)]
pub fn iterate_trace(
    instance: &Instance,
    solutions: Option<&SolutionSet>,
    r: Frac,
    shots: usize,
    iters: usize,
    select: SelectRule,
    master: u64,
    preset: SchedulePreset,
) -> CliResult<IterationTrace> {
    let params = ScheduleParams::for_size(instance.n, preset)?;
    let label = r.to_string();
    let pattern_seed = derive_seed(
        master,
        &[tag("pattern"), tag(&instance.instance_id), tag(&label)],
    );
    let p0 = corrupt_pattern(&instance.planted, r.value(), pattern_seed)?;
    let seed = derive_seed(master, &[tag("run"), tag(&instance.instance_id), tag(&label)]);
    let config = RunConfig {
        params,
        mode: AnalysisMode::Sampled,
        shots,
        seed,
    };
    istsat_iterate(instance, solutions, &p0, &config, iters, select).map_err(Into::into)
}

fn profile_rows(
    instance: &Instance,
    mode: &str,
    r_or_source: &str,
    thresholds: &[Frac],
    profile: &HammingProfile,
    window_points: usize,
    seed: u64,
) -> Vec<ResultRow> {
    let mut rows = Vec::with_capacity(2 * thresholds.len());
    for (i, d) in thresholds.iter().enumerate() {
        for (variant, p) in [("rN", profile.full[i]), ("rN/2", profile.half[i])] {
            rows.push(ResultRow {
                instance_id: instance.instance_id.clone(),
                n: instance.n,
                density: instance.density,
                epsilon: instance.epsilon,
                mode: mode.to_string(),
                r_or_source: r_or_source.to_string(),
                threshold: d.to_string(),
                variant: variant.to_string(),
                probability: p,
                window_points,
                seed,
            });
        }
    }
    rows
}
