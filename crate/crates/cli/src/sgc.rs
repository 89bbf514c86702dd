//! `sgc`: semi-greedy descent trials over an instance file.

use std::path::PathBuf;

use clap::Args;
use istsat_core::classical::{sgc_trials, SgcConfig};
use istsat_core::formats::{read_jsonl, write_sgc_csv, Frac, SgcRow};
use istsat_core::instance::{Instance, SolutionSet};
use istsat_core::util::{derive_seed, tag};

use crate::common::{
    frac_list, lookup, parse_unit_frac, provenance, require_out, solutions_index, try_map_ordered,
    CliResult, Global,
};

#[derive(Args, Debug)]
pub struct SgcArgs {
    /// Instance JSONL produced by `gen`.
    #[arg(long)]
    pub instances: PathBuf,

    /// Certified solutions JSONL; the planted energy stands in when omitted.
    #[arg(long)]
    pub solutions: Option<PathBuf>,

    /// Descent trials per instance.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,

    /// Warm-start corruption fraction; starts are uniform when omitted.
    #[arg(long, value_parser = parse_unit_frac)]
    pub warm_r: Option<Frac>,

    /// Distance fractions for extra threshold-success columns.
    #[arg(long, value_delimiter = ',', value_parser = parse_unit_frac)]
    pub thresholds: Vec<Frac>,
}

pub fn execute(args: &SgcArgs, global: &Global) -> CliResult<()> {
    let out = require_out(global)?;
    let instances: Vec<Instance> = read_jsonl(&args.instances)?;
    let index = args.solutions.as_deref().map(solutions_index).transpose()?;
    let truth = if index.is_some() { "certified" } else { "planted" };

    let rows = try_map_ordered(&instances, |inst| {
        sgc_row(
            inst,
            lookup(index.as_ref(), inst)?,
            args.trials,
            args.warm_r,
            &args.thresholds,
            global.seed,
        )
    })?;
    let prov = provenance(
        "sgc",
        &[
            ("start", start_label(args.warm_r)),
            ("trials", args.trials.to_string()),
            ("thresholds", frac_list(&args.thresholds)),
            ("truth", truth.into()),
            ("seed", global.seed.to_string()),
        ],
    );
    write_sgc_csv(out, &prov, &rows, global.force)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

/// Start-column label: the warm-start fraction, or "random".
pub fn start_label(warm_r: Option<Frac>) -> String {
    match warm_r {
        Some(f) => f.to_string(),
        None => "random".into(),
    }
}

/// Aggregated descent statistics for one instance. Trial randomness derives
/// from (master, start label) plus the instance id and trial index inside
/// the core, so rows are independent of file order and worker count.
pub fn sgc_row(
    instance: &Instance,
    solutions: Option<&SolutionSet>,
    trials: usize,
    warm_r: Option<Frac>,
    thresholds: &[Frac],
    master: u64,
) -> CliResult<SgcRow> {
    let start = start_label(warm_r);
    let mut config = SgcConfig::for_size(instance.n);
    config.trials = trials;
    config.warm_r = warm_r.map(|f| f.value());
    config.seed = derive_seed(master, &[tag("sgc"), tag(&start)]);
    let values: Vec<f64> = thresholds.iter().map(Frac::value).collect();
    let res = sgc_trials(instance, solutions, &config, &values)?;
    Ok(SgcRow {
        instance_id: res.instance_id,
        n: instance.n,
        density: instance.density,
        start,
        trials: res.trials,
        p_gs: res.p_gs,
        mean_steps: res.mean_steps,
        threshold_probs: thresholds
            .iter()
            .map(Frac::to_string)
            .zip(res.threshold_probs.iter().copied())
            .collect(),
    })
}
