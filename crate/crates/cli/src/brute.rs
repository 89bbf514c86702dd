//! `brute`: certified ground states and ensemble degeneracy statistics.

use std::path::PathBuf;

use clap::Args;
use istsat_core::formats::{read_jsonl, write_csv, write_jsonl};
use istsat_core::instance::{solution_statistics, Instance, SolutionSet};
use serde::Serialize;

use crate::common::{provenance, require_out, try_map_ordered, CliResult, Global};

#[derive(Args, Debug)]
pub struct BruteArgs {
    /// Instance JSONL produced by `gen`.
    #[arg(long)]
    pub instances: PathBuf,

    /// Also write ensemble degeneracy statistics to this CSV.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

/// One statistics record: a summary scalar or a histogram bin.
#[derive(Serialize)]
struct StatRow {
    section: &'static str,
    key: String,
    value: f64,
}

pub fn execute(args: &BruteArgs, global: &Global) -> CliResult<()> {
    let out = require_out(global)?;
    let instances: Vec<Instance> = read_jsonl(&args.instances)?;
    let sets = certify(&instances)?;
    let written = write_jsonl(out, &sets, global.force)?;
    println!("certified {written} instances to {}", out.display());

    if let Some(stats_path) = &args.stats {
        let rows = stat_rows(&sets)?;
        let prov = provenance("brute-stats", &[]);
        write_csv(stats_path, &prov, &rows, global.force)?;
        println!("wrote {} statistics rows to {}", rows.len(), stats_path.display());
    }
    Ok(())
}

/// Brute-forces every instance, preserving input order.
pub fn certify(instances: &[Instance]) -> CliResult<Vec<SolutionSet>> {
    try_map_ordered(instances, |inst| inst.brute_force().map_err(Into::into))
}

/// Flattens ensemble statistics into (section, key, value) records: summary
/// scalars, the ground-state-count histogram, and the within-set pairwise
/// Hamming-distance histogram.
fn stat_rows(sets: &[SolutionSet]) -> CliResult<Vec<StatRow>> {
    if sets.is_empty() {
        return Ok(Vec::new());
    }
    let stats = solution_statistics(sets)?;
    let mut rows = vec![
        StatRow {
            section: "summary",
            key: "instances".into(),
            value: stats.instances as f64,
        },
        StatRow {
            section: "summary",
            key: "mean_count".into(),
            value: stats.mean_count,
        },
        StatRow {
            section: "summary",
            key: "multi_fraction".into(),
            value: stats.multi_fraction,
        },
    ];
    for (count, freq) in &stats.count_hist {
        rows.push(StatRow {
            section: "count_hist",
            key: count.to_string(),
            value: *freq as f64,
        });
    }
    for (dist, freq) in &stats.pairwise_hist {
        rows.push(StatRow {
            section: "pairwise_hist",
            key: dist.to_string(),
            value: *freq as f64,
        });
    }
    Ok(rows)
}
