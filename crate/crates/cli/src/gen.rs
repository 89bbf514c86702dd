//! `gen`: planted-instance ensembles as JSON Lines.

use clap::Args;
use istsat_core::formats::write_jsonl;
use istsat_core::instance::Instance;
use istsat_core::util::{derive_seed, tag};

use crate::common::{require_out, try_map_ordered, CliResult, Global};

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Number of variables.
    #[arg(long)]
    pub n: usize,

    /// Constraints per variable; the instance carries round(density * n)
    /// distinct triples.
    #[arg(long)]
    pub density: f64,

    /// Fraction of constraints the planted string violates.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,

    /// Instances to generate.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

pub fn execute(args: &GenArgs, global: &Global) -> CliResult<()> {
    let out = require_out(global)?;
    let instances = ensemble(args.n, args.density, args.epsilon, args.count, global.seed)?;
    let written = write_jsonl(out, &instances, global.force)?;
    println!("wrote {written} instances to {}", out.display());
    Ok(())
}

/// Generates `count` instances; member i draws from a seed derived from
/// (master, n, density, epsilon, i), so an ensemble can be extended without
/// reshuffling its earlier members.
pub fn ensemble(
    n: usize,
    density: f64,
    epsilon: f64,
    count: usize,
    master: u64,
) -> CliResult<Vec<Instance>> {
    let indices: Vec<u64> = (0..count as u64).collect();
    try_map_ordered(&indices, |&i| {
        let seed = derive_seed(
            master,
            &[
                tag("instance"),
                n as u64,
                density.to_bits(),
                epsilon.to_bits(),
                i,
            ],
        );
        Instance::generate(n, density, epsilon, seed).map_err(Into::into)
    })
}
