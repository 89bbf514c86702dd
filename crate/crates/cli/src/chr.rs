//! `chr`: convergence-horizon radius — the largest corruption fraction whose
//! seeded success probability is size-independent within tolerance.

use std::path::PathBuf;

use clap::Args;
use istsat_core::analysis::estimate_chr;
use istsat_core::formats::{format_f64, read_csv, write_csv, ChrRow, FitRow, Frac};

use crate::common::{
    frac_list, parse_unit_frac, provenance, require_out, CliError, CliResult, Global,
};

#[derive(Args, Debug)]
pub struct ChrArgs {
    /// Fit table from `fit`.
    #[arg(long)]
    pub fits: PathBuf,

    #[arg(long)]
    pub density: f64,

    /// Fit rows to scan (mode column).
    #[arg(long, default_value = "ISTSAT")]
    pub mode: String,

    /// Radius convention (variant column).
    #[arg(long, default_value = "rN")]
    pub variant: String,

    /// Corruption grid to scan.
    #[arg(long, value_delimiter = ',', value_parser = parse_unit_frac,
          default_value = "1/8,1/4,3/10,1/3")]
    pub grid: Vec<Frac>,

    /// Flatness tolerance on the exponent b.
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
}

pub fn execute(args: &ChrArgs, global: &Global) -> CliResult<()> {
    let out = require_out(global)?;
    let fits: Vec<FitRow> = read_csv(&args.fits)?;

    let mut grid = args.grid.clone();
    grid.sort_by(|a, b| a.value().total_cmp(&b.value()));
    grid.dedup();

    let mut pairs = Vec::with_capacity(grid.len());
    for r in &grid {
        let label = r.to_string();
        let row = fits
            .iter()
            .find(|f| {
                f.density.total_cmp(&args.density).is_eq()
                    && f.mode == args.mode
                    && f.variant == args.variant
                    && f.r_or_d == label
            })
            .ok_or_else(|| {
                CliError::invalid(format!(
                    "no fit row for density {} mode {} variant {} at r = {label}",
                    format_f64(args.density),
                    args.mode,
                    args.variant
                ))
            })?;
        pairs.push((r.value(), row.b));
    }

    let est = estimate_chr(&pairs, args.tolerance)?;
    let rows: Vec<ChrRow> = grid
        .iter()
        .zip(&est.table)
        .map(|(r, &(rv, b))| ChrRow {
            density: args.density,
            variant: args.variant.clone(),
            r: r.to_string(),
            b,
            selected: est.r_c.is_some_and(|rc| rc == rv),
        })
        .collect();

    let prov = provenance(
        "chr",
        &[
            ("density", format_f64(args.density)),
            ("mode", args.mode.clone()),
            ("variant", args.variant.clone()),
            ("grid", frac_list(&grid)),
            ("tolerance", format_f64(args.tolerance)),
        ],
    );
    write_csv(out, &prov, &rows, global.force)?;

    let label = rows
        .iter()
        .find(|row| row.selected)
        .map_or_else(|| "none".to_string(), |row| row.r.clone());
    println!("r_c = {label}");
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}
