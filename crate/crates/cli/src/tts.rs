//! `tts`: composed time-to-solution exponents for the four solver pipelines —
//! direct classical descent, the plain anneal, anneal-seeded descent, and
//! anneal-seeded iterated runs at the convergence horizon.

use std::path::PathBuf;

use clap::Args;
use istsat_core::analysis::{best_composition, compose_tts};
use istsat_core::formats::{format_f64, read_csv, write_csv, ChrRow, FitRow, Frac, TtsRow};

use crate::common::{provenance, require_out, CliError, CliResult, Global};

#[derive(Args, Debug)]
pub struct TtsArgs {
    /// Fit tables (repeat the flag to combine quantum and descent fits).
    #[arg(long, required = true)]
    pub fits: Vec<PathBuf>,

    /// Convergence-horizon table from `chr`.
    #[arg(long)]
    pub chr: PathBuf,

    #[arg(long)]
    pub density: f64,
}

pub fn execute(args: &TtsArgs, global: &Global) -> CliResult<()> {
    let out = require_out(global)?;
    let mut fits: Vec<FitRow> = Vec::new();
    for path in &args.fits {
        fits.extend(read_csv::<FitRow>(path)?);
    }
    let fits: Vec<&FitRow> = fits
        .iter()
        .filter(|f| f.density.total_cmp(&args.density).is_eq())
        .collect();

    let find = |mode: &str, variant: &str, r_or_d: &str| -> Option<f64> {
        fits.iter()
            .find(|f| f.mode == mode && f.variant == variant && f.r_or_d == r_or_d)
            .map(|f| f.b)
    };

    let mut rows = Vec::new();

    let sgc_b = find("SGC", "pgs", "0").ok_or_else(|| {
        CliError::invalid("no SGC random-start p_gs fit at this density")
    })?;
    rows.push(TtsRow {
        pipeline: "SGC".into(),
        density: args.density,
        exponent: sgc_b,
    });

    let taqc_b = find("TAQC", "rN", "0").ok_or_else(|| {
        CliError::invalid("no TAQC ground-state fit at this density")
    })?;
    rows.push(TtsRow {
        pipeline: "TAQC".into(),
        density: args.density,
        exponent: taqc_b,
    });

    // Anneal-seeded descent: the cheapest matched composition of a TAQC
    // distance profile at radius d with a warm-start descent launched at
    // the same radius.
    let seed_pairs = radius_pairs(&fits, "TAQC", "rN");
    let warm_pairs = radius_pairs(&fits, "SGC-WARM", "pgs");
    match best_composition(&seed_pairs, &warm_pairs) {
        Ok((r, b)) => {
            rows.push(TtsRow {
                pipeline: "TAQC->SGC".into(),
                density: args.density,
                exponent: b,
            });
            println!("TAQC->SGC composed at r = {}", format_f64(r));
        }
        Err(_) => eprintln!(
            "warning: no matched (TAQC radius, warm-start) pair; TAQC->SGC row skipped"
        ),
    }

    // Anneal-seeded iterated runs: by definition of the convergence horizon,
    // the iterated stage contributes exponent ~ 0 at r <= r_c, so the
    // pipeline inherits the TAQC exponent at d = r_c.
    let chr_rows: Vec<ChrRow> = read_csv(&args.chr)?;
    let selected = chr_rows
        .iter()
        .filter(|c| c.density.total_cmp(&args.density).is_eq())
        .find(|c| c.selected);
    match selected {
        Some(c) => {
            let seed_b = find("TAQC", "rN", &c.r).ok_or_else(|| {
                CliError::invalid(format!("no TAQC fit at the convergence radius {}", c.r))
            })?;
            let d = Frac::parse(&c.r)?.value();
            rows.push(TtsRow {
                pipeline: "TAQC->ISTSAT".into(),
                density: args.density,
                exponent: compose_tts(d, seed_b, d, 0.0)?,
            });
            println!("TAQC->ISTSAT composed at r_c = {}", c.r);
        }
        None => eprintln!(
            "warning: no convergence radius at density {}; TAQC->ISTSAT row skipped",
            format_f64(args.density)
        ),
    }

    let prov = provenance(
        "tts",
        &[
            ("density", format_f64(args.density)),
        ],
    );
    write_csv(out, &prov, &rows, global.force)?;
    for row in &rows {
        println!("{}: b = {}", row.pipeline, format_f64(row.exponent));
    }
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

/// (radius value, exponent) pairs for one (mode, variant), excluding the
/// ground-state radius 0, which composes with nothing.
fn radius_pairs(fits: &[&FitRow], mode: &str, variant: &str) -> Vec<(f64, f64)> {
    fits.iter()
        .filter(|f| f.mode == mode && f.variant == variant && f.r_or_d != "0")
        .filter_map(|f| Frac::parse(&f.r_or_d).ok().map(|fr| (fr.value(), f.b)))
        .collect()
}
