//! `fit`: exponential scaling fits P(n) = a 2^(b n) over result tables.
//!
//! Quantum tables group by (density, mode, radius, variant) and descent
//! tables by (density, start) and column; each group's per-size ensemble
//! means feed one log2-linear least-squares fit. Seeded quantum rows are
//! fitted only where the profile radius matches the corruption fraction —
//! the matched diagonal is what every downstream analysis consumes.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use clap::Args;
use istsat_core::analysis::fit_exponential;
use istsat_core::formats::{read_csv, read_sgc_csv, write_csv, FitRow, Frac, ResultRow};

use crate::common::{provenance, require_out, CliError, CliResult, Global};

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Results CSV from `run`, `sgc`, or `sweep` (schema auto-detected).
    #[arg(long)]
    pub input: PathBuf,

    /// Keep only sizes n >= this in the fits.
    #[arg(long)]
    pub n_min: Option<usize>,

    /// Keep only sizes n <= this in the fits.
    #[arg(long)]
    pub n_max: Option<usize>,
}

pub fn execute(args: &FitArgs, global: &Global) -> CliResult<()> {
    let out = require_out(global)?;
    let rows = fit_table(&args.input, args.n_min, args.n_max)?;
    let prov = provenance(
        "fit",
        &[
            ("n_min", opt_label(args.n_min)),
            ("n_max", opt_label(args.n_max)),
        ],
    );
    write_csv(out, &prov, &rows, global.force)?;
    println!("wrote {} fits to {}", rows.len(), out.display());
    Ok(())
}

fn opt_label(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

/// Group identity within a results table.
#[derive(Clone, PartialEq, Eq, Hash)]
struct GroupKey {
    /// Bit pattern of the density, exact across CSV round trips.
    density: u64,
    mode: String,
    r_or_d: String,
    variant: String,
}

type Groups = HashMap<GroupKey, BTreeMap<usize, (f64, usize)>>;

fn accumulate(groups: &mut Groups, key: GroupKey, n: usize, p: f64) {
    let cell = groups.entry(key).or_default().entry(n).or_insert((0.0, 0));
    cell.0 += p;
    cell.1 += 1;
}

/// Fits every group in a results CSV. Groups that cannot be fitted (fewer
/// than two sizes with positive ensemble means) are reported on stderr and
/// skipped; an input yielding no fit at all is an error.
pub fn fit_table(
    input: &Path,
    n_min: Option<usize>,
    n_max: Option<usize>,
) -> CliResult<Vec<FitRow>> {
    let keep = |n: usize| n_min.is_none_or(|lo| n >= lo) && n_max.is_none_or(|hi| n <= hi);
    let groups = match sniff(input)? {
        TableKind::Quantum => quantum_groups(input, keep)?,
        TableKind::Descent => descent_groups(input, keep)?,
    };

    // Deterministic output order: density, mode, radius value, variant.
    let mut keys: Vec<&GroupKey> = groups.keys().collect();
    keys.sort_by(|a, b| {
        f64::from_bits(a.density)
            .total_cmp(&f64::from_bits(b.density))
            .then_with(|| a.mode.cmp(&b.mode))
            .then_with(|| label_value(&a.r_or_d).total_cmp(&label_value(&b.r_or_d)))
            .then_with(|| a.variant.cmp(&b.variant))
    });

    let mut rows = Vec::new();
    for key in keys {
        let points: Vec<(f64, f64)> = groups[key]
            .iter()
            .map(|(&n, &(sum, count))| (n as f64, sum / count as f64))
            .collect();
        match fit_exponential(&points) {
            Ok(f) => rows.push(FitRow {
                density: f64::from_bits(key.density),
                mode: key.mode.clone(),
                r_or_d: key.r_or_d.clone(),
                variant: key.variant.clone(),
                a: f.a,
                b: f.b,
                residual: f.residual,
                n_min: f.n_min,
                n_max: f.n_max,
                points_used: f.points_used,
                excluded: f.excluded,
            }),
            Err(e) => eprintln!(
                "warning: skipping unfittable group (density {}, {}, r_or_d {}, {}): {e}",
                f64::from_bits(key.density),
                key.mode,
                key.r_or_d,
                key.variant
            ),
        }
    }
    if rows.is_empty() {
        return Err(CliError::invalid("no fittable groups in the input table"));
    }
    Ok(rows)
}

enum TableKind {
    Quantum,
    Descent,
}

/// Distinguishes the two CSV schemas by header columns.
fn sniff(input: &Path) -> CliResult<TableKind> {
    let reader = BufReader::new(File::open(input).map_err(istsat_core::Error::from)?);
    for line in reader.lines() {
        let line = line.map_err(istsat_core::Error::from)?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.contains(&"mode") && fields.contains(&"probability") {
            return Ok(TableKind::Quantum);
        }
        if fields.contains(&"start") && fields.contains(&"p_gs") {
            return Ok(TableKind::Descent);
        }
        return Err(CliError::invalid(format!(
            "unrecognized results header in {}",
            input.display()
        )));
    }
    Err(CliError::invalid(format!(
        "no header row in {}",
        input.display()
    )))
}

fn quantum_groups(input: &Path, keep: impl Fn(usize) -> bool) -> CliResult<Groups> {
    let mut groups = Groups::new();
    let mut unmatched = 0usize;
    for row in read_csv::<ResultRow>(input)? {
        if !keep(row.n) {
            continue;
        }
        // Seeded rows only count on the matched diagonal d = r.
        if row.mode == "ISTSAT" && row.r_or_source != row.threshold {
            unmatched += 1;
            continue;
        }
        accumulate(
            &mut groups,
            GroupKey {
                density: row.density.to_bits(),
                mode: row.mode,
                r_or_d: row.threshold,
                variant: row.variant,
            },
            row.n,
            row.probability,
        );
    }
    if unmatched > 0 {
        eprintln!("note: skipped {unmatched} seeded rows with threshold != r");
    }
    Ok(groups)
}

fn descent_groups(input: &Path, keep: impl Fn(usize) -> bool) -> CliResult<Groups> {
    let mut groups = Groups::new();
    let mut warm_columns = 0usize;
    for row in read_sgc_csv(input)? {
        if !keep(row.n) {
            continue;
        }
        let random = row.start == "random";
        let (mode, r_or_d) = if random {
            ("SGC".to_string(), "0".to_string())
        } else {
            ("SGC-WARM".to_string(), row.start.clone())
        };
        accumulate(
            &mut groups,
            GroupKey {
                density: row.density.to_bits(),
                mode: mode.clone(),
                r_or_d,
                variant: "pgs".into(),
            },
            row.n,
            row.p_gs,
        );
        // Threshold columns measure distance to the planted string; they are
        // meaningful for random starts (descent-basin profiles) but would
        // conflate the start radius with the target radius for warm starts.
        if random {
            for (label, p) in &row.threshold_probs {
                accumulate(
                    &mut groups,
                    GroupKey {
                        density: row.density.to_bits(),
                        mode: mode.clone(),
                        r_or_d: label.clone(),
                        variant: "dN+pgs".into(),
                    },
                    row.n,
                    *p,
                );
            }
        } else {
            warm_columns += row.threshold_probs.len();
        }
    }
    if warm_columns > 0 {
        eprintln!("note: ignored {warm_columns} threshold cells on warm-start rows");
    }
    Ok(groups)
}

/// Numeric value of an r_or_d label, for ordering fits.
fn label_value(label: &str) -> f64 {
    Frac::parse(label).map(|f| f.value()).unwrap_or(f64::MAX)
}
