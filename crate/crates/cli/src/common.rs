//! Shared command plumbing: exit-code mapping, deterministic provenance
//! lines, fraction flags, and order-preserving parallel maps.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use istsat_core::engine::SchedulePreset;
use istsat_core::formats::{read_jsonl, Frac};
use istsat_core::instance::{BitString, Instance, SolutionSet};
use istsat_core::util::{splitmix64, tag};

/// Options shared by every command.
pub struct Global {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub force: bool,
    pub preset: SchedulePreset,
}

/// Command failure classes: usage errors exit 1, parameter and cap
/// validation exits 2, I/O and (de)serialization exit 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(istsat_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> CliError {
        CliError::Core(istsat_core::Error::InvalidParameter(msg.into()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_io() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<istsat_core::Error> for CliError {
    fn from(e: istsat_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// The output path, which most commands require.
pub fn require_out(global: &Global) -> CliResult<&Path> {
    global
        .out
        .as_deref()
        .ok_or_else(|| CliError::usage("this command writes output; pass --out <PATH>"))
}

/// clap value parser for exact fractions in [0, 1]: "1/3", "0.25", "0".
pub fn parse_unit_frac(s: &str) -> Result<Frac, String> {
    let f = Frac::parse(s).map_err(|e| e.to_string())?;
    if f.value() > 1.0 {
        return Err(format!("fraction {f} lies outside [0, 1]"));
    }
    Ok(f)
}

/// Short flag-style name for a schedule preset, used in provenance lines.
pub fn preset_label(preset: SchedulePreset) -> &'static str {
    match preset {
        SchedulePreset::Default => "default",
        SchedulePreset::LowFrequency => "lowfreq",
    }
}

/// Renders a fraction grid for provenance lines.
pub fn frac_list(fracs: &[Frac]) -> String {
    fracs
        .iter()
        .map(Frac::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Provenance comment lines for output CSVs: tool version plus a hash of the
/// semantic parameters, then the parameters themselves. Worker counts and
/// file paths (inputs and outputs alike) are deliberately excluded so reruns
/// that change only scheduling or location produce identical table bytes.
pub fn provenance(command: &str, params: &[(&str, String)]) -> Vec<String> {
    let mut h = tag(command);
    let mut rendered = Vec::with_capacity(params.len());
    for (key, value) in params {
        let pair = format!("{key}={value}");
        h = splitmix64(h ^ tag(&pair));
        rendered.push(pair);
    }
    let detail = if rendered.is_empty() {
        command.to_string()
    } else {
        format!("{command} {}", rendered.join(" "))
    };
    vec![
        format!("istsat {} config={h:016x}", env!("CARGO_PKG_VERSION")),
        detail,
    ]
}

/// Maps `f` over `items` — in parallel under the `parallel` feature — and
/// returns results in input order, so downstream files never depend on
/// scheduling.
pub fn try_map_ordered<T, R, F>(items: &[T], f: F) -> CliResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> CliResult<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Loads certified solution sets and indexes them by instance id.
pub fn solutions_index(path: &Path) -> CliResult<HashMap<String, SolutionSet>> {
    let sets: Vec<SolutionSet> = read_jsonl(path)?;
    Ok(sets.into_iter().map(|s| (s.instance_id.clone(), s)).collect())
}

/// The certified set for an instance. Passing a solutions file and then
/// running instances absent from it is almost certainly a pipeline mistake,
/// so that case errors instead of silently downgrading to the planted truth.
pub fn lookup<'a>(
    index: Option<&'a HashMap<String, SolutionSet>>,
    instance: &Instance,
) -> CliResult<Option<&'a SolutionSet>> {
    match index {
        None => Ok(None),
        Some(map) => map.get(&instance.instance_id).map(Some).ok_or_else(|| {
            CliError::invalid(format!(
                "no certified solutions for {}; re-run brute or drop --solutions",
                instance.instance_id
            ))
        }),
    }
}

/// Distance targets for success profiles: the certified ground-state set
/// when available, otherwise the planted string alone.
pub fn targets(instance: &Instance, solutions: Option<&SolutionSet>) -> Vec<BitString> {
    match solutions {
        Some(s) => s.ground_states.clone(),
        None => vec![instance.planted.clone()],
    }
}
