//! On-disk formats: JSONL instance/solution/trace files, CSV result tables
//! with provenance comments, and exact fraction labels for grid values.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Exact fractions

/// A non-negative rational used for grid values (corruption fractions,
/// distance thresholds). Carrying exact fractions keeps CSV labels like
/// "1/3" stable and makes grouping by threshold exact.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    pub fn new(num: u64, den: u64) -> Result<Frac> {
        if den == 0 {
            return Err(Error::Parse("fraction with zero denominator".into()));
        }
        let g = gcd(num.max(1), den); // gcd(0, d) normalizes to 0/1 below
        let g = if num == 0 { den } else { g };
        Ok(Frac {
            num: num / g,
            den: den / g,
        })
    }

    pub fn zero() -> Frac {
        Frac { num: 0, den: 1 }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Parses "1/3", "0.25", or "2".
    pub fn parse(s: &str) -> Result<Frac> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num: u64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad fraction numerator in {s:?}")))?;
            let den: u64 = b
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad fraction denominator in {s:?}")))?;
            return Frac::new(num, den);
        }
        if let Some((int, frac)) = s.split_once('.') {
            let digits = frac.len() as u32;
            if digits == 0 || digits > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad decimal {s:?}")));
            }
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse()
                    .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
            };
            let frac: u64 = frac.parse().unwrap();
            let den = 10u64.pow(digits);
            return Frac::new(int * den + frac, den);
        }
        let num: u64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad fraction {s:?}")))?;
        Ok(Frac { num, den: 1 })
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl std::fmt::Display for Frac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl std::str::FromStr for Frac {
    type Err = Error;
    fn from_str(s: &str) -> Result<Frac> {
        Frac::parse(s)
    }
}

// ---------------------------------------------------------------------------
// Output plumbing

/// Opens `path` for writing, refusing to clobber an existing file unless
/// `force` is set.
pub fn open_output(path: &Path, force: bool) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = if force {
        File::create(path)?
    } else {
        OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(path)
            .map_err(|e| {
                if e.kind() == std::io::ErrorKind::AlreadyExists {
                    std::io::Error::new(
                        std::io::ErrorKind::AlreadyExists,
                        format!("{} exists; pass --force to overwrite", path.display()),
                    )
                } else {
                    e
                }
            })?
    };
    Ok(BufWriter::new(file))
}

/// Writes items as JSON Lines. Returns the number of lines written.
pub fn write_jsonl<'a, T, I>(path: &Path, items: I, force: bool) -> Result<usize>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let mut w = open_output(path, force)?;
    let mut count = 0;
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
        count += 1;
    }
    w.flush()?;
    Ok(count)
}

/// Reads a JSON Lines file, skipping blank lines.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = BufReader::new(File::open(path)?);
    let mut items = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line)?);
    }
    Ok(items)
}

/// Writes serializable rows as CSV, preceded by `# `-prefixed provenance
/// comment lines.
pub fn write_csv<S: Serialize>(
    path: &Path,
    provenance: &[String],
    rows: &[S],
    force: bool,
) -> Result<()> {
    let mut w = open_output(path, force)?;
    for line in provenance {
        writeln!(w, "# {line}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

/// Reads CSV rows, ignoring `#` comment lines.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Result rows

/// One success probability from a windowed quantum run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub n: usize,
    pub density: f64,
    pub epsilon: f64,
    /// "TAQC" or "ISTSAT".
    pub mode: String,
    /// Corruption fraction label for seeded runs, "-" for the plain anneal.
    pub r_or_source: String,
    /// Distance threshold label d.
    pub threshold: String,
    /// "rN" for radius round(d n), "rN/2" for round(d n / 2).
    pub variant: String,
    pub probability: f64,
    pub window_points: usize,
    pub seed: u64,
}

/// One exact expected-energy measurement from a windowed quantum run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub instance_id: String,
    pub n: usize,
    pub density: f64,
    pub epsilon: f64,
    /// "TAQC" or "ISTSAT".
    pub mode: String,
    /// Corruption fraction label for seeded runs, "-" for the plain anneal.
    pub r_or_source: String,
    /// Window-averaged expected energy sum_z p_z E_z.
    pub mean_energy: f64,
    /// Certified ground energy when a solution set was supplied, otherwise
    /// the planted energy.
    pub ground_energy: i64,
    /// mean_energy / ground_energy; 1 means the state sits on the ground
    /// manifold.
    pub energy_ratio: f64,
    pub window_points: usize,
    pub seed: u64,
}

/// One aggregated SGC instance result. Threshold columns are dynamic, so
/// this row carries them as labeled pairs and uses the writer below.
#[derive(Clone, Debug, PartialEq)]
pub struct SgcRow {
    pub instance_id: String,
    pub n: usize,
    pub density: f64,
    /// "random" or the warm-start fraction label.
    pub start: String,
    pub trials: usize,
    pub p_gs: f64,
    pub mean_steps: f64,
    /// (threshold label, P(D_H <= round(d n)) + p_gs) pairs.
    pub threshold_probs: Vec<(String, f64)>,
}

/// Writes SGC rows with one `d_<label>` column per threshold.
pub fn write_sgc_csv(
    path: &Path,
    provenance: &[String],
    rows: &[SgcRow],
    force: bool,
) -> Result<()> {
    let mut w = open_output(path, force)?;
    for line in provenance {
        writeln!(w, "# {line}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    let labels: Vec<String> = rows
        .first()
        .map(|r| r.threshold_probs.iter().map(|(l, _)| l.clone()).collect())
        .unwrap_or_default();
    let mut header = vec![
        "instance_id".to_string(),
        "n".into(),
        "density".into(),
        "start".into(),
        "trials".into(),
        "p_gs".into(),
        "mean_steps".into(),
    ];
    header.extend(labels.iter().map(|l| format!("d_{l}")));
    csv.write_record(&header)?;
    for row in rows {
        if row.threshold_probs.len() != labels.len()
            || row
                .threshold_probs
                .iter()
                .zip(&labels)
                .any(|((l, _), expect)| l != expect)
        {
            return Err(Error::InvalidParameter(
                "SGC rows have inconsistent threshold columns".into(),
            ));
        }
        let mut rec = vec![
            row.instance_id.clone(),
            row.n.to_string(),
            format_f64(row.density),
            row.start.clone(),
            row.trials.to_string(),
            format_f64(row.p_gs),
            format_f64(row.mean_steps),
        ];
        rec.extend(row.threshold_probs.iter().map(|(_, p)| format_f64(*p)));
        csv.write_record(&rec)?;
    }
    csv.flush()?;
    Ok(())
}

/// Reads SGC rows written by [`write_sgc_csv`].
pub fn read_sgc_csv(path: &Path) -> Result<Vec<SgcRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let labels: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.strip_prefix("d_").map(|l| (i, l.to_string())))
        .collect();
    let field = |rec: &csv::StringRecord, name: &str| -> Result<String> {
        headers
            .iter()
            .position(|h| h == name)
            .and_then(|i| rec.get(i))
            .map(str::to_string)
            .ok_or_else(|| Error::Parse(format!("missing column {name}")))
    };
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let parse_f =
            |s: String| -> Result<f64> { s.parse().map_err(|_| Error::Parse(format!("bad float {s:?}"))) };
        rows.push(SgcRow {
            instance_id: field(&rec, "instance_id")?,
            n: field(&rec, "n")?
                .parse()
                .map_err(|_| Error::Parse("bad n".into()))?,
            density: parse_f(field(&rec, "density")?)?,
            start: field(&rec, "start")?,
            trials: field(&rec, "trials")?
                .parse()
                .map_err(|_| Error::Parse("bad trials".into()))?,
            p_gs: parse_f(field(&rec, "p_gs")?)?,
            mean_steps: parse_f(field(&rec, "mean_steps")?)?,
            threshold_probs: labels
                .iter()
                .map(|(i, l)| {
                    let v = rec
                        .get(*i)
                        .ok_or_else(|| Error::Parse(format!("missing column d_{l}")))?;
                    Ok((
                        l.clone(),
                        v.parse()
                            .map_err(|_| Error::Parse(format!("bad float {v:?}")))?,
                    ))
                })
                .collect::<Result<_>>()?,
        });
    }
    Ok(rows)
}

/// One fitted exponential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub density: f64,
    /// "TAQC", "ISTSAT", "SGC", or "SGC-WARM".
    pub mode: String,
    /// Threshold/corruption label this fit was taken at ("0" = ground state).
    pub r_or_d: String,
    /// "rN" or "rN/2".
    pub variant: String,
    pub a: f64,
    pub b: f64,
    pub residual: f64,
    pub n_min: f64,
    pub n_max: f64,
    pub points_used: usize,
    pub excluded: usize,
}

/// One convergence-horizon grid entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChrRow {
    pub density: f64,
    pub variant: String,
    pub r: String,
    pub b: f64,
    /// True on the row selected as r_c.
    pub selected: bool,
}

/// One composed pipeline exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsRow {
    pub pipeline: String,
    pub density: f64,
    pub exponent: f64,
}

/// Shortest-roundtrip float formatting (Rust's f64 Display), for the
/// hand-assembled CSV records above.
pub fn format_f64(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;

    #[test]
    fn frac_parsing_and_labels() {
        assert_eq!(Frac::parse("1/3").unwrap(), Frac { num: 1, den: 3 });
        assert_eq!(Frac::parse("0.25").unwrap(), Frac { num: 1, den: 4 });
        assert_eq!(Frac::parse("0.3").unwrap(), Frac { num: 3, den: 10 });
        assert_eq!(Frac::parse("2").unwrap(), Frac { num: 2, den: 1 });
        assert_eq!(Frac::parse("2/4").unwrap(), Frac { num: 1, den: 2 });
        assert_eq!(Frac::parse("0").unwrap(), Frac::zero());
        assert_eq!(Frac::parse("0.0").unwrap(), Frac::zero());
        assert_eq!(Frac::parse("1/3").unwrap().to_string(), "1/3");
        assert_eq!(Frac::parse("0.3").unwrap().to_string(), "3/10");
        assert_eq!(Frac::parse("2").unwrap().to_string(), "2");
        assert!((Frac::parse("1/3").unwrap().value() - 1.0 / 3.0).abs() < 1e-15);
        assert!(Frac::parse("1/0").is_err());
        assert!(Frac::parse("x").is_err());
        assert!(Frac::parse("0.x5").is_err());
    }

    #[test]
    fn jsonl_roundtrip_and_force() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("instances.jsonl");
        let items: Vec<Instance> = (0..3)
            .map(|s| Instance::generate(8, 2.0, 0.1, s).unwrap())
            .collect();
        assert_eq!(write_jsonl(&path, &items, false).unwrap(), 3);
        let back: Vec<Instance> = read_jsonl(&path).unwrap();
        assert_eq!(items, back);
        // Refuses to clobber without force, succeeds with it.
        assert!(write_jsonl(&path, &items, false).is_err());
        assert_eq!(write_jsonl(&path, &items, true).unwrap(), 3);
    }

    #[test]
    fn csv_roundtrip_with_provenance() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let rows = vec![ResultRow {
            instance_id: "x".into(),
            n: 10,
            density: 4.0,
            epsilon: 0.1,
            mode: "ISTSAT".into(),
            r_or_source: "1/4".into(),
            threshold: "1/4".into(),
            variant: "rN".into(),
            probability: 0.5,
            window_points: 8,
            seed: 42,
        }];
        write_csv(&path, &["istsat v0 test".into()], &rows, false).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# istsat v0 test\n"));
        assert!(text.contains("instance_id,n,density,epsilon,mode,r_or_source,threshold,variant,probability,window_points,seed"));
        let back: Vec<ResultRow> = read_csv(&path).unwrap();
        assert_eq!(rows, back);
    }

    #[test]
    fn sgc_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sgc.csv");
        let rows = vec![SgcRow {
            instance_id: "y".into(),
            n: 16,
            density: 2.0,
            start: "random".into(),
            trials: 1000,
            p_gs: 0.125,
            mean_steps: 20.5,
            threshold_probs: vec![("0".into(), 0.125), ("1/8".into(), 0.25)],
        }];
        write_sgc_csv(&path, &["prov".into()], &rows, false).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("p_gs,mean_steps,d_0,d_1/8"));
        let back = read_sgc_csv(&path).unwrap();
        assert_eq!(rows, back);
    }

    #[test]
    fn float_labels_are_shortest_roundtrip() {
        assert_eq!(format_f64(4.0), "4");
        assert_eq!(format_f64(0.1), "0.1");
        assert_eq!(format_f64(1.5), "1.5");
        assert_eq!(format_f64(0.1250), "0.125");
    }
}
