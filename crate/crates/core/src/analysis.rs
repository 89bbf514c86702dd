//! Exponential scaling fits and the quantities derived from them: the
//! convergence-horizon radius and composed time-to-solution exponents.

use crate::{Error, Result};

/// Least-squares fit of P(n) = a * 2^(b n), i.e. an OLS line through
/// (n, log2 P).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub a: f64,
    /// Scaling exponent in bits per variable; negative means decay.
    pub b: f64,
    /// Root-mean-square residual in log2 space.
    pub residual: f64,
    pub n_min: f64,
    pub n_max: f64,
    pub points_used: usize,
    /// Points dropped for non-positive probability.
    pub excluded: usize,
}

/// Fits (n, probability) points. Zero-probability points cannot enter a log
/// fit; they are excluded and counted rather than silently dropped.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitResult> {
    if let Some(&(n, p)) = points.iter().find(|(n, p)| !n.is_finite() || !p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite fit point ({n}, {p})"
        )));
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, p)| p > 0.0)
        .map(|&(n, p)| (n, p.log2()))
        .collect();
    let excluded = points.len() - usable.len();
    if usable.len() < 2 {
        return Err(Error::InsufficientFitPoints {
            got: usable.len(),
            excluded,
        });
    }
    let m = usable.len() as f64;
    let x_mean = usable.iter().map(|(x, _)| x).sum::<f64>() / m;
    let y_mean = usable.iter().map(|(_, y)| y).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|(x, _)| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "cannot fit a slope through a single instance size".into(),
        ));
    }
    let sxy: f64 = usable
        .iter()
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let b = sxy / sxx;
    let intercept = y_mean - b * x_mean;
    let residual = (usable
        .iter()
        .map(|(x, y)| (y - (intercept + b * x)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    let n_min = usable.iter().map(|&(x, _)| x).fold(f64::INFINITY, f64::min);
    let n_max = usable
        .iter()
        .map(|&(x, _)| x)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        a: intercept.exp2(),
        b,
        residual,
        n_min,
        n_max,
        points_used: usable.len(),
        excluded,
    })
}

/// Convergence-horizon estimate over a grid of (r, fitted exponent b) pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct ChrEstimate {
    /// Largest grid r whose exponent is >= -tolerance (flat within
    /// tolerance), if any.
    pub r_c: Option<f64>,
    /// The full grid, sorted by r ascending.
    pub table: Vec<(f64, f64)>,
}

/// Finds the largest corruption fraction whose success probability is still
/// size-independent: b >= -tolerance.
pub fn estimate_chr(grid: &[(f64, f64)], tolerance: f64) -> Result<ChrEstimate> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be non-negative, got {tolerance}"
        )));
    }
    let mut table = grid.to_vec();
    table.sort_by(|x, y| x.0.total_cmp(&y.0));
    let r_c = table
        .iter()
        .rev()
        .find(|&&(_, b)| b >= -tolerance)
        .map(|&(r, _)| r);
    Ok(ChrEstimate { r_c, table })
}

/// Composes a seed-stage exponent measured at distance fraction `d` with a
/// downstream-stage exponent measured at corruption fraction `r`. The two
/// stages chain only when they refer to the same radius, so d must equal r.
pub fn compose_tts(d: f64, seed_b: f64, r: f64, downstream_b: f64) -> Result<f64> {
    if (d - r).abs() > 1e-9 {
        return Err(Error::MismatchedComposition { d, r });
    }
    Ok(seed_b + downstream_b)
}

/// Best composition over matched (d = r) pairs: returns (r, composed b)
/// maximizing the composed exponent (least negative = cheapest pipeline).
pub fn best_composition(
    seed: &[(f64, f64)],
    downstream: &[(f64, f64)],
) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &(d, sb) in seed {
        for &(r, db) in downstream {
            if (d - r).abs() <= 1e-9 {
                let composed = sb + db;
                if best.is_none_or(|(_, b)| composed > b) {
                    best = Some((r, composed));
                }
            }
        }
    }
    best.ok_or(Error::EmptyGrid)
}
