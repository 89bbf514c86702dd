//! The measurement protocol built on the engine: window-averaged final
//! distributions, Hamming-distance success profiles, and the iterative
//! seeded loop that feeds measured bitstrings back in as drive phases.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{trotter_evolve_with_energies, PhasePattern, ScheduleParams};
use crate::instance::{hamming, BitString, Instance, SolutionSet};
use crate::util::{derive_seed, round_half_even, tag};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Patterns

/// Phase pattern encoding a bitstring: phi_j = pi * x_j, so the drive is
/// phase-locked to the target configuration.
pub fn pattern_from_string(x: &BitString) -> PhasePattern {
    PhasePattern::from_offsets(x.bits().to_vec()).expect("bits are 0/1")
}

/// The planted pattern with exactly round(r * n) distinct offsets flipped,
/// at positions chosen uniformly. Deterministic in (g, r, seed).
pub fn corrupt_pattern(g: &BitString, r: f64, seed: u64) -> Result<PhasePattern> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "corruption fraction must lie in [0, 1], got {r}"
        )));
    }
    let n = g.len();
    let flips = crate::util::round_count(r, n);
    let mut offsets = g.bits().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for idx in rand::seq::index::sample(&mut rng, n, flips) {
        offsets[idx] ^= 1;
    }
    PhasePattern::from_offsets(offsets)
}

// ---------------------------------------------------------------------------
// Windowed runs

/// What to keep from each window point: the exact final distribution, or `m`
/// sampled bitstrings.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AnalysisMode {
    Exact,
    Sampled,
}

/// One protocol run: schedule, analysis mode, per-window-point sample count,
/// and the seed from which all sampling randomness derives.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: ScheduleParams,
    pub mode: AnalysisMode,
    pub shots: usize,
    pub seed: u64,
}

/// Payload of a windowed run.
#[derive(Clone, Debug)]
pub enum WindowOutput {
    Exact {
        /// Arithmetic mean of the per-point distributions.
        averaged: Vec<f64>,
        per_point: Vec<Vec<f64>>,
    },
    Sampled {
        /// `shots` strings per window point, in draw order.
        samples: Vec<Vec<BitString>>,
    },
}

/// Result of [`run_windowed`]: the total times used and the per-point data.
#[derive(Clone, Debug)]
pub struct WindowAverageResult {
    pub times: Vec<f64>,
    pub output: WindowOutput,
}

impl WindowAverageResult {
    pub fn averaged(&self) -> Option<&[f64]> {
        match &self.output {
            WindowOutput::Exact { averaged, .. } => Some(averaged),
            WindowOutput::Sampled { .. } => None,
        }
    }

    /// All samples across window points, flattened in point order.
    pub fn pooled_samples(&self) -> Vec<&BitString> {
        match &self.output {
            WindowOutput::Exact { .. } => Vec::new(),
            WindowOutput::Sampled { samples } => samples.iter().flatten().collect(),
        }
    }
}

/// The `window_points` evenly spaced total times spanning
/// `[window.0, window.1] * t_f` (inclusive); a single point degenerates to
/// `[t_f]`. Averaging over final times washes out the coherent oscillations
/// a single endpoint would imprint on the distribution.
pub fn window_times(params: &ScheduleParams) -> Vec<f64> {
    let k = params.window_points;
    if k == 1 {
        return vec![params.t_f];
    }
    let lo = params.window.0 * params.t_f;
    let hi = params.window.1 * params.t_f;
    (0..k)
        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
        .collect()
}

/// Runs one complete evolution per window point and merges the results per
/// `config.mode`. Each point is an independent schedule with its own total
/// time; points are evaluated in order, and sampling seeds derive from
/// (config.seed, point index), so output is worker-count independent.
pub fn run_windowed(
    instance: &Instance,
    pattern: Option<&PhasePattern>,
    config: &RunConfig,
) -> Result<WindowAverageResult> {
    let energies = instance.diagonal_energies()?;
    run_windowed_with_energies(instance, &energies, pattern, config)
}

fn run_windowed_with_energies(
    instance: &Instance,
    energies: &[i32],
    pattern: Option<&PhasePattern>,
    config: &RunConfig,
) -> Result<WindowAverageResult> {
    config.params.validate()?;
    if config.mode == AnalysisMode::Sampled && config.shots == 0 {
        return Err(Error::InvalidParameter(
            "sampled mode needs at least one shot per window point".into(),
        ));
    }
    let times = window_times(&config.params);
    let len = 1usize << instance.n;

    match config.mode {
        AnalysisMode::Exact => {
            let mut averaged = vec![0.0f64; len];
            let mut per_point = Vec::with_capacity(times.len());
            for &t in &times {
                let state =
                    trotter_evolve_with_energies(instance.n, energies, pattern, &config.params, t)?;
                let probs = state.probabilities();
                for (acc, &p) in averaged.iter_mut().zip(&probs) {
                    *acc += p;
                }
                per_point.push(probs);
            }
            let inv = 1.0 / times.len() as f64;
            for a in &mut averaged {
                *a *= inv;
            }
            Ok(WindowAverageResult {
                times,
                output: WindowOutput::Exact {
                    averaged,
                    per_point,
                },
            })
        }
        AnalysisMode::Sampled => {
            let mut samples = Vec::with_capacity(times.len());
            for (i, &t) in times.iter().enumerate() {
                let state =
                    trotter_evolve_with_energies(instance.n, energies, pattern, &config.params, t)?;
                let seed = derive_seed(config.seed, &[tag("window-point"), i as u64]);
                samples.push(state.sample_bitstrings(config.shots, seed)?);
            }
            Ok(WindowAverageResult {
                times,
                output: WindowOutput::Sampled { samples },
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Hamming profiles and energy curves

/// Success probabilities of a distribution against a target set, cumulative
/// in Hamming distance.
#[derive(Clone, Debug, PartialEq)]
pub struct HammingProfile {
    /// Distance fractions d the profile was evaluated at.
    pub thresholds: Vec<f64>,
    /// P(D_H <= round(d * n)) per threshold.
    pub full: Vec<f64>,
    /// P(D_H <= round(d * n / 2)) per threshold.
    pub half: Vec<f64>,
    /// Cumulative distribution over integer distances 0..=n.
    pub cumulative: Vec<f64>,
}

/// Accumulates `dist` into a histogram over min-Hamming-distance-to-target
/// and evaluates the cumulative sums at radii round(d n) and round(d n / 2).
/// D_H(z) is the distance from z to the nearest target.
pub fn hamming_profile(
    dist: &[f64],
    targets: &[BitString],
    thresholds: &[f64],
) -> Result<HammingProfile> {
    let Some(first) = targets.first() else {
        return Err(Error::EmptyTargets);
    };
    let n = first.len();
    if targets.iter().any(|t| t.len() != n) {
        return Err(Error::InvalidParameter(
            "targets have mixed lengths".into(),
        ));
    }
    if dist.len() != 1usize << n {
        return Err(Error::LengthMismatch {
            expected: 1 << n,
            got: dist.len(),
        });
    }
    if let Some(&d) = thresholds.iter().find(|&&d| !(0.0..=1.0).contains(&d)) {
        return Err(Error::InvalidParameter(format!(
            "distance fraction must lie in [0, 1], got {d}"
        )));
    }

    let target_idx: Vec<u64> = targets.iter().map(|t| t.to_index()).collect();
    let min_dist = |z: u64| {
        target_idx
            .iter()
            .map(|&t| (z ^ t).count_ones() as usize)
            .min()
            .expect("targets nonempty")
    };

    // Fixed-chunk histogram accumulation: each chunk builds a local histogram
    // sequentially and the chunk histograms merge in order, so the float sums
    // are identical in sequential and parallel builds.
    const CHUNK: usize = 1 << 12;
    let chunk_hist = |(ci, chunk): (usize, &[f64])| {
        let mut h = vec![0.0f64; n + 1];
        let base = (ci * CHUNK) as u64;
        for (off, &p) in chunk.iter().enumerate() {
            h[min_dist(base + off as u64)] += p;
        }
        h
    };
    let partials: Vec<Vec<f64>> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if dist.len() >= 1 << 14 {
                dist.par_chunks(CHUNK).enumerate().map(chunk_hist).collect()
            } else {
                dist.chunks(CHUNK).enumerate().map(chunk_hist).collect()
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            dist.chunks(CHUNK).enumerate().map(chunk_hist).collect()
        }
    };
    let mut hist = vec![0.0f64; n + 1];
    for h in &partials {
        for (acc, &v) in hist.iter_mut().zip(h) {
            *acc += v;
        }
    }

    let mut cumulative = hist;
    for i in 1..cumulative.len() {
        cumulative[i] += cumulative[i - 1];
    }

    let radius = |d: f64, scale: f64| {
        (round_half_even(d * n as f64 / scale).max(0) as usize).min(n)
    };
    let full = thresholds.iter().map(|&d| cumulative[radius(d, 1.0)]).collect();
    let half = thresholds.iter().map(|&d| cumulative[radius(d, 2.0)]).collect();
    Ok(HammingProfile {
        thresholds: thresholds.to_vec(),
        full,
        half,
        cumulative,
    })
}

/// Expected energy sum_z dist[z] * energies[z], with order-stable chunked
/// accumulation.
pub fn mean_energy(dist: &[f64], energies: &[i32]) -> Result<f64> {
    if dist.len() != energies.len() {
        return Err(Error::LengthMismatch {
            expected: dist.len(),
            got: energies.len(),
        });
    }
    const CHUNK: usize = 1 << 12;
    let dot = |(d, e): (&[f64], &[i32])| -> f64 {
        d.iter().zip(e).map(|(&p, &en)| p * en as f64).sum()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if dist.len() >= 1 << 14 {
            let partials: Vec<f64> = dist
                .par_chunks(CHUNK)
                .zip(energies.par_chunks(CHUNK))
                .map(dot)
                .collect();
            return Ok(partials.iter().sum());
        }
    }
    Ok(dist.chunks(CHUNK).zip(energies.chunks(CHUNK)).map(dot).sum())
}

/// Convenience wrapper: exact windowed run followed by a Hamming profile of
/// the averaged distribution.
pub fn windowed_profile(
    instance: &Instance,
    pattern: Option<&PhasePattern>,
    config: &RunConfig,
    targets: &[BitString],
    thresholds: &[f64],
) -> Result<HammingProfile> {
    let mut cfg = config.clone();
    cfg.mode = AnalysisMode::Exact;
    let res = run_windowed(instance, pattern, &cfg)?;
    hamming_profile(res.averaged().expect("exact mode"), targets, thresholds)
}

// ---------------------------------------------------------------------------
// The iterative loop

/// How the next seed string is chosen from the pooled samples.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectRule {
    /// Lowest-energy sample, ties broken uniformly.
    MinEnergy,
    /// Uniform over the pool.
    Random,
    /// Per-bit majority vote over the pool, bit ties broken uniformly.
    BitwiseMajority,
}

/// One iteration of the seeded loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Pattern driving this iteration.
    pub pattern: PhasePattern,
    /// String selected to seed the next iteration.
    pub selected: BitString,
    /// Energy of the selected string.
    pub energy: i64,
    /// Best (lowest) sampled energy this iteration.
    pub best_energy: i64,
    /// Hamming distance from the selected string to the planted string.
    pub dist_planted: usize,
    /// Distance to the nearest certified ground state, when known.
    pub dist_nearest: Option<usize>,
    /// Whether some sample this iteration reached the ground-truth energy.
    pub success: bool,
}

/// Full trace of an iterated run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub instance_id: String,
    pub records: Vec<IterationRecord>,
    pub succeeded: bool,
    pub success_iteration: Option<usize>,
    /// True when every iteration ran without reaching the ground truth.
    pub exhausted: bool,
    /// True when no certified solution set was available and the planted
    /// energy stood in for the ground truth.
    pub provisional: bool,
}

/// Runs the iterative protocol: drive with the current pattern, sample
/// `config.shots` strings per window point, pool them, select one, and feed
/// it back as the next pattern. Halts as soon as any pooled sample reaches
/// the ground-truth energy (certified when `solutions` is given, otherwise
/// the provisional planted energy).
pub fn istsat_iterate(
    instance: &Instance,
    solutions: Option<&SolutionSet>,
    p0: &PhasePattern,
    config: &RunConfig,
    max_iters: usize,
    select: SelectRule,
) -> Result<IterationTrace> {
    if p0.len() != instance.n {
        return Err(Error::LengthMismatch {
            expected: instance.n,
            got: p0.len(),
        });
    }
    if max_iters == 0 {
        return Err(Error::InvalidParameter(
            "need at least one iteration".into(),
        ));
    }
    if config.shots == 0 {
        return Err(Error::InvalidParameter(
            "iterate needs at least one shot per window point".into(),
        ));
    }
    let (truth, provisional) = match solutions {
        Some(s) => (s.ground_energy, false),
        None => (instance.planted_energy(), true),
    };
    let energies = instance.diagonal_energies()?;

    let mut pattern = p0.clone();
    let mut records = Vec::new();
    let mut succeeded = false;
    let mut success_iteration = None;

    for it in 0..max_iters {
        let cfg = RunConfig {
            params: config.params,
            mode: AnalysisMode::Sampled,
            shots: config.shots,
            seed: derive_seed(config.seed, &[tag("iterate"), it as u64]),
        };
        let res = run_windowed_with_energies(instance, &energies, Some(&pattern), &cfg)?;
        let pool = res.pooled_samples();
        let pool_energies: Vec<i64> = pool
            .iter()
            .map(|x| instance.energy(x))
            .collect::<Result<_>>()?;
        let best_energy = *pool_energies.iter().min().expect("nonempty pool");
        let success = best_energy <= truth;

        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            config.seed,
            &[tag("select"), it as u64],
        ));
        let selected: BitString = match select {
            SelectRule::MinEnergy => {
                let cands: Vec<usize> = pool_energies
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e == best_energy)
                    .map(|(i, _)| i)
                    .collect();
                pool[cands[rng.random_range(0..cands.len())]].clone()
            }
            SelectRule::Random => pool[rng.random_range(0..pool.len())].clone(),
            SelectRule::BitwiseMajority => {
                let bits = (0..instance.n)
                    .map(|j| {
                        let ones = pool.iter().filter(|x| x.bit(j) == 1).count();
                        match (2 * ones).cmp(&pool.len()) {
                            std::cmp::Ordering::Greater => 1u8,
                            std::cmp::Ordering::Less => 0u8,
                            std::cmp::Ordering::Equal => rng.random_range(0..2u8),
                        }
                    })
                    .collect();
                BitString::from_bits(bits)?
            }
        };

        records.push(IterationRecord {
            iteration: it,
            pattern: pattern.clone(),
            energy: instance.energy(&selected)?,
            best_energy,
            dist_planted: hamming(&selected, &instance.planted)?,
            dist_nearest: solutions
                .map(|s| s.nearest_distance(&selected))
                .transpose()?,
            success,
            selected: selected.clone(),
        });

        if success {
            succeeded = true;
            success_iteration = Some(it);
            break;
        }
        pattern = pattern_from_string(&selected);
    }

    Ok(IterationTrace {
        instance_id: instance.instance_id.clone(),
        records,
        succeeded,
        success_iteration,
        exhausted: !succeeded,
        provisional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SchedulePreset;
    use crate::util::binom;

    fn quick_config(n: usize, seed: u64) -> RunConfig {
        RunConfig {
            params: ScheduleParams::for_size(n, SchedulePreset::Default).unwrap(),
            mode: AnalysisMode::Exact,
            shots: 0,
            seed,
        }
    }

    #[test]
    fn pattern_from_string_maps_bits_to_offsets() {
        let x = BitString::parse("0110").unwrap();
        assert_eq!(pattern_from_string(&x).offsets(), &[0, 1, 1, 0]);
    }

    #[test]
    fn corrupt_pattern_flip_counts() {
        let g = BitString::parse("0000000000").unwrap();
        // round(0.25 * 10) = round(2.5) = 2 under half-to-even.
        let p = corrupt_pattern(&g, 0.25, 3).unwrap();
        let flips: usize = p.offsets().iter().map(|&b| b as usize).sum();
        assert_eq!(flips, 2);
        // r = 0 is the identity, r = 1 flips everything.
        assert_eq!(corrupt_pattern(&g, 0.0, 3).unwrap().offsets(), g.bits());
        let all = corrupt_pattern(&g, 1.0, 3).unwrap();
        assert!(all.offsets().iter().all(|&b| b == 1));
        // Deterministic in the seed.
        assert_eq!(
            corrupt_pattern(&g, 0.3, 9).unwrap(),
            corrupt_pattern(&g, 0.3, 9).unwrap()
        );
        assert!(corrupt_pattern(&g, 1.5, 0).is_err());
    }

    #[test]
    fn window_times_spacing() {
        let params = ScheduleParams::for_size(16, SchedulePreset::Default).unwrap();
        let times = window_times(&params);
        assert_eq!(times.len(), 8);
        assert!((times[0] - 2.0 / 3.0 * 0.5).abs() < 1e-12);
        assert!((times[7] - 4.0 / 3.0 * 0.5).abs() < 1e-12);
        let gap = times[1] - times[0];
        for w in times.windows(2) {
            assert!((w[1] - w[0] - gap).abs() < 1e-12);
        }
        let mut single = params;
        single.window_points = 1;
        assert_eq!(window_times(&single), vec![0.5]);
    }

    #[test]
    fn run_windowed_exact_averages_points() {
        let inst = Instance::generate(6, 2.0, 0.1, 4).unwrap();
        let cfg = quick_config(6, 0);
        let res = run_windowed(&inst, None, &cfg).unwrap();
        let WindowOutput::Exact {
            averaged,
            per_point,
        } = &res.output
        else {
            panic!("expected exact output")
        };
        assert_eq!(per_point.len(), 8);
        let k = per_point.len() as f64;
        for z in 0..64 {
            let mean: f64 = per_point.iter().map(|p| p[z]).sum::<f64>() / k;
            assert!((averaged[z] - mean).abs() < 1e-14);
        }
        let total: f64 = averaged.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn run_windowed_sampled_shapes_and_determinism() {
        let inst = Instance::generate(6, 2.0, 0.1, 4).unwrap();
        let mut cfg = quick_config(6, 11);
        cfg.mode = AnalysisMode::Sampled;
        cfg.shots = 5;
        let a = run_windowed(&inst, None, &cfg).unwrap();
        let b = run_windowed(&inst, None, &cfg).unwrap();
        let WindowOutput::Sampled { samples } = &a.output else {
            panic!("expected samples")
        };
        assert_eq!(samples.len(), 8);
        assert!(samples.iter().all(|s| s.len() == 5));
        assert_eq!(a.pooled_samples(), b.pooled_samples());
        assert_eq!(a.pooled_samples().len(), 40);
        cfg.shots = 0;
        assert!(run_windowed(&inst, None, &cfg).is_err());
    }

    #[test]
    fn profile_of_uniform_distribution_is_binomial_tail() {
        // With a uniform distribution and a single target, C(d) is the
        // normalized binomial partial sum: independent closed-form oracle.
        let n = 10usize;
        let dist = vec![1.0 / 1024.0; 1024];
        let target = BitString::zeros(n);
        let thresholds = [0.0, 0.125, 0.25, 0.3, 1.0 / 3.0, 0.5];
        let prof = hamming_profile(&dist, std::slice::from_ref(&target), &thresholds).unwrap();
        let tail = |radius: usize| -> f64 {
            (0..=radius).map(|i| binom(n as u64, i as u64) as f64).sum::<f64>() / 1024.0
        };
        for (i, &d) in thresholds.iter().enumerate() {
            let rf = round_half_even(d * n as f64) as usize;
            let rh = round_half_even(d * n as f64 / 2.0) as usize;
            assert!((prof.full[i] - tail(rf)).abs() < 1e-12, "full at {d}");
            assert!((prof.half[i] - tail(rh)).abs() < 1e-12, "half at {d}");
        }
        // Cumulative is monotone and ends at the total mass.
        for w in prof.cumulative.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!((prof.cumulative[n] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_multi_target_uses_nearest() {
        let mut dist = vec![0.0; 16];
        dist[0b0011] = 1.0; // distance 2 from 0000, 0 from 0011
        let targets = [
            BitString::parse("0000").unwrap(),
            BitString::parse("1100").unwrap(),
        ];
        let prof = hamming_profile(&dist, &targets, &[0.0]).unwrap();
        assert_eq!(prof.full[0], 1.0);
        let far = hamming_profile(&dist, &targets[..1], &[0.0]).unwrap();
        assert_eq!(far.full[0], 0.0);
        assert_eq!(far.cumulative[2], 1.0);
    }

    #[test]
    fn profile_rejects_bad_inputs() {
        let dist = vec![0.25; 4];
        assert!(matches!(
            hamming_profile(&dist, &[], &[0.0]),
            Err(Error::EmptyTargets)
        ));
        let t = BitString::parse("00").unwrap();
        assert!(hamming_profile(&dist[..3], std::slice::from_ref(&t), &[0.0]).is_err());
        assert!(hamming_profile(&dist, std::slice::from_ref(&t), &[1.5]).is_err());
    }

    #[test]
    fn mean_energy_examples() {
        let energies = vec![-3, 1, 1, -1];
        let uniform = vec![0.25; 4];
        assert!((mean_energy(&uniform, &energies).unwrap() + 0.5).abs() < 1e-15);
        let conc = vec![1.0, 0.0, 0.0, 0.0];
        assert_eq!(mean_energy(&conc, &energies).unwrap(), -3.0);
        assert!(mean_energy(&uniform, &energies[..3]).is_err());
    }

    #[test]
    fn iterate_halts_on_perfect_seed() {
        // Driving with the exact planted pattern on an easy instance finds
        // the ground state in the first iteration.
        let inst = Instance::generate(8, 2.0, 0.1, 6).unwrap();
        let sols = inst.brute_force().unwrap();
        let p0 = pattern_from_string(&inst.planted);
        let mut cfg = quick_config(8, 17);
        cfg.shots = 64;
        let trace = istsat_iterate(&inst, Some(&sols), &p0, &cfg, 10, SelectRule::MinEnergy)
            .unwrap();
        assert!(trace.succeeded);
        assert_eq!(trace.success_iteration, Some(0));
        assert_eq!(trace.records.len(), 1);
        assert!(!trace.provisional);
        assert!(!trace.exhausted);
        let rec = &trace.records[0];
        assert_eq!(rec.best_energy, sols.ground_energy);
        // Min-energy selection picked a ground state.
        assert_eq!(rec.energy, sols.ground_energy);
        assert_eq!(rec.dist_nearest, Some(0));
    }

    #[test]
    fn iterate_trace_is_deterministic() {
        let inst = Instance::generate(7, 2.0, 0.1, 2).unwrap();
        let p0 = corrupt_pattern(&inst.planted, 0.3, 5).unwrap();
        let mut cfg = quick_config(7, 23);
        cfg.shots = 16;
        let a = istsat_iterate(&inst, None, &p0, &cfg, 4, SelectRule::BitwiseMajority).unwrap();
        let b = istsat_iterate(&inst, None, &p0, &cfg, 4, SelectRule::BitwiseMajority).unwrap();
        assert_eq!(
            serde_json::to_string(&a.records).unwrap(),
            serde_json::to_string(&b.records).unwrap()
        );
        assert!(a.provisional);
        assert!(a.records.len() <= 4);
        assert_eq!(a.succeeded, !a.exhausted);
    }

    #[test]
    fn iterate_validates_inputs() {
        let inst = Instance::generate(6, 2.0, 0.1, 2).unwrap();
        let p0 = pattern_from_string(&inst.planted);
        let mut cfg = quick_config(6, 0);
        cfg.shots = 4;
        assert!(istsat_iterate(&inst, None, &p0, &cfg, 0, SelectRule::Random).is_err());
        let short = PhasePattern::from_offsets(vec![0, 1]).unwrap();
        assert!(istsat_iterate(&inst, None, &short, &cfg, 3, SelectRule::Random).is_err());
        cfg.shots = 0;
        assert!(istsat_iterate(&inst, None, &p0, &cfg, 3, SelectRule::Random).is_err());
    }

    #[test]
    fn pipeline_is_gauge_invariant() {
        // Gauge-flipping the instance, pattern, and targets together leaves
        // the whole profile unchanged.
        let inst = Instance::generate(8, 2.0, 0.1, 13).unwrap();
        let flipped = inst.gauge_flip(2).unwrap();
        let cfg = quick_config(8, 0);
        let thresholds = [0.0, 0.25, 0.5];

        let pattern = corrupt_pattern(&inst.planted, 0.25, 7).unwrap();
        let mut flipped_offsets = pattern.offsets().to_vec();
        flipped_offsets[2] ^= 1;
        let flipped_pattern = PhasePattern::from_offsets(flipped_offsets).unwrap();

        let prof = windowed_profile(
            &inst,
            Some(&pattern),
            &cfg,
            std::slice::from_ref(&inst.planted),
            &thresholds,
        )
        .unwrap();
        let prof_flipped = windowed_profile(
            &flipped,
            Some(&flipped_pattern),
            &cfg,
            std::slice::from_ref(&flipped.planted),
            &thresholds,
        )
        .unwrap();
        for (a, b) in prof.full.iter().zip(&prof_flipped.full) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in prof.cumulative.iter().zip(&prof_flipped.cumulative) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
