//! Trotterized state-vector evolution.
//!
//! The simulated Hamiltonian is
//!
//! ```text
//! H(t) = f(t) H_D + g(t) H_P + h(t) H_ST(t)
//! f = sqrt(1 - t/T)   g = sqrt(t/T)   h = 4 sqrt((1 - t/T)(t/T))
//! H_D  = -sum_j X_j
//! H_P  = -sum_c V_c Z_i Z_j Z_k          (diagonal, integer spectrum)
//! H_ST = alpha sum_j sin(omega t + phi_j) Y_j,   phi_j in {0, pi}
//! ```
//!
//! One first-order step over [t, t + dt] evaluates the coefficients at the
//! midpoint and applies exp(-i dt g H_P), then exp(-i dt f H_D), then
//! exp(-i dt h H_ST). The X and Y factors act per qubit and commute across
//! qubits, so the engine fuses each qubit's X and Y rotations into a single
//! 2x2 butterfly; because the phase offsets are only 0 or pi, a step needs
//! just two distinct matrices. The diagonal factor is a table lookup over the
//! (small, integer) energy range.

mod kernel;

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::instance::{BitString, Instance};
use crate::util::chunked_sum;
use crate::{Error, Result};

/// Dense state vectors are capped at this many qubits (2^26 amplitudes,
/// 1 GiB per vector).
pub const MAX_QUBITS: usize = 26;

/// Slope of the drive amplitude: alpha = 0.6 ln n.
pub const ALPHA_SLOPE: f64 = 0.6;

// ---------------------------------------------------------------------------
// State vectors

/// Complex amplitudes over the 2^n basis states, variable j at bit j of the
/// index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition |+...+>, the ground state of H_D.
    pub fn plus_state(n: usize) -> Result<StateVector> {
        Self::check_n(n)?;
        let len = 1usize << n;
        let amp = Complex64::new(1.0 / (len as f64).sqrt(), 0.0);
        Ok(StateVector {
            n,
            amps: vec![amp; len],
        })
    }

    /// Wraps explicit amplitudes (used by tests and dump loading).
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        Self::check_n(n)?;
        if amps.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        Ok(StateVector { n, amps })
    }

    fn check_n(n: usize) -> Result<()> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::CapExceeded {
                what: "state vector",
                n,
                cap: MAX_QUBITS,
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Total squared norm; 1 up to accumulated roundoff for any product of
    /// the rotations below.
    pub fn norm_sqr(&self) -> f64 {
        chunked_sum(&self.amps, |a| a.norm_sqr())
    }

    /// Per-basis-state probabilities |amp|^2 (unnormalized: callers asserting
    /// on norm drift want the raw values).
    pub fn probabilities(&self) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if self.amps.len() >= 1 << 14 {
                return self.amps.par_iter().map(|a| a.norm_sqr()).collect();
            }
        }
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// |<self|other>|^2.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc += a.conj() * b;
        }
        Ok(acc.norm_sqr())
    }

    /// Draws `m` basis states from the Born distribution. Deterministic in
    /// (state, m, seed); draws are inverse-CDF lookups against the cumulative
    /// probability table, scaled by the total so small norm drift cannot bias
    /// the tail.
    pub fn sample_bitstrings(&self, m: usize, seed: u64) -> Result<Vec<BitString>> {
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut total = 0.0f64;
        for a in &self.amps {
            total += a.norm_sqr();
            cumulative.push(total);
        }
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidParameter(
                "cannot sample from a zero-norm state".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..m)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * total;
                let idx = cumulative.partition_point(|&c| c <= u);
                BitString::from_index(idx.min(self.amps.len() - 1) as u64, self.n)
            })
            .collect())
    }

    /// Binary debug dump: an 8-byte little-endian qubit count, then 2^n
    /// (re, im) f64 little-endian pairs in basis order.
    pub fn write_dump<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump written by [`StateVector::write_dump`].
    pub fn read_dump<R: Read>(r: &mut R) -> Result<StateVector> {
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let n = u64::from_le_bytes(buf8) as usize;
        Self::check_n(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for _ in 0..1usize << n {
            r.read_exact(&mut buf8)?;
            let re = f64::from_le_bytes(buf8);
            r.read_exact(&mut buf8)?;
            let im = f64::from_le_bytes(buf8);
            amps.push(Complex64::new(re, im));
        }
        Ok(StateVector { n, amps })
    }
}

// ---------------------------------------------------------------------------
// Phase patterns

/// Per-qubit drive phase offsets: offset bit b_j means phi_j = pi * b_j.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhasePattern(Vec<u8>);

impl PhasePattern {
    pub fn from_offsets(offsets: Vec<u8>) -> Result<PhasePattern> {
        if let Some(&b) = offsets.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "phase offset {b} is not 0 or 1"
            )));
        }
        Ok(PhasePattern(offsets))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn offset(&self, j: usize) -> u8 {
        self.0[j]
    }

    pub fn offsets(&self) -> &[u8] {
        &self.0
    }

    /// The bitstring whose bits are the offsets.
    pub fn to_bitstring(&self) -> BitString {
        BitString::from_bits(self.0.clone()).expect("offsets are 0/1")
    }
}

impl std::fmt::Display for PhasePattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl Serialize for PhasePattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PhasePattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let bits = BitString::parse(&s).map_err(D::Error::custom)?;
        Ok(PhasePattern(bits.bits().to_vec()))
    }
}

// ---------------------------------------------------------------------------
// Schedules

/// Frequency presets for the oscillating drive.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SchedulePreset {
    /// omega = 2 pi * 6 ln n.
    Default,
    /// omega = 10 pi ln n, for energy-quality runs.
    LowFrequency,
}

/// Evolution parameters. `window` brackets the ensemble of total times used
/// for window averaging, as multiples of `t_f`.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ScheduleParams {
    pub t_f: f64,
    pub omega: f64,
    pub alpha: f64,
    pub dt: f64,
    pub window: (f64, f64),
    pub window_points: usize,
    pub ac_enabled: bool,
}

impl ScheduleParams {
    /// Size-scaled defaults: t_f = n/32, alpha = 0.6 ln n, omega from the
    /// preset, dt = 0.4/omega (~16 steps per drive period), 8 window points
    /// spanning [2/3, 4/3] t_f.
    pub fn for_size(n: usize, preset: SchedulePreset) -> Result<ScheduleParams> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "schedule needs n >= 2, got {n}"
            )));
        }
        let ln_n = (n as f64).ln();
        let omega = match preset {
            SchedulePreset::Default => 2.0 * std::f64::consts::PI * 6.0 * ln_n,
            SchedulePreset::LowFrequency => 10.0 * std::f64::consts::PI * ln_n,
        };
        Ok(ScheduleParams {
            t_f: n as f64 / 32.0,
            omega,
            alpha: ALPHA_SLOPE * ln_n,
            dt: 0.4 / omega,
            window: (2.0 / 3.0, 4.0 / 3.0),
            window_points: 8,
            ac_enabled: true,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.t_f,
            self.omega,
            self.alpha,
            self.dt,
            self.window.0,
            self.window.1,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite || self.t_f <= 0.0 || self.dt <= 0.0 || self.omega < 0.0 || self.alpha < 0.0
        {
            return Err(Error::InvalidParameter(format!(
                "schedule parameters out of range: {self:?}"
            )));
        }
        if self.window.0 <= 0.0 || self.window.0 > self.window.1 {
            return Err(Error::InvalidParameter(format!(
                "window ({}, {}) is not an increasing positive range",
                self.window.0, self.window.1
            )));
        }
        if self.window_points == 0 {
            return Err(Error::InvalidParameter(
                "window_points must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Schedule coefficients (f, g, h) at normalized time u = t/T, clamped to
/// [0, 1] so endpoint roundoff cannot produce NaN.
pub fn schedule_coefficients(u: f64) -> (f64, f64, f64) {
    let u = u.clamp(0.0, 1.0);
    let f = (1.0 - u).sqrt();
    let g = u.sqrt();
    (f, g, 4.0 * f * g)
}

// ---------------------------------------------------------------------------
// Public single-operator passes

/// Multiplies amplitude z by exp(-i theta * energies[z]).
pub fn apply_diagonal_phase(state: &mut StateVector, energies: &[i32], theta: f64) -> Result<()> {
    if energies.len() != state.amps.len() {
        return Err(Error::LengthMismatch {
            expected: state.amps.len(),
            got: energies.len(),
        });
    }
    let (e_min, e_max) = energy_bounds(energies);
    let table = phase_table(e_min, e_max, theta);
    kernel::phase_table_pass(&mut state.amps, energies, e_min, &table);
    Ok(())
}

/// Applies exp(+i theta X_j) to every qubit (one Trotter factor of the
/// driver, whose sign makes the exponent positive).
pub fn apply_x_rotation_all(state: &mut StateVector, theta: f64) {
    for j in 0..state.n {
        kernel::x_rotation_pass(&mut state.amps, j, theta);
    }
}

/// Applies exp(-i thetas[j] Y_j) per qubit.
pub fn apply_y_rotation(state: &mut StateVector, thetas: &[f64]) -> Result<()> {
    if thetas.len() != state.n {
        return Err(Error::LengthMismatch {
            expected: state.n,
            got: thetas.len(),
        });
    }
    for (j, &theta) in thetas.iter().enumerate() {
        kernel::y_rotation_pass(&mut state.amps, j, theta);
    }
    Ok(())
}

fn energy_bounds(energies: &[i32]) -> (i32, i32) {
    let mut lo = i32::MAX;
    let mut hi = i32::MIN;
    for &e in energies {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    (lo, hi)
}

fn phase_table(e_min: i32, e_max: i32, theta: f64) -> Vec<Complex64> {
    (e_min..=e_max)
        .map(|e| Complex64::from_polar(1.0, -theta * e as f64))
        .collect()
}

// ---------------------------------------------------------------------------
// Trotter evolution

/// Evolves |+...+> under the scheduled Hamiltonian for `total_time`, with
/// `pattern` supplying the drive phase offsets. `None` (or
/// `params.ac_enabled = false`) turns the oscillating drive off, leaving the
/// plain two-term anneal.
pub fn trotter_evolve(
    instance: &Instance,
    pattern: Option<&PhasePattern>,
    params: &ScheduleParams,
    total_time: f64,
) -> Result<StateVector> {
    let energies = instance.diagonal_energies()?;
    trotter_evolve_with_energies(instance.n, &energies, pattern, params, total_time)
}

/// [`trotter_evolve`] with the diagonal energy vector precomputed, so window
/// sweeps and repeated runs on one instance do not recompute it.
pub fn trotter_evolve_with_energies(
    n: usize,
    energies: &[i32],
    pattern: Option<&PhasePattern>,
    params: &ScheduleParams,
    total_time: f64,
) -> Result<StateVector> {
    params.validate()?;
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "total_time must be positive and finite, got {total_time}"
        )));
    }
    let mut state = StateVector::plus_state(n)?;
    if energies.len() != state.amps.len() {
        return Err(Error::LengthMismatch {
            expected: state.amps.len(),
            got: energies.len(),
        });
    }
    if let Some(p) = pattern {
        if p.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: p.len(),
            });
        }
    }

    let drive = match pattern {
        Some(p) if params.ac_enabled => Some(p),
        _ => None,
    };
    let (e_min, e_max) = energy_bounds(energies);
    let steps = (total_time / params.dt).ceil() as u64;

    for m in 0..steps {
        let t0 = m as f64 * params.dt;
        let dt = params.dt.min(total_time - t0);
        if dt <= 0.0 {
            break;
        }
        let t_mid = t0 + 0.5 * dt;
        let (f, g, h) = schedule_coefficients(t_mid / total_time);

        let table = phase_table(e_min, e_max, g * dt);
        kernel::phase_table_pass(&mut state.amps, energies, e_min, &table);

        let theta_x = f * dt;
        match drive {
            Some(p) => {
                // phi_j is 0 or pi, so sin(omega t + phi_j) = +/- sin(omega t)
                // and a step needs only two fused matrices.
                let theta_y = h * params.alpha * (params.omega * t_mid).sin() * dt;
                let m_plus = kernel::fused_xy_matrix(theta_x, theta_y);
                let m_minus = kernel::fused_xy_matrix(theta_x, -theta_y);
                for j in 0..n {
                    let m = if p.offset(j) == 0 { m_plus } else { m_minus };
                    kernel::butterfly_pass(&mut state.amps, j, m);
                }
            }
            None => {
                apply_x_rotation_all(&mut state, theta_x);
            }
        }
    }
    Ok(state)
}
