//! Independent oracles for the engine tests: a dense matrix representation
//! of the full time-dependent Hamiltonian, a Taylor matrix exponential, and
//! a fixed-step RK4 integrator of the Schrodinger equation. Everything here
//! is written against the operator definitions directly, sharing no code
//! with the production kernels.

use num_complex::Complex64;

use istsat_core::engine::{schedule_coefficients, PhasePattern, StateVector};
use istsat_core::instance::Instance;

/// Dense row-major complex matrix.
#[derive(Clone)]
pub struct DenseMat {
    pub d: usize,
    pub a: Vec<Complex64>,
}

impl DenseMat {
    pub fn zeros(d: usize) -> DenseMat {
        DenseMat {
            d,
            a: vec![Complex64::new(0.0, 0.0); d * d],
        }
    }

    pub fn identity(d: usize) -> DenseMat {
        let mut m = DenseMat::zeros(d);
        for i in 0..d {
            m.a[i * d + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn add_at(&mut self, row: usize, col: usize, v: Complex64) {
        self.a[row * self.d + col] += v;
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.d;
        (0..d)
            .map(|r| {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..d {
                    acc += self.a[r * d + c] * x[c];
                }
                acc
            })
            .collect()
    }

    pub fn mat_mul(&self, other: &DenseMat) -> DenseMat {
        let d = self.d;
        let mut out = DenseMat::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let v = self.a[r * d + k];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    out.a[r * d + c] += v * other.a[k * d + c];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> DenseMat {
        DenseMat {
            d: self.d,
            a: self.a.iter().map(|&v| v * s).collect(),
        }
    }

    fn one_norm(&self) -> f64 {
        (0..self.d)
            .map(|c| (0..self.d).map(|r| self.a[r * self.d + c].norm()).sum())
            .fold(0.0f64, f64::max)
    }

    /// Matrix exponential by scaling-and-squaring with a Taylor series.
    pub fn exp(&self) -> DenseMat {
        let norm = self.one_norm();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = self.scale(Complex64::new(1.0 / 2f64.powi(squarings as i32), 0.0));
        let mut result = DenseMat::identity(self.d);
        let mut term = DenseMat::identity(self.d);
        for k in 1..=24 {
            term = term.mat_mul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
            for (acc, &v) in result.a.iter_mut().zip(&term.a) {
                *acc += v;
            }
        }
        for _ in 0..squarings {
            result = result.mat_mul(&result);
        }
        result
    }
}

/// The full Hamiltonian H(t) = f H_D + g H_P + h H_ST(t) as a dense matrix,
/// built element by element from the operator definitions:
/// H_D = -sum X_j, H_P diagonal, H_ST = alpha sum sin(omega t + phi_j) Y_j.
pub fn dense_hamiltonian(
    instance: &Instance,
    pattern: Option<&PhasePattern>,
    alpha: f64,
    omega: f64,
    t: f64,
    total_time: f64,
) -> DenseMat {
    let n = instance.n;
    let d = 1usize << n;
    let (f, g, h) = schedule_coefficients(t / total_time);
    let energies = instance.diagonal_energies().unwrap();
    let mut ham = DenseMat::zeros(d);
    for z in 0..d {
        ham.add_at(z, z, Complex64::new(g * energies[z] as f64, 0.0));
        for j in 0..n {
            let zf = z ^ (1 << j);
            // <z^e_j| X_j |z> = 1, weighted by -f.
            ham.add_at(zf, z, Complex64::new(-f, 0.0));
            // <z^e_j| Y_j |z> = i (1 - 2 z_j).
            if let Some(p) = pattern {
                let phi = std::f64::consts::PI * p.offset(j) as f64;
                let coef = h * alpha * (omega * t + phi).sin();
                let sign = 1.0 - 2.0 * ((z >> j) & 1) as f64;
                ham.add_at(zf, z, Complex64::new(0.0, coef * sign));
            }
        }
    }
    ham
}

/// Integrates d psi/dt = -i H(t) psi from |+...+> with fixed-step RK4.
pub fn rk4_evolve(
    instance: &Instance,
    pattern: Option<&PhasePattern>,
    alpha: f64,
    omega: f64,
    total_time: f64,
    substeps: usize,
) -> StateVector {
    let n = instance.n;
    let d = 1usize << n;
    let mut psi: Vec<Complex64> =
        vec![Complex64::new(1.0 / (d as f64).sqrt(), 0.0); d];
    let delta = total_time / substeps as f64;
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |t: f64, x: &[Complex64]| -> Vec<Complex64> {
        let h = dense_hamiltonian(instance, pattern, alpha, omega, t, total_time);
        h.mul_vec(x).into_iter().map(|v| v * minus_i).collect()
    };
    for s in 0..substeps {
        let t = s as f64 * delta;
        let k1 = rhs(t, &psi);
        let x2: Vec<Complex64> = psi
            .iter()
            .zip(&k1)
            .map(|(&p, &k)| p + k * (delta / 2.0))
            .collect();
        let k2 = rhs(t + delta / 2.0, &x2);
        let x3: Vec<Complex64> = psi
            .iter()
            .zip(&k2)
            .map(|(&p, &k)| p + k * (delta / 2.0))
            .collect();
        let k3 = rhs(t + delta / 2.0, &x3);
        let x4: Vec<Complex64> = psi
            .iter()
            .zip(&k3)
            .map(|(&p, &k)| p + k * delta)
            .collect();
        let k4 = rhs(t + delta, &x4);
        for (i, p) in psi.iter_mut().enumerate() {
            *p += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (delta / 6.0);
        }
    }
    StateVector::from_amplitudes(n, psi).unwrap()
}

/// L2 distance between two states.
pub fn l2_distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Largest single-amplitude deviation.
pub fn max_amp_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
