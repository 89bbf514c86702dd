//! In-place state-vector passes.
//!
//! For qubit j the amplitude array splits into contiguous blocks of length
//! 2^(j+1); the first half of each block holds the bit-j=0 amplitudes and the
//! second half the bit-j=1 partners at the same offset. Every pass below
//! walks that layout once. Parallel builds split across blocks when there are
//! many, and across pair offsets inside a block when the rotated qubit is
//! near the top; both splits touch disjoint slices, so no synchronization is
//! needed and results are bitwise identical to the sequential walk.

use num_complex::Complex64;

/// Below this many amplitudes the parallel build stays sequential; rayon
/// dispatch overhead beats the work itself.
#[cfg(feature = "parallel")]
pub(crate) const PAR_MIN_LEN: usize = 1 << 14;

/// Applies `f` to every (bit j = 0, bit j = 1) amplitude pair.
#[inline]
fn pair_map<F>(amps: &mut [Complex64], j: usize, f: F)
where
    F: Fn(&mut Complex64, &mut Complex64) + Sync,
{
    let half = 1usize << j;
    let block = half << 1;
    debug_assert!(amps.len().is_multiple_of(block));

    #[cfg(feature = "parallel")]
    if amps.len() >= PAR_MIN_LEN {
        use rayon::prelude::*;
        if amps.len() / block >= 16 {
            // Many blocks: one parallel task per block.
            amps.par_chunks_exact_mut(block).for_each(|b| {
                let (lo, hi) = b.split_at_mut(half);
                for (a, c) in lo.iter_mut().zip(hi.iter_mut()) {
                    f(a, c);
                }
            });
        } else {
            // High qubit, few blocks: split the pair offsets instead.
            for b in amps.chunks_exact_mut(block) {
                let (lo, hi) = b.split_at_mut(half);
                lo.par_chunks_mut(1 << 10)
                    .zip(hi.par_chunks_mut(1 << 10))
                    .for_each(|(lc, hc)| {
                        for (a, c) in lc.iter_mut().zip(hc.iter_mut()) {
                            f(a, c);
                        }
                    });
            }
        }
        return;
    }

    for b in amps.chunks_exact_mut(block) {
        let (lo, hi) = b.split_at_mut(half);
        for (a, c) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a, c);
        }
    }
}

/// exp(+i theta X) on qubit j: [[c, i s], [i s, c]] with c = cos theta,
/// s = sin theta.
pub(crate) fn x_rotation_pass(amps: &mut [Complex64], j: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    pair_map(amps, j, move |a, b| {
        let (a0, b0) = (*a, *b);
        a.re = c * a0.re - s * b0.im;
        a.im = c * a0.im + s * b0.re;
        b.re = c * b0.re - s * a0.im;
        b.im = c * b0.im + s * a0.re;
    });
}

/// exp(-i theta Y) on qubit j: the real rotation [[c, -s], [s, c]].
pub(crate) fn y_rotation_pass(amps: &mut [Complex64], j: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    pair_map(amps, j, move |a, b| {
        let (a0, b0) = (*a, *b);
        a.re = c * a0.re - s * b0.re;
        a.im = c * a0.im - s * b0.im;
        b.re = s * a0.re + c * b0.re;
        b.im = s * a0.im + c * b0.im;
    });
}

/// General 2x2 butterfly [[m00, m01], [m10, m11]] on qubit j. Used for the
/// fused X-then-Y product so each Trotter step makes one memory pass per
/// qubit instead of two.
pub(crate) fn butterfly_pass(amps: &mut [Complex64], j: usize, m: [Complex64; 4]) {
    let [m00, m01, m10, m11] = m;
    pair_map(amps, j, move |a, b| {
        let (a0, b0) = (*a, *b);
        *a = m00 * a0 + m01 * b0;
        *b = m10 * a0 + m11 * b0;
    });
}

/// exp(-i theta Y) * exp(+i theta_x X) as one matrix. With theta_y = +/-0.0
/// the extra terms are signed zeros, so the pass agrees with the pure X
/// rotation to within the sign of zero.
pub(crate) fn fused_xy_matrix(theta_x: f64, theta_y: f64) -> [Complex64; 4] {
    let (sx, cx) = theta_x.sin_cos();
    let (sy, cy) = theta_y.sin_cos();
    [
        Complex64::new(cy * cx, -sy * sx),
        Complex64::new(-sy * cx, cy * sx),
        Complex64::new(sy * cx, cy * sx),
        Complex64::new(cy * cx, sy * sx),
    ]
}

/// Multiplies amplitude z by table[energies[z] - e_min]. The table carries
/// exp(-i theta E) for every integer energy in [e_min, e_max].
pub(crate) fn phase_table_pass(
    amps: &mut [Complex64],
    energies: &[i32],
    e_min: i32,
    table: &[Complex64],
) {
    debug_assert_eq!(amps.len(), energies.len());
    let apply = |chunk: &mut [Complex64], es: &[i32]| {
        for (a, &e) in chunk.iter_mut().zip(es) {
            *a *= table[(e - e_min) as usize];
        }
    };
    #[cfg(feature = "parallel")]
    if amps.len() >= PAR_MIN_LEN {
        use rayon::prelude::*;
        amps.par_chunks_mut(1 << 12)
            .zip(energies.par_chunks(1 << 12))
            .for_each(|(chunk, es)| apply(chunk, es));
        return;
    }
    apply(amps, energies);
}
