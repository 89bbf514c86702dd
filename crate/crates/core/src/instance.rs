//! Planted MAX-3-XORSAT instances.
//!
//! An instance over n spin variables is a set of N_C = round(density * n)
//! distinct triples (i < j < k), each carrying a coupling sign V in {+1, -1},
//! with cost Hamiltonian H_P = -sum_c V_c Z_i Z_j Z_k. Signs are chosen so
//! that a planted bitstring G violates exactly round(epsilon * N_C)
//! constraints, giving it energy -(N_C - 2 * N_unsat).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::util::{binom, round_count};
use crate::{Error, Result};

/// Exhaustive enumeration and dense vectors are capped at this many
/// variables (2^26 basis states).
pub const BRUTE_FORCE_MAX_N: usize = 26;

/// Minimum problem size below which full state-vector scans stay sequential
/// even in parallel builds; rayon overhead dominates under this.
#[cfg(feature = "parallel")]
const PAR_MIN_LEN: usize = 1 << 14;

// ---------------------------------------------------------------------------
// Bitstrings

/// Assignment of n binary variables. Bit j is variable j; in basis-state
/// index form, variable j occupies bit j of the index (index 1 = "100..0").
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitString(Vec<u8>);

impl BitString {
    /// All-zeros string of length n.
    pub fn zeros(n: usize) -> Self {
        BitString(vec![0; n])
    }

    /// Builds from explicit bit values, rejecting anything but 0 and 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "bit value {b} is not 0 or 1"
            )));
        }
        Ok(BitString(bits))
    }

    /// Decodes a basis-state index: bit j of `z` becomes variable j.
    pub fn from_index(z: u64, n: usize) -> Self {
        BitString((0..n).map(|j| ((z >> j) & 1) as u8).collect())
    }

    /// Parses a "0101..." string; character j is variable j.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse(format!(
                    "invalid character {other:?} in bitstring"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitString)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn bit(&self, j: usize) -> u8 {
        self.0[j]
    }

    /// Spin value of variable j: +1 for bit 0, -1 for bit 1 (Z eigenvalue).
    #[inline]
    pub fn spin(&self, j: usize) -> i64 {
        1 - 2 * self.0[j] as i64
    }

    pub fn flip(&mut self, j: usize) {
        self.0[j] ^= 1;
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// Encodes into a basis-state index (variable j at bit j).
    pub fn to_index(&self) -> u64 {
        debug_assert!(self.len() <= 63);
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BitString::parse(s)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        BitString::parse(&s).map_err(D::Error::custom)
    }
}

/// Hamming distance between equal-length bitstrings.
pub fn hamming(a: &BitString, b: &BitString) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count())
}

// ---------------------------------------------------------------------------
// Constraints and instances

/// One parity constraint: ordered triple i < j < k with coupling sign +/-1.
/// Serialized as the 4-tuple [i, j, k, sign].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub vars: [usize; 3],
    pub sign: i8,
}

impl Serialize for Constraint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (self.vars[0], self.vars[1], self.vars[2], self.sign).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Constraint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (i, j, k, sign) = <(usize, usize, usize, i8)>::deserialize(deserializer)?;
        if !(i < j && j < k) {
            return Err(D::Error::custom(format!(
                "constraint triple ({i},{j},{k}) is not strictly increasing"
            )));
        }
        if sign != 1 && sign != -1 {
            return Err(D::Error::custom(format!("coupling sign {sign} is not +/-1")));
        }
        Ok(Constraint {
            vars: [i, j, k],
            sign,
        })
    }
}

/// A planted instance together with the parameters that generated it.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub instance_id: String,
    pub n: usize,
    pub density: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub planted: BitString,
    pub constraints: Vec<Constraint>,
}

/// Unranks the `rank`-th triple (i < j < k) in lexicographic order over n
/// variables.
fn triple_from_rank(n: usize, mut rank: u64) -> [usize; 3] {
    let mut i = 0usize;
    loop {
        let c = binom((n - 1 - i) as u64, 2);
        if rank < c {
            break;
        }
        rank -= c;
        i += 1;
    }
    let mut j = i + 1;
    loop {
        let c = (n - 1 - j) as u64;
        if rank < c {
            break;
        }
        rank -= c;
        j += 1;
    }
    [i, j, j + 1 + rank as usize]
}

/// Floyd's algorithm: samples `m` distinct values from 0..total. The BTreeSet
/// keeps the result sorted, and the draw order is fixed, so the output is a
/// deterministic function of the RNG stream.
fn sample_distinct(rng: &mut ChaCha8Rng, total: u64, m: u64) -> BTreeSet<u64> {
    debug_assert!(m <= total);
    let mut chosen = BTreeSet::new();
    for j in (total - m)..total {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen
}

impl Instance {
    /// Generates a planted instance: a uniform planted string, N_C distinct
    /// uniformly chosen triples, and signs satisfying the planted string on
    /// all but a uniformly chosen subset of round(epsilon * N_C) constraints.
    /// Deterministic in (n, density, epsilon, seed).
    pub fn generate(n: usize, density: f64, epsilon: f64, seed: u64) -> Result<Instance> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "need at least 3 variables for triples, got n = {n}"
            )));
        }
        if !(density.is_finite() && density > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density must be positive and finite, got {density}"
            )));
        }
        if !(0.0..0.5).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in [0, 0.5), got {epsilon}"
            )));
        }
        let n_c = round_count(density, n) as u64;
        let available = binom(n as u64, 3);
        if n_c == 0 {
            return Err(Error::InvalidParameter(format!(
                "density {density} rounds to zero constraints at n = {n}"
            )));
        }
        if n_c > available {
            return Err(Error::TooManyConstraints {
                requested: n_c,
                available,
                n,
            });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let planted = BitString((0..n).map(|_| rng.random_range(0..2u8)).collect());

        let ranks = sample_distinct(&mut rng, available, n_c);
        let n_unsat = round_count(epsilon, n_c as usize) as u64;
        let violated = sample_distinct(&mut rng, n_c, n_unsat);

        let constraints = ranks
            .iter()
            .enumerate()
            .map(|(c, &rank)| {
                let vars = triple_from_rank(n, rank);
                let prod = planted.spin(vars[0]) * planted.spin(vars[1]) * planted.spin(vars[2]);
                // sign * prod = +1 satisfies the constraint (contributes -1
                // to the energy); flip the sign on the violated subset.
                let sign = if violated.contains(&(c as u64)) {
                    -prod
                } else {
                    prod
                };
                Constraint {
                    vars,
                    sign: sign as i8,
                }
            })
            .collect();

        Ok(Instance {
            instance_id: format!("n{n}_d{density}_e{epsilon}_s{seed}"),
            n,
            density,
            epsilon,
            seed,
            planted,
            constraints,
        })
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Energy of an assignment: -sum_c sign_c * s_i s_j s_k, an integer in
    /// [-N_C, N_C] with the parity of N_C.
    pub fn energy(&self, x: &BitString) -> Result<i64> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut e = 0i64;
        for c in &self.constraints {
            let parity = (x.bit(c.vars[0]) ^ x.bit(c.vars[1]) ^ x.bit(c.vars[2])) as i64;
            e -= c.sign as i64 * (1 - 2 * parity);
        }
        Ok(e)
    }

    /// Energy of the planted string, -(N_C - 2 * round(epsilon * N_C)).
    pub fn planted_energy(&self) -> i64 {
        self.energy(&self.planted).expect("planted has length n")
    }

    /// (mask, sign) pairs; the parity of `z & mask` decides each term's sign.
    fn terms(&self) -> Vec<(u64, i32)> {
        self.constraints
            .iter()
            .map(|c| {
                let mask = (1u64 << c.vars[0]) | (1u64 << c.vars[1]) | (1u64 << c.vars[2]);
                (mask, c.sign as i32)
            })
            .collect()
    }

    /// Dense vector of energies over all 2^n basis states, indexed by basis
    /// state (variable j at bit j). Requires n <= 26.
    pub fn diagonal_energies(&self) -> Result<Vec<i32>> {
        if self.n > BRUTE_FORCE_MAX_N {
            return Err(Error::CapExceeded {
                what: "diagonal energy vector",
                n: self.n,
                cap: BRUTE_FORCE_MAX_N,
            });
        }
        let terms = self.terms();
        let len = 1usize << self.n;
        let per_z = |z: u64| {
            let mut e = 0i32;
            for &(mask, sign) in &terms {
                let parity = ((z & mask).count_ones() & 1) as i32;
                e -= sign * (1 - 2 * parity);
            }
            e
        };
        #[cfg(feature = "parallel")]
        if len >= PAR_MIN_LEN {
            use rayon::prelude::*;
            return Ok((0..len as u64).into_par_iter().map(per_z).collect());
        }
        Ok((0..len as u64).map(per_z).collect())
    }

    /// Exhaustive ground-state search. Scans all 2^n assignments without
    /// materializing the energy vector; returns the certified minimum and
    /// every attaining state in ascending index order.
    pub fn brute_force(&self) -> Result<SolutionSet> {
        if self.n > BRUTE_FORCE_MAX_N {
            return Err(Error::CapExceeded {
                what: "brute force",
                n: self.n,
                cap: BRUTE_FORCE_MAX_N,
            });
        }
        let terms = self.terms();
        let len = 1u64 << self.n;
        let scan = |range: std::ops::Range<u64>| -> (i32, Vec<u64>) {
            let mut best = i32::MAX;
            let mut states = Vec::new();
            for z in range {
                let mut e = 0i32;
                for &(mask, sign) in &terms {
                    let parity = ((z & mask).count_ones() & 1) as i32;
                    e -= sign * (1 - 2 * parity);
                }
                if e < best {
                    best = e;
                    states.clear();
                    states.push(z);
                } else if e == best {
                    states.push(z);
                }
            }
            (best, states)
        };

        let chunk = 1u64 << 16;
        let parts: Vec<(i32, Vec<u64>)> = {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                if len as usize >= PAR_MIN_LEN {
                    let starts: Vec<u64> = (0..len).step_by(chunk as usize).collect();
                    starts
                        .into_par_iter()
                        .map(|s| scan(s..(s + chunk).min(len)))
                        .collect()
                } else {
                    vec![scan(0..len)]
                }
            }
            #[cfg(not(feature = "parallel"))]
            {
                let _ = chunk;
                vec![scan(0..len)]
            }
        };

        // Ordered merge keeps ground states sorted by index.
        let best = parts.iter().map(|(e, _)| *e).min().expect("nonempty scan");
        let ground_states = parts
            .iter()
            .filter(|(e, _)| *e == best)
            .flat_map(|(_, states)| states.iter())
            .map(|&z| BitString::from_index(z, self.n))
            .collect();

        Ok(SolutionSet {
            instance_id: self.instance_id.clone(),
            ground_energy: best as i64,
            ground_states,
        })
    }

    /// Gauge transform at variable j: flips planted bit j and the sign of
    /// every constraint containing j. The spectrum is unchanged up to the
    /// corresponding relabeling x -> x xor e_j of assignments.
    pub fn gauge_flip(&self, j: usize) -> Result<Instance> {
        if j >= self.n {
            return Err(Error::InvalidParameter(format!(
                "gauge variable {j} out of range for n = {}",
                self.n
            )));
        }
        let mut planted = self.planted.clone();
        planted.flip(j);
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint {
                vars: c.vars,
                sign: if c.vars.contains(&j) { -c.sign } else { c.sign },
            })
            .collect();
        Ok(Instance {
            instance_id: format!("{}+g{j}", self.instance_id),
            planted,
            constraints,
            ..self.clone()
        })
    }
}

// ---------------------------------------------------------------------------
// Solution sets and ensemble statistics

/// Certified ground-state set of one instance.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SolutionSet {
    pub instance_id: String,
    pub ground_energy: i64,
    pub ground_states: Vec<BitString>,
}

impl SolutionSet {
    pub fn count(&self) -> usize {
        self.ground_states.len()
    }

    /// Minimum Hamming distance from `x` to the set.
    pub fn nearest_distance(&self, x: &BitString) -> Result<usize> {
        self.ground_states
            .iter()
            .map(|g| hamming(g, x))
            .try_fold(usize::MAX, |acc, d| d.map(|d| acc.min(d)))
    }
}

/// Ensemble statistics over ground-state sets: degeneracy distribution and
/// pairwise Hamming distances within each set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionStatistics {
    pub instances: usize,
    pub mean_count: f64,
    /// Fraction of instances with more than one ground state.
    pub multi_fraction: f64,
    /// Histogram of ground-state counts.
    pub count_hist: std::collections::BTreeMap<usize, u64>,
    /// Histogram of pairwise Hamming distances within ground-state sets.
    pub pairwise_hist: std::collections::BTreeMap<usize, u64>,
}

/// Aggregates degeneracy statistics over an ensemble of solution sets.
pub fn solution_statistics(sets: &[SolutionSet]) -> Result<SolutionStatistics> {
    if sets.is_empty() {
        return Err(Error::InvalidParameter(
            "solution statistics need at least one solution set".into(),
        ));
    }
    let mut count_hist = std::collections::BTreeMap::new();
    let mut pairwise_hist = std::collections::BTreeMap::new();
    let mut total = 0usize;
    let mut multi = 0usize;
    for set in sets {
        let c = set.count();
        total += c;
        if c > 1 {
            multi += 1;
        }
        *count_hist.entry(c).or_insert(0u64) += 1;
        for (a, ga) in set.ground_states.iter().enumerate() {
            for gb in &set.ground_states[a + 1..] {
                *pairwise_hist.entry(hamming(ga, gb)?).or_insert(0u64) += 1;
            }
        }
    }
    Ok(SolutionStatistics {
        instances: sets.len(),
        mean_count: total as f64 / sets.len() as f64,
        multi_fraction: multi as f64 / sets.len() as f64,
        count_hist,
        pairwise_hist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_constraint() -> Instance {
        Instance {
            instance_id: "test_single".into(),
            n: 3,
            density: 1.0 / 3.0,
            epsilon: 0.0,
            seed: 0,
            planted: BitString::zeros(3),
            constraints: vec![Constraint {
                vars: [0, 1, 2],
                sign: 1,
            }],
        }
    }

    #[test]
    fn bitstring_roundtrip_and_indexing() {
        let b = BitString::parse("0110").unwrap();
        assert_eq!(b.to_string(), "0110");
        // variable j occupies bit j: bits 1 and 2 set.
        assert_eq!(b.to_index(), 0b0110);
        assert_eq!(BitString::from_index(0b0110, 4), b);
        assert_eq!(b.bit(0), 0);
        assert_eq!(b.bit(1), 1);
        assert_eq!(b.spin(0), 1);
        assert_eq!(b.spin(1), -1);
        assert!(BitString::parse("01x0").is_err());
    }

    #[test]
    fn hamming_examples() {
        let a = BitString::parse("0000").unwrap();
        let b = BitString::parse("0110").unwrap();
        assert_eq!(hamming(&a, &b).unwrap(), 2);
        assert_eq!(hamming(&a, &a).unwrap(), 0);
        let short = BitString::parse("01").unwrap();
        assert!(matches!(
            hamming(&a, &short),
            Err(Error::LengthMismatch { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn energy_of_single_constraint() {
        let inst = single_constraint();
        // 000 satisfies (+1 coupling, all spins +1): energy -1.
        assert_eq!(inst.energy(&BitString::parse("000").unwrap()).unwrap(), -1);
        // One flipped spin violates it: energy +1.
        assert_eq!(inst.energy(&BitString::parse("100").unwrap()).unwrap(), 1);
        assert_eq!(inst.energy(&BitString::parse("110").unwrap()).unwrap(), -1);
        assert!(inst.energy(&BitString::parse("10").unwrap()).is_err());
    }

    #[test]
    fn diagonal_of_single_constraint() {
        let inst = single_constraint();
        // Index order 000,100,010,110,001,101,011,111 (variable j at bit j):
        // energy is -1 for even parity, +1 for odd.
        assert_eq!(
            inst.diagonal_energies().unwrap(),
            vec![-1, 1, 1, -1, 1, -1, -1, 1]
        );
    }

    #[test]
    fn brute_force_single_constraint() {
        let sols = single_constraint().brute_force().unwrap();
        assert_eq!(sols.ground_energy, -1);
        assert_eq!(sols.count(), 4);
        let strings: Vec<String> = sols.ground_states.iter().map(|g| g.to_string()).collect();
        assert_eq!(strings, vec!["000", "110", "101", "011"]);
    }

    #[test]
    fn generate_planted_energy_matches_formula() {
        // N_C = 40, N_unsat = round(0.1 * 40) = 4: energy -(40 - 8) = -32.
        let inst = Instance::generate(10, 4.0, 0.1, 7).unwrap();
        assert_eq!(inst.num_constraints(), 40);
        assert_eq!(inst.planted_energy(), -32);
        // epsilon = 0 plants a perfect ground state at energy -N_C.
        let sat = Instance::generate(10, 4.0, 0.0, 7).unwrap();
        assert_eq!(sat.planted_energy(), -40);
    }

    #[test]
    fn generate_invariants() {
        let inst = Instance::generate(12, 2.0, 0.2, 99).unwrap();
        assert_eq!(inst.num_constraints(), 24);
        // Distinct, strictly increasing triples in lexicographic order.
        let mut seen = BTreeSet::new();
        for c in &inst.constraints {
            assert!(c.vars[0] < c.vars[1] && c.vars[1] < c.vars[2]);
            assert!(c.vars[2] < 12);
            assert!(seen.insert(c.vars));
            assert!(c.sign == 1 || c.sign == -1);
        }
        let sorted: Vec<[usize; 3]> = {
            let mut v: Vec<[usize; 3]> = inst.constraints.iter().map(|c| c.vars).collect();
            v.sort();
            v
        };
        assert_eq!(
            sorted,
            inst.constraints.iter().map(|c| c.vars).collect::<Vec<_>>()
        );
        // Exactly round(eps * N_C) constraints violated by the planted string.
        let violated = inst
            .constraints
            .iter()
            .filter(|c| {
                let prod =
                    inst.planted.spin(c.vars[0]) * inst.planted.spin(c.vars[1]) * inst.planted.spin(c.vars[2]);
                c.sign as i64 * prod == -1
            })
            .count();
        assert_eq!(violated, round_count(0.2, 24));
        assert_eq!(inst.planted_energy(), -(24 - 2 * violated as i64));
    }

    #[test]
    fn generate_is_deterministic() {
        let a = Instance::generate(10, 1.5, 0.1, 3).unwrap();
        let b = Instance::generate(10, 1.5, 0.1, 3).unwrap();
        assert_eq!(a, b);
        let c = Instance::generate(10, 1.5, 0.1, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generate_rejects_bad_parameters() {
        assert!(Instance::generate(2, 1.0, 0.0, 0).is_err());
        assert!(matches!(
            Instance::generate(4, 2.0, 0.0, 0),
            Err(Error::TooManyConstraints {
                requested: 8,
                available: 4,
                n: 4
            })
        ));
        assert!(Instance::generate(10, 4.0, 0.5, 0).is_err());
        assert!(Instance::generate(10, 4.0, -0.1, 0).is_err());
        assert!(Instance::generate(10, 0.0, 0.1, 0).is_err());
    }

    #[test]
    fn brute_force_ground_at_most_planted() {
        for seed in 0..5 {
            let inst = Instance::generate(10, 2.0, 0.1, seed).unwrap();
            let sols = inst.brute_force().unwrap();
            assert!(sols.ground_energy <= inst.planted_energy());
            // Every reported state attains the reported energy.
            for g in &sols.ground_states {
                assert_eq!(inst.energy(g).unwrap(), sols.ground_energy);
            }
        }
    }

    #[test]
    fn brute_force_agrees_with_diagonal_minimum() {
        for (n, density, seed) in [(8, 4.0, 1), (10, 1.5, 2), (12, 2.0, 3)] {
            let inst = Instance::generate(n, density, 0.1, seed).unwrap();
            let diag = inst.diagonal_energies().unwrap();
            let sols = inst.brute_force().unwrap();
            let min = *diag.iter().min().unwrap() as i64;
            let count = diag.iter().filter(|&&e| e as i64 == min).count();
            assert_eq!(sols.ground_energy, min);
            assert_eq!(sols.count(), count);
        }
    }

    #[test]
    fn diagonal_matches_pointwise_energy() {
        let inst = Instance::generate(9, 4.0, 0.2, 5).unwrap();
        let diag = inst.diagonal_energies().unwrap();
        for z in (0..512).step_by(37) {
            let x = BitString::from_index(z, 9);
            assert_eq!(diag[z as usize] as i64, inst.energy(&x).unwrap());
        }
    }

    #[test]
    fn gauge_flip_relabels_spectrum() {
        let inst = Instance::generate(8, 2.0, 0.1, 11).unwrap();
        let flipped = inst.gauge_flip(3).unwrap();
        // energy_flipped(x xor e_3) == energy(x) for arbitrary x.
        for z in (0..256u64).step_by(17) {
            let x = BitString::from_index(z, 8);
            let mut y = x.clone();
            y.flip(3);
            assert_eq!(inst.energy(&x).unwrap(), flipped.energy(&y).unwrap());
        }
        assert_eq!(inst.planted_energy(), flipped.planted_energy());
        assert_eq!(
            inst.brute_force().unwrap().ground_energy,
            flipped.brute_force().unwrap().ground_energy
        );
    }

    #[test]
    fn cap_enforced() {
        let inst = Instance {
            n: 30,
            ..single_constraint()
        };
        assert!(matches!(
            inst.brute_force(),
            Err(Error::CapExceeded { cap: 26, n: 30, .. })
        ));
        assert!(inst.diagonal_energies().is_err());
    }

    #[test]
    fn instance_json_roundtrip() {
        let inst = Instance::generate(8, 1.5, 0.1, 21).unwrap();
        let line = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&line).unwrap();
        assert_eq!(inst, back);
        // Spot-check the wire format.
        assert!(line.contains("\"instance_id\""));
        assert!(line.contains("\"planted\":\""));
        assert!(line.contains("\"constraints\":[["));
    }

    #[test]
    fn solution_statistics_aggregates() {
        let sets = vec![
            SolutionSet {
                instance_id: "a".into(),
                ground_energy: -10,
                ground_states: vec![BitString::parse("0000").unwrap()],
            },
            SolutionSet {
                instance_id: "b".into(),
                ground_energy: -8,
                ground_states: vec![
                    BitString::parse("0000").unwrap(),
                    BitString::parse("0011").unwrap(),
                    BitString::parse("1111").unwrap(),
                ],
            },
        ];
        let stats = solution_statistics(&sets).unwrap();
        assert_eq!(stats.instances, 2);
        assert_eq!(stats.mean_count, 2.0);
        assert_eq!(stats.multi_fraction, 0.5);
        assert_eq!(stats.count_hist[&1], 1);
        assert_eq!(stats.count_hist[&3], 1);
        // Pairwise distances in set b: 2, 4, 2.
        assert_eq!(stats.pairwise_hist[&2], 2);
        assert_eq!(stats.pairwise_hist[&4], 1);
        assert!(solution_statistics(&[]).is_err());
    }

    #[test]
    fn nearest_distance_over_set() {
        let set = SolutionSet {
            instance_id: "a".into(),
            ground_energy: -1,
            ground_states: vec![
                BitString::parse("0000").unwrap(),
                BitString::parse("1110").unwrap(),
            ],
        };
        assert_eq!(set.nearest_distance(&BitString::parse("1100").unwrap()).unwrap(), 1);
        assert_eq!(set.nearest_distance(&BitString::parse("0001").unwrap()).unwrap(), 1);
        assert_eq!(set.nearest_distance(&BitString::parse("0000").unwrap()).unwrap(), 0);
    }
}
