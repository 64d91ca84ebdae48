//! Dense state-vector simulation core.
//!
//! The state of an N-qubit register is a vector of 2^N complex amplitudes.
//! Basis index b encodes qubit i as bit i of b, so qubit 0 is the least
//! significant bit. All measurements sample from exact Born probabilities
//! using the caller's random number generator and renormalize the collapsed
//! state by the exactly computed branch norm, which keeps the total norm at
//! 1 to within accumulated floating-point error (< 1e-10 for any circuit
//! this crate is asked to run).

use num_complex::Complex64;
use rand::Rng;

use crate::gates::{gate_matrix, GateMatrix};
use crate::ir::{Axis, GateKind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest register the dense simulator accepts (amplitude storage for
/// 2^26 complex doubles is 1 GiB).
pub const MAX_QUBITS: usize = 26;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubit_count: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros state |0...0>.
    pub fn new(qubit_count: usize) -> Self {
        assert!(
            (1..=MAX_QUBITS).contains(&qubit_count),
            "qubit count {qubit_count} outside 1..={MAX_QUBITS}"
        );
        let mut amplitudes = vec![ZERO; 1 << qubit_count];
        amplitudes[0] = ONE;
        StateVector {
            qubit_count,
            amplitudes,
        }
    }

    /// Build a state from explicit amplitudes (length 2^n), renormalizing
    /// by the exact norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        let dim = amplitudes.len();
        assert!(dim.is_power_of_two() && dim >= 2, "amplitude count {dim}");
        let qubit_count = dim.trailing_zeros() as usize;
        assert!(qubit_count <= MAX_QUBITS);
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.0, "state must have nonzero norm");
        StateVector {
            qubit_count,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply a gate matrix to the given target qubits. The first target is
    /// the most significant bit of the matrix index (see `gates`).
    pub fn apply_gate(&mut self, matrix: &GateMatrix, targets: &[usize]) {
        let k = targets.len();
        debug_assert_eq!(matrix.qubit_count(), k);
        debug_assert!(targets.iter().all(|&t| t < self.qubit_count));
        debug_assert!((1..k).all(|i| !targets[..i].contains(&targets[i])));

        let dim = 1usize << k;
        let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        // offsets[l] places local basis index l onto the global target bits
        let offsets: Vec<usize> = (0..dim)
            .map(|l| {
                targets
                    .iter()
                    .enumerate()
                    .map(|(j, &t)| ((l >> (k - 1 - j)) & 1) << t)
                    .sum()
            })
            .collect();

        let mut scratch = vec![ZERO; dim];
        for base in 0..self.amplitudes.len() {
            if base & mask != 0 {
                continue;
            }
            for (row, s) in scratch.iter_mut().enumerate() {
                let mut acc = ZERO;
                for (col, &offset) in offsets.iter().enumerate() {
                    let a = self.amplitudes[base | offset];
                    if a != ZERO {
                        acc += matrix.entry(row, col) * a;
                    }
                }
                *s = acc;
            }
            for (l, &v) in scratch.iter().enumerate() {
                self.amplitudes[base | offsets[l]] = v;
            }
        }
    }

    fn apply_kind(&mut self, kind: GateKind, qubit: usize) {
        self.apply_gate(&gate_matrix(kind, None, None), &[qubit]);
    }

    /// Probability that measuring `qubit` along `axis` gives the +1
    /// eigenvalue (outcome bit 0).
    pub fn plus_probability(&self, qubit: usize, axis: Axis) -> f64 {
        match axis {
            Axis::Z => {
                let mask = 1usize << qubit;
                self.amplitudes
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| b & mask == 0)
                    .map(|(_, a)| a.norm_sqr())
                    .sum()
            }
            _ => self.parity_plus_probability(&[(qubit, axis)]),
        }
    }

    /// Measure one qubit along an axis. Returns the outcome bit: 0 for the
    /// +1 eigenvalue, 1 for -1. The state collapses to the normalized
    /// projection.
    pub fn measure_qubit<R: Rng>(&mut self, qubit: usize, axis: Axis, rng: &mut R) -> bool {
        match axis {
            Axis::Z => self.measure_z(qubit, rng),
            Axis::X => {
                self.apply_kind(GateKind::H, qubit);
                let bit = self.measure_z(qubit, rng);
                self.apply_kind(GateKind::H, qubit);
                bit
            }
            Axis::Y => {
                // V = H Sdag maps |+i> -> |0>, |-i> -> |1>
                self.apply_kind(GateKind::Sdag, qubit);
                self.apply_kind(GateKind::H, qubit);
                let bit = self.measure_z(qubit, rng);
                self.apply_kind(GateKind::H, qubit);
                self.apply_kind(GateKind::S, qubit);
                bit
            }
        }
    }

    fn measure_z<R: Rng>(&mut self, qubit: usize, rng: &mut R) -> bool {
        let p_zero = self.plus_probability(qubit, Axis::Z);
        let outcome_one = rng.random::<f64>() >= p_zero;
        let p_branch = if outcome_one { 1.0 - p_zero } else { p_zero };
        let mask = 1usize << qubit;
        let keep = if outcome_one { mask } else { 0 };
        let scale = 1.0 / p_branch.sqrt();
        for (b, a) in self.amplitudes.iter_mut().enumerate() {
            if b & mask == keep {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        outcome_one
    }

    /// Prepare `qubit` in the +1 eigenstate of `axis` (z -> |0>, x -> |+>,
    /// y -> |+i>): a projective measurement along the axis followed by a
    /// corrective unitary when the -1 branch was taken, so entanglement
    /// with the rest of the register is destroyed exactly as a physical
    /// reset would.
    pub fn prepare<R: Rng>(&mut self, qubit: usize, axis: Axis, rng: &mut R) {
        let outcome_one = self.measure_qubit(qubit, axis, rng);
        if outcome_one {
            let correction = match axis {
                Axis::Z => GateKind::X, // X|1> = |0>
                Axis::X => GateKind::Z, // Z|-> = |+>
                Axis::Y => GateKind::Z, // Z|-i> = |+i>
            };
            self.apply_kind(correction, qubit);
        }
    }

    /// Amplitudes of P|psi> for a Pauli string P given as (qubit, axis)
    /// pairs.
    fn pauli_apply(&self, pairs: &[(usize, Axis)]) -> Vec<Complex64> {
        let mut flip_mask = 0usize; // X and Y flip their qubit
        let mut phase_mask = 0usize; // Y and Z read their qubit's bit
        let mut y_count = 0u32;
        for &(q, axis) in pairs {
            match axis {
                Axis::X => flip_mask |= 1 << q,
                Axis::Y => {
                    flip_mask |= 1 << q;
                    phase_mask |= 1 << q;
                    y_count += 1;
                }
                Axis::Z => phase_mask |= 1 << q,
            }
        }
        // Y|b> = i(-1)^b |1-b>, so the string contributes i^{#Y} times
        // (-1)^{popcount(b & phase_mask)}.
        let i_pow = match y_count % 4 {
            0 => ONE,
            1 => Complex64::new(0.0, 1.0),
            2 => -ONE,
            _ => Complex64::new(0.0, -1.0),
        };
        let mut out = vec![ZERO; self.amplitudes.len()];
        for (b, &a) in self.amplitudes.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let sign = if (b & phase_mask).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            out[b ^ flip_mask] = a * i_pow * sign;
        }
        out
    }

    /// Probability that the Pauli string measures +1.
    pub fn parity_plus_probability(&self, pairs: &[(usize, Axis)]) -> f64 {
        let transformed = self.pauli_apply(pairs);
        self.amplitudes
            .iter()
            .zip(&transformed)
            .map(|(a, p)| (a + p).norm_sqr())
            .sum::<f64>()
            / 4.0
    }

    /// Projective measurement of a Pauli string. Returns one outcome bit
    /// (0 for eigenvalue +1) and collapses the state onto the corresponding
    /// eigenspace; no further information leaves the measurement.
    pub fn measure_parity<R: Rng>(&mut self, pairs: &[(usize, Axis)], rng: &mut R) -> bool {
        debug_assert!(!pairs.is_empty());
        let transformed = self.pauli_apply(pairs);
        let p_plus = self
            .amplitudes
            .iter()
            .zip(&transformed)
            .map(|(a, p)| (a + p).norm_sqr())
            .sum::<f64>()
            / 4.0;
        let outcome_one = rng.random::<f64>() >= p_plus;
        let (sign, p_branch) = if outcome_one {
            (-1.0, 1.0 - p_plus)
        } else {
            (1.0, p_plus)
        };
        let scale = 0.5 / p_branch.sqrt();
        for (a, p) in self.amplitudes.iter_mut().zip(&transformed) {
            *a = (*a + sign * p) * scale;
        }
        outcome_one
    }

    /// Measure every qubit in the z basis at once: samples one basis state
    /// with probability |a_b|^2 and collapses onto it. Bit i of the result
    /// is qubit i's outcome.
    pub fn measure_all<R: Rng>(&mut self, rng: &mut R) -> Vec<bool> {
        let u = rng.random::<f64>();
        let mut cumulative = 0.0;
        let mut chosen = None;
        for (b, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            cumulative += p;
            chosen = Some(b);
            if u < cumulative {
                break;
            }
        }
        let chosen = chosen.expect("state has nonzero norm");
        let phase = self.amplitudes[chosen] / self.amplitudes[chosen].norm();
        self.amplitudes.fill(ZERO);
        self.amplitudes[chosen] = phase;
        (0..self.qubit_count)
            .map(|q| chosen & (1 << q) != 0)
            .collect()
    }
}
