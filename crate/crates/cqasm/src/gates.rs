//! Unitary matrices for the gate catalog.
//!
//! Conventions fixed here once for the whole simulator:
//!   RX(t) = exp(-i t X / 2), RY(t) = exp(-i t Y / 2), RZ(t) = exp(-i t Z / 2)
//!   X90 = RX(pi/2), MX90 = RX(-pi/2), Y90 = RY(pi/2), MY90 = RY(-pi/2)
//!   S = diag(1, i), T = diag(1, e^{i pi/4}), CRK = diag(1,1,1, e^{i pi/2^k}),
//!   CR(t) = diag(1,1,1, e^{i t}).
//!
//! For multi-qubit matrices the first qubit operand is the most significant
//! bit of the row/column index, so CNOT(control, target) is the familiar
//! [[1,0,0,0],[0,1,0,0],[0,0,0,1],[0,0,1,0]].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::ir::GateKind;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense unitary on 1, 2 or 3 qubits, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    qubit_count: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    pub fn new(qubit_count: usize, entries: Vec<Complex64>) -> Self {
        let dim = 1usize << qubit_count;
        assert_eq!(entries.len(), dim * dim, "matrix shape");
        GateMatrix {
            qubit_count,
            entries,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dimension(&self) -> usize {
        1 << self.qubit_count
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dimension() + col]
    }

    /// Largest entry-wise deviation of U†U from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let dim = self.dimension();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = ZERO;
                for m in 0..dim {
                    acc += self.entry(m, r).conj() * self.entry(m, c);
                }
                let expect = if r == c { ONE } else { ZERO };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }
}

fn single(entries: [Complex64; 4]) -> GateMatrix {
    GateMatrix::new(1, entries.to_vec())
}

fn diagonal4(phase: Complex64) -> GateMatrix {
    let mut m = vec![ZERO; 16];
    m[0] = ONE;
    m[5] = ONE;
    m[10] = ONE;
    m[15] = phase;
    GateMatrix::new(2, m)
}

/// A 2^k dimensional permutation: entry (f(c), c) = 1.
fn permutation(qubit_count: usize, f: impl Fn(usize) -> usize) -> GateMatrix {
    let dim = 1usize << qubit_count;
    let mut m = vec![ZERO; dim * dim];
    for c in 0..dim {
        m[f(c) * dim + c] = ONE;
    }
    GateMatrix::new(qubit_count, m)
}

fn rotation_x(theta: f64) -> GateMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    single([
        Complex64::new(c, 0.0),
        Complex64::new(0.0, -s),
        Complex64::new(0.0, -s),
        Complex64::new(c, 0.0),
    ])
}

fn rotation_y(theta: f64) -> GateMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    single([
        Complex64::new(c, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(c, 0.0),
    ])
}

fn rotation_z(theta: f64) -> GateMatrix {
    single([
        Complex64::from_polar(1.0, -theta / 2.0),
        ZERO,
        ZERO,
        Complex64::from_polar(1.0, theta / 2.0),
    ])
}

/// Matrix for a gate kind. Parameters must match the kind; this is
/// guaranteed for instructions that passed semantic analysis.
pub fn gate_matrix(kind: GateKind, angle: Option<f64>, k: Option<u32>) -> GateMatrix {
    let angle_of = || angle.expect("angle validated during analysis");
    match kind {
        GateKind::I => single([ONE, ZERO, ZERO, ONE]),
        GateKind::H => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            single([h, h, h, -h])
        }
        GateKind::X => single([ZERO, ONE, ONE, ZERO]),
        GateKind::Y => single([
            ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            ZERO,
        ]),
        GateKind::Z => single([ONE, ZERO, ZERO, -ONE]),
        GateKind::Rx => rotation_x(angle_of()),
        GateKind::Ry => rotation_y(angle_of()),
        GateKind::Rz => rotation_z(angle_of()),
        GateKind::X90 => rotation_x(FRAC_PI_2),
        GateKind::MX90 => rotation_x(-FRAC_PI_2),
        GateKind::Y90 => rotation_y(FRAC_PI_2),
        GateKind::MY90 => rotation_y(-FRAC_PI_2),
        GateKind::S => single([ONE, ZERO, ZERO, Complex64::new(0.0, 1.0)]),
        GateKind::Sdag => single([ONE, ZERO, ZERO, Complex64::new(0.0, -1.0)]),
        GateKind::T => single([ONE, ZERO, ZERO, Complex64::from_polar(1.0, FRAC_PI_4)]),
        GateKind::Tdag => single([ONE, ZERO, ZERO, Complex64::from_polar(1.0, -FRAC_PI_4)]),
        GateKind::Cnot => permutation(2, |b| if b & 0b10 != 0 { b ^ 0b01 } else { b }),
        GateKind::Toffoli => permutation(3, |b| if b & 0b110 == 0b110 { b ^ 0b001 } else { b }),
        GateKind::Cz => diagonal4(-ONE),
        GateKind::Swap => permutation(2, |b| match b {
            0b01 => 0b10,
            0b10 => 0b01,
            other => other,
        }),
        GateKind::Crk => {
            let k = k.expect("k validated during analysis");
            diagonal4(Complex64::from_polar(1.0, PI / f64::powi(2.0, k as i32)))
        }
        GateKind::Cr => diagonal4(Complex64::from_polar(1.0, angle_of())),
    }
}

#[cfg(test)]
mod tests {
    #![allow(clippy::approx_constant)] // 3.14 is the literal angle used in the corpus

    use super::*;

    const TOL: f64 = 1e-12;

    fn assert_close(a: Complex64, b: Complex64) {
        assert!((a - b).norm() < TOL, "{a} != {b}");
    }

    /// Independent oracle: exp(-i * t/2 * P) by scaled power series, for a
    /// 2x2 Pauli P.
    fn exponential_oracle(pauli: [[Complex64; 2]; 2], theta: f64) -> [[Complex64; 2]; 2] {
        let a = Complex64::new(0.0, -theta / 2.0);
        let mut term = [[ONE, ZERO], [ZERO, ONE]];
        let mut sum = term;
        for n in 1..60 {
            let mut next = [[ZERO; 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    for m in 0..2 {
                        next[r][c] += term[r][m] * pauli[m][c];
                    }
                    next[r][c] *= a / n as f64;
                }
            }
            // matrix product above multiplies by (a P / n) each step
            term = next;
            for r in 0..2 {
                for c in 0..2 {
                    sum[r][c] += term[r][c];
                }
            }
        }
        sum
    }

    #[test]
    fn identity_matrix() {
        let m = gate_matrix(GateKind::I, None, None);
        assert_close(m.entry(0, 0), ONE);
        assert_close(m.entry(0, 1), ZERO);
        assert_close(m.entry(1, 0), ZERO);
        assert_close(m.entry(1, 1), ONE);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn rx_pi_matches_series_oracle() {
        let pauli_x = [[ZERO, ONE], [ONE, ZERO]];
        let expect = exponential_oracle(pauli_x, PI);
        let m = gate_matrix(GateKind::Rx, Some(PI), None);
        for r in 0..2 {
            for c in 0..2 {
                assert_close(m.entry(r, c), expect[r][c]);
            }
        }
        // frozen analytic form {{0, -i}, {-i, 0}}
        assert_close(m.entry(0, 0), ZERO);
        assert_close(m.entry(0, 1), Complex64::new(0.0, -1.0));
        assert_close(m.entry(1, 0), Complex64::new(0.0, -1.0));
        assert_close(m.entry(1, 1), ZERO);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn rotations_match_series_oracle_at_odd_angles() {
        let pauli_x = [[ZERO, ONE], [ONE, ZERO]];
        let pauli_y = [
            [ZERO, Complex64::new(0.0, -1.0)],
            [Complex64::new(0.0, 1.0), ZERO],
        ];
        let pauli_z = [[ONE, ZERO], [ZERO, -ONE]];
        for theta in [0.0, 0.23, -1.57, 2.9, 3.14] {
            for (kind, pauli) in [
                (GateKind::Rx, pauli_x),
                (GateKind::Ry, pauli_y),
                (GateKind::Rz, pauli_z),
            ] {
                let expect = exponential_oracle(pauli, theta);
                let m = gate_matrix(kind, Some(theta), None);
                for r in 0..2 {
                    for c in 0..2 {
                        assert_close(m.entry(r, c), expect[r][c]);
                    }
                }
            }
        }
    }

    #[test]
    fn crk_1_is_diag_i() {
        let m = gate_matrix(GateKind::Crk, None, Some(1));
        assert_close(m.entry(3, 3), Complex64::new(0.0, 1.0));
        for d in 0..3 {
            assert_close(m.entry(d, d), ONE);
        }
    }

    #[test]
    fn ninety_degree_family() {
        assert_eq!(
            gate_matrix(GateKind::X90, None, None),
            gate_matrix(GateKind::Rx, Some(FRAC_PI_2), None)
        );
        assert_eq!(
            gate_matrix(GateKind::MX90, None, None),
            gate_matrix(GateKind::Rx, Some(-FRAC_PI_2), None)
        );
        assert_eq!(
            gate_matrix(GateKind::Y90, None, None),
            gate_matrix(GateKind::Ry, Some(FRAC_PI_2), None)
        );
        assert_eq!(
            gate_matrix(GateKind::MY90, None, None),
            gate_matrix(GateKind::Ry, Some(-FRAC_PI_2), None)
        );
    }

    #[test]
    fn every_catalog_matrix_is_unitary() {
        for kind in crate::ir::GATE_KINDS {
            let (angle, k) = match kind.parameter() {
                crate::ir::GateParameter::None => (None, None),
                crate::ir::GateParameter::Angle => (Some(0.739), None),
                crate::ir::GateParameter::PhaseExponent => (None, Some(3)),
            };
            let m = gate_matrix(kind, angle, k);
            assert_eq!(m.dimension(), 1 << kind.arity());
            assert!(
                m.unitarity_error() < TOL,
                "{} deviates from unitarity by {}",
                kind.mnemonic(),
                m.unitarity_error()
            );
        }
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let m = gate_matrix(GateKind::Cnot, None, None);
        // basis order: |control target> = 00, 01, 10, 11
        assert_close(m.entry(0, 0), ONE);
        assert_close(m.entry(1, 1), ONE);
        assert_close(m.entry(3, 2), ONE);
        assert_close(m.entry(2, 3), ONE);
        assert_close(m.entry(2, 2), ZERO);
    }

    #[test]
    fn toffoli_flips_only_when_both_controls_set() {
        let m = gate_matrix(GateKind::Toffoli, None, None);
        for c in 0..8 {
            let expect_row = if c & 0b110 == 0b110 { c ^ 1 } else { c };
            for r in 0..8 {
                assert_close(m.entry(r, c), if r == expect_row { ONE } else { ZERO });
            }
        }
    }
}
