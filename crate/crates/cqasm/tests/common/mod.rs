//! Shared helpers for the integration suites, most importantly a
//! deliberately naive reference simulator that shares no code with the
//! engine under test: single-qubit gates go through full dense
//! 2^n x 2^n matrix application, multi-qubit gates through explicit
//! basis-index permutations, and Pauli strings through Kronecker
//! products. Slow and obvious on purpose.

#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(name)
}

pub fn corpus_source(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).expect("corpus file")
}

pub const CORPUS: [&str; 8] = [
    "bell.qc",
    "rename.qc",
    "feedback.qc",
    "bincontrolled.qc",
    "parity.qc",
    "parallel.qc",
    "grover.qc",
    "variational.qc",
];

/// Reference state vector, basis index bit i = qubit i.
#[derive(Clone)]
pub struct Naive {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

pub fn mat_h() -> [[Complex64; 2]; 2] {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[r, r], [r, -r]]
}

pub fn mat_x() -> [[Complex64; 2]; 2] {
    [[C0, C1], [C1, C0]]
}

pub fn mat_y() -> [[Complex64; 2]; 2] {
    [
        [C0, Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), C0],
    ]
}

pub fn mat_z() -> [[Complex64; 2]; 2] {
    [[C1, C0], [C0, -C1]]
}

pub fn mat_i() -> [[Complex64; 2]; 2] {
    [[C1, C0], [C0, C1]]
}

pub fn mat_rx(theta: f64) -> [[Complex64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [
        [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
        [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ]
}

pub fn mat_ry(theta: f64) -> [[Complex64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

impl Naive {
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![C0; 1 << n];
        amps[index] = C1;
        Naive { n, amps }
    }

    /// Single-qubit gate by building the full 2^n x 2^n operator
    /// entry-by-entry and multiplying.
    pub fn gate_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let dim = 1usize << self.n;
        let mask = 1usize << q;
        let mut out = vec![C0; dim];
        for (r, out_r) in out.iter_mut().enumerate() {
            for (c, a) in self.amps.iter().enumerate() {
                if r & !mask == c & !mask {
                    let entry = m[usize::from(r & mask != 0)][usize::from(c & mask != 0)];
                    *out_r += entry * a;
                }
            }
        }
        self.amps = out;
    }

    /// Any classical reversible operation, as a basis permutation.
    pub fn permute(&mut self, f: impl Fn(usize) -> usize) {
        let mut out = vec![C0; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            out[f(b)] += a;
        }
        self.amps = out;
    }

    pub fn x(&mut self, q: usize) {
        self.permute(|b| b ^ (1 << q));
    }

    pub fn h(&mut self, q: usize) {
        self.gate_1q(q, mat_h());
    }

    pub fn z(&mut self, q: usize) {
        self.gate_1q(q, mat_z());
    }

    pub fn rx(&mut self, q: usize, theta: f64) {
        self.gate_1q(q, mat_rx(theta));
    }

    pub fn ry(&mut self, q: usize, theta: f64) {
        self.gate_1q(q, mat_ry(theta));
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        self.permute(|b| b ^ (((b >> control) & 1) << target));
    }

    pub fn toffoli(&mut self, c1: usize, c2: usize, target: usize) {
        self.permute(|b| b ^ ((((b >> c1) & 1) & ((b >> c2) & 1)) << target));
    }

    pub fn probability_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(b, _)| pred(*b))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// P(+1) for a Pauli string, via an explicit Kronecker-product matrix:
    /// full = A_{n-1} (x) ... (x) A_0 with qubit 0 as the least
    /// significant factor.
    pub fn pauli_plus_probability(&self, paulis: &[(usize, [[Complex64; 2]; 2])]) -> f64 {
        let dim = 1usize << self.n;
        let mut full = vec![C1; 1]; // 1x1 seed
        let mut full_dim = 1usize;
        for q in (0..self.n).rev() {
            let factor = paulis
                .iter()
                .find(|(i, _)| *i == q)
                .map(|(_, m)| *m)
                .unwrap_or(mat_i());
            // kron(full, factor)
            let new_dim = full_dim * 2;
            let mut next = vec![C0; new_dim * new_dim];
            for r in 0..full_dim {
                for c in 0..full_dim {
                    let v = full[r * full_dim + c];
                    if v == C0 {
                        continue;
                    }
                    for rr in 0..2 {
                        for cc in 0..2 {
                            next[(r * 2 + rr) * new_dim + (c * 2 + cc)] = v * factor[rr][cc];
                        }
                    }
                }
            }
            full = next;
            full_dim = new_dim;
        }
        assert_eq!(full_dim, dim);
        // p+ = || (psi + P psi) / 2 ||^2
        let mut p = 0.0;
        for r in 0..dim {
            let mut transformed = C0;
            for c in 0..dim {
                let v = full[r * dim + c];
                if v != C0 {
                    transformed += v * self.amps[c];
                }
            }
            p += (self.amps[r] + transformed).norm_sqr() / 4.0;
        }
        p
    }
}

/// 3 sigma of a binomial proportion estimate.
pub fn three_sigma(p: f64, samples: u64) -> f64 {
    3.0 * (p * (1.0 - p) / samples as f64).sqrt()
}
