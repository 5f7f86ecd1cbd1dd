//! Dense statevector reference for the quantum Deutsch-Jozsa circuit.
//!
//! Qubit ordering follows the toy register: input qubit `i` is bit `i` of
//! the basis index, and the target is bit `n`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oracle::{build_oracle, Center, FunctionSpec, Oracle};
use crate::transforms::BasisPermutation;

/// Input-register cap for [`run_quantum_dj`].
pub const MAX_QUANTUM_N: usize = 12;
/// Input-register cap for [`oracle_unitary_equivalence`].
pub const MAX_UNITARY_N: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_QUANTUM_N + 1 {
            return Err(Error::TooLarge { n: n_qubits, max: MAX_QUANTUM_N + 1, what: "statevector qubits" });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: q, len: self.n_qubits })
        }
    }

    /// In-place Hadamard butterfly on qubit `q`.
    pub fn qh(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let stride = 1usize << q;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for base in (0..self.amplitudes.len()).step_by(2 * stride) {
            for i in base..base + stride {
                let a = self.amplitudes[i];
                let b = self.amplitudes[i + stride];
                self.amplitudes[i] = (a + b) * s;
                self.amplitudes[i + stride] = (a - b) * s;
            }
        }
        Ok(())
    }

    pub fn qh_all(&mut self, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        for &q in qubits {
            self.qh(q)?;
        }
        Ok(())
    }

    /// `|x>|y> -> |x>|y xor f(x)>`.
    pub fn apply_uf(&mut self, u: &OracleUnitary) -> Result<()> {
        if self.n_qubits != u.n + 1 {
            return Err(Error::SizeMismatch { expected: u.n, actual: self.n_qubits.saturating_sub(1) });
        }
        let target = 1usize << u.n;
        for x in 0..target {
            if u.table[x] {
                self.amplitudes.swap(x, x | target);
            }
        }
        Ok(())
    }
}

/// `U_f` for a function given by its truth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleUnitary {
    n: usize,
    table: Vec<bool>,
}

impl OracleUnitary {
    pub fn new(f: &FunctionSpec) -> Result<Self> {
        if f.n() > MAX_QUANTUM_N {
            return Err(Error::TooLarge { n: f.n(), max: MAX_QUANTUM_N, what: "the statevector reference" });
        }
        Ok(Self { n: f.n(), table: f.to_table()?.to_vec() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dense permutation matrix, column `j` holding the image of `|j>`.
    pub fn matrix(&self) -> Array2<f64> {
        let t = 1usize << self.n;
        permutation_matrix(2 * t, |j| if self.table[j % t] { j ^ t } else { j })
    }
}

/// Probability that the input register reads all zeros after
/// `|0..0>|1> -> H all -> U_f -> H all`. Does not check the promise.
pub fn run_quantum_dj(f: &FunctionSpec) -> Result<f64> {
    let u = OracleUnitary::new(f)?;
    let n = f.n();
    let qubits: Vec<usize> = (0..=n).collect();
    let mut sv = StateVector::basis(n + 1, 1 << n)?;
    sv.qh_all(&qubits)?;
    sv.apply_uf(&u)?;
    sv.qh_all(&qubits)?;
    let target = 1usize << n;
    Ok(sv.amplitudes[0].norm_sqr() + sv.amplitudes[target].norm_sqr())
}

fn permutation_matrix(dim: usize, image: impl Fn(usize) -> usize) -> Array2<f64> {
    let mut m = Array2::zeros((dim, dim));
    for j in 0..dim {
        m[[image(j), j]] = 1.0;
    }
    m
}

/// Matrix of a basis permutation on the inputs, target untouched.
fn input_permutation_matrix(perm: &BasisPermutation, n: usize) -> Array2<f64> {
    let t = 1usize << n;
    permutation_matrix(2 * t, |j| perm.forward_index((j % t) as u64) as usize | (j & t))
}

fn center_matrix(center: Center, n: usize) -> Array2<f64> {
    let t = 1usize << n;
    let msb = 1usize << (n - 1);
    match center {
        Center::None => Array2::eye(2 * t),
        Center::XOnTarget => permutation_matrix(2 * t, |j| j ^ t),
        Center::CnotMsbToTarget => permutation_matrix(2 * t, |j| if j & msb != 0 { j ^ t } else { j }),
    }
}

/// Dense product `P(pi_f^-1) * C * P(pi_f)` of the oracle's gate sequence.
pub fn oracle_gate_matrix(oracle: &Oracle) -> Result<Array2<f64>> {
    let n = oracle.n();
    if n > MAX_UNITARY_N {
        return Err(Error::TooLarge { n, max: MAX_UNITARY_N, what: "dense oracle matrices" });
    }
    let forward = input_permutation_matrix(oracle.pi_f(), n);
    let backward = input_permutation_matrix(&oracle.pi_f().inverse(), n);
    Ok(backward.dot(&center_matrix(oracle.center(), n)).dot(&forward))
}

/// Whether the gate-sequence oracle built for `f` equals `U_f` entrywise.
pub fn oracle_unitary_equivalence(f: &FunctionSpec) -> Result<bool> {
    let oracle = build_oracle(f)?;
    let composed = oracle_gate_matrix(&oracle)?;
    let direct = OracleUnitary::new(f)?.matrix();
    Ok(composed == direct)
}
