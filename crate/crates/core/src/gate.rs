//! Gates acting on state vectors and density matrices.

use alloc::format;
use alloc::string::String;

use crate::{Error, Result, C64};

const UNITARY_TOL: f64 = 1e-10;

pub type Matrix2 = [[C64; 2]; 2];

/// A gate together with the qubits it acts on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    PauliX(usize),
    PauliZ(usize),
    Swap(usize, usize),
    /// `|0><0| (x) 1 + |1><1| (x) diag(1, e^{i phase})`; symmetric in the two qubits.
    ControlledPhase { a: usize, b: usize, phase: f64 },
    /// Arbitrary single-qubit unitary.
    Single { target: usize, matrix: Matrix2 },
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Gate {
    pub fn targets(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::Hadamard(q) | Gate::PauliX(q) | Gate::PauliZ(q) => ([q, q], 1),
            Gate::Single { target, .. } => ([target, target], 1),
            Gate::Swap(a, b) | Gate::ControlledPhase { a, b, .. } => ([a, b], 2),
        }
    }

    pub fn is_single_qubit(&self) -> bool {
        self.targets().1 == 1
    }

    /// 2x2 matrix of a single-qubit gate.
    pub fn single_qubit_matrix(&self) -> Option<Matrix2> {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        match *self {
            Gate::Hadamard(_) => Some([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]),
            Gate::PauliX(_) => Some([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]),
            Gate::PauliZ(_) => Some([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]),
            Gate::Single { matrix, .. } => Some(matrix),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Gate::Hadamard(q) => format!("H({q})"),
            Gate::PauliX(q) => format!("X({q})"),
            Gate::PauliZ(q) => format!("Z({q})"),
            Gate::Swap(a, b) => format!("Swap({a},{b})"),
            Gate::ControlledPhase { a, b, phase } => format!("CPhase({a},{b},{phase})"),
            Gate::Single { target, .. } => format!("U({target})"),
        }
    }

    /// Checks qubit range, distinctness and unitarity.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let (qs, arity) = self.targets();
        for &q in &qs[..arity] {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if arity == 2 && qs[0] == qs[1] {
            return Err(Error::DuplicateQubit(qs[0]));
        }
        if let Gate::ControlledPhase { phase, .. } = self {
            if !phase.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite phase {phase}")));
            }
        }
        if let Gate::Single { matrix, .. } = self {
            let dev = unitarity_deviation(matrix);
            if dev > UNITARY_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        Ok(())
    }
}

/// `max |(U^dagger U - 1)_ij|`.
pub fn unitarity_deviation(u: &Matrix2) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let s = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// Applies a validated gate in place to amplitudes of an `n`-qubit register.
pub(crate) fn apply_in_place(amps: &mut [C64], n: usize, gate: &Gate) {
    match *gate {
        Gate::Swap(a, b) => {
            let (ma, mb) = (1usize << (n - 1 - a), 1usize << (n - 1 - b));
            for x in 0..amps.len() {
                // visit each pair once: bit a set, bit b clear
                if x & ma != 0 && x & mb == 0 {
                    amps.swap(x, x ^ ma ^ mb);
                }
            }
        }
        Gate::ControlledPhase { a, b, phase } => {
            let mask = (1usize << (n - 1 - a)) | (1usize << (n - 1 - b));
            let factor = C64::from_polar(1.0, phase);
            for (x, amp) in amps.iter_mut().enumerate() {
                if x & mask == mask {
                    *amp *= factor;
                }
            }
        }
        _ => {
            let (qs, _) = gate.targets();
            let u = gate.single_qubit_matrix().expect("single-qubit gate");
            apply_single(amps, n, qs[0], &u);
        }
    }
}

pub(crate) fn apply_single(amps: &mut [C64], n: usize, q: usize, u: &Matrix2) {
    let m = 1usize << (n - 1 - q);
    for x in 0..amps.len() {
        if x & m == 0 {
            let a0 = amps[x];
            let a1 = amps[x | m];
            amps[x] = u[0][0] * a0 + u[0][1] * a1;
            amps[x | m] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}
