//! Dense state-vector and density-matrix simulation of system-environment
//! graph states, with the tools needed to study redundant information
//! spreading (quantum Darwinism) across environment fragments.
//!
//! The crate is `no_std` and only needs an allocator. Everything is built on
//! dense complex arrays; the sizes of interest (a handful of qubits up to
//! the low twenties) never call for anything smarter.
//!
//! Qubit ordering: qubit `0` is the most significant bit of an amplitude
//! index, so `|q0 q1 ... q(n-1)>` reads left to right as in ket notation.
//! All indices are zero-based. All entropies are in bits.
//!
//! Module map:
//!
//! * [`linalg`], [`state`], [`gate`], [`pauli`], [`entropy`]: linear algebra
//!   and quantum-state primitives.
//! * [`graphstate`]: weighted graph states, star/diamond families, the Ising
//!   evolution picture and local-equivalence checks.
//! * [`darwinism`]: fragment enumeration, mutual information curves and
//!   their classification.
//! * [`estimator`]: Pauli correlators, linear-inversion tomography, the
//!   closed-form star-state estimator and measurement planning.
//! * [`measurement`]: finite-statistics sampling, correlator estimation,
//!   physicality projection and bootstrapped curves.

#![no_std]
#![deny(rustdoc::broken_intra_doc_links)]

extern crate alloc;

pub mod darwinism;
pub mod entropy;
mod error;
pub mod estimator;
pub mod gate;
pub mod graphstate;
pub mod linalg;
pub mod measurement;
pub mod pauli;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Largest register handled unless a caller asks for more: `2^24` amplitudes.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Size cap applied to operations that allocate whole registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_qubits: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl Limits {
    pub fn check(&self, n_qubits: usize) -> Result<()> {
        if n_qubits > self.max_qubits {
            Err(Error::TooLarge {
                n_qubits,
                max: self.max_qubits,
            })
        } else {
            Ok(())
        }
    }
}
