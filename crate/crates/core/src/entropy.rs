//! Von Neumann and Shannon entropies in bits.

use crate::state::{DensityMatrix, PHYSICAL_TOL};
use crate::{Error, Result};

/// Eigenvalues at or below this contribute nothing to an entropy.
pub const LOG_FLOOR: f64 = 1e-12;

/// `-x log2 x`, with the convention `0 log 0 = 0`.
#[inline]
pub fn neg_x_log2_x(x: f64) -> f64 {
    if x <= LOG_FLOOR {
        0.0
    } else {
        -x * libm::log2(x)
    }
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    neg_x_log2_x(p) + neg_x_log2_x(1.0 - p)
}

/// Shannon entropy of a spectrum; eigenvalues in `[-1e-9, 0)` are clamped
/// to zero, anything more negative is rejected.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut h = 0.0;
    for &l in eigenvalues {
        if l < -PHYSICAL_TOL {
            return Err(Error::Unphysical(l));
        }
        h += neg_x_log2_x(l.max(0.0));
    }
    Ok(h.max(0.0))
}

/// `-Tr[rho log2 rho]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    spectrum_entropy(&rho.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;

    #[test]
    fn pure_and_mixed() {
        let ghz = StateVector::ghz(3).unwrap().to_density();
        assert!(von_neumann_entropy(&ghz).unwrap().abs() < 1e-12);
        let m1 = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((von_neumann_entropy(&m1).unwrap() - 1.0).abs() < 1e-14);
        let m2 = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((von_neumann_entropy(&m2).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn negative_eigenvalues() {
        assert_eq!(spectrum_entropy(&[1.0, -5e-10]).unwrap(), 0.0);
        assert_eq!(spectrum_entropy(&[1.1, -0.1]), Err(Error::Unphysical(-0.1)));
        let bad = DensityMatrix::from_diagonal(&[1.1, -0.1]).unwrap();
        assert!(von_neumann_entropy(&bad).is_err());
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_eq!(binary_entropy(0.0), 0.0);
    }
}
