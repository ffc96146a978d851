//! Correlator-based analysis of four-qubit resource states.
//!
//! A correlator is `C_p = Tr[rho p]` for a Pauli string `p`. With all
//! `4^n` correlators the state follows by linear inversion,
//! `rho = 2^-n sum_p C_p p`. For the star resource
//! `rho(P, C) = P|0101><0101| + (1-P)|1010><1010| + (C|0101><1010| + h.c.)`
//! only 32 correlators are needed: `P` and `C` are matrix elements of
//! `rho`, and each matrix element `<a|rho|b>` is a signed sum over the
//! Pauli expansion of `|b><a|`. The signs come out of that expansion rather
//! than from a fixed table, so the estimator is exact on `rho(P, C)`.
//!
//! Mutual information of the star resource with the system on qubit 0:
//! fragments of one or two qubits only see the populations, giving
//! `I = h(P)`; the full environment also sees the coherence, giving
//! `I = 2 h(P) - H(f+, f-)` with `f+-` the eigenvalues of
//! `[[P, C], [C*, 1-P]]`, i.e. `f+- = (1 +- sqrt(4|C|^2 + (1-2P)^2)) / 2`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::darwinism::{mi_curve, MiCurve};
use crate::entropy::{binary_entropy, neg_x_log2_x};
use crate::linalg::CMatrix;
use crate::measurement::project_to_physical;
use crate::pauli::{Pauli, PauliString};
use crate::state::{DensityMatrix, QuantumState};
use crate::{Error, Result, C64};

/// Range slack on correlator values.
pub const VALUE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlator {
    pub value: f64,
    /// One-sigma statistical error, absent for exact values.
    pub sigma: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrelatorTable {
    entries: BTreeMap<PauliString, Correlator>,
}

impl CorrelatorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, string: PauliString, value: f64, sigma: Option<f64>) -> Result<()> {
        if let Some((first, _)) = self.entries.iter().next() {
            if first.len() != string.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    found: string.len(),
                });
            }
        }
        if !value.is_finite() || value.abs() > 1.0 + VALUE_TOL {
            return Err(Error::InvalidParameter(format!(
                "correlator {string} = {value} outside [-1, 1]"
            )));
        }
        if let Some(s) = sigma {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!("correlator {string} has sigma {s}")));
            }
        }
        if string.is_identity() {
            let slack = sigma.unwrap_or(0.0).max(VALUE_TOL);
            if (value - 1.0).abs() > slack {
                return Err(Error::InvalidParameter(format!(
                    "identity correlator is {value}, expected 1"
                )));
            }
        }
        self.entries.insert(string, Correlator { value, sigma });
        Ok(())
    }

    pub fn get(&self, string: &PauliString) -> Option<&Correlator> {
        self.entries.get(string)
    }

    pub fn value(&self, string: &PauliString) -> Result<f64> {
        self.get(string)
            .map(|c| c.value)
            .ok_or_else(|| Error::MissingCorrelator(string.clone()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// String length, or `None` for an empty table.
    pub fn n_qubits(&self) -> Option<usize> {
        self.entries.keys().next().map(|p| p.len())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Correlator)> {
        self.entries.iter()
    }
}

/// Exact `Tr[rho p]` for each requested string.
pub fn correlator_table<S: QuantumState + ?Sized>(
    state: &S,
    strings: &[PauliString],
) -> Result<CorrelatorTable> {
    let mut table = CorrelatorTable::new();
    for p in strings {
        let v = state.pauli_expectation(p)?;
        table.insert(p.clone(), v, None)?;
    }
    Ok(table)
}

/// Table over all `4^n` strings.
pub fn full_correlator_table<S: QuantumState + ?Sized>(state: &S) -> Result<CorrelatorTable> {
    let strings: Vec<_> = PauliString::all(state.n_qubits()).collect();
    correlator_table(state, &strings)
}

/// Linear inversion `rho = 2^-n sum_p C_p p`. Needs every string. The
/// physical flag is set from the spectrum of the result.
pub fn reconstruct_density(table: &CorrelatorTable) -> Result<DensityMatrix> {
    let n = table
        .n_qubits()
        .ok_or_else(|| Error::MissingCorrelator(PauliString::identity(0)))?;
    let dim = 1usize << n;
    let norm = 1.0 / dim as f64;
    let mut m = CMatrix::zeros(dim);
    for p in PauliString::all(n) {
        let c = table.value(&p)?;
        if c == 0.0 {
            continue;
        }
        let flip = p.flip_mask();
        for x in 0..dim {
            m[(x ^ flip, x)] += p.phase_on(x) * (c * norm);
        }
    }
    DensityMatrix::from_matrix(m)
}

/// Pauli expansion `|ket><bra| = sum_p coef_p p / 2^n`, as `(p, coef_p)`.
pub fn outer_product_expansion(ket: usize, bra: usize, n: usize) -> Vec<(PauliString, C64)> {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    // per qubit: |k><b| = sum over two Paulis with these coefficients (x 1/2)
    let per_qubit = |k: bool, b: bool| -> [(Pauli, C64); 2] {
        match (k, b) {
            (false, false) => [(Pauli::I, one), (Pauli::Z, one)],
            (true, true) => [(Pauli::I, one), (Pauli::Z, -one)],
            (false, true) => [(Pauli::X, one), (Pauli::Y, i)],
            (true, false) => [(Pauli::X, one), (Pauli::Y, -i)],
        }
    };
    let mut terms: Vec<(Vec<Pauli>, C64)> = alloc::vec![(Vec::new(), one)];
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        let choices = per_qubit(ket & bit != 0, bra & bit != 0);
        terms = terms
            .into_iter()
            .flat_map(|(labels, c)| {
                choices.iter().map(move |&(p, pc)| {
                    let mut l = labels.clone();
                    l.push(p);
                    (l, c * pc)
                })
            })
            .collect();
    }
    terms
        .into_iter()
        .map(|(l, c)| (PauliString::new(l), c))
        .collect()
}

/// `<a|rho|b>` from correlators, with its propagated one-sigma error.
fn matrix_element(table: &CorrelatorTable, a: usize, b: usize, n: usize) -> Result<(C64, Option<f64>)> {
    let norm = 1.0 / (1usize << n) as f64;
    let mut acc = C64::new(0.0, 0.0);
    let mut var = 0.0;
    let mut have_sigma = false;
    // <a|rho|b> = Tr[rho |b><a|]
    for (p, coef) in outer_product_expansion(b, a, n) {
        let c = table
            .get(&p)
            .ok_or_else(|| Error::MissingCorrelator(p.clone()))?;
        acc += coef * (c.value * norm);
        if let Some(s) = c.sigma {
            have_sigma = true;
            var += (s * norm) * (s * norm);
        }
    }
    Ok((acc, have_sigma.then(|| libm::sqrt(var))))
}

/// `|0101>` and `|1010>`.
pub const STAR_BRANCHES: (usize, usize) = (0b0101, 0b1010);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarParameters {
    /// Population of `|0101>`.
    pub p: f64,
    /// Coherence `<0101|rho|1010>`.
    pub c: C64,
    /// Total population of both branches, 1 for the two-branch model.
    pub branch_weight: f64,
    pub sigma_p: Option<f64>,
    pub sigma_c: Option<f64>,
    /// Whether `P` lies in `[0, 1]` and the branches carry all population,
    /// each to within three sigma (or `1e-9` without errors).
    pub physical: bool,
}

impl StarParameters {
    /// Exact parameters without error bars.
    pub fn exact(p: f64, c: C64) -> Self {
        StarParameters {
            p,
            c,
            branch_weight: 1.0,
            sigma_p: None,
            sigma_c: None,
            physical: (-VALUE_TOL..=1.0 + VALUE_TOL).contains(&p),
        }
    }

    /// Eigenvalues `(f+, f-)` of `[[P, C], [C*, 1-P]]`.
    pub fn branch_eigenvalues(&self) -> (f64, f64) {
        let disc = self.discriminant();
        ((1.0 + disc) / 2.0, (1.0 - disc) / 2.0)
    }

    fn discriminant(&self) -> f64 {
        let d = 1.0 - 2.0 * self.p;
        libm::sqrt(4.0 * self.c.norm_sqr() + d * d)
    }

    /// Nearest positive semidefinite two-branch block: eigenvalues of
    /// `[[P, C], [C*, 1-P]]` clipped to `[0, 1]`, eigenvectors kept.
    pub fn projected(&self) -> StarParameters {
        let (fp, fm) = self.branch_eigenvalues();
        if fm >= 0.0 && fp <= 1.0 {
            return *self;
        }
        // One eigenvalue exceeds 1 and the other is negative; keep the
        // leading eigenvector as a pure branch superposition.
        let a = self.p - fm;
        let (v0, v1) = if self.c.norm() > 0.0 {
            let v = (C64::new(a, 0.0), self.c.conj());
            let nv = libm::sqrt(v.0.norm_sqr() + v.1.norm_sqr());
            (v.0 / nv, v.1 / nv)
        } else if self.p >= 0.5 {
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
        } else {
            (C64::new(0.0, 0.0), C64::new(1.0, 0.0))
        };
        StarParameters {
            p: v0.norm_sqr(),
            c: v0 * v1.conj(),
            ..*self
        }
    }
}

/// `P` and `C` from the 32 star correlators.
pub fn star_parameters(table: &CorrelatorTable) -> Result<StarParameters> {
    let (a, b) = STAR_BRANCHES;
    let (p, sigma_p) = matrix_element(table, a, a, 4)?;
    let (q, _) = matrix_element(table, b, b, 4)?;
    let (c, sigma_c) = matrix_element(table, a, b, 4)?;
    let p = p.re;
    let weight = p + q.re;
    // P + Q only involves even-weight Z strings; its error is sqrt(2) sigma_P
    let slack = sigma_p.map_or(VALUE_TOL, |s| (3.0 * s).max(VALUE_TOL));
    let weight_slack = sigma_p.map_or(VALUE_TOL, |s| (3.0 * core::f64::consts::SQRT_2 * s).max(VALUE_TOL));
    let physical =
        p >= -slack && p <= 1.0 + slack && (weight - 1.0).abs() <= weight_slack;
    Ok(StarParameters {
        p,
        c,
        branch_weight: weight,
        sigma_p,
        sigma_c,
        physical,
    })
}

/// `rho(P, C)` as a 16x16 density matrix.
pub fn two_branch_state(p: f64, c: C64) -> Result<DensityMatrix> {
    let (a, b) = STAR_BRANCHES;
    let mut m = CMatrix::zeros(16);
    m[(a, a)] = C64::new(p, 0.0);
    m[(b, b)] = C64::new(1.0 - p, 0.0);
    m[(a, b)] = c;
    m[(b, a)] = c.conj();
    DensityMatrix::from_matrix(m)
}

/// Which expression for the branch eigenvalues to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BranchFormula {
    /// `f+- = (1 +- sqrt(4|C|^2 + (1-2P)^2)) / 2`, the eigenvalues of the
    /// coherence block.
    #[default]
    Eigenvalue,
    /// `f+- = (2P - 1 +- sqrt(4|C|^2 + (1-2P)^2)) / 2`, with
    /// `Re[x log x] = x log|x|` for negative `x`.
    /// Kept for comparison only; `f+ + f- != 1` in general.
    Literal,
}

/// Closed-form `I(S:F)` of the star resource for fragment size 1, 2 or 3.
pub fn star_mutual_information(params: &StarParameters, delta: usize) -> Result<f64> {
    star_mutual_information_with(params, delta, BranchFormula::Eigenvalue)
}

pub fn star_mutual_information_with(
    params: &StarParameters,
    delta: usize,
    formula: BranchFormula,
) -> Result<f64> {
    if !(1..=3).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "fragment size {delta} not in 1..=3"
        )));
    }
    match formula {
        BranchFormula::Eigenvalue => {
            let (fp, fm) = params.branch_eigenvalues();
            for f in [fp, fm] {
                if !(-VALUE_TOL..=1.0 + VALUE_TOL).contains(&f) {
                    return Err(Error::BranchOutOfRange(f));
                }
            }
            let h_p = binary_entropy(params.p.clamp(0.0, 1.0));
            Ok(match delta {
                1 | 2 => h_p,
                _ => (2.0 * h_p - neg_x_log2_x(fp.clamp(0.0, 1.0)) - neg_x_log2_x(fm.clamp(0.0, 1.0))).max(0.0),
            })
        }
        BranchFormula::Literal => {
            let p = params.p;
            let h_p = -(re_x_log2_x(p) + re_x_log2_x(1.0 - p));
            let disc = params.discriminant();
            let fp = (2.0 * p - 1.0 + disc) / 2.0;
            let fm = (2.0 * p - 1.0 - disc) / 2.0;
            Ok(match delta {
                1 | 2 => h_p,
                _ => re_x_log2_x(fp) + re_x_log2_x(fm) + 2.0 * h_p,
            })
        }
    }
}

/// Real part of `x log2 x` on the principal branch: `x log2 |x|`.
fn re_x_log2_x(x: f64) -> f64 {
    if x.abs() <= crate::entropy::LOG_FLOOR {
        0.0
    } else {
        x * libm::log2(x.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanTarget {
    /// The 32 correlators entering `P` and `C`.
    Star,
    /// Every non-identity correlator of four qubits.
    FullTomography,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanCounts {
    pub n_correlators: usize,
    pub n_settings: usize,
    /// Product projectors: each setting has `2^n` outcomes. Full tomography
    /// gives `81 * 16 = 6^4 = 1296`.
    pub n_projectors: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPlan {
    pub target: PlanTarget,
    pub correlators: Vec<PauliString>,
    /// Full-weight settings; every correlator is a marginal of one of them.
    pub settings: Vec<PauliString>,
    pub counts: PlanCounts,
}

impl MeasurementPlan {
    /// The canonical setting (identity positions filled with `Z`) for a correlator.
    pub fn setting_for(&self, correlator: &PauliString) -> Option<&PauliString> {
        let want = correlator.completion();
        self.settings.iter().find(|s| **s == want)
    }
}

pub fn plan_measurements(target: PlanTarget) -> MeasurementPlan {
    const N: usize = 4;
    let mut correlators: Vec<PauliString> = match target {
        PlanTarget::Star => {
            let (a, b) = STAR_BRANCHES;
            let mut set = alloc::collections::BTreeSet::new();
            for (ket, bra) in [(a, a), (b, b), (b, a)] {
                set.extend(outer_product_expansion(ket, bra, N).into_iter().map(|(p, _)| p));
            }
            set.into_iter().collect()
        }
        PlanTarget::FullTomography => PauliString::all(N).filter(|p| !p.is_identity()).collect(),
    };
    correlators.sort();
    let mut settings: Vec<PauliString> = correlators.iter().map(|p| p.completion()).collect();
    settings.sort();
    settings.dedup();
    let counts = PlanCounts {
        n_correlators: correlators.len(),
        n_settings: settings.len(),
        n_projectors: settings.len() << N,
    };
    MeasurementPlan {
        target,
        correlators,
        settings,
        counts,
    }
}

/// Reject reconstructions whose negative eigenvalues sum below this.
pub const MAX_NEGATIVE_MASS: f64 = 0.5;

/// Curve of a (possibly noisy) correlator table: reconstruct, project onto
/// physical states when needed, then evaluate every fragment.
pub fn diamond_mutual_information(table: &CorrelatorTable, system: usize) -> Result<MiCurve> {
    let rho = reconstruct_density(table)?;
    let rho = if rho.is_physical() {
        rho
    } else {
        let negative: f64 = rho.eigenvalues().iter().filter(|&&l| l < 0.0).sum();
        if -negative > MAX_NEGATIVE_MASS {
            return Err(Error::Unphysical(negative));
        }
        project_to_physical(&rho)
    };
    mi_curve(&rho, system)
}
