//! Pure and mixed states, reductions and overlaps.

use alloc::vec;
use alloc::vec::Vec;

use crate::entropy::von_neumann_entropy;
use crate::gate::{apply_in_place, apply_single, Gate, Matrix2};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, CMatrix};
use crate::pauli::{Pauli, PauliString};
use crate::{Error, Limits, Result, C64};

/// Tolerance on `sum |a|^2 = 1`, Hermiticity and unit trace.
pub const NORM_TOL: f64 = 1e-10;
/// Eigenvalues at or above this are treated as nonnegative.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// Operations shared by pure and mixed states.
pub trait QuantumState {
    fn n_qubits(&self) -> usize;

    /// Reduced density matrix on `keep`, in the given order.
    fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix>;

    /// Von Neumann entropy (bits) of the reduction onto `qubits`. The empty
    /// selection has entropy zero.
    fn subsystem_entropy(&self, qubits: &[usize]) -> Result<f64>;

    /// Outcome distribution when every qubit is measured in the eigenbasis
    /// of its symbol in `setting`. Outcome bit 0 is the `+1` eigenvalue;
    /// outcome indices follow the amplitude convention.
    fn basis_probabilities(&self, setting: &PauliString) -> Result<Vec<f64>>;

    /// `Tr[rho P]`.
    fn pauli_expectation(&self, p: &PauliString) -> Result<f64>;
}

/// Normalized amplitudes of an `n`-qubit register, qubit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidParameter(alloc::format!(
            "amplitude count {len} is not a power of two >= 2"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm = libm::sqrt(amps.iter().map(|a| a.norm_sqr()).sum::<f64>());
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Normalizes `amps` first.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm = libm::sqrt(amps.iter().map(|a| a.norm_sqr()).sum::<f64>());
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector { n_qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_with_limit(n_qubits, index, Limits::default())
    }

    pub fn basis_with_limit(n_qubits: usize, index: usize, limits: Limits) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("zero qubits".into()));
        }
        limits.check(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidParameter(alloc::format!(
                "basis index {index} out of range"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// `|+>^{(x) n}`.
    pub fn plus(n_qubits: usize) -> Result<Self> {
        Self::plus_with_limit(n_qubits, Limits::default())
    }

    pub fn plus_with_limit(n_qubits: usize, limits: Limits) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("zero qubits".into()));
        }
        limits.check(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = 1.0 / libm::sqrt(dim as f64);
        Ok(StateVector {
            n_qubits,
            amps: vec![C64::new(a, 0.0); dim],
        })
    }

    /// `(|0...0> + |1...1>)/sqrt 2`.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::InvalidParameter("GHZ needs at least 2 qubits".into()));
        }
        Limits::default().check(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        let h = core::f64::consts::FRAC_1_SQRT_2;
        amps[0] = C64::new(h, 0.0);
        amps[dim - 1] = C64::new(h, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>())
    }

    /// `U|psi>`.
    pub fn apply(&self, gate: &Gate) -> Result<StateVector> {
        gate.validate(self.n_qubits)?;
        let mut out = self.clone();
        apply_in_place(&mut out.amps, self.n_qubits, gate);
        Ok(out)
    }

    /// Applies gates left to right (the first gate acts first).
    pub fn apply_all(&self, gates: &[Gate]) -> Result<StateVector> {
        for g in gates {
            g.validate(self.n_qubits)?;
        }
        let mut out = self.clone();
        for g in gates {
            apply_in_place(&mut out.amps, self.n_qubits, g);
        }
        Ok(out)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|`, the global-phase-insensitive overlap.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Equality up to a global phase.
    pub fn eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        self.overlap(other).map(|o| (1.0 - o).abs() <= tol).unwrap_or(false)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: CMatrix::outer(&self.amps),
            physical: true,
        }
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_with(&self, rho: &DensityMatrix) -> Result<f64> {
        if self.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = C64::new(0.0, 0.0);
            for j in 0..n {
                row += rho.matrix[(i, j)] * self.amps[j];
            }
            acc += self.amps[i].conj() * row;
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }
}

impl QuantumState for StateVector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let rest = complement(self.n_qubits, keep)?;
        let ka = offsets(self.n_qubits, keep);
        let kr = offsets(self.n_qubits, &rest);
        let (dk, dr) = (ka.len(), kr.len());
        // M[a][r] = psi(a, r); rho = M M^dagger
        let mut m = vec![C64::new(0.0, 0.0); dk * dr];
        for (a, &oa) in ka.iter().enumerate() {
            for (r, &or) in kr.iter().enumerate() {
                m[a * dr + r] = self.amps[oa | or];
            }
        }
        let mut out = CMatrix::zeros(dk);
        for a in 0..dk {
            for b in a..dk {
                let s: C64 = m[a * dr..(a + 1) * dr]
                    .iter()
                    .zip(&m[b * dr..(b + 1) * dr])
                    .map(|(x, y)| x * y.conj())
                    .sum();
                out[(a, b)] = s;
                out[(b, a)] = s.conj();
            }
        }
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            matrix: out,
            physical: true,
        })
    }

    fn subsystem_entropy(&self, qubits: &[usize]) -> Result<f64> {
        if qubits.is_empty() {
            return Ok(0.0);
        }
        let rest = complement(self.n_qubits, qubits)?;
        if rest.is_empty() {
            return Ok(0.0);
        }
        // Both sides of a pure bipartition share a spectrum; use the smaller.
        let side = if rest.len() < qubits.len() { &rest[..] } else { qubits };
        von_neumann_entropy(&self.reduced(side)?)
    }

    fn basis_probabilities(&self, setting: &PauliString) -> Result<Vec<f64>> {
        check_setting(self.n_qubits, setting)?;
        let mut amps = self.amps.clone();
        for (q, p) in setting.labels().iter().enumerate() {
            if let Some(u) = basis_rotation(*p) {
                apply_single(&mut amps, self.n_qubits, q, &u);
            }
        }
        Ok(amps.iter().map(|a| a.norm_sqr()).collect())
    }

    fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: p.len(),
            });
        }
        let m = p.flip_mask();
        let v: C64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(x, a)| p.phase_on(x) * self.amps[x ^ m].conj() * a)
            .sum();
        real_part_checked(v)
    }
}

/// Density operator on `n` qubits. `physical` records whether all
/// eigenvalues are at least `-1e-9`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
    physical: bool,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace, then sets the physical flag
    /// from the spectrum.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n_qubits = qubits_for_len(matrix.dim())?;
        let dev = matrix.hermitian_deviation();
        if dev > NORM_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let min = hermitian_eigenvalues(&matrix).last().copied().unwrap_or(0.0);
        Ok(DensityMatrix {
            n_qubits,
            matrix,
            physical: min >= -PHYSICAL_TOL,
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_matrix(CMatrix::from_real_diagonal(diag))
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        psi.to_density()
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("zero qubits".into()));
        }
        Limits::default().check(2 * n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(DensityMatrix {
            n_qubits,
            matrix: CMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
            physical: true,
        })
    }

    /// `(1 - weight) rho + weight * 1/d`.
    pub fn depolarized(&self, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(alloc::format!(
                "mixing weight {weight} outside [0, 1]"
            )));
        }
        let mixed = Self::maximally_mixed(self.n_qubits)?;
        let m = self
            .matrix
            .scale(C64::new(1.0 - weight, 0.0))
            .add(&mixed.matrix.scale(C64::new(weight, 0.0)));
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: m,
            physical: self.physical,
        })
    }

    pub(crate) fn from_parts_unchecked(n_qubits: usize, matrix: CMatrix, physical: bool) -> Self {
        DensityMatrix {
            n_qubits,
            matrix,
            physical,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr[rho^2]`.
    pub fn purity(&self) -> f64 {
        // rho Hermitian, so Tr[rho^2] = sum |rho_ij|^2
        self.matrix.as_slice().iter().map(|x| x.norm_sqr()).sum()
    }

    /// Descending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `U rho U^dagger`.
    pub fn apply(&self, gate: &Gate) -> Result<DensityMatrix> {
        gate.validate(self.n_qubits)?;
        let n = self.n_qubits;
        let dim = self.dim();
        let conj = conjugate_gate(gate);
        let mut m = self.matrix.clone();
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for j in 0..dim {
            for i in 0..dim {
                col[i] = m[(i, j)];
            }
            apply_in_place(&mut col, n, gate);
            for i in 0..dim {
                m[(i, j)] = col[i];
            }
        }
        let mut row = vec![C64::new(0.0, 0.0); dim];
        for i in 0..dim {
            for j in 0..dim {
                row[j] = m[(i, j)];
            }
            apply_in_place(&mut row, n, &conj);
            for j in 0..dim {
                m[(i, j)] = row[j];
            }
        }
        Ok(DensityMatrix {
            n_qubits: n,
            matrix: m,
            physical: self.physical,
        })
    }

    /// Reduction onto `keep` (in the given order); the trace is preserved.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let rest = complement(self.n_qubits, keep)?;
        let ka = offsets(self.n_qubits, keep);
        let kr = offsets(self.n_qubits, &rest);
        let dk = ka.len();
        let mut out = CMatrix::zeros(dk);
        for (a, &oa) in ka.iter().enumerate() {
            for (b, &ob) in ka.iter().enumerate() {
                out[(a, b)] = kr.iter().map(|&or| self.matrix[(oa | or, ob | or)]).sum();
            }
        }
        let physical = self.physical;
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            matrix: out,
            physical,
        })
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.partial_trace(keep)
    }

    fn subsystem_entropy(&self, qubits: &[usize]) -> Result<f64> {
        if qubits.is_empty() {
            return Ok(0.0);
        }
        von_neumann_entropy(&self.partial_trace(qubits)?)
    }

    fn basis_probabilities(&self, setting: &PauliString) -> Result<Vec<f64>> {
        check_setting(self.n_qubits, setting)?;
        let mut rho = self.clone();
        for (q, p) in setting.labels().iter().enumerate() {
            if let Some(u) = basis_rotation(*p) {
                rho = rho.apply(&Gate::Single { target: q, matrix: u })?;
            }
        }
        Ok((0..rho.dim()).map(|i| rho.matrix[(i, i)].re.max(0.0)).collect())
    }

    fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: p.len(),
            });
        }
        let m = p.flip_mask();
        let v: C64 = (0..self.dim())
            .map(|x| p.phase_on(x) * self.matrix[(x, x ^ m)])
            .sum();
        real_part_checked(v)
    }
}

fn real_part_checked(v: C64) -> Result<f64> {
    if v.im.abs() > PHYSICAL_TOL {
        return Err(Error::NotHermitian(v.im.abs()));
    }
    Ok(v.re)
}

fn conjugate_gate(gate: &Gate) -> Gate {
    match *gate {
        Gate::ControlledPhase { a, b, phase } => Gate::ControlledPhase { a, b, phase: -phase },
        Gate::Single { target, matrix } => Gate::Single {
            target,
            matrix: [
                [matrix[0][0].conj(), matrix[0][1].conj()],
                [matrix[1][0].conj(), matrix[1][1].conj()],
            ],
        },
        other => other,
    }
}

fn check_setting(n_qubits: usize, setting: &PauliString) -> Result<()> {
    if setting.len() != n_qubits {
        return Err(Error::DimensionMismatch {
            expected: n_qubits,
            found: setting.len(),
        });
    }
    if !setting.is_full_weight() {
        return Err(Error::IdentityInSetting(setting.clone()));
    }
    Ok(())
}

/// Unitary taking the `+1`/`-1` eigenvectors of `p` to `|0>`/`|1>`.
pub(crate) fn basis_rotation(p: Pauli) -> Option<Matrix2> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    match p {
        Pauli::Z | Pauli::I => None,
        Pauli::X => Some([
            [C64::new(h, 0.0), C64::new(h, 0.0)],
            [C64::new(h, 0.0), C64::new(-h, 0.0)],
        ]),
        // H S^dagger
        Pauli::Y => Some([
            [C64::new(h, 0.0), C64::new(0.0, -h)],
            [C64::new(h, 0.0), C64::new(0.0, h)],
        ]),
    }
}

/// Qubits not in `keep`, ascending. Validates `keep`.
pub(crate) fn complement(n_qubits: usize, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut seen = vec![false; n_qubits];
    for &q in keep {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        if seen[q] {
            return Err(Error::DuplicateQubit(q));
        }
        seen[q] = true;
    }
    Ok((0..n_qubits).filter(|&q| !seen[q]).collect())
}

/// For every assignment of `qubits` (first listed = most significant), the
/// corresponding bits of a full amplitude index.
pub(crate) fn offsets(n_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &q in qubits {
        let bit = 1usize << (n_qubits - 1 - q);
        out = out.iter().flat_map(|&o| [o, o | bit]).collect();
    }
    out
}

/// Kronecker product with `a`'s qubits first.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    tensor_product_with_limit(a, b, Limits::default())
}

pub fn tensor_product_with_limit(
    a: &StateVector,
    b: &StateVector,
    limits: Limits,
) -> Result<StateVector> {
    let n = a.n_qubits + b.n_qubits;
    limits.check(n)?;
    let amps = a
        .amps
        .iter()
        .flat_map(|x| b.amps.iter().map(move |y| x * y))
        .collect();
    Ok(StateVector { n_qubits: n, amps })
}

/// Fidelity between two states. When either input is pure this is
/// `Tr[rho sigma]`; otherwise the square-root formula
/// `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` is used.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let pure = |d: &DensityMatrix| d.purity() >= 1.0 - PHYSICAL_TOL;
    if pure(rho) || pure(sigma) {
        let n = rho.dim();
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                tr += rho.matrix[(i, j)] * sigma.matrix[(j, i)];
            }
        }
        return Ok(tr.re.clamp(0.0, 1.0));
    }
    let eig = hermitian_eigen(&rho.matrix);
    let roots: Vec<f64> = eig.values.iter().map(|&l| libm::sqrt(l.max(0.0))).collect();
    let sqrt_rho = CMatrix::from_eigen(&roots, &eig.vectors);
    let inner = sqrt_rho.matmul(&sigma.matrix).matmul(&sqrt_rho);
    let s: f64 = hermitian_eigenvalues(&inner)
        .iter()
        .map(|&m| libm::sqrt(m.max(0.0)))
        .sum();
    Ok((s * s).clamp(0.0, 1.0))
}
