//! Weighted graph states and the fixed four-qubit states of the photonic
//! experiment.
//!
//! A graph state on `n` qubits is `prod_{(j,k)} C(phase_jk) |+>^{(x) n}`
//! where `C(phase)` multiplies `|11>` by `e^{i phase}`. Since the gates are
//! diagonal they commute and edge order does not matter.
//!
//! Star states couple a system qubit to every environment qubit. Diamond
//! states additionally couple consecutive environment qubits in an open
//! chain. Both put the system on qubit 0 and the environment on qubits
//! `1..=n_env`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::gate::Gate;
use crate::state::StateVector;
use crate::{Error, Limits, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Controlled-phase angle in radians.
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphSpec {
    pub n_qubits: usize,
    pub system: usize,
    pub edges: Vec<Edge>,
}

impl GraphSpec {
    pub fn new(n_qubits: usize, system: usize, edges: Vec<Edge>) -> Result<Self> {
        let spec = GraphSpec {
            n_qubits,
            system,
            edges,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if self.system >= self.n_qubits {
            return Err(Error::InvalidGraph(format!(
                "system qubit {} out of range",
                self.system
            )));
        }
        let mut seen = BTreeMap::new();
        for e in &self.edges {
            if e.a >= self.n_qubits || e.b >= self.n_qubits {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range",
                    e.a, e.b
                )));
            }
            if e.a == e.b {
                return Err(Error::InvalidGraph(format!("self-loop on qubit {}", e.a)));
            }
            if !e.phase.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has non-finite phase",
                    e.a, e.b
                )));
            }
            let key = (e.a.min(e.b), e.a.max(e.b));
            if seen.insert(key, ()).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    key.0, key.1
                )));
            }
        }
        Ok(())
    }

    /// Every qubit except the system, ascending.
    pub fn environment(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&q| q != self.system).collect()
    }
}

/// System on qubit 0 coupled with phase `phi` to each of `n_env`
/// environment qubits; no intra-environment edges.
pub fn star_spec(n_env: usize, phi: f64) -> Result<GraphSpec> {
    if n_env < 1 {
        return Err(Error::InvalidParameter("star graph needs n_env >= 1".into()));
    }
    let edges = (1..=n_env).map(|k| Edge { a: 0, b: k, phase: phi }).collect();
    GraphSpec::new(n_env + 1, 0, edges)
}

/// Star edges plus an open chain `(j, j+1, theta)` through the environment.
pub fn diamond_spec(n_env: usize, phi: f64, theta: f64) -> Result<GraphSpec> {
    if n_env < 2 {
        return Err(Error::InvalidParameter("diamond graph needs n_env >= 2".into()));
    }
    let mut spec = star_spec(n_env, phi)?;
    spec.edges
        .extend((1..n_env).map(|j| Edge { a: j, b: j + 1, phase: theta }));
    spec.validate()?;
    Ok(spec)
}

pub fn build_graph_state(spec: &GraphSpec) -> Result<StateVector> {
    build_graph_state_with_limit(spec, Limits::default())
}

pub fn build_graph_state_with_limit(spec: &GraphSpec, limits: Limits) -> Result<StateVector> {
    spec.validate()?;
    let gates: Vec<Gate> = spec
        .edges
        .iter()
        .map(|e| Gate::ControlledPhase {
            a: e.a,
            b: e.b,
            phase: e.phase,
        })
        .collect();
    StateVector::plus_with_limit(spec.n_qubits, limits)?.apply_all(&gates)
}

/// Ising couplings `g_jk` keyed by unordered qubit pair. A key `(j, j)`
/// is a local term `g_jj |1><1|_j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Couplings(BTreeMap<(usize, usize), f64>);

impl Couplings {
    pub fn new() -> Self {
        Couplings(BTreeMap::new())
    }

    /// Adds a coupling; `(j, k)` and `(k, j)` name the same pair, so
    /// inserting both is an error.
    pub fn insert(&mut self, j: usize, k: usize, rate: f64) -> Result<()> {
        if !rate.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling ({j}, {k}) is not finite")));
        }
        let key = (j.min(k), j.max(k));
        if self.0.insert(key, rate).is_some() {
            return Err(Error::InvalidParameter(format!(
                "coupling ({}, {}) given twice",
                key.0, key.1
            )));
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    /// The phase-gate network reproducing `exp(-i H t)`: edge phase `-g t`.
    pub fn to_graph(&self, n_qubits: usize, time: f64) -> Result<GraphSpec> {
        let edges = self
            .iter()
            .filter(|((j, k), _)| j != k)
            .map(|((a, b), g)| Edge { a, b, phase: -g * time })
            .collect();
        GraphSpec::new(n_qubits, 0, edges)
    }
}

/// `exp(-i H t) |+>^{(x) n}` for `H = sum g_jk |11><11|_jk`, evaluated as a
/// diagonal phase per basis state.
pub fn evolve_ising(n_qubits: usize, couplings: &Couplings, time: f64) -> Result<StateVector> {
    evolve_ising_with_limit(n_qubits, couplings, time, Limits::default())
}

pub fn evolve_ising_with_limit(
    n_qubits: usize,
    couplings: &Couplings,
    time: f64,
    limits: Limits,
) -> Result<StateVector> {
    if !time.is_finite() {
        return Err(Error::InvalidParameter("time is not finite".into()));
    }
    for ((j, k), _) in couplings.iter() {
        if k >= n_qubits {
            return Err(Error::QubitOutOfRange { index: j.max(k), n_qubits });
        }
    }
    let plus = StateVector::plus_with_limit(n_qubits, limits)?;
    let terms: Vec<(usize, f64)> = couplings
        .iter()
        .map(|((j, k), g)| ((1usize << (n_qubits - 1 - j)) | (1usize << (n_qubits - 1 - k)), g))
        .collect();
    let amps = plus
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, a)| {
            let energy: f64 = terms
                .iter()
                .filter(|(mask, _)| x & mask == *mask)
                .map(|(_, g)| g)
                .sum();
            a * C64::from_polar(1.0, -energy * time)
        })
        .collect();
    StateVector::new(amps)
}

/// Fixed four-qubit states. Polarization and path labels map to bits as
/// `H/l -> 0` and `V/r -> 1`, qubits in order 0..3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedState {
    Star { n_env: usize, phi: f64 },
    Diamond { n_env: usize, phi: f64, theta: f64 },
    Ghz { n: usize },
    /// Polarization Bell pair times path Bell pair, `(|HH>+|VV>)(|lr>+|rl>)/2`.
    HyperentangledXi,
    /// `(|HVlr> + |VHrl>)/sqrt 2`.
    StarExperimental,
    /// `[-(|HH>-|VV>)|lr> + (|HV>+|VH>)|rl>]/2`.
    DiamondExperimental,
    /// `(-|0001> + |0110> + |1010> + |1101>)/2`.
    DiamondCanonical,
}

fn ket4(terms: &[(usize, f64)]) -> Result<StateVector> {
    let mut amps = alloc::vec![C64::new(0.0, 0.0); 16];
    for &(idx, a) in terms {
        amps[idx] += C64::new(a, 0.0);
    }
    StateVector::new(amps)
}

pub fn named_state(id: NamedState) -> Result<StateVector> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    match id {
        NamedState::Star { n_env, phi } => build_graph_state(&star_spec(n_env, phi)?),
        NamedState::Diamond { n_env, phi, theta } => {
            build_graph_state(&diamond_spec(n_env, phi, theta)?)
        }
        NamedState::Ghz { n } => StateVector::ghz(n),
        NamedState::HyperentangledXi => ket4(&[
            (0b0001, 0.5),
            (0b0010, 0.5),
            (0b1101, 0.5),
            (0b1110, 0.5),
        ]),
        NamedState::StarExperimental => ket4(&[(0b0101, h), (0b1010, h)]),
        NamedState::DiamondExperimental => {
            // -(|00> - |11>)|01> + (|01> + |10>)|10>, over 2
            ket4(&[
                (0b0001, -0.5),
                (0b1101, 0.5),
                (0b0110, 0.5),
                (0b1010, 0.5),
            ])
        }
        NamedState::DiamondCanonical => ket4(&[
            (0b0001, -0.5),
            (0b0110, 0.5),
            (0b1010, 0.5),
            (0b1101, 0.5),
        ]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub fidelity: f64,
    pub pass: bool,
}

/// Fidelity threshold for [`check_local_equivalence`].
pub const EQUIVALENCE_TOL: f64 = 1e-9;

/// Applies `circuit` (first gate first) to `a` and reports `|<b|U a>|^2`.
/// Only single-qubit gates and swaps are accepted.
pub fn check_local_equivalence(
    a: &StateVector,
    b: &StateVector,
    circuit: &[Gate],
) -> Result<EquivalenceReport> {
    use crate::state::QuantumState;
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: a.n_qubits(),
            found: b.n_qubits(),
        });
    }
    if let Some(g) = circuit
        .iter()
        .find(|g| matches!(g, Gate::ControlledPhase { .. }))
    {
        return Err(Error::EntanglingGate(g.name()));
    }
    let out = a.apply_all(circuit)?;
    let ov = b.inner(&out)?.norm_sqr();
    Ok(EquivalenceReport {
        fidelity: ov,
        pass: ov >= 1.0 - EQUIVALENCE_TOL,
    })
}

/// Environment Hadamards taking the four-qubit star graph state to GHZ.
pub fn star_to_ghz_circuit(n_env: usize) -> Vec<Gate> {
    (1..=n_env).map(Gate::Hadamard).collect()
}

/// `Swap(1,2) . (H (x) XH (x) H (x) ZH)`, taking the four-qubit diamond graph
/// state to [`NamedState::DiamondCanonical`].
pub fn diamond_to_canonical_circuit() -> Vec<Gate> {
    alloc::vec![
        Gate::Hadamard(0),
        Gate::Hadamard(1),
        Gate::PauliX(1),
        Gate::Hadamard(2),
        Gate::Hadamard(3),
        Gate::PauliZ(3),
        Gate::Swap(1, 2),
    ]
}

/// Bit flips on qubits 1 and 3 taking `(|0101>+|1010>)/sqrt 2` to GHZ.
pub fn star_experimental_to_ghz_circuit() -> Vec<Gate> {
    alloc::vec![Gate::PauliX(1), Gate::PauliX(3)]
}
