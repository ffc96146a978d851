//! System-fragment mutual information and redundancy curves.
//!
//! `I(S:F) = H(S) + H(F) - H(S,F)`. A plateau of `I` at `H(S)` over growing
//! fragment sizes is the signature of redundant records of the system in
//! the environment; a curve that keeps climbing means no small fragment
//! holds the information on its own.

use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::linalg::pairwise_sum;
use crate::state::QuantumState;
use crate::{Error, Result};

/// Sorted set of environment qubits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fragment {
    members: Vec<usize>,
}

impl Fragment {
    pub fn new(mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateQubit(w[0]));
        }
        Ok(Fragment { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn validate(&self, n_qubits: usize, system: usize) -> Result<()> {
        if system >= n_qubits {
            return Err(Error::QubitOutOfRange { index: system, n_qubits });
        }
        for &q in &self.members {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if q == system {
                return Err(Error::InvalidParameter(alloc::format!(
                    "fragment contains the system qubit {system}"
                )));
            }
        }
        Ok(())
    }
}

/// All size-`delta` subsets of `environment`, lexicographic by position.
pub fn fragments_of(environment: &[usize], delta: usize) -> Result<Vec<Fragment>> {
    if delta > environment.len() {
        return Err(Error::InvalidParameter(alloc::format!(
            "fragment size {delta} exceeds environment size {}",
            environment.len()
        )));
    }
    let mut env = environment.to_vec();
    env.sort_unstable();
    Ok(Combinations::new(env.len(), delta)
        .map(|idx| Fragment {
            members: idx.iter().map(|&i| env[i]).collect(),
        })
        .collect())
}

/// Fragments of size `delta` of the environment `1..=n_env` (system on qubit 0).
pub fn enumerate_fragments(n_env: usize, delta: usize) -> Result<Vec<Fragment>> {
    let env: Vec<usize> = (1..=n_env).collect();
    fragments_of(&env, delta)
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `H(S) + H(F) - H(S,F)` in bits, clamped at zero.
pub fn mutual_information<S: QuantumState + ?Sized>(
    state: &S,
    system: usize,
    fragment: &Fragment,
) -> Result<f64> {
    fragment.validate(state.n_qubits(), system)?;
    let h_s = state.subsystem_entropy(&[system])?;
    mutual_information_with_hs(state, system, fragment, h_s)
}

fn mutual_information_with_hs<S: QuantumState + ?Sized>(
    state: &S,
    system: usize,
    fragment: &Fragment,
    h_s: f64,
) -> Result<f64> {
    let h_f = state.subsystem_entropy(fragment.members())?;
    let mut joint = Vec::with_capacity(fragment.len() + 1);
    joint.push(system);
    joint.extend_from_slice(fragment.members());
    let h_sf = state.subsystem_entropy(&joint)?;
    Ok((h_s + h_f - h_sf).max(0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub delta: usize,
    pub mean_mi: f64,
    pub min_mi: f64,
    pub max_mi: f64,
    pub n_fragments: u64,
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiCurve {
    pub points: Vec<CurvePoint>,
    pub system_entropy: f64,
    pub n_env: usize,
}

impl MiCurve {
    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean_mi).collect()
    }

    pub fn point(&self, delta: usize) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.delta == delta)
    }
}

/// How fragments are chosen for each size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveOptions {
    /// Sizes with at most this many fragments are enumerated exhaustively.
    pub max_exhaustive: u64,
    /// Fragments drawn per size above the exhaustive limit.
    pub samples: usize,
    pub seed: u64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            max_exhaustive: 1_000_000,
            samples: 10_000,
            seed: 0,
        }
    }
}

/// Mutual information curve over every fragment size `1..=n_env`.
pub fn mi_curve<S: QuantumState + ?Sized>(state: &S, system: usize) -> Result<MiCurve> {
    mi_curve_with(state, system, CurveOptions::default())
}

pub fn mi_curve_with<S: QuantumState + ?Sized>(
    state: &S,
    system: usize,
    opts: CurveOptions,
) -> Result<MiCurve> {
    let n = state.n_qubits();
    if system >= n {
        return Err(Error::QubitOutOfRange { index: system, n_qubits: n });
    }
    let env: Vec<usize> = (0..n).filter(|&q| q != system).collect();
    let h_s = state.subsystem_entropy(&[system])?;
    let mut points = Vec::with_capacity(env.len());
    for delta in 1..=env.len() {
        let total = binomial(env.len(), delta);
        let (fragments, sampled) = if total <= opts.max_exhaustive as u128 {
            (fragments_of(&env, delta)?, false)
        } else {
            (sample_fragments(&env, delta, opts.samples, opts.seed ^ delta as u64), true)
        };
        let values = fragments
            .iter()
            .map(|f| mutual_information_with_hs(state, system, f, h_s))
            .collect::<Result<Vec<f64>>>()?;
        points.push(summarize(delta, &values, total, sampled));
    }
    Ok(MiCurve {
        points,
        system_entropy: h_s,
        n_env: env.len(),
    })
}

fn sample_fragments(env: &[usize], delta: usize, samples: usize, seed: u64) -> Vec<Fragment> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let mut members: Vec<usize> = sample(&mut rng, env.len(), delta)
                .into_iter()
                .map(|i| env[i])
                .collect();
            members.sort_unstable();
            Fragment { members }
        })
        .collect()
}

fn summarize(delta: usize, values: &[f64], total: u128, sampled: bool) -> CurvePoint {
    let count = values.len() as f64;
    let mean = pairwise_sum(values) / count;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let stderr = (sampled && values.len() > 1).then(|| {
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        libm::sqrt(pairwise_sum(&sq) / (count - 1.0) / count)
    });
    CurvePoint {
        delta,
        // pairwise rounding must not push the mean outside [min, max]
        mean_mi: mean.clamp(min, max),
        min_mi: min,
        max_mi: max,
        n_fragments: u64::try_from(total).unwrap_or(u64::MAX),
        stderr,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveShape {
    /// Flat at `H(S)` for every proper fragment size.
    Plateau,
    /// Increases by more than the tolerance over two consecutive steps
    /// below the full environment.
    Growing,
    Other,
}

/// Classifies a curve. Points below the full environment (`delta < n_env`)
/// are the interior; the final jump to `2 H(S)` is common to every pure
/// state and is ignored.
pub fn classify_curve(curve: &MiCurve, tol: f64) -> Result<CurveShape> {
    if curve.points.len() < 3 {
        return Err(Error::TooFewPoints(curve.points.len()));
    }
    let interior: Vec<f64> = curve
        .points
        .iter()
        .filter(|p| p.delta >= 1 && p.delta < curve.n_env)
        .map(|p| p.mean_mi)
        .collect();
    let informative = curve.system_entropy > tol;
    if informative
        && interior
            .iter()
            .all(|m| (m - curve.system_entropy).abs() <= tol)
    {
        return Ok(CurveShape::Plateau);
    }
    let rising: Vec<bool> = interior.windows(2).map(|w| w[1] - w[0] > tol).collect();
    if rising.windows(2).any(|w| w[0] && w[1]) {
        return Ok(CurveShape::Growing);
    }
    Ok(CurveShape::Other)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstate::{named_state, NamedState};
    use crate::state::StateVector;
    use core::f64::consts::PI;

    #[test]
    fn fragment_enumeration() {
        let f = enumerate_fragments(3, 1).unwrap();
        let m: Vec<_> = f.iter().map(|f| f.members().to_vec()).collect();
        assert_eq!(m, [[1], [2], [3]]);
        let f = enumerate_fragments(3, 3).unwrap();
        assert_eq!(f[0].members(), [1, 2, 3]);
        assert_eq!(enumerate_fragments(9, 4).unwrap().len(), 126);
        assert_eq!(enumerate_fragments(3, 0).unwrap(), [Fragment::new(alloc::vec![]).unwrap()]);
        assert!(enumerate_fragments(3, 4).is_err());
        let f = enumerate_fragments(4, 2).unwrap();
        assert!(f.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 4), 126);
        assert_eq!(binomial(30, 15), 155_117_520);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn invalid_fragments() {
        let s = StateVector::ghz(4).unwrap();
        let f = Fragment::new(alloc::vec![0, 1]).unwrap();
        assert!(mutual_information(&s, 0, &f).is_err());
        let f = Fragment::new(alloc::vec![4]).unwrap();
        assert!(mutual_information(&s, 0, &f).is_err());
        assert!(Fragment::new(alloc::vec![2, 2]).is_err());
    }

    #[test]
    fn canonical_diamond_fragment_values() {
        let s = named_state(NamedState::DiamondCanonical).unwrap();
        let cases: [(&[usize], f64); 6] = [
            (&[1], 1.0),
            (&[2], 0.0),
            (&[3], 0.0),
            (&[1, 2], 2.0),
            (&[1, 3], 2.0),
            (&[2, 3], 1.0),
        ];
        for (f, want) in cases {
            let frag = Fragment::new(f.to_vec()).unwrap();
            let got = mutual_information(&s, 0, &frag).unwrap();
            assert!((got - want).abs() < 1e-9, "{f:?}: {got}");
        }
    }

    #[test]
    fn star_curve_four_qubits() {
        let s = named_state(NamedState::Star { n_env: 3, phi: PI }).unwrap();
        let c = mi_curve(&s, 0).unwrap();
        let means = c.means();
        for (g, w) in means.iter().zip([1.0, 1.0, 2.0]) {
            assert!((g - w).abs() < 1e-9);
        }
        assert_eq!(c.points[1].n_fragments, 3);
        assert!(c.points.iter().all(|p| p.stderr.is_none()));
    }

    #[test]
    fn sampled_sizes_report_stderr() {
        let s = named_state(NamedState::Diamond { n_env: 5, phi: PI, theta: PI }).unwrap();
        let opts = CurveOptions {
            max_exhaustive: 5,
            samples: 200,
            seed: 7,
        };
        let c = mi_curve_with(&s, 0, opts).unwrap();
        assert!(c.points[0].stderr.is_none());
        assert!(c.points[1].stderr.is_some());
        assert_eq!(c.points[1].n_fragments, 10);
        let again = mi_curve_with(&s, 0, opts).unwrap();
        assert_eq!(c, again);
    }

    fn curve(means: &[f64], hs: f64) -> MiCurve {
        MiCurve {
            points: means
                .iter()
                .enumerate()
                .map(|(i, &m)| CurvePoint {
                    delta: i + 1,
                    mean_mi: m,
                    min_mi: m,
                    max_mi: m,
                    n_fragments: 1,
                    stderr: None,
                })
                .collect(),
            system_entropy: hs,
            n_env: means.len(),
        }
    }

    #[test]
    fn classifier() {
        assert_eq!(classify_curve(&curve(&[0.0; 5], 0.0), 0.01), Ok(CurveShape::Other));
        assert_eq!(
            classify_curve(&curve(&[1.0, 1.0, 1.0, 2.0], 1.0), 0.01),
            Ok(CurveShape::Plateau)
        );
        assert_eq!(
            classify_curve(&curve(&[0.0, 0.3, 0.9, 1.5, 2.0], 1.0), 0.01),
            Ok(CurveShape::Growing)
        );
        assert_eq!(classify_curve(&curve(&[1.0, 2.0], 1.0), 0.01), Err(Error::TooFewPoints(2)));
    }
}
