//! Finite-statistics data acquisition and its propagation to curves.
//!
//! Each measurement setting is a full-weight Pauli string; shots are drawn
//! from the 16 (or `2^n`) outcome probabilities. Correlators of lower
//! weight are read off a setting's counts by ignoring the identity
//! positions. Randomness is a ChaCha20 stream per setting, selected from the
//! run seed by the setting's index, so results do not depend on the order
//! in which settings are sampled.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use crate::darwinism::{binomial, CurvePoint, MiCurve};
use crate::entropy::binary_entropy;
use crate::estimator::{
    diamond_mutual_information, plan_measurements, star_mutual_information, star_parameters,
    CorrelatorTable, MeasurementPlan, PlanTarget,
};
use crate::linalg::{hermitian_eigen, pairwise_sum, CMatrix};
use crate::pauli::PauliString;
use crate::state::{DensityMatrix, QuantumState, PHYSICAL_TOL};
use crate::{Error, Result};

/// Outcome histogram of one setting. `counts[x]` is the number of shots
/// with outcome bits `x` (qubit 0 most significant, bit 1 = `-1` eigenvalue).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeCounts {
    setting: PauliString,
    shots: u64,
    counts: Vec<u64>,
}

impl OutcomeCounts {
    pub fn new(setting: PauliString, counts: Vec<u64>) -> Result<Self> {
        if !setting.is_full_weight() {
            return Err(Error::IdentityInSetting(setting));
        }
        let dim = 1usize << setting.len();
        if counts.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: counts.len(),
            });
        }
        let shots = counts.iter().sum();
        Ok(OutcomeCounts {
            setting,
            shots,
            counts,
        })
    }

    pub fn setting(&self) -> &PauliString {
        &self.setting
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `(sum of parities, shots)` for the marginal on `string`'s support.
    fn parity_sum(&self, string: &PauliString) -> i64 {
        let mask = string.support_mask();
        self.counts
            .iter()
            .enumerate()
            .map(|(x, &c)| {
                if (x & mask).count_ones().is_multiple_of(2) {
                    c as i64
                } else {
                    -(c as i64)
                }
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ShotModel {
    /// Exactly `shots_per_setting` shots.
    #[default]
    Fixed,
    /// Poisson-distributed total with mean `shots_per_setting`.
    Poisson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub shots_per_setting: u64,
    pub seed: u64,
    pub bootstrap_resamples: usize,
    pub shot_model: ShotModel,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            // about 9 s of coincidences at 500 per second
            shots_per_setting: 4500,
            seed: 0,
            bootstrap_resamples: 500,
            shot_model: ShotModel::Fixed,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots_per_setting == 0 {
            return Err(Error::InvalidParameter("shots_per_setting must be positive".into()));
        }
        Ok(())
    }
}

const BOOTSTRAP_STREAM: u64 = 1 << 63;

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Multinomial draw by sequential conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(rng: &mut R, shots: u64, probs: &[f64]) -> Vec<u64> {
    let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    let mut out = vec![0u64; probs.len()];
    if total <= 0.0 || probs.is_empty() {
        return out;
    }
    let mut remaining = shots;
    let mut rest = 1.0;
    let last = probs.len() - 1;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0) / total;
        if i == last {
            out[i] = remaining;
            break;
        }
        let cond = if rest <= 0.0 { 1.0 } else { (p / rest).clamp(0.0, 1.0) };
        let k = if cond >= 1.0 {
            remaining
        } else if cond <= 0.0 {
            0
        } else {
            Binomial::new(remaining, cond).expect("valid binomial").sample(rng)
        };
        out[i] = k;
        remaining -= k;
        rest -= p;
    }
    out
}

/// Samples one setting. The random stream is picked by the setting itself.
pub fn sample_setting<S: QuantumState + ?Sized>(
    state: &S,
    setting: &PauliString,
    cfg: &RunConfig,
) -> Result<OutcomeCounts> {
    cfg.validate()?;
    if !setting.is_full_weight() {
        return Err(Error::IdentityInSetting(setting.clone()));
    }
    let probs = state.basis_probabilities(setting)?;
    let mut rng = rng_for(cfg.seed, setting.index());
    let shots = match cfg.shot_model {
        ShotModel::Fixed => cfg.shots_per_setting,
        ShotModel::Poisson => {
            let dist = Poisson::new(cfg.shots_per_setting as f64)
                .map_err(|_| Error::InvalidParameter("bad Poisson mean".into()))?;
            let draw: f64 = dist.sample(&mut rng);
            draw as u64
        }
    };
    let counts = multinomial(&mut rng, shots, &probs);
    OutcomeCounts::new(setting.clone(), counts)
}

/// Samples every setting of a plan.
pub fn sample_plan<S: QuantumState + ?Sized>(
    state: &S,
    plan: &MeasurementPlan,
    cfg: &RunConfig,
) -> Result<Vec<OutcomeCounts>> {
    plan.settings
        .iter()
        .map(|s| sample_setting(state, s, cfg))
        .collect()
}

/// Correlator estimates from counts. A string measured under several
/// settings pools their shots, which is the inverse-variance average when
/// every setting sees the same marginal distribution.
pub fn estimate_correlators(data: &[OutcomeCounts], wanted: &[PauliString]) -> Result<CorrelatorTable> {
    let mut table = CorrelatorTable::new();
    for w in wanted {
        let mut parity = 0i64;
        let mut shots = 0u64;
        for d in data.iter().filter(|d| w.is_marginal_of(&d.setting) && d.shots > 0) {
            parity += d.parity_sum(w);
            shots += d.shots;
        }
        if shots == 0 {
            return Err(Error::Uncovered(w.clone()));
        }
        let value = parity as f64 / shots as f64;
        let sigma = libm::sqrt((1.0 - value * value).max(0.0) / shots as f64);
        table.insert(w.clone(), value, Some(sigma))?;
    }
    Ok(table)
}

/// Estimate from a single setting, without pooling.
pub fn estimate_from_setting(data: &OutcomeCounts, wanted: &PauliString) -> Result<(f64, f64)> {
    if !wanted.is_marginal_of(&data.setting) || data.shots == 0 {
        return Err(Error::Uncovered(wanted.clone()));
    }
    let value = data.parity_sum(wanted) as f64 / data.shots as f64;
    Ok((value, libm::sqrt((1.0 - value * value).max(0.0) / data.shots as f64)))
}

/// Euclidean projection of a spectrum onto the probability simplex:
/// `max(lambda - tau, 0)` with `tau` fixed by unit sum.
pub fn project_spectrum(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        }
    }
    values.iter().map(|&l| (l - tau).max(0.0)).collect()
}

/// Closest unit-trace positive semidefinite matrix in Frobenius norm.
/// Inputs whose eigenvalues are all at least `-1e-9` come back unchanged.
pub fn project_to_physical(rho: &DensityMatrix) -> DensityMatrix {
    let eig = hermitian_eigen(rho.matrix());
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min >= -PHYSICAL_TOL {
        return DensityMatrix::from_parts_unchecked(rho.n_qubits(), rho.matrix().clone(), true);
    }
    let values = project_spectrum(&eig.values);
    let mut m = CMatrix::from_eigen(&values, &eig.vectors);
    // exact Hermitian symmetry
    let n = m.dim();
    for i in 0..n {
        m[(i, i)] = crate::C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    DensityMatrix::from_parts_unchecked(rho.n_qubits(), m, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// 32 star correlators, closed-form mutual information.
    ClosedForm,
    /// Full tomography, projection, exhaustive fragments.
    Reconstruction,
}

impl Pipeline {
    pub fn plan(self) -> MeasurementPlan {
        match self {
            Pipeline::ClosedForm => plan_measurements(PlanTarget::Star),
            Pipeline::Reconstruction => plan_measurements(PlanTarget::FullTomography),
        }
    }
}

/// Samples the pipeline's settings on `state` and evaluates the curve with
/// bootstrap error bars.
pub fn estimate_mi_curve<S: QuantumState + ?Sized>(
    state: &S,
    system: usize,
    cfg: &RunConfig,
    pipeline: Pipeline,
) -> Result<MiCurve> {
    if state.n_qubits() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: state.n_qubits(),
        });
    }
    let data = sample_plan(state, &pipeline.plan(), cfg)?;
    curve_from_counts(&data, system, cfg, pipeline)
}

/// Curve from stored counts, with bootstrap standard errors.
pub fn curve_from_counts(
    data: &[OutcomeCounts],
    system: usize,
    cfg: &RunConfig,
    pipeline: Pipeline,
) -> Result<MiCurve> {
    let mut curve = analyze(data, system, pipeline)?;
    if cfg.bootstrap_resamples == 0 {
        return Ok(curve);
    }
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.bootstrap_resamples); curve.points.len()];
    for r in 0..cfg.bootstrap_resamples {
        let mut rng = rng_for(cfg.seed, BOOTSTRAP_STREAM | r as u64);
        let resampled = data
            .iter()
            .map(|d| {
                let freqs: Vec<f64> = d.counts.iter().map(|&c| c as f64).collect();
                OutcomeCounts::new(d.setting.clone(), multinomial(&mut rng, d.shots, &freqs))
            })
            .collect::<Result<Vec<_>>>()?;
        let c = analyze(&resampled, system, pipeline)?;
        for (bucket, p) in samples.iter_mut().zip(&c.points) {
            bucket.push(p.mean_mi);
        }
    }
    for (point, bucket) in curve.points.iter_mut().zip(&samples) {
        point.stderr = Some(sample_std(bucket));
    }
    Ok(curve)
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    libm::sqrt(pairwise_sum(&sq) / (n - 1.0))
}

fn analyze(data: &[OutcomeCounts], system: usize, pipeline: Pipeline) -> Result<MiCurve> {
    let plan = pipeline.plan();
    match pipeline {
        Pipeline::ClosedForm => {
            if system != 0 {
                return Err(Error::InvalidParameter(
                    "the closed-form estimator puts the system on qubit 0".into(),
                ));
            }
            let table = estimate_correlators(data, &plan.correlators)?;
            let params = star_parameters(&table)?.projected();
            let points = (1..=3)
                .map(|delta| {
                    let mi = star_mutual_information(&params, delta)?;
                    Ok(CurvePoint {
                        delta,
                        mean_mi: mi,
                        min_mi: mi,
                        max_mi: mi,
                        n_fragments: binomial(3, delta) as u64,
                        stderr: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(MiCurve {
                points,
                system_entropy: binary_entropy(params.p.clamp(0.0, 1.0)),
                n_env: 3,
            })
        }
        Pipeline::Reconstruction => {
            let mut wanted = plan.correlators;
            wanted.push(PauliString::identity(4));
            let table = estimate_correlators(data, &wanted)?;
            diamond_mutual_information(&table, system)
        }
    }
}
