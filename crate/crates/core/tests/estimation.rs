//! Closed-form estimator, planner, sampling and projection properties.

mod common;

use proptest::prelude::*;
use qdarwin_core::darwinism::{mutual_information, Fragment};
use qdarwin_core::estimator::{
    correlator_table, full_correlator_table, plan_measurements, reconstruct_density, star_mutual_information,
    star_parameters, two_branch_state, PlanTarget,
};
use qdarwin_core::graphstate::{named_state, NamedState};
use qdarwin_core::linalg::{hermitian_eigenvalues, CMatrix};
use qdarwin_core::measurement::{
    estimate_correlators, estimate_from_setting, project_spectrum, project_to_physical, sample_plan,
    sample_setting, OutcomeCounts, RunConfig,
};
use qdarwin_core::pauli::PauliString;
use qdarwin_core::state::{DensityMatrix, QuantumState, StateVector};
use qdarwin_core::C64;

fn closed_form_matches_exact(p: f64, c: C64) {
    let params = star_parameters(&correlator_table(&two_branch_state(p, c).unwrap(), &plan_measurements(PlanTarget::Star).correlators).unwrap()).unwrap();
    assert!((params.p - p).abs() < 1e-10);
    assert!((params.c - c).norm() < 1e-10);
    let rho = two_branch_state(p, c).unwrap();
    for (delta, fragment) in [(1, vec![1]), (2, vec![1, 2]), (3, vec![1, 2, 3])] {
        let exact = mutual_information(&rho, 0, &Fragment::new(fragment).unwrap()).unwrap();
        let closed = star_mutual_information(&params, delta).unwrap();
        assert!((exact - closed).abs() < 1e-8, "P={p} C={c} delta={delta}: {exact} vs {closed}");
    }
}

#[test]
fn closed_form_agrees_with_exact_matrix_on_grid() {
    for i in 1..=9 {
        let p = i as f64 / 10.0;
        let bound = (p * (1.0 - p)).sqrt();
        for j in 0..=8 {
            let r = bound * j as f64 / 8.0;
            for k in 0..6 {
                let angle = k as f64 * core::f64::consts::PI / 3.0;
                closed_form_matches_exact(p, C64::from_polar(r, angle));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn branch_eigenvalues_are_block_eigenvalues(p in 0.0f64..=1.0, frac in 0.0f64..=1.0, angle in -3.2f64..3.2) {
        let c = C64::from_polar(frac * (p * (1.0 - p)).sqrt(), angle);
        let params = qdarwin_core::estimator::StarParameters::exact(p, c);
        let (fp, fm) = params.branch_eigenvalues();
        prop_assert!((fp + fm - 1.0).abs() < 1e-15);
        let block = CMatrix::from_rows(2, vec![C64::new(p, 0.0), c, c.conj(), C64::new(1.0 - p, 0.0)]).unwrap();
        let eig = hermitian_eigenvalues(&block);
        prop_assert!((eig[0] - fp).abs() < 1e-10);
        prop_assert!((eig[1] - fm).abs() < 1e-10);
    }

    #[test]
    fn star_parameters_recover_two_branch_state(p in 0.0f64..=1.0, frac in 0.0f64..=1.0, angle in -3.2f64..3.2) {
        let c = C64::from_polar(frac * (p * (1.0 - p)).sqrt(), angle);
        let rho = two_branch_state(p, c).unwrap();
        let params = star_parameters(&full_correlator_table(&rho).unwrap()).unwrap();
        prop_assert!((params.p - p).abs() < 1e-10);
        prop_assert!((params.c - c).norm() < 1e-10);
        prop_assert!(params.physical);
    }

    #[test]
    fn reconstruction_round_trips_mixed_states(
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 48),
        weights in prop::collection::vec(0.01f64..1.0, 3),
    ) {
        let total: f64 = weights.iter().sum();
        let mut m = CMatrix::zeros(16);
        for (chunk, w) in amps.chunks(16).zip(&weights) {
            let v: Vec<C64> = chunk.iter().map(|&(a, b)| C64::new(a, b)).collect();
            let s = StateVector::normalized(v).unwrap();
            m = m.add(&CMatrix::outer(s.amplitudes()).scale(C64::new(w / total, 0.0)));
        }
        let rho = DensityMatrix::from_matrix(m).unwrap();
        let back = reconstruct_density(&full_correlator_table(&rho).unwrap()).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-9);
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>()) {
        let psi = named_state(NamedState::DiamondCanonical).unwrap();
        let cfg = RunConfig { shots_per_setting: 500, seed, bootstrap_resamples: 0, ..RunConfig::default() };
        let plan = plan_measurements(PlanTarget::Star);
        let a = sample_plan(&psi, &plan, &cfg).unwrap();
        let b = sample_plan(&psi, &plan, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        // stream depends on the setting, not its position
        let mut reversed = plan.clone();
        reversed.settings.reverse();
        let mut c = sample_plan(&psi, &reversed, &cfg).unwrap();
        c.reverse();
        prop_assert_eq!(&a, &c);
        let ta = estimate_correlators(&a, &plan.correlators).unwrap();
        let tb = estimate_correlators(&b, &plan.correlators).unwrap();
        prop_assert_eq!(ta, tb);
    }
}

#[test]
fn star_plan_is_sound() {
    let plan = plan_measurements(PlanTarget::Star);
    assert_eq!(plan.correlators.len(), 32);
    assert_eq!(plan.settings.len(), 17);
    // 16 strings over {I, Z} (identity included) and 16 over {X, Y}
    assert_eq!(plan.correlators.iter().filter(|c| c.is_identity()).count(), 1);
    for c in &plan.correlators {
        let setting = plan.setting_for(c).expect("covered");
        assert!(c.is_marginal_of(setting));
        assert!(setting.is_full_weight());
    }
    let full = plan_measurements(PlanTarget::FullTomography);
    assert_eq!((full.correlators.len(), full.settings.len(), full.counts.n_projectors), (255, 81, 1296));
}

#[test]
fn ideal_star_resource_parameters() {
    let psi = named_state(NamedState::StarExperimental).unwrap();
    let table = correlator_table(&psi, &plan_measurements(PlanTarget::Star).correlators).unwrap();
    let params = star_parameters(&table).unwrap();
    assert!((params.p - 0.5).abs() < 1e-12);
    assert!((params.c - C64::new(0.5, 0.0)).norm() < 1e-12);
    let values: Vec<f64> = (1..=3).map(|d| star_mutual_information(&params, d).unwrap()).collect();
    for (v, e) in values.iter().zip([1.0, 1.0, 2.0]) {
        assert!((v - e).abs() < 1e-9);
    }
}

#[test]
fn sampled_correlators_are_consistent_with_exact_values() {
    let psi = named_state(NamedState::DiamondCanonical).unwrap();
    let rho = psi.to_density().depolarized(0.15).unwrap();
    let plan = plan_measurements(PlanTarget::FullTomography);
    let exact = correlator_table(&rho, &plan.correlators).unwrap();
    let (mut inside, mut total) = (0usize, 0usize);
    for seed in 0..200u64 {
        let cfg = RunConfig { shots_per_setting: 400, seed, bootstrap_resamples: 0, ..RunConfig::default() };
        let table = estimate_correlators(&sample_plan(&rho, &plan, &cfg).unwrap(), &plan.correlators).unwrap();
        for (s, c) in table.iter() {
            let truth = exact.value(s).unwrap();
            let sigma = c.sigma.unwrap();
            // near +-1 the sampled sigma can vanish; floor it at one count
            let sigma = sigma.max(1.0 / 400.0);
            total += 1;
            if (c.value - truth).abs() <= 5.0 * sigma {
                inside += 1;
            }
        }
    }
    assert!(inside as f64 >= 0.99 * total as f64, "{inside}/{total}");
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n % 2 == 1 { xs[n / 2] } else { (xs[n / 2 - 1] + xs[n / 2]) / 2.0 }
}

/// Median correlator sigma at each shot count.
pub fn median_sigmas(shots: &[u64]) -> Vec<f64> {
    let rho = named_state(NamedState::DiamondCanonical).unwrap().to_density().depolarized(0.1).unwrap();
    let plan = plan_measurements(PlanTarget::FullTomography);
    shots
        .iter()
        .map(|&n| {
            let cfg = RunConfig { shots_per_setting: n, seed: 11, bootstrap_resamples: 0, ..RunConfig::default() };
            let table = estimate_correlators(&sample_plan(&rho, &plan, &cfg).unwrap(), &plan.correlators).unwrap();
            median(table.iter().map(|(_, c)| c.sigma.unwrap()).collect())
        })
        .collect()
}

#[test]
fn sigma_scales_as_inverse_root_shots() {
    let shots = [1_000u64, 4_000, 16_000, 64_000];
    let sigmas = median_sigmas(&shots);
    for w in sigmas.windows(2) {
        // each step quadruples the shots: two doublings
        let ratio = w[0] / w[1];
        assert!((ratio / 2.0 - 1.0).abs() < 0.1, "ratio {ratio}");
    }
    // log-log slope over the whole range
    let xs: Vec<f64> = shots.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = sigmas.iter().map(|s| s.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() < 0.05, "slope {slope}");
}

/// Nearest point of the simplex by grid search, in steps of `1/steps`.
fn grid_projection(values: &[f64], steps: usize) -> Vec<f64> {
    let d = values.len();
    let mut best = (f64::INFINITY, vec![0.0; d]);
    let mut point = vec![0usize; d];
    fn walk(i: usize, left: usize, point: &mut Vec<usize>, steps: usize, values: &[f64], best: &mut (f64, Vec<f64>)) {
        if i + 1 == point.len() {
            point[i] = left;
            let p: Vec<f64> = point.iter().map(|&k| k as f64 / steps as f64).collect();
            let dist: f64 = p.iter().zip(values).map(|(a, b)| (a - b).powi(2)).sum();
            if dist < best.0 {
                *best = (dist, p);
            }
            return;
        }
        for k in 0..=left {
            point[i] = k;
            walk(i + 1, left - k, point, steps, values, best);
        }
    }
    walk(0, steps, &mut point, steps, values, &mut best);
    best.1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn diagonal_projection_matches_grid_search(raw in prop::collection::vec(-0.6f64..1.2, 4)) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total.abs() > 0.2);
        let diag: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let rho = DensityMatrix::from_diagonal(&diag).unwrap();
        let projected = project_to_physical(&rho);
        let got: Vec<f64> = (0..4).map(|i| projected.matrix()[(i, i)].re).collect();
        let steps = 200;
        let grid = grid_projection(&diag, steps);
        for (a, b) in got.iter().zip(&grid) {
            prop_assert!((a - b).abs() <= 1.0 / steps as f64 + 1e-12, "{got:?} vs {grid:?}");
        }
        prop_assert!(got.iter().all(|&x| x >= 0.0));
        prop_assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    prop_assert!(projected.matrix()[(i, j)].norm() < 1e-12);
                }
            }
        }
        let spectrum = project_spectrum(&diag);
        prop_assert!((spectrum.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_estimates_equal_direct_marginalization(seed in any::<u64>(), mask in 1usize..16) {
        let psi = named_state(NamedState::HyperentangledXi).unwrap();
        let setting: PauliString = "XYZX".parse().unwrap();
        let cfg = RunConfig { shots_per_setting: 2000, seed, bootstrap_resamples: 0, ..RunConfig::default() };
        let data = sample_setting(&psi, &setting, &cfg).unwrap();
        let labels: Vec<_> = setting
            .labels()
            .iter()
            .enumerate()
            .map(|(q, &l)| if mask >> (3 - q) & 1 == 1 { l } else { qdarwin_core::pauli::Pauli::I })
            .collect();
        let wanted = PauliString::new(labels);
        let (value, sigma) = estimate_from_setting(&data, &wanted).unwrap();
        // marginal distribution over the support, then parity
        let support: Vec<usize> = (0..4).filter(|q| mask >> (3 - q) & 1 == 1).collect();
        let mut marginal = vec![0u64; 1 << support.len()];
        for (x, &c) in data.counts().iter().enumerate() {
            let key = support.iter().fold(0usize, |acc, &q| (acc << 1) | (x >> (3 - q) & 1));
            marginal[key] += c;
        }
        let signed: i64 = marginal
            .iter()
            .enumerate()
            .map(|(k, &c)| if k.count_ones() % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum();
        let direct = signed as f64 / data.shots() as f64;
        prop_assert_eq!(value, direct);
        prop_assert_eq!(sigma, ((1.0 - direct * direct).max(0.0) / data.shots() as f64).sqrt());
    }
}

#[test]
fn ghz_samples_only_two_outcomes() {
    let psi = StateVector::ghz(4).unwrap();
    let cfg = RunConfig { shots_per_setting: 1_000_000, seed: 3, bootstrap_resamples: 0, ..RunConfig::default() };
    let data = sample_setting(&psi, &"ZZZZ".parse().unwrap(), &cfg).unwrap();
    let counts = data.counts();
    assert_eq!(counts[0] + counts[15], 1_000_000);
    let sigma = (0.25f64 * 1e6).sqrt();
    assert!((counts[0] as f64 - 5e5).abs() < 4.0 * sigma);
}

#[test]
fn maximally_mixed_samples_are_uniform() {
    let rho = DensityMatrix::maximally_mixed(4).unwrap();
    let cfg = RunConfig { shots_per_setting: 1_000_000, seed: 5, bootstrap_resamples: 0, ..RunConfig::default() };
    let data = sample_setting(&rho, &"XYZX".parse().unwrap(), &cfg).unwrap();
    let expected = 1e6 / 16.0;
    let sigma = (1e6f64 * (1.0 / 16.0) * (15.0 / 16.0)).sqrt();
    for &c in data.counts() {
        assert!((c as f64 - expected).abs() < 4.0 * sigma);
    }
    let uniform = OutcomeCounts::new("ZZZZ".parse().unwrap(), vec![1; 16]).unwrap();
    assert_eq!(uniform.shots(), 16);
    assert_eq!(rho.pauli_expectation(&"XXII".parse().unwrap()).unwrap(), 0.0);
}
