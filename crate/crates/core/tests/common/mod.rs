//! Brute-force reference routines that share no code with the library.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Density matrix of a pure state as a dense nalgebra matrix.
pub fn projector(amps: &[Complex64]) -> DMatrix<Complex64> {
    let d = amps.len();
    DMatrix::from_fn(d, d, |i, j| amps[i] * amps[j].conj())
}

fn bit(x: usize, q: usize, n: usize) -> usize {
    (x >> (n - 1 - q)) & 1
}

/// Partial trace by explicit summation over every pair of global indices.
pub fn partial_trace(rho: &DMatrix<Complex64>, n: usize, keep: &[usize]) -> DMatrix<Complex64> {
    let k = keep.len();
    let dk = 1usize << k;
    let mut out = DMatrix::from_element(dk, dk, Complex64::new(0.0, 0.0));
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let sub = |x: usize, qs: &[usize]| qs.iter().fold(0usize, |acc, &q| (acc << 1) | bit(x, q, n));
    for x in 0..(1usize << n) {
        for y in 0..(1usize << n) {
            if sub(x, &traced) == sub(y, &traced) {
                out[(sub(x, keep), sub(y, keep))] += rho[(x, y)];
            }
        }
    }
    out
}

pub fn entropy(rho: &DMatrix<Complex64>) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(rho.clone());
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > 1e-12)
        .map(|&l| -l * l.log2())
        .sum()
}

pub fn mutual_information(amps: &[Complex64], n: usize, system: usize, fragment: &[usize]) -> f64 {
    let rho = projector(amps);
    let mut joint = vec![system];
    joint.extend_from_slice(fragment);
    entropy(&partial_trace(&rho, n, &[system])) + entropy(&partial_trace(&rho, n, fragment))
        - entropy(&partial_trace(&rho, n, &joint))
}

/// Graph state `prod C(phase) |+>^n` written out amplitude by amplitude.
pub fn graph_state(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Complex64> {
    let norm = (1.0 / (1usize << n) as f64).sqrt();
    (0..(1usize << n))
        .map(|x| {
            let phase: f64 = edges
                .iter()
                .filter(|&&(a, b, _)| bit(x, a, n) == 1 && bit(x, b, n) == 1)
                .map(|&(_, _, p)| p)
                .sum();
            Complex64::from_polar(norm, phase)
        })
        .collect()
}

pub fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if items.len() < size {
        return vec![];
    }
    let mut out = Vec::new();
    for mut rest in subsets(&items[1..], size - 1) {
        rest.insert(0, items[0]);
        out.push(rest);
    }
    out.extend(subsets(&items[1..], size));
    out
}

pub fn star_edges(n_env: usize, phi: f64) -> Vec<(usize, usize, f64)> {
    (1..=n_env).map(|k| (0, k, phi)).collect()
}

pub fn diamond_edges(n_env: usize, phi: f64, theta: f64) -> Vec<(usize, usize, f64)> {
    let mut e = star_edges(n_env, phi);
    e.extend((1..n_env).map(|j| (j, j + 1, theta)));
    e
}
