//! Generalised N-item, k-marked search and its classical comparator.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grover::{pseudo_hadamard, pseudo_hadamard_inverse};
use crate::matrix::ComplexMatrix;
use crate::state::StateVector;

/// Largest register simulated by [`grover_general`].
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchProblem {
    n_qubits: usize,
    marked: BTreeSet<usize>,
}

impl SearchProblem {
    pub fn new(n_qubits: usize, marked: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::InvalidSearch(format!("{n_qubits} qubits exceeds the limit of {MAX_QUBITS}")));
        }
        let n = 1usize << n_qubits;
        let marked: BTreeSet<usize> = marked.into_iter().collect();
        if marked.is_empty() {
            return Err(Error::InvalidSearch("k = 0: no marked elements".into()));
        }
        if let Some(&bad) = marked.iter().find(|&&m| m >= n) {
            return Err(Error::InvalidSearch(format!("marked index {bad} outside [0, {n})")));
        }
        Ok(Self { n_qubits, marked })
    }

    /// Marks the first `k` indices, which is as good as any other choice.
    pub fn with_count(n_qubits: usize, k: usize) -> Result<Self> {
        if n_qubits <= MAX_QUBITS && k > (1usize << n_qubits) {
            return Err(Error::InvalidSearch(format!("k = {k} exceeds N = {}", 1usize << n_qubits)));
        }
        Self::new(n_qubits, 0..k)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn domain_size(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn marked(&self) -> &BTreeSet<usize> {
        &self.marked
    }

    pub fn k(&self) -> usize {
        self.marked.len()
    }

    /// `θ` with `sin θ = √(k/N)`.
    pub fn angle(&self) -> f64 {
        (self.k() as f64 / self.domain_size() as f64).sqrt().asin()
    }

    /// Total probability carried by the marked indices.
    pub fn success_probability(&self, state: &StateVector) -> f64 {
        let p = state.probabilities();
        self.marked.iter().map(|&i| p[i]).sum()
    }

    /// `sin²((2m+1)θ)`.
    pub fn predicted_success(&self, iterations: usize) -> f64 {
        ((2 * iterations + 1) as f64 * self.angle()).sin().powi(2)
    }
}

/// Runs `iterations` Grover iterates on `h⁻¹^⊗n|0…0⟩`, each iterate being
/// the marked-sign flip followed by `h^⊗n`, the `|0…0⟩` sign flip and
/// `h⁻¹^⊗n`, exactly as in the two-qubit circuit.
pub fn grover_general(problem: &SearchProblem, iterations: usize) -> StateVector {
    run_iterates(problem, iterations, &pseudo_hadamard(), &pseudo_hadamard_inverse())
}

/// Same iterate built from true Hadamards.
pub fn grover_general_hadamard(problem: &SearchProblem, iterations: usize) -> StateVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = ComplexMatrix::from_real(2, 2, &[r, r, r, -r]).unwrap();
    run_iterates(problem, iterations, &h, &h)
}

fn run_iterates(problem: &SearchProblem, iterations: usize, fwd: &ComplexMatrix, inv: &ComplexMatrix) -> StateVector {
    let mut state = StateVector::basis(problem.n_qubits, 0);
    state.apply_all_qubits(inv).expect("2x2 gate");
    for _ in 0..iterations {
        state.flip_signs(problem.marked.iter().copied());
        state.apply_all_qubits(fwd).expect("2x2 gate");
        state.flip_signs([0]);
        state.apply_all_qubits(inv).expect("2x2 gate");
    }
    state
}

/// `round(π/(4θ) − 1/2)`, clamped at zero.
pub fn optimal_iterations(problem: &SearchProblem) -> usize {
    let m = (FRAC_PI_4 / problem.angle() - 0.5).round();
    if m < 0.0 {
        0
    } else {
        m as usize
    }
}

fn check_counts(n: u64, k: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidSearch("k = 0: no marked elements".into()));
    }
    if k > n {
        return Err(Error::InvalidSearch(format!("k = {k} exceeds N = {n}")));
    }
    Ok(())
}

/// Expected number of evaluations when sampling without replacement until a
/// marked element turns up: `(N+1)/(k+1)`.
pub fn classical_expected_evaluations(n: u64, k: u64) -> Result<f64> {
    check_counts(n, k)?;
    Ok((n + 1) as f64 / (k + 1) as f64)
}

/// The rough `N/(2k)` figure usually quoted for classical search.
pub fn classical_approximate_evaluations(n: u64, k: u64) -> Result<f64> {
    check_counts(n, k)?;
    Ok(n as f64 / (2 * k) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
}

/// Seeded simulation of the classical search.
pub fn classical_monte_carlo(n: u64, k: u64, trials: u64, seed: u64) -> Result<MonteCarloEstimate> {
    check_counts(n, k)?;
    if trials < 2 {
        return Err(Error::InvalidSearch("need at least two trials".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let mut remaining = n;
        let mut evaluations = 1u64;
        // Unmarked draws leave all k marked items in the pool.
        while rng.gen_range(0..remaining) >= k {
            remaining -= 1;
            evaluations += 1;
        }
        let e = evaluations as f64;
        sum += e;
        sum_sq += e * e;
    }
    let t = trials as f64;
    let mean = sum / t;
    let var = (sum_sq - t * mean * mean) / (t - 1.0);
    Ok(MonteCarloEstimate { trials, mean, std_error: (var.max(0.0) / t).sqrt() })
}
