//! State vectors and density matrices over the Zeeman product basis.
//!
//! Basis index bits are read with the first spin (qubit 0 here) as the most
//! significant bit, so for two qubits the order is |00⟩, |01⟩, |10⟩, |11⟩.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C0, C1, UNITARY_TOL};

pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range for {n_qubits} qubits");
        let mut amplitudes = vec![C0; dim];
        amplitudes[index] = C1;
        Self { n_qubits, amplitudes }
    }

    /// Wraps raw amplitudes, checking the length and normalisation.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: dim.next_power_of_two().max(1), actual: dim });
        }
        let s = Self { n_qubits: dim.trailing_zeros() as usize, amplitudes };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidEvent(format!("state not normalised (|ψ|² = {norm})")));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies a 2x2 gate to one qubit (0 = most significant).
    pub fn apply_single_qubit(&mut self, gate: &ComplexMatrix, qubit: usize) -> Result<()> {
        if gate.rows() != 2 || gate.cols() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, actual: gate.rows() });
        }
        if qubit >= self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, actual: qubit });
        }
        let stride = 1usize << (self.n_qubits - 1 - qubit);
        let (g00, g01, g10, g11) = (gate[(0, 0)], gate[(0, 1)], gate[(1, 0)], gate[(1, 1)]);
        for base in (0..self.dim()).filter(|i| i & stride == 0) {
            let a0 = self.amplitudes[base];
            let a1 = self.amplitudes[base | stride];
            self.amplitudes[base] = g00 * a0 + g01 * a1;
            self.amplitudes[base | stride] = g10 * a0 + g11 * a1;
        }
        Ok(())
    }

    /// Applies the same 2x2 gate to every qubit.
    pub fn apply_all_qubits(&mut self, gate: &ComplexMatrix) -> Result<()> {
        for q in 0..self.n_qubits {
            self.apply_single_qubit(gate, q)?;
        }
        Ok(())
    }

    /// Multiplies the listed basis amplitudes by −1.
    pub fn flip_signs(&mut self, indices: impl IntoIterator<Item = usize>) {
        for i in indices {
            self.amplitudes[i] = -self.amplitudes[i];
        }
    }

    /// Pure-state projector `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] = self.amplitudes[r] * self.amplitudes[c].conj();
            }
        }
        DensityMatrix { n_qubits: self.n_qubits, matrix: m }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and dimension.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.rows();
        if !matrix.is_square() || !d.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: d.next_power_of_two(), actual: matrix.cols() });
        }
        if !matrix.is_hermitian(NORM_TOL) {
            return Err(Error::InvalidEvent("density matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - C1).norm() > NORM_TOL {
            return Err(Error::InvalidEvent(format!("density matrix trace {tr} != 1")));
        }
        Ok(Self { n_qubits: d.trailing_zeros() as usize, matrix })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self { n_qubits, matrix: ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)) }
    }

    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = populations.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        Self::new(ComplexMatrix::from_diag(&diag))
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: ComplexMatrix) -> Self {
        Self { n_qubits, matrix }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diag().iter().map(|z| z.re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        let m = &self.matrix.scale(Complex64::new(w, 0.0)) + &other.matrix.scale(Complex64::new(1.0 - w, 0.0));
        Ok(Self { n_qubits: self.n_qubits, matrix: m })
    }

    /// Eigenvalues of the Hermitian matrix via cyclic complex Jacobi sweeps.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// Things a unitary can act on.
pub trait Evolve: Sized {
    fn dim(&self) -> usize;
    /// Applies `u` without checking unitarity.
    fn evolve_unchecked(&self, u: &ComplexMatrix) -> Self;
}

impl Evolve for StateVector {
    fn dim(&self) -> usize {
        self.amplitudes.len()
    }
    fn evolve_unchecked(&self, u: &ComplexMatrix) -> Self {
        Self { n_qubits: self.n_qubits, amplitudes: u.mul_vec(&self.amplitudes).expect("checked dims") }
    }
}

impl Evolve for DensityMatrix {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }
    fn evolve_unchecked(&self, u: &ComplexMatrix) -> Self {
        let m = &(u * &self.matrix) * &u.adjoint();
        Self { n_qubits: self.n_qubits, matrix: m }
    }
}

/// `U|ψ⟩` or `UρU†`, after checking the dimension and unitarity of `u`.
pub fn apply_unitary<S: Evolve>(u: &ComplexMatrix, s: &S) -> Result<S> {
    if !u.is_square() || u.rows() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), actual: u.rows() });
    }
    let deviation = u.unitarity_deviation();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(s.evolve_unchecked(u))
}

/// Objects that can be compared up to a global phase.
pub trait PhaseComparable {
    fn entries(&self) -> &[Complex64];
}

impl PhaseComparable for StateVector {
    fn entries(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

impl PhaseComparable for ComplexMatrix {
    fn entries(&self) -> &[Complex64] {
        self.as_slice()
    }
}

/// Unit-modulus factor `c` aligning `b` to `a` at the largest entry of `b`.
pub fn global_phase<T: PhaseComparable>(a: &T, b: &T) -> Result<Complex64> {
    let (ea, eb) = (a.entries(), b.entries());
    if ea.len() != eb.len() {
        return Err(Error::DimensionMismatch { expected: eb.len(), actual: ea.len() });
    }
    let (idx, pivot) = eb
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(i, z)| (i, *z))
        .ok_or(Error::ZeroReference)?;
    if pivot.norm() == 0.0 {
        return Err(Error::ZeroReference);
    }
    let ratio = ea[idx] / pivot;
    if ratio.norm() == 0.0 {
        return Ok(C1);
    }
    Ok(ratio / ratio.norm())
}

/// True iff `‖a − c·b‖_max ≤ tol` for the phase `c` picked at b's largest entry.
pub fn equal_up_to_global_phase<T: PhaseComparable>(a: &T, b: &T, tol: f64) -> Result<bool> {
    let c = global_phase(a, b)?;
    let dev = a.entries().iter().zip(b.entries()).map(|(x, y)| (x - c * y).norm()).fold(0.0, f64::max);
    Ok(dev <= tol)
}

/// Coherence order of the density-matrix element ρ_ij: popcount(j) − popcount(i).
pub fn coherence_order(i: usize, j: usize, n_qubits: usize) -> i32 {
    let dim = 1usize << n_qubits;
    assert!(i < dim && j < dim, "basis index out of range");
    j.count_ones() as i32 - i.count_ones() as i32
}

/// `⟨a|ρ|a⟩`.
pub fn fidelity(a: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: a.dim() });
    }
    let rho_a = rho.matrix.mul_vec(&a.amplitudes)?;
    let f: Complex64 = a.amplitudes.iter().zip(&rho_a).map(|(x, y)| x.conj() * y).sum();
    Ok(f.re)
}

fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)].norm_sqr())
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() < 1e-300 {
                    continue;
                }
                // Unitary Jacobi rotation zeroing a[p][q].
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                let mut rot = ComplexMatrix::identity(n);
                rot[(p, p)] = Complex64::new(c, 0.0);
                rot[(q, q)] = Complex64::new(c, 0.0);
                rot[(p, q)] = phase * s;
                rot[(q, p)] = -phase.conj() * s;
                a = &(&rot.adjoint() * &a) * &rot;
            }
        }
    }
    let mut ev: Vec<f64> = a.diag().iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
