//! Gradient crushers and effective pure state preparation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{coherence_order, DensityMatrix};

/// Zeroes every element of nonzero coherence order. Populations and
/// zero-quantum coherences survive untouched.
pub fn gradient_crush(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let n = rho.n_qubits();
    let mut m = rho.matrix().clone();
    for i in 0..d {
        for j in 0..d {
            if coherence_order(i, j, n) != 0 {
                m[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    DensityMatrix::from_matrix_unchecked(n, m)
}

/// `(1−ε)·I/4 + ε·|00⟩⟨00|`.
pub fn pseudo_pure_00(epsilon: f64) -> Result<DensityMatrix> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::PurityOutOfRange(epsilon));
    }
    let mut pops = [(1.0 - epsilon) / 4.0; 4];
    pops[0] += epsilon;
    DensityMatrix::from_populations(&pops)
}

/// The three initial population vectors used for temporal averaging:
/// `populations` itself and the two cyclic permutations of its last three
/// entries, leaving the |00⟩ population fixed.
pub fn temporal_averaging_inputs(populations: [f64; 4]) -> [[f64; 4]; 3] {
    let [p0, p1, p2, p3] = populations;
    [[p0, p1, p2, p3], [p0, p3, p1, p2], [p0, p2, p3, p1]]
}

/// Average of the three cyclically permuted experiments, which leaves
/// `diag(p₀, p̄, p̄, p̄)`: a state whose traceless part is proportional to
/// that of `|00⟩⟨00|`.
pub fn temporal_average(populations: [f64; 4]) -> Result<DensityMatrix> {
    let inputs = temporal_averaging_inputs(populations);
    let states = inputs.iter().map(|p| DensityMatrix::from_populations(p)).collect::<Result<Vec<_>>>()?;
    average(&states)
}

/// Mean of several density matrices of equal dimension.
pub fn average(states: &[DensityMatrix]) -> Result<DensityMatrix> {
    let first = states.first().ok_or(Error::DimensionMismatch { expected: 1, actual: 0 })?;
    let d = first.dim();
    let mut sum = ComplexMatrix::zeros(d, d);
    for s in states {
        if s.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: s.dim() });
        }
        sum = &sum + s.matrix();
    }
    DensityMatrix::new(sum.scale(Complex64::new(1.0 / states.len() as f64, 0.0)))
}

/// High-temperature thermal populations of two equivalent-γ spins with
/// polarisation `b`: `¼(1+2b), ¼, ¼, ¼(1−2b)`.
pub fn thermal_populations(polarisation: f64) -> [f64; 4] {
    let b = polarisation;
    [0.25 * (1.0 + 2.0 * b), 0.25, 0.25, 0.25 * (1.0 - 2.0 * b)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli;
    use crate::state::StateVector;

    #[test]
    fn crush_diagonal_is_noop() {
        let rho = DensityMatrix::from_populations(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(gradient_crush(&rho), rho);
    }

    #[test]
    fn crush_plus_zero() {
        // |+⟩⊗|0⟩ → diag(½, 0, ½, 0).
        let mut s = StateVector::basis(2, 0);
        s.apply_single_qubit(&pauli::ry(std::f64::consts::FRAC_PI_2), 0).unwrap();
        let out = gradient_crush(&s.to_density());
        let expected = DensityMatrix::from_populations(&[0.5, 0.0, 0.5, 0.0]).unwrap();
        assert!(out.matrix().max_abs_diff(expected.matrix()) < 1e-15);
        assert_eq!(gradient_crush(&out), out);
    }

    #[test]
    fn crush_keeps_zero_quantum() {
        // (|01⟩ + |10⟩)/√2 is pure zero-quantum coherence.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x| Complex64::new(x, 0.0);
        let s = StateVector::from_amplitudes(vec![c(0.0), c(r), c(r), c(0.0)]).unwrap();
        let rho = s.to_density();
        assert_eq!(gradient_crush(&rho), rho);
    }

    #[test]
    fn pseudo_pure_limits() {
        let pure = pseudo_pure_00(1.0).unwrap();
        assert_eq!(pure.populations(), vec![1.0, 0.0, 0.0, 0.0]);
        let faint = pseudo_pure_00(1e-12).unwrap();
        assert!(faint.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-12);
        assert!(pseudo_pure_00(0.0).is_err());
        assert!(pseudo_pure_00(1.5).is_err());
        assert!(pseudo_pure_00(f64::NAN).is_err());
    }

    #[test]
    fn temporal_average_equalises_excited_populations() {
        let p = [0.4, 0.3, 0.2, 0.1];
        let avg = temporal_average(p).unwrap().populations();
        let mean = 0.2;
        assert!((avg[0] - 0.4).abs() < 1e-15);
        for x in &avg[1..] {
            assert!((x - mean).abs() < 1e-15);
        }
    }

    #[test]
    fn thermal_average_is_pseudo_pure() {
        let avg = temporal_average(thermal_populations(1e-5)).unwrap();
        let pops = avg.populations();
        // Traceless part ∝ diag(3, −1, −1, −1).
        let dev: Vec<f64> = pops.iter().map(|p| p - 0.25).collect();
        let scale = dev[0] / 3.0;
        assert!(scale > 0.0);
        for d in &dev[1..] {
            assert!((d + scale).abs() < 1e-15);
        }
    }
}
