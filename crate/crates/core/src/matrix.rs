//! Dense complex matrices.
//!
//! Every gate and propagator in the crate is a small dense matrix (at most
//! 4x4 at pulse level), so the representation is a plain row-major `Vec`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);
pub const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Default tolerance for unitarity checks.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![C0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C1;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diag().into_iter().sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == C0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs.data[k * rhs.cols + c];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: v.len() });
        }
        Ok((0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(rows, cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self[(r1, c1)];
                for r2 in 0..rhs.rows {
                    for c2 in 0..rhs.cols {
                        out[(r1 * rhs.rows + r2, c1 * rhs.cols + c2)] = a * rhs[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        self.data.iter().zip(&rhs.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`, or infinity for non-square input.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self.adjoint().matmul(self).expect("square");
        prod.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Solves `self · x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.rows;
        if !self.is_square() || b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: b.len() });
        }
        let mut a = self.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot =
                (col..n).max_by(|&r, &s| a[(r, col)].norm().total_cmp(&a[(s, col)].norm())).expect("non-empty range");
            if a[(pivot, col)].norm() < 1e-300 {
                return Err(Error::Singular);
            }
            if pivot != col {
                for c in 0..n {
                    let tmp = a[(col, c)];
                    a[(col, c)] = a[(pivot, c)];
                    a[(pivot, c)] = tmp;
                }
                x.swap(col, pivot);
            }
            for r in col + 1..n {
                let f = a[(r, col)] / a[(col, col)];
                if f == C0 {
                    continue;
                }
                for c in col..n {
                    let v = a[(col, c)];
                    a[(r, c)] -= f * v;
                }
                let v = x[col];
                x[r] -= f * v;
            }
        }
        for r in (0..n).rev() {
            let s: Complex64 = (r + 1..n).map(|c| a[(r, c)] * x[c]).sum();
            x[r] = (x[r] - s) / a[(r, r)];
        }
        Ok(x)
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    ///
    /// Accurate to machine precision for the small, well-conditioned
    /// generators used here (norm up to a few hundred).
    pub fn expm(&self) -> Self {
        assert!(self.is_square(), "expm of non-square matrix");
        let n = self.rows;
        let norm: f64 = (0..n).map(|r| (0..n).map(|c| self[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max);
        let mut squarings = 0u32;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
        }
        let a = self.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));
        let mut result = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=20 {
            term = term.matmul(&a).expect("square").scale(Complex64::new(1.0 / k as f64, 0.0));
            result = &result + &term;
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result).expect("square");
        }
        result
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in matrix product")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Free-function form of [`ComplexMatrix::kron`].
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.is_unitary(tol)
}

/// Pauli matrices and single-spin operators.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, 2, vec![C0, -CI, CI, C0]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// Rotation by `angle` (radians) about the transverse axis at azimuth
    /// `phase` (radians, 0 = +x, π/2 = +y): `exp(−i·angle·(cos φ σx + sin φ σy)/2)`.
    pub fn transverse_rotation(angle: f64, phase: f64) -> ComplexMatrix {
        let (s, c) = (angle / 2.0).sin_cos();
        let e = Complex64::from_polar(1.0, phase);
        let off = -CI * s;
        ComplexMatrix::from_vec(2, 2, vec![Complex64::new(c, 0.0), off * e.conj(), off * e, Complex64::new(c, 0.0)])
            .unwrap()
    }

    /// `Ry(angle) = exp(−i·angle·σy/2)`.
    pub fn ry(angle: f64) -> ComplexMatrix {
        transverse_rotation(angle, std::f64::consts::FRAC_PI_2)
    }

    pub fn rx(angle: f64) -> ComplexMatrix {
        transverse_rotation(angle, 0.0)
    }
}
