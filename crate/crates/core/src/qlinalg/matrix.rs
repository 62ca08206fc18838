use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{phasor, Real};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    pub(crate) dim: usize,
    pub(crate) data: Vec<Complex<T>>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m.data[j * dim + j] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for k in 0..dim {
                data.push(f(j, k));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidInput(format!("row of length {} in a {dim}x{dim} matrix", row.len())));
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, k: usize) -> Vec<Complex<T>> {
        (0..self.dim).map(|j| self.data[j * self.dim + k]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |j, k| self.data[k * n + j].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.dim;
        assert_eq!(n, rhs.dim, "matmul dimension mismatch");
        let mut out = Self::zeros(n);
        for j in 0..n {
            let row = &self.data[j * n..(j + 1) * n];
            let out_row = &mut out.data[j * n..(j + 1) * n];
            for (l, &a) in row.iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let rhs_row = &rhs.data[l * n..(l + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim;
        assert_eq!(n, v.len(), "mul_vec dimension mismatch");
        (0..n)
            .map(|j| {
                self.data[j * n..(j + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|j| self.data[j * self.dim + j]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn scale(&self, factor: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * factor).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest `|M_jk - conj(M_kj)|`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for j in 0..n {
            for k in j..n {
                worst = worst.max((self.data[j * n + k] - self.data[k * n + j].conj()).norm());
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (j, k): (usize, usize)) -> &Complex<T> {
        &self.data[j * self.dim + k]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (j, k): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[j * self.dim + k]
    }
}

impl<T: Real> Add for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn add(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        SquareMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn sub(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        SquareMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

impl<T: Real> Mul for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn mul(self, rhs: Self) -> SquareMatrix<T> {
        self.matmul(rhs)
    }
}

/// Hermitian matrix. Every constructor symmetrizes `(M + M†)/2`, so the
/// stored entries are exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T>(pub(crate) SquareMatrix<T>);

impl<T: Real> HermitianMatrix<T> {
    /// Validates finiteness and symmetrizes.
    pub fn new(m: SquareMatrix<T>) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self::symmetrize(m))
    }

    pub(crate) fn symmetrize(mut m: SquareMatrix<T>) -> Self {
        let n = m.dim;
        let half = T::lit(0.5);
        for j in 0..n {
            let d = m.data[j * n + j];
            m.data[j * n + j] = Complex::new(d.re, T::zero());
            for k in (j + 1)..n {
                let avg = (m.data[j * n + k] + m.data[k * n + j].conj()) * half;
                m.data[j * n + k] = avg;
                m.data[k * n + j] = avg.conj();
            }
        }
        Self(m)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        Self::symmetrize(SquareMatrix::from_fn(dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(SquareMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(SquareMatrix::identity(dim))
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        let mut m = SquareMatrix::zeros(n);
        for (j, &v) in values.iter().enumerate() {
            m.data[j * n + j] = Complex::new(v, T::zero());
        }
        Self(m)
    }

    /// `weight · |v⟩⟨v|`.
    pub fn projector(v: &[Complex<T>], weight: T) -> Self {
        let n = v.len();
        Self::symmetrize(SquareMatrix::from_fn(n, |j, k| v[j] * v[k].conj() * weight))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.0.data[j * self.0.dim + k]
    }

    pub fn as_matrix(&self) -> &SquareMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> SquareMatrix<T> {
        self.0
    }

    /// `⟨v|M|v⟩`, real for Hermitian `M`.
    pub fn expectation(&self, v: &[Complex<T>]) -> T {
        let n = self.0.dim;
        debug_assert_eq!(n, v.len());
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..n {
            let row = &self.0.data[j * n..(j + 1) * n];
            let mv = row.iter().zip(v).fold(Complex::new(T::zero(), T::zero()), |a, (&m, &x)| a + m * x);
            acc += v[j].conj() * mv;
        }
        acc.re
    }

    /// `U_φ M U_φ†` with `U_φ = diag(e^{ikφ})`, i.e. entries `M_jk e^{i(j-k)φ}`.
    pub fn phase_conjugate(&self, phase: T) -> Self {
        let n = self.0.dim;
        let steps: Vec<Complex<T>> = (0..n).map(|q| phasor(phase * T::from_usize_lossy(q))).collect();
        let mut out = self.0.clone();
        for j in 0..n {
            for k in 0..n {
                let f = if j >= k { steps[j - k] } else { steps[k - j].conj() };
                out.data[j * n + k] *= f;
            }
        }
        Self::symmetrize(out)
    }

    pub fn frobenius_norm(&self) -> T {
        self.0.frobenius_norm()
    }

    pub fn trace(&self) -> T {
        self.0.trace().re
    }

    pub fn scale(&self, factor: T) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    /// `W† M W` for an arbitrary square `W`.
    pub fn congruence(&self, w: &SquareMatrix<T>) -> Self {
        Self::symmetrize(w.adjoint().matmul(&self.0).matmul(w))
    }

    /// Real-valued trace inner product `tr(M N)`.
    pub fn trace_product(&self, other: &Self) -> T {
        // tr(MN) = Σ_jk M_jk N_kj = Σ_jk M_jk conj(N_jk)
        self.0.data.iter().zip(&other.0.data).map(|(&a, &b)| (a * b.conj()).re).sum()
    }
}
