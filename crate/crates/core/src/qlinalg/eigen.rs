use num_complex::Complex;

use super::matrix::{HermitianMatrix, SquareMatrix};
use crate::error::{Error, Result};
use crate::scalar::{entropy_term, Real};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with orthonormal eigenvectors stored as
/// columns. Each column is gauge fixed: its first component of largest
/// magnitude is real and nonnegative.
#[derive(Clone, Debug)]
pub struct EigenSystem<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: SquareMatrix<T>,
}

impl<T: Real> EigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex<T>> {
        self.eigenvectors.column(i)
    }

    /// Smallest eigenvalue and its eigenvector.
    pub fn min_pair(&self) -> (T, Vec<Complex<T>>) {
        (self.eigenvalues[0], self.eigenvector(0))
    }

    /// `Σ_i f(λ_i) v_i v_i†`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = SquareMatrix::zeros(n);
        for (i, &w) in weights.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            for j in 0..n {
                let vj = v[(j, i)] * w;
                for k in 0..n {
                    out.data[j * n + k] += vj * v[(k, i)].conj();
                }
            }
        }
        HermitianMatrix::symmetrize(out)
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        self.map_spectrum(|l| l)
    }
}

fn jacobi_tolerance<T: Real>() -> T {
    T::lit(1e-14).max(T::epsilon() * T::lit(4.0))
}

fn off_diagonal_norm<T: Real>(a: &SquareMatrix<T>) -> T {
    let n = a.dim;
    let mut s = T::zero();
    for j in 0..n {
        for k in 0..n {
            if j != k {
                s += a.data[j * n + k].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi sweeps on `a`, accumulating rotations into `v`.
fn jacobi_sweeps<T: Real>(a: &mut SquareMatrix<T>, v: &mut SquareMatrix<T>, scale: T) {
    let n = a.dim;
    let target = jacobi_tolerance::<T>() * scale;
    let negligible = T::epsilon() * T::lit(1e-3);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a) <= target {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.data[p * n + q];
                let r = apq.norm();
                let app = a.data[p * n + p].re;
                let aqq = a.data[q * n + q].re;
                if r == T::zero() || r <= negligible * (app.abs() + aqq.abs()) {
                    a.data[p * n + q] = Complex::new(T::zero(), T::zero());
                    a.data[q * n + p] = Complex::new(T::zero(), T::zero());
                    continue;
                }
                // Real rotation for [[app, r], [r, aqq]] after removing the phase of a_pq.
                let theta = (aqq - app) / (r + r);
                let t = {
                    let mag = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let ph = apq / r; // e^{iα}
                                  // G = [[c, s], [-s e^{-iα}, c e^{-iα}]] acting on (p, q).
                let g_qp = -ph.conj() * s;
                let g_qq = ph.conj() * c;
                for i in 0..n {
                    let x = a.data[i * n + p];
                    let y = a.data[i * n + q];
                    a.data[i * n + p] = x * c + y * g_qp;
                    a.data[i * n + q] = x * s + y * g_qq;
                }
                let (gqp_c, gqq_c) = (g_qp.conj(), g_qq.conj());
                for j in 0..n {
                    let x = a.data[p * n + j];
                    let y = a.data[q * n + j];
                    a.data[p * n + j] = x * c + y * gqp_c;
                    a.data[q * n + j] = x * s + y * gqq_c;
                }
                for i in 0..n {
                    let x = v.data[i * n + p];
                    let y = v.data[i * n + q];
                    v.data[i * n + p] = x * c + y * g_qp;
                    v.data[i * n + q] = x * s + y * g_qq;
                }
                a.data[p * n + q] = Complex::new(T::zero(), T::zero());
                a.data[q * n + p] = Complex::new(T::zero(), T::zero());
                a.data[p * n + p] = Complex::new(app - t * r, T::zero());
                a.data[q * n + q] = Complex::new(aqq + t * r, T::zero());
            }
        }
    }
    log::warn!("Jacobi eigensolver hit the sweep limit (off-diagonal norm {:e})", off_diagonal_norm(a).as_f64());
}

/// Rotates `v` so that its first component of largest magnitude is real and
/// nonnegative.
pub(crate) fn fix_gauge<T: Real>(v: &mut [Complex<T>]) {
    let max = v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    if max == T::zero() {
        return;
    }
    let cut = max * (T::one() - T::lit(1e-9));
    if let Some(anchor) = v.iter().find(|z| z.norm() >= cut).copied() {
        let rot = anchor.conj() / anchor.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

fn finish<T: Real>(a: SquareMatrix<T>, v: SquareMatrix<T>) -> EigenSystem<T> {
    let n = a.dim;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.data[i * n + i].re.partial_cmp(&a.data[j * n + j].re).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&i| a.data[i * n + i].re).collect();
    let mut vecs = SquareMatrix::zeros(n);
    for (col, &i) in order.iter().enumerate() {
        let mut x = v.column(i);
        fix_gauge(&mut x);
        for (j, z) in x.into_iter().enumerate() {
            vecs.data[j * n + col] = z;
        }
    }
    EigenSystem { eigenvalues, eigenvectors: vecs }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eig<T: Real>(m: &HermitianMatrix<T>) -> Result<EigenSystem<T>> {
    if m.dim() == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if !m.0.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let scale = m.frobenius_norm();
    let mut a = m.0.clone();
    let mut v = SquareMatrix::identity(m.dim());
    if scale > T::zero() {
        jacobi_sweeps(&mut a, &mut v, scale);
    }
    Ok(finish(a, v))
}

/// Modified Gram-Schmidt on the columns of `w`.
fn orthonormalize_columns<T: Real>(w: &mut SquareMatrix<T>) {
    let n = w.dim;
    for k in 0..n {
        for i in 0..k {
            let mut dot = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                dot += w.data[j * n + i].conj() * w.data[j * n + k];
            }
            for j in 0..n {
                let wi = w.data[j * n + i];
                w.data[j * n + k] -= wi * dot;
            }
        }
        let norm = (0..n).map(|j| w.data[j * n + k].norm_sqr()).sum::<T>().sqrt();
        for j in 0..n {
            w.data[j * n + k] /= norm;
        }
    }
}

/// Jacobi started from an approximate eigenbasis `guess`; converges in one or
/// two sweeps when `guess` is close, which is the common case inside
/// iterative solvers.
pub(crate) fn hermitian_eig_warm<T: Real>(m: &HermitianMatrix<T>, guess: &SquareMatrix<T>) -> EigenSystem<T> {
    let mut v = guess.clone();
    orthonormalize_columns(&mut v);
    let mut a = v.adjoint().matmul(&m.0).matmul(&v);
    let n = a.dim;
    for j in 0..n {
        a.data[j * n + j].im = T::zero();
        for k in (j + 1)..n {
            let avg = (a.data[j * n + k] + a.data[k * n + j].conj()) * T::lit(0.5);
            a.data[j * n + k] = avg;
            a.data[k * n + j] = avg.conj();
        }
    }
    let scale = m.frobenius_norm();
    if scale > T::zero() {
        jacobi_sweeps(&mut a, &mut v, scale);
    }
    finish(a, v)
}

/// Nearest positive semidefinite matrix in Frobenius norm (negative
/// eigenvalues clipped to zero).
pub fn psd_project<T: Real>(m: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    let eig = hermitian_eig(m)?;
    if eig.eigenvalues[0] >= T::zero() {
        return Ok(m.clone());
    }
    Ok(eig.map_spectrum(|l| l.max(T::zero())))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy<T: Real>(rho: &HermitianMatrix<T>) -> Result<T> {
    let eig = hermitian_eig(rho)?;
    let tol = T::tol(1e-10);
    let trace: T = eig.eigenvalues.iter().copied().sum();
    if (trace - T::one()).abs() > tol {
        return Err(Error::InvalidInput(format!("density matrix has trace {}", trace)));
    }
    if eig.eigenvalues[0] < -tol {
        return Err(Error::NotPositive { min_eigenvalue: eig.eigenvalues[0].as_f64() });
    }
    Ok(eig.eigenvalues.iter().map(|&l| entropy_term(l.max(T::zero()))).sum())
}
