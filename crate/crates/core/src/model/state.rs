use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qlinalg::{fix_gauge, HermitianMatrix};
use crate::scalar::{phasor, Real};

/// Pure probe state `|φ₀⟩ = Σ_k c_k |k⟩`, unit norm, canonical gauge (largest
/// amplitude real and nonnegative).
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeState<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> ProbeState<T> {
    /// Normalizes and gauge-fixes the given amplitudes.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidInput("probe state needs at least one amplitude".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("probe state has non-finite amplitudes".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::min_positive_value().sqrt() {
            return Err(Error::InvalidInput("probe state has zero norm".into()));
        }
        let mut amplitudes: Vec<_> = amplitudes.into_iter().map(|z| z / norm).collect();
        fix_gauge(&mut amplitudes);
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[T]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    /// The flat state `|e⟩ = D^{-1/2} Σ_k |k⟩`.
    pub fn flat(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        let c = T::one() / T::from_usize_lossy(dim).sqrt();
        Self { amplitudes: vec![Complex::new(c, T::zero()); dim] }
    }

    /// `N^{-1/2} Σ_{k<N} |k⟩` embedded in dimension `dim`.
    pub fn flat_on_prefix(dim: usize, support: usize) -> Result<Self> {
        if support == 0 || support > dim {
            return Err(Error::Precondition(format!("support {support} must lie in 1..={dim}")));
        }
        let c = T::one() / T::from_usize_lossy(support).sqrt();
        let amplitudes = (0..dim).map(|k| Complex::new(if k < support { c } else { T::zero() }, T::zero())).collect();
        Ok(Self { amplitudes })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// `U_φ|φ₀⟩`: component `k` picks up `e^{ikφ}`. The gauge is not re-imposed.
    pub fn encode(&self, phase: T) -> Vec<Complex<T>> {
        encode(&self.amplitudes, phase)
    }

    /// `|φ₀⟩⟨φ₀|`.
    pub fn density(&self) -> HermitianMatrix<T> {
        HermitianMatrix::projector(&self.amplitudes, T::one())
    }

    pub fn has_real_amplitudes(&self) -> bool {
        self.amplitudes.iter().all(|z| z.im.abs() <= T::tol(1e-14))
    }
}

/// Applies `U_φ = diag(e^{ikφ})` to an arbitrary vector.
pub fn encode<T: Real>(v: &[Complex<T>], phase: T) -> Vec<Complex<T>> {
    v.iter().enumerate().map(|(k, &c)| c * phasor(phase * T::from_usize_lossy(k))).collect()
}

/// Flat vector `|e⟩` as raw amplitudes.
pub(crate) fn flat_vector<T: Real>(dim: usize) -> Vec<Complex<T>> {
    ProbeState::<T>::flat(dim).amplitudes
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn normalizes_and_fixes_gauge() {
        let s = ProbeState::new(vec![Complex64::new(0.0, 3.0), Complex64::new(0.0, 4.0)]).unwrap();
        let a = s.amplitudes();
        assert!((a[1] - Complex64::new(0.8, 0.0)).norm() < 1e-15);
        assert!((a[0] - Complex64::new(0.6, 0.0)).norm() < 1e-15);
        let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(ProbeState::<f64>::new(vec![]).is_err());
        assert!(ProbeState::<f64>::from_real(&[0.0, 0.0]).is_err());
        assert!(ProbeState::<f64>::from_real(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn encode_identity_and_half_turn() {
        let e = ProbeState::<f64>::flat(2);
        assert_eq!(e.encode(0.0), e.amplitudes().to_vec());
        let out = e.encode(PI);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out[0] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((out[1] - Complex64::new(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn encode_is_a_group_action() {
        let s = ProbeState::new(vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.5), Complex64::new(0.7, 0.0)])
            .unwrap();
        let (a, b) = (0.37, -1.9);
        let twice = encode(&s.encode(a), b);
        let once = s.encode(a + b);
        for (x, y) in twice.iter().zip(&once) {
            assert!((x - y).norm() < 1e-14);
        }
        let norm: f64 = once.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
