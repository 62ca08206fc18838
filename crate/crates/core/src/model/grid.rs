use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{phasor, Real};

/// The `N` allowed phases `φ_n = 2πn/N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhaseGrid {
    size: usize,
}

impl PhaseGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidInput("phase grid needs at least one phase".into()));
        }
        Ok(Self { size })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    /// Spacing `θ = 2π/N`.
    #[inline]
    pub fn spacing<T: Real>(&self) -> T {
        T::TAU() / T::from_usize_lossy(self.size)
    }

    #[inline]
    pub fn phase<T: Real>(&self, n: usize) -> T {
        self.spacing::<T>() * T::from_usize_lossy(n)
    }

    pub fn phases<T: Real>(&self) -> Vec<T> {
        (0..self.size).map(|n| self.phase(n)).collect()
    }

    /// `Σ_n e^{i r n θ}`: `N` when `N | r`, zero otherwise.
    pub fn dft_sum<T: Real>(&self, r: i64) -> Complex<T> {
        let theta = self.spacing::<T>();
        (0..self.size).fold(Complex::new(T::zero(), T::zero()), |acc, n| {
            acc + phasor(theta * T::lit(r as f64) * T::from_usize_lossy(n))
        })
    }

    /// Whether `j ≡ k (mod N)`; exactly the index pairs coupled by the
    /// `U_N` group average.
    #[inline]
    pub fn same_residue(&self, j: usize, k: usize) -> bool {
        j.abs_diff(k).is_multiple_of(self.size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_are_evenly_spaced_from_zero() {
        let g = PhaseGrid::new(7).unwrap();
        let p: Vec<f64> = g.phases();
        assert_eq!(p[0], 0.0);
        assert!(p.iter().all(|&x| (0.0..std::f64::consts::TAU).contains(&x)));
        for w in p.windows(2) {
            assert!((w[1] - w[0] - g.spacing::<f64>()).abs() < 1e-15);
        }
        assert!(PhaseGrid::new(0).is_err());
    }

    #[test]
    fn dft_property() {
        for n in [1usize, 2, 5, 12, 31] {
            let g = PhaseGrid::new(n).unwrap();
            for r in -(3 * n as i64)..=(3 * n as i64) {
                let s = g.dft_sum::<f64>(r);
                if r.rem_euclid(n as i64) == 0 {
                    assert!((s.re - n as f64).abs() < 1e-9 * n as f64 && s.im.abs() < 1e-9 * n as f64);
                } else {
                    assert!(s.norm() <= 1e-9 * n as f64, "N={n} r={r} |sum|={}", s.norm());
                }
            }
        }
    }
}
