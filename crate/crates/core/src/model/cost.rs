use crate::error::{Error, Result};
use crate::scalar::{wrap_phase, Real};

const NONNEGATIVITY_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub enum CostKind<T> {
    /// `4 sin²(φ/2)`.
    Standard,
    /// `0` for `|φ| < width/2`, `1` otherwise.
    Step { width: T },
    /// `Σ_m α_m cos(mφ)`.
    Fourier { alphas: Vec<T> },
}

/// Even, `2π`-periodic cost of an estimation error, with `C(0) = 0` and
/// `C ≥ 0`. Phase differences are wrapped to `(-π, π]` before evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct CostFunction<T> {
    kind: CostKind<T>,
}

impl<T: Real> CostFunction<T> {
    pub fn standard() -> Self {
        Self { kind: CostKind::Standard }
    }

    pub fn step(width: T) -> Result<Self> {
        if !width.is_finite() || width <= T::zero() || width > T::TAU() * (T::one() + T::epsilon() * T::lit(4.0)) {
            return Err(Error::InvalidInput(format!("step width {width} must lie in (0, 2π]")));
        }
        Ok(Self { kind: CostKind::Step { width: width.min(T::TAU()) } })
    }

    /// Cosine series. `α₀` is reset to `-Σ_{m≥1} α_m` so that `C(0) = 0`
    /// holds to rounding; inputs whose sum is visibly nonzero are rejected,
    /// as are series that go negative.
    pub fn fourier(alphas: Vec<T>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidInput("Fourier cost needs at least α₀".into()));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("Fourier coefficients must be finite".into()));
        }
        let sum: T = alphas.iter().copied().sum();
        let scale: T = alphas.iter().map(|a| a.abs()).sum::<T>().max(T::one());
        if sum.abs() > T::tol(1e-6) * scale {
            return Err(Error::InvalidInput(format!("Fourier coefficients sum to {sum}, so C(0) ≠ 0")));
        }
        let mut alphas = alphas;
        let tail: T = alphas[1..].iter().copied().sum();
        alphas[0] = -tail;
        let cost = Self { kind: CostKind::Fourier { alphas } };
        let min = (0..NONNEGATIVITY_SAMPLES)
            .map(|i| cost.value(T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(NONNEGATIVITY_SAMPLES)))
            .fold(T::infinity(), T::min);
        if min < -T::tol(1e-9) {
            return Err(Error::InvalidInput(format!("Fourier cost takes negative values (min {min})")));
        }
        Ok(cost)
    }

    /// The cost that is identically zero.
    pub fn zero() -> Self {
        Self { kind: CostKind::Fourier { alphas: vec![T::zero()] } }
    }

    pub fn kind(&self) -> &CostKind<T> {
        &self.kind
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            CostKind::Standard => "standard",
            CostKind::Step { .. } => "step",
            CostKind::Fourier { .. } => "fourier",
        }
    }

    pub fn value(&self, phase: T) -> T {
        let phi = wrap_phase(phase);
        match &self.kind {
            CostKind::Standard => {
                let s = (phi * T::lit(0.5)).sin();
                T::lit(4.0) * s * s
            }
            CostKind::Step { width } => {
                // The boundary |φ| = width/2 costs 1; values within rounding of it count as boundary.
                if phi.abs() < *width * T::lit(0.5) - T::tol(1e-12) {
                    T::zero()
                } else {
                    T::one()
                }
            }
            CostKind::Fourier { alphas } => {
                alphas.iter().enumerate().map(|(m, &a)| a * (T::from_usize_lossy(m) * phi).cos()).sum()
            }
        }
    }

    /// Coefficient `a_m` of the cosine series `C(φ) = Σ_m a_m cos(mφ)`.
    pub fn cosine_coefficient(&self, m: usize) -> T {
        match &self.kind {
            CostKind::Standard => match m {
                0 => T::lit(2.0),
                1 => T::lit(-2.0),
                _ => T::zero(),
            },
            CostKind::Step { width } => {
                if m == 0 {
                    T::one() - *width / T::TAU()
                } else {
                    let mm = T::from_usize_lossy(m);
                    -T::lit(2.0) * (mm * *width * T::lit(0.5)).sin() / (T::PI() * mm)
                }
            }
            CostKind::Fourier { alphas } => alphas.get(m).copied().unwrap_or_else(T::zero),
        }
    }

    /// Highest harmonic present, `None` for the (infinite) step series.
    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            CostKind::Standard => Some(1),
            CostKind::Step { .. } => None,
            CostKind::Fourier { alphas } => Some(alphas.iter().rposition(|a| *a != T::zero()).unwrap_or(0)),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        matches!(&self.kind, CostKind::Fourier { alphas } if alphas.iter().all(|a| *a == T::zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c1() -> CostFunction<f64> {
        CostFunction::fourier(vec![15.0 / 6.0, -8.0 / 3.0, 1.0 / 6.0]).unwrap()
    }

    #[test]
    fn standard_values() {
        let c = CostFunction::<f64>::standard();
        assert!((c.value(PI) - 4.0).abs() < 1e-15);
        assert_eq!(c.value(0.0), 0.0);
        assert!((c.value(0.3) - c.value(-0.3)).abs() < 1e-15);
        assert!((c.value(0.3) - c.value(0.3 + 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn step_values_and_boundary() {
        let c = CostFunction::step(PI / 10.0).unwrap();
        assert_eq!(c.value(PI / 30.0), 0.0);
        assert_eq!(c.value(PI), 1.0);
        assert_eq!(c.value(0.0), 0.0);
        assert_eq!(c.value(PI / 20.0), 1.0);
        assert_eq!(c.value(-PI / 20.0), 1.0);
        assert_eq!(c.value(2.0 * PI - PI / 30.0), 0.0);
    }

    #[test]
    fn step_width_validation() {
        assert!(CostFunction::step(0.0f64).is_err());
        assert!(CostFunction::step(-1.0f64).is_err());
        assert!(CostFunction::step(7.0f64).is_err());
        assert!(CostFunction::step(f64::NAN).is_err());
        assert!(CostFunction::step(2.0 * PI).is_ok());
    }

    #[test]
    fn fourier_values() {
        assert!(c1().value(0.0).abs() < 1e-12);
        let c2 = CostFunction::fourier(vec![1.25f64, -1.0, -0.25]).unwrap();
        assert!(c2.value(0.0).abs() < 1e-12);
        assert!((c2.value(PI) - 2.0).abs() < 1e-12);
        assert_eq!(c1().order(), Some(2));
    }

    #[test]
    fn fourier_validation() {
        assert!(CostFunction::<f64>::fourier(vec![]).is_err());
        assert!(CostFunction::fourier(vec![1.0, 0.0]).is_err(), "C(0) = 1");
        assert!(CostFunction::fourier(vec![-1.0, 1.0]).is_err(), "C(π) = -2");
        // rounded decimals within tolerance are accepted and re-centred
        let c = CostFunction::fourier(vec![2.5f64, -2.6667, 0.1667]).unwrap();
        assert!(c.value(0.0).abs() < 1e-15);
    }

    #[test]
    fn even_and_nonnegative_on_dense_grid() {
        let costs = vec![CostFunction::standard(), CostFunction::step(0.7).unwrap(), c1()];
        for c in costs {
            for i in 0..2000 {
                let phi = -PI + 2.0 * PI * i as f64 / 2000.0 + 1e-4;
                assert!(c.value(phi) >= -1e-12);
                assert!((c.value(phi) - c.value(-phi)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cosine_series_matches_values() {
        let std = CostFunction::<f64>::standard();
        for phi in [0.1, 1.0, 2.5] {
            let s: f64 = (0..3).map(|m| std.cosine_coefficient(m) * (m as f64 * phi).cos()).sum();
            assert!((s - std.value(phi)).abs() < 1e-14);
        }
        // partial sums of the step series converge away from the jump
        let step = CostFunction::step(1.0f64).unwrap();
        let s: f64 = (0..20_000).map(|m| step.cosine_coefficient(m) * (m as f64 * 2.0).cos()).sum();
        assert!((s - 1.0).abs() < 1e-3);
    }

    #[test]
    fn zero_cost() {
        let z = CostFunction::<f64>::zero();
        assert!(z.is_identically_zero());
        assert_eq!(z.value(1.3), 0.0);
    }
}
