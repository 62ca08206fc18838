//! Analytic reference strategies and costs.

use num_complex::Complex;

use crate::error::{check_dim, Error, Result};
use crate::model::{flat_vector, CostFunction, ExplicitMeasurement, Outcome, PhaseGrid, ProbeState};
use crate::qlinalg::{hermitian_eig, HermitianMatrix};
use crate::scalar::Real;

const SUPPORT_CUTOFF: f64 = 1e-12;

/// `c_k = √(2/(D+1)) sin((k+1)π/(D+1))`, optimal for the standard cost when
/// the phase is continuous.
pub fn optimal_continuous_state<T: Real>(dim: usize) -> ProbeState<T> {
    assert!(dim >= 1, "dimension must be positive");
    let d1 = T::from_usize_lossy(dim + 1);
    let pref = (T::lit(2.0) / d1).sqrt();
    let amps: Vec<T> = (0..dim).map(|k| pref * (T::from_usize_lossy(k + 1) * T::PI() / d1).sin()).collect();
    ProbeState::from_real(&amps).expect("closed-form state is nonzero")
}

/// `2[1 − cos(π/(D+1))]`.
pub fn continuous_min_cost<T: Real>(dim: usize) -> T {
    T::lit(2.0) * (T::one() - (T::PI() / T::from_usize_lossy(dim + 1)).cos())
}

/// For `N ≤ D`: the flat state on the first `N` levels, whose encoded copies
/// are mutually orthogonal, and the covariant seed `N|e_N⟩⟨e_N| ⊕ 1` that
/// identifies them exactly. The cost is zero for every cost function.
pub fn perfect_discrimination_strategy<T: Real>(
    dim: usize,
    grid: PhaseGrid,
) -> Result<(ProbeState<T>, HermitianMatrix<T>)> {
    let n = grid.size();
    if n > dim {
        return Err(Error::Precondition(format!("perfect discrimination needs N ≤ D, got N = {n}, D = {dim}")));
    }
    let state = ProbeState::flat_on_prefix(dim, n)?;
    let seed = HermitianMatrix::from_fn(dim, |j, k| {
        let v = if (j < n && k < n) || j == k { T::one() } else { T::zero() };
        Complex::new(v, T::zero())
    });
    Ok((state, seed))
}

/// Square-root measurement `Π_n = (1/N) ρ^{-1/2}|ψ_n⟩⟨ψ_n|ρ^{-1/2}` with
/// `ρ = (1/N) Σ|ψ_n⟩⟨ψ_n|` and estimate `2πn/N` for outcome `n`.
///
/// The inverse root is taken on the support of `ρ` (eigenvalues below
/// `1e-12` dropped); the projector onto the kernel, if any, is appended as
/// an extra outcome with estimate `0` so the POVM is complete.
pub fn square_root_measurement<T: Real>(states: &[Vec<Complex<T>>]) -> Result<ExplicitMeasurement<T>> {
    let Some(first) = states.first() else {
        return Err(Error::InvalidInput("need at least one state".into()));
    };
    let dim = first.len();
    let count = T::from_usize_lossy(states.len());
    for s in states {
        check_dim(dim, s.len())?;
        let norm: T = s.iter().map(|z| z.norm_sqr()).sum();
        if (norm - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::InvalidInput(format!("state has squared norm {norm}, expected 1")));
        }
    }
    let rho = states
        .iter()
        .fold(HermitianMatrix::zeros(dim), |acc, s| acc.add(&HermitianMatrix::projector(s, T::one() / count)));
    let eig = hermitian_eig(&rho)?;
    let cutoff = T::tol(SUPPORT_CUTOFF);
    let inv_sqrt = eig.map_spectrum(|x| if x > cutoff { T::one() / x.sqrt() } else { T::zero() });
    let kernel = eig.map_spectrum(|x| if x > cutoff { T::zero() } else { T::one() });
    let grid = PhaseGrid::new(states.len())?;
    let mut outcomes: Vec<Outcome<T>> = states
        .iter()
        .enumerate()
        .map(|(n, s)| Outcome {
            element: HermitianMatrix::projector(&inv_sqrt.as_matrix().mul_vec(s), T::one() / count),
            estimate: grid.phase(n),
        })
        .collect();
    if kernel.trace() > T::lit(0.5) {
        outcomes.push(Outcome { element: kernel, estimate: T::zero() });
    }
    ExplicitMeasurement::new(outcomes)
}

/// Encoded copies `U_{φ_n}|φ₀⟩` of a probe on the grid.
pub fn encoded_family<T: Real>(state: &ProbeState<T>, grid: PhaseGrid) -> Vec<Vec<Complex<T>>> {
    grid.phases::<T>().into_iter().map(|p| state.encode(p)).collect()
}

/// Best step cost in the narrow-window limit: `0` for `N ≤ D`, else `1 − D/N`.
pub fn discrimination_cost_floor<T: Real>(dim: usize, n: usize) -> T {
    if n <= dim {
        T::zero()
    } else {
        T::one() - T::from_usize_lossy(dim) / T::from_usize_lossy(n)
    }
}

/// Continuous-limit matrix `B` of the flat-seed covariant strategy:
/// `⟨φ₀|B|φ₀⟩ = (1/2π) ∫ |⟨e|U_φ|φ₀⟩|² D C(φ) dφ`. With `C = Σ a_m cos(mφ)`
/// the entries are `a_0` on the diagonal and `a_{|j−k|}/2` off it.
pub fn continuous_cost_matrix<T: Real>(dim: usize, cost: &CostFunction<T>) -> HermitianMatrix<T> {
    let half = T::lit(0.5);
    let coeffs: Vec<T> = (0..dim).map(|m| cost.cosine_coefficient(m)).collect();
    HermitianMatrix::from_fn(dim, |j, k| {
        let v = if j == k { coeffs[0] } else { coeffs[j.abs_diff(k)] * half };
        Complex::new(v, T::zero())
    })
}

/// Smallest eigenvalue of [`continuous_cost_matrix`] and its eigenvector.
pub fn continuous_limit_cost<T: Real>(dim: usize, cost: &CostFunction<T>) -> Result<(T, ProbeState<T>)> {
    let (value, vector) = hermitian_eig(&continuous_cost_matrix(dim, cost))?.min_pair();
    Ok((value, ProbeState::new(vector)?))
}

/// The step-cost matrix `B` with `B_jj = 1 − σ/2π` and
/// `B_jk = −sin(σ(j−k)/2) / (π(j−k))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DpssMatrix<T> {
    width: T,
    matrix: HermitianMatrix<T>,
}

impl<T: Real> DpssMatrix<T> {
    pub fn width(&self) -> T {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    /// Real entry `B_jk`.
    pub fn entry(&self, j: usize, k: usize) -> T {
        self.matrix.get(j, k).re
    }
}

pub fn dpss_matrix<T: Real>(dim: usize, width: T) -> Result<DpssMatrix<T>> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let cost = CostFunction::step(width)?;
    let width = match cost.kind() {
        crate::model::CostKind::Step { width } => *width,
        _ => unreachable!(),
    };
    let matrix = HermitianMatrix::from_fn(dim, |j, k| {
        let v = if j == k {
            T::one() - width / T::TAU()
        } else {
            let r = T::lit(j as f64 - k as f64);
            -(width * r * T::lit(0.5)).sin() / (T::PI() * r)
        };
        Complex::new(v, T::zero())
    });
    Ok(DpssMatrix { width, matrix })
}

/// Minimal eigenpair of the step-cost matrix: the continuous-limit cost and
/// its optimal state (real, signed so that `Σ c_k > 0`).
pub fn continuous_step_cost<T: Real>(dim: usize, width: T) -> Result<(T, ProbeState<T>)> {
    let b = dpss_matrix(dim, width)?;
    let (value, mut vector) = hermitian_eig(b.matrix())?.min_pair();
    let sum: Complex<T> = vector.iter().copied().sum();
    if sum.re < T::zero() {
        vector.iter_mut().for_each(|z| *z = -*z);
    }
    Ok((value, ProbeState::from_real(&vector.iter().map(|z| z.re).collect::<Vec<_>>())?))
}

/// Flat seed `D|e⟩⟨e|`.
pub fn flat_seed<T: Real>(dim: usize) -> HermitianMatrix<T> {
    HermitianMatrix::projector(&flat_vector(dim), T::from_usize_lossy(dim))
}

/// Seed of the reference covariant strategy: the flat seed `D|e⟩⟨e|` when
/// it is complete (`N ≥ D`), otherwise the perfect-discrimination seed.
/// Both coincide at `N = D`.
pub fn reference_seed<T: Real>(dim: usize, grid: PhaseGrid) -> HermitianMatrix<T> {
    if grid.size() >= dim {
        flat_seed(dim)
    } else {
        perfect_discrimination_strategy(dim, grid).expect("N < D checked").1
    }
}

/// `U_ξ (D|e⟩⟨e|) U_ξ†`.
pub fn shifted_flat_seed<T: Real>(dim: usize, shift: T) -> HermitianMatrix<T> {
    flat_seed(dim).phase_conjugate(shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{average_cost_explicit, covariant_cost, SeedMeasurement};
    use std::f64::consts::PI;

    #[test]
    fn continuous_state_small_cases() {
        let s1 = optimal_continuous_state::<f64>(1);
        assert!((s1.amplitudes()[0].re - 1.0).abs() < 1e-15);
        let s2 = optimal_continuous_state::<f64>(2);
        for a in s2.amplitudes() {
            assert!((a.re - 0.5f64.sqrt()).abs() < 1e-15);
        }
        let s10 = optimal_continuous_state::<f64>(10);
        let a = s10.amplitudes();
        for k in 0..10 {
            assert!((a[k] - a[9 - k]).norm() < 1e-12);
        }
        assert!((continuous_min_cost::<f64>(1) - 2.0).abs() < 1e-15);
        assert!((continuous_min_cost::<f64>(10) - 0.081014052771005).abs() < 1e-12);
    }

    #[test]
    fn continuous_cost_is_reached_at_d_plus_one() {
        for d in 2..12 {
            let grid = PhaseGrid::new(d + 1).unwrap();
            let c: f64 =
                covariant_cost(&optimal_continuous_state(d), &flat_seed(d), grid, &CostFunction::standard()).unwrap();
            assert!((c - continuous_min_cost::<f64>(d)).abs() < 1e-12);
            let (b, _) = continuous_limit_cost(d, &CostFunction::<f64>::standard()).unwrap();
            assert!((b - continuous_min_cost::<f64>(d)).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_discrimination_is_free() {
        let costs = [
            CostFunction::standard(),
            CostFunction::step(PI / 10.0).unwrap(),
            CostFunction::fourier(vec![2.5, -8.0 / 3.0, 1.0 / 6.0]).unwrap(),
        ];
        for (d, n) in [(4, 4), (10, 7), (10, 1), (3, 2)] {
            let grid = PhaseGrid::new(n).unwrap();
            let (state, seed) = perfect_discrimination_strategy::<f64>(d, grid).unwrap();
            for cost in &costs {
                assert!(covariant_cost(&state, &seed, grid, cost).unwrap().abs() < 1e-12);
            }
        }
        assert!(perfect_discrimination_strategy::<f64>(3, PhaseGrid::new(4).unwrap()).is_err());
    }

    #[test]
    fn srm_of_orthonormal_states_is_projective() {
        let basis: Vec<Vec<Complex<f64>>> =
            (0..3).map(|i| (0..3).map(|j| Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
        let m = square_root_measurement(&basis).unwrap();
        assert_eq!(m.len(), 3);
        for (i, o) in m.outcomes().iter().enumerate() {
            assert!(o.element.sub(&HermitianMatrix::projector(&basis[i], 1.0)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn srm_of_encoded_states_is_covariant() {
        let state = ProbeState::from_real(&[0.3, 0.6, 0.5, 0.4, 0.2]).unwrap();
        for n in [5usize, 6, 11] {
            let grid = PhaseGrid::new(n).unwrap();
            let srm = square_root_measurement::<f64>(&encoded_family(&state, grid)).unwrap();
            let cov = SeedMeasurement::covariant(grid, flat_seed(5)).unwrap().expand();
            assert_eq!(srm.len(), cov.len());
            for (a, b) in srm.outcomes().iter().zip(cov.outcomes()) {
                assert!(a.element.sub(&b.element).frobenius_norm() < 1e-10);
                assert!((a.estimate - b.estimate).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn srm_on_rank_deficient_family_completes_with_kernel() {
        let state = ProbeState::<f64>::flat_on_prefix(4, 2).unwrap();
        let srm = square_root_measurement(&encoded_family(&state, PhaseGrid::new(2).unwrap())).unwrap();
        assert_eq!(srm.len(), 3);
        let cost = CostFunction::step(0.1).unwrap();
        assert!(average_cost_explicit(&state, &srm, PhaseGrid::new(2).unwrap(), &cost).unwrap().abs() < 1e-12);
    }

    #[test]
    fn floor_formula() {
        assert_eq!(discrimination_cost_floor::<f64>(10, 20), 0.5);
        assert_eq!(discrimination_cost_floor::<f64>(10, 10), 0.0);
        assert!((discrimination_cost_floor::<f64>(10, 11) - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn dpss_edge_cases() {
        let (c, _) = continuous_step_cost::<f64>(6, 2.0 * PI).unwrap();
        assert!(c.abs() < 1e-12);
        assert!(dpss_matrix::<f64>(6, 2.0 * PI).unwrap().matrix().frobenius_norm() < 1e-12);
        for sigma in [0.1, 1.0, 3.0] {
            let (c, _) = continuous_step_cost::<f64>(1, sigma).unwrap();
            assert!((c - (1.0 - sigma / (2.0 * PI))).abs() < 1e-14);
        }
        assert!(dpss_matrix::<f64>(3, 0.0).is_err());
    }

    #[test]
    fn dpss_state_is_positive_palindrome() {
        let (c, state) = continuous_step_cost::<f64>(10, PI / 10.0).unwrap();
        let a = state.amplitudes();
        assert!(a.iter().all(|z| z.re > 0.0 && z.im == 0.0));
        for k in 0..10 {
            assert!((a[k] - a[9 - k]).norm() < 1e-8);
        }
        let b = continuous_cost_matrix(10, &CostFunction::step(PI / 10.0).unwrap());
        let d = dpss_matrix(10, PI / 10.0).unwrap();
        assert!(b.sub(d.matrix()).frobenius_norm() < 1e-14);
        let (via_b, _) = continuous_limit_cost(10, &CostFunction::step(PI / 10.0).unwrap()).unwrap();
        assert!((via_b - c).abs() < 1e-14);
    }

    #[test]
    fn dpss_cost_is_monotone() {
        let mut last = f64::INFINITY;
        for d in 1..12 {
            let (c, _) = continuous_step_cost::<f64>(d, 0.5).unwrap();
            assert!(c <= last + 1e-12);
            last = c;
        }
        let mut last = f64::INFINITY;
        for i in 1..30 {
            let (c, _) = continuous_step_cost::<f64>(6, i as f64 * 0.2).unwrap();
            assert!(c <= last + 1e-12);
            last = c;
        }
    }
}
