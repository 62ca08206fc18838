use num_complex::Complex;

use crate::error::{check_dim, Error, Result};
use crate::model::{
    completeness_operator, residue_weights, CostFunction, PhaseGrid, ProbeState, Seed, SeedMeasurement,
};
use crate::qlinalg::{hermitian_eig, hermitian_eig_warm, HermitianMatrix, SquareMatrix};
use crate::scalar::Real;

const ADAPT_EVERY: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverStatus {
    Converged,
    MaxIters,
    Infeasible,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Objective of the returned (exactly complete) seeds.
    pub objective: f64,
    pub status: SolverStatus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmmSettings {
    /// Bound on both the primal and dual residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_penalty: f64,
}

impl Default for AdmmSettings {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 50_000, initial_penalty: 1.0 }
    }
}

/// Iterates kept between solves so a slightly perturbed problem can be
/// started near its predecessor's solution.
#[derive(Clone, Debug)]
pub struct AdmmState<T> {
    z: Vec<SquareMatrix<T>>,
    u: Vec<SquareMatrix<T>>,
    bases: Vec<SquareMatrix<T>>,
    penalty: T,
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    pub seeds: SeedMeasurement<T>,
    pub report: SolverReport,
    pub warm: AdmmState<T>,
}

/// Seed optimization for a fixed probe: minimize `Σ_s tr(X_s Π_s)` over PSD
/// `Π_s` with `(1/N) Σ_{s,n} U_{nθ} Π_s U_{nθ}† = 1`.
///
/// The group average keeps exactly the entries `(j, k)` with `j ≡ k (mod N)`,
/// so completeness reads `Σ_s (Π_s)_jk = δ_jk` on those entries and leaves
/// every other entry free.
#[derive(Clone, Debug)]
pub struct SdpProblem<T> {
    grid: PhaseGrid,
    dim: usize,
    offsets: Vec<T>,
    objectives: Vec<HermitianMatrix<T>>,
    constrained: Vec<(usize, usize)>,
}

impl<T: Real> SdpProblem<T> {
    /// Offsets `sθ/S` for `s = 0..S`; `X_s,jk = ρ_jk · conj(w_s[j − k])`
    /// where `w_s[r] = (1/N) Σ_n e^{irnθ} C(nθ + γ_s)`.
    pub fn for_state(
        state: &ProbeState<T>,
        grid: PhaseGrid,
        cost: &CostFunction<T>,
        seed_count: usize,
    ) -> Result<Self> {
        if seed_count == 0 {
            return Err(Error::InvalidInput("seed count must be at least 1".into()));
        }
        let theta = grid.spacing::<T>();
        let offsets: Vec<T> =
            (0..seed_count).map(|s| theta * T::from_usize_lossy(s) / T::from_usize_lossy(seed_count)).collect();
        Self::with_offsets(state, grid, cost, offsets)
    }

    pub fn with_offsets(
        state: &ProbeState<T>,
        grid: PhaseGrid,
        cost: &CostFunction<T>,
        offsets: Vec<T>,
    ) -> Result<Self> {
        let dim = state.dim();
        let n = grid.size();
        let c = state.amplitudes();
        let objectives = offsets
            .iter()
            .map(|&g| {
                let w = residue_weights(grid, cost, g);
                HermitianMatrix::from_fn(dim, |j, k| c[j] * c[k].conj() * w[(j + n * dim - k) % n].conj())
            })
            .collect();
        let constrained =
            (0..dim).flat_map(|j| (j..dim).map(move |k| (j, k))).filter(|&(j, k)| grid.same_residue(j, k)).collect();
        Ok(Self { grid, dim, offsets, objectives, constrained })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed_count(&self) -> usize {
        self.offsets.len()
    }

    pub fn offsets(&self) -> &[T] {
        &self.offsets
    }

    pub fn objective_matrices(&self) -> &[HermitianMatrix<T>] {
        &self.objectives
    }

    pub fn objective(&self, elements: &[HermitianMatrix<T>]) -> T {
        self.objectives.iter().zip(elements).map(|(x, p)| x.trace_product(p)).sum()
    }

    /// Objective of an existing measurement with matching offsets.
    pub fn evaluate(&self, seeds: &SeedMeasurement<T>) -> Result<T> {
        check_dim(self.seed_count(), seeds.seed_count())?;
        let elements: Vec<_> = seeds.seeds().iter().map(|s| s.element.clone()).collect();
        Ok(self.objective(&elements))
    }

    /// Projects the stacked variables onto the completeness subspace.
    fn project_affine(&self, y: &mut [SquareMatrix<T>]) {
        let d = self.dim;
        let inv_s = T::one() / T::from_usize_lossy(y.len());
        for &(j, k) in &self.constrained {
            let target = if j == k { T::one() } else { T::zero() };
            let sum: Complex<T> = y.iter().map(|m| m.data[j * d + k]).sum();
            let excess = (sum - Complex::new(target, T::zero())) * inv_s;
            for m in y.iter_mut() {
                m.data[j * d + k] -= excess;
                if j != k {
                    m.data[k * d + j] = m.data[j * d + k].conj();
                } else {
                    m.data[j * d + j].im = T::zero();
                }
            }
        }
    }

    fn cold_start(&self) -> AdmmState<T> {
        let s = self.seed_count();
        let share = T::one() / T::from_usize_lossy(s);
        AdmmState {
            z: vec![SquareMatrix::identity(self.dim).scale(share); s],
            u: vec![SquareMatrix::zeros(self.dim); s],
            bases: vec![SquareMatrix::identity(self.dim); s],
            penalty: T::lit(AdmmSettings::default().initial_penalty),
        }
    }

    /// Two-block ADMM with residual balancing, followed by an exact
    /// completeness repair `Π_s ← M^{-1/2} Z_s M^{-1/2}`. The group-averaged
    /// operator `M` only couples indices in the same residue class, so the
    /// congruence keeps every `Π_s` PSD and makes the average exactly `1`.
    pub fn solve(&self, settings: &AdmmSettings, warm: Option<&AdmmState<T>>) -> Result<SdpSolution<T>> {
        let s_count = self.seed_count();
        let mut st = match warm {
            Some(w) if w.z.len() == s_count && w.z[0].dim() == self.dim => w.clone(),
            _ => {
                let mut c = self.cold_start();
                c.penalty = T::lit(settings.initial_penalty);
                c
            }
        };
        let tol = T::tol(settings.tolerance);
        let two = T::lit(2.0);
        let ten = T::lit(10.0);
        let mut iterations = 0;
        let mut primal = T::infinity();
        let mut dual = T::infinity();
        let mut status = SolverStatus::MaxIters;
        let mut p: Vec<SquareMatrix<T>> = Vec::with_capacity(s_count);
        while iterations < settings.max_iterations {
            iterations += 1;
            let inv_rho = T::one() / st.penalty;
            p.clear();
            for s in 0..s_count {
                p.push(&(&st.z[s] - &st.u[s]) - &self.objectives[s].as_matrix().scale(inv_rho));
            }
            self.project_affine(&mut p);

            let mut r2 = T::zero();
            let mut dz2 = T::zero();
            for ((ps, u), (z, basis)) in p.iter().zip(st.u.iter_mut()).zip(st.z.iter_mut().zip(st.bases.iter_mut())) {
                let v = HermitianMatrix::symmetrize(ps + &*u);
                let eig = hermitian_eig_warm(&v, basis);
                let z_new = eig.map_spectrum(|l| l.max(T::zero())).into_matrix();
                *basis = eig.eigenvectors;
                let diff = ps - &z_new;
                r2 += diff.frobenius_norm().powi(2);
                dz2 += (&z_new - &*z).frobenius_norm().powi(2);
                *u = &*u + &diff;
                *z = z_new;
            }
            primal = r2.sqrt();
            dual = st.penalty * dz2.sqrt();
            if primal <= tol && dual <= tol {
                status = SolverStatus::Converged;
                break;
            }
            if iterations % ADAPT_EVERY != 0 {
                continue;
            }
            if primal > ten * dual {
                st.penalty *= two;
                st.u.iter_mut().for_each(|u| *u = u.scale(T::one() / two));
            } else if dual > ten * primal {
                st.penalty /= two;
                st.u.iter_mut().for_each(|u| *u = u.scale(two));
            }
        }
        if status == SolverStatus::MaxIters {
            log::warn!(
                "seed SDP stopped after {iterations} iterations (primal {:.2e}, dual {:.2e})",
                primal.as_f64(),
                dual.as_f64()
            );
        }

        let zs: Vec<HermitianMatrix<T>> = st.z.iter().map(|z| HermitianMatrix::symmetrize(z.clone())).collect();
        let m = completeness_operator(self.grid, zs.iter());
        let eig = hermitian_eig(&m)?;
        let min = eig.eigenvalues[0];
        if min.is_nan() || min <= T::tol(1e-12) {
            return Err(Error::NotPositive { min_eigenvalue: min.as_f64() });
        }
        let w = eig.map_spectrum(|l| T::one() / l.sqrt());
        let elements: Vec<HermitianMatrix<T>> = zs.iter().map(|z| z.congruence(w.as_matrix())).collect();
        let objective = self.objective(&elements);
        let seeds = SeedMeasurement::new(
            self.grid,
            self.offsets.iter().zip(elements).map(|(&offset, element)| Seed { offset, element }).collect(),
        )?;
        let report = SolverReport {
            iterations,
            primal_residual: primal.as_f64(),
            dual_residual: dual.as_f64(),
            objective: objective.as_f64(),
            status,
        };
        Ok(SdpSolution { seeds, report, warm: st })
    }
}

/// Optimal seeds at offsets `sθ/S` for a fixed probe.
pub fn optimal_seeds_for_state<T: Real>(
    state: &ProbeState<T>,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
    seed_count: usize,
) -> Result<(SeedMeasurement<T>, SolverReport)> {
    let sol = SdpProblem::for_state(state, grid, cost, seed_count)?.solve(&AdmmSettings::default(), None)?;
    Ok((sol.seeds, sol.report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{continuous_min_cost, flat_seed, optimal_continuous_state};
    use crate::model::{covariant_cost, subcovariant_cost};
    use std::f64::consts::PI;

    #[test]
    fn recovers_continuous_optimum_at_d_plus_one() {
        for d in [2usize, 4, 10] {
            let grid = PhaseGrid::new(d + 1).unwrap();
            let state = optimal_continuous_state::<f64>(d);
            let (seeds, report) = optimal_seeds_for_state(&state, grid, &CostFunction::standard(), 1).unwrap();
            assert_eq!(report.status, SolverStatus::Converged, "{report:?}");
            assert!(seeds.completeness_residual() < 1e-12);
            assert!(seeds.min_eigenvalue() > -1e-9);
            let c = subcovariant_cost(&state, &seeds, &CostFunction::standard()).unwrap();
            assert!((c - continuous_min_cost::<f64>(d)).abs() < 1e-6, "d={d} {c}");
            assert!((c - report.objective).abs() < 1e-12);
        }
    }

    #[test]
    fn never_worse_than_flat_seed() {
        let d = 6;
        let cost = CostFunction::step(PI / 5.0).unwrap();
        let state = ProbeState::from_real(&[0.1, 0.3, 0.6, 0.6, 0.3, 0.1]).unwrap();
        for n in [4usize, 6, 9, 14] {
            let grid = PhaseGrid::new(n).unwrap();
            let (seeds, report) = optimal_seeds_for_state(&state, grid, &cost, 2).unwrap();
            assert!(seeds.completeness_residual() < 1e-12);
            if n >= d {
                let reference: f64 = covariant_cost(&state, &flat_seed(d), grid, &cost).unwrap();
                assert!(report.objective <= reference + 1e-6, "n={n} {} vs {reference}", report.objective);
            }
        }
    }

    #[test]
    fn warm_start_reaches_same_objective_faster() {
        let grid = PhaseGrid::new(8).unwrap();
        let cost = CostFunction::step(1.0).unwrap();
        let a = ProbeState::from_real(&[0.2, 0.5, 0.6, 0.5, 0.2]).unwrap();
        let b = ProbeState::from_real(&[0.21, 0.5, 0.6, 0.49, 0.2]).unwrap();
        let settings = AdmmSettings::default();
        let first = SdpProblem::for_state(&a, grid, &cost, 1).unwrap().solve(&settings, None).unwrap();
        let problem = SdpProblem::for_state(&b, grid, &cost, 1).unwrap();
        let cold = problem.solve(&settings, None).unwrap();
        let warm = problem.solve(&settings, Some(&first.warm)).unwrap();
        assert!((cold.report.objective - warm.report.objective).abs() < 1e-6);
        assert!(warm.report.iterations <= cold.report.iterations);
    }

    #[test]
    fn zero_seed_count_is_rejected() {
        let grid = PhaseGrid::new(3).unwrap();
        let state = ProbeState::<f64>::flat(2);
        assert!(SdpProblem::for_state(&state, grid, &CostFunction::standard(), 0).is_err());
    }
}
