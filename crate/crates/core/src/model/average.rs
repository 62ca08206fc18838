use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Result};
use crate::qlinalg::{hermitian_eig, HermitianMatrix, SquareMatrix};
use crate::scalar::{phasor, wrap_phase, Real};

use super::cost::CostFunction;
use super::grid::PhaseGrid;
use super::measurement::{ExplicitMeasurement, Outcome, SeedMeasurement};
use super::state::ProbeState;

/// `(1/N) Σ_n Σ_m ⟨φ_n|Π_m|φ_n⟩ C(φ_n − φ̃_m)`.
pub fn average_cost_explicit<T: Real>(
    state: &ProbeState<T>,
    meas: &ExplicitMeasurement<T>,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
) -> Result<T> {
    check_dim(state.dim(), meas.dim())?;
    let mut total = T::zero();
    for n in 0..grid.size() {
        let phi = grid.phase::<T>(n);
        let encoded = state.encode(phi);
        for o in meas.outcomes() {
            let c = cost.value(phi - o.estimate);
            if c != T::zero() {
                total += o.element.expectation(&encoded) * c;
            }
        }
    }
    Ok(total / T::from_usize_lossy(grid.size()))
}

/// Outcome weight `σ(φ) = ⟨φ|Π₀|φ⟩ / N` of a covariant seed.
pub fn weight_fn<T: Real>(state: &ProbeState<T>, seed: &HermitianMatrix<T>, grid: PhaseGrid, phase: T) -> T {
    seed.expectation(&state.encode(phase)) / T::from_usize_lossy(grid.size())
}

/// Cost of the covariant measurement seeded by `Π₀`:
/// `(1/N) Σ_n ⟨φ_n|Π₀|φ_n⟩ C(φ_n)`.
pub fn covariant_cost<T: Real>(
    state: &ProbeState<T>,
    seed: &HermitianMatrix<T>,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
) -> Result<T> {
    check_dim(state.dim(), seed.dim())?;
    SeedMeasurement::covariant(grid, seed.clone())?;
    Ok(grid.phases::<T>().into_iter().map(|phi| weight_fn(state, seed, grid, phi) * cost.value(phi)).sum())
}

/// Cost of the shifted-covariant measurement with seed `U_ξ Π₀ U_ξ†` and
/// estimates `nθ + ξ`: `Σ_n σ(φ_n − ξ) C(φ_n − ξ)`. For weights symmetric
/// about zero this equals the `+ξ` form.
pub fn shifted_cost<T: Real>(
    state: &ProbeState<T>,
    seed: &HermitianMatrix<T>,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
    shift: T,
) -> Result<T> {
    check_dim(state.dim(), seed.dim())?;
    SeedMeasurement::covariant(grid, seed.clone())?;
    Ok(grid
        .phases::<T>()
        .into_iter()
        .map(|phi| weight_fn(state, seed, grid, phi - shift) * cost.value(phi - shift))
        .sum())
}

/// `A = (1/N) Σ_s Σ_n U_{nθ} Π_s U_{nθ}† C(nθ + γ_s)`, so that the
/// sub-covariant cost of `|φ₀⟩` is `⟨φ₀|A|φ₀⟩`.
///
/// Entry `(j, k)` of the `s` term only depends on `(j − k) mod N`, which is
/// what the per-seed table below exploits.
pub fn subcovariant_matrix<T: Real>(seeds: &SeedMeasurement<T>, cost: &CostFunction<T>) -> HermitianMatrix<T> {
    let grid = seeds.grid();
    let n = grid.size();
    let dim = seeds.dim();
    let mut acc = SquareMatrix::zeros(dim);
    for seed in seeds.seeds() {
        let table = residue_weights(grid, cost, seed.offset);
        for j in 0..dim {
            for k in 0..dim {
                let r = (j + n * dim - k) % n;
                acc[(j, k)] += seed.element.get(j, k) * table[r];
            }
        }
    }
    HermitianMatrix::symmetrize(acc)
}

/// `w[r] = (1/N) Σ_n e^{i r nθ} C(nθ + γ)` for `r = 0..N`.
pub(crate) fn residue_weights<T: Real>(grid: PhaseGrid, cost: &CostFunction<T>, offset: T) -> Vec<Complex<T>> {
    let n = grid.size();
    let inv_n = T::one() / T::from_usize_lossy(n);
    let values: Vec<T> = (0..n).map(|i| cost.value(grid.phase::<T>(i) + offset)).collect();
    (0..n)
        .map(|r| {
            let mut s = Complex::new(T::zero(), T::zero());
            for (i, &c) in values.iter().enumerate() {
                if c != T::zero() {
                    s += phasor(grid.phase::<T>((r * i) % n)) * c;
                }
            }
            s * inv_n
        })
        .collect()
}

/// Average cost of a sub-covariant measurement, `⟨φ₀|A|φ₀⟩`.
pub fn subcovariant_cost<T: Real>(
    state: &ProbeState<T>,
    seeds: &SeedMeasurement<T>,
    cost: &CostFunction<T>,
) -> Result<T> {
    check_dim(state.dim(), seeds.dim())?;
    Ok(subcovariant_matrix(seeds, cost).expectation(state.amplitudes()))
}

/// Group average over `U_N`: every outcome `(Π_m, φ̃_m)` becomes the `N`
/// outcomes `((1/N) U_{nθ} Π_m U_{nθ}†, φ̃_m + nθ)`. The result is complete,
/// covariant under the grid, and has the same average cost as the input for
/// every phase-difference cost.
pub fn symmetrize_measurement<T: Real>(meas: &ExplicitMeasurement<T>, grid: PhaseGrid) -> ExplicitMeasurement<T> {
    let inv_n = T::one() / T::from_usize_lossy(grid.size());
    let mut outcomes = Vec::with_capacity(meas.len() * grid.size());
    for n in 0..grid.size() {
        let shift = grid.phase::<T>(n);
        for o in meas.outcomes() {
            outcomes
                .push(Outcome { element: o.element.phase_conjugate(shift).scale(inv_n), estimate: o.estimate + shift });
        }
    }
    ExplicitMeasurement::new(outcomes).expect("group average of a complete POVM is complete")
}

/// Largest mismatch in the covariance identity: for every outcome `i` and
/// grid phase `φ_n` some outcome `j` must satisfy `U_{φ_n} Π_i U_{φ_n}† = Π_j`
/// with `φ̃_j = φ̃_i + φ_n (mod 2π)`. Returns the worst Frobenius distance to
/// the best matching `j` (infinite when no estimate matches).
pub fn subcovariance_residual<T: Real>(meas: &ExplicitMeasurement<T>, grid: PhaseGrid) -> T {
    let est_tol = T::tol(1e-9);
    let mut worst = T::zero();
    for o in meas.outcomes() {
        for n in 0..grid.size() {
            let shift = grid.phase::<T>(n);
            let moved = o.element.phase_conjugate(shift);
            let target = o.estimate + shift;
            let best = meas
                .outcomes()
                .iter()
                .filter(|c| wrap_phase(c.estimate - target).abs() <= est_tol)
                .map(|c| c.element.sub(&moved).frobenius_norm())
                .fold(T::infinity(), T::min);
            worst = worst.max(best);
        }
    }
    worst
}

/// Random full-rank POVM: Gaussian Gram matrices `G_m` normalized as
/// `S^{-1/2} G_m S^{-1/2}` with `S = Σ G_m`; estimates uniform in `[-2π, 4π)`.
pub fn random_measurement<T: Real, R: Rng + ?Sized>(
    dim: usize,
    outcomes: usize,
    rng: &mut R,
) -> Result<ExplicitMeasurement<T>> {
    let mut gaussian = || -> T { T::lit(rng.sample::<f64, _>(StandardNormal)) };
    let grams: Vec<HermitianMatrix<T>> = (0..outcomes)
        .map(|_| {
            let a = SquareMatrix::from_fn(dim, |_, _| Complex::new(gaussian(), gaussian()));
            HermitianMatrix::symmetrize(a.matmul(&a.adjoint()))
        })
        .collect();
    let total = grams.iter().fold(HermitianMatrix::zeros(dim), |acc, g| acc.add(g));
    let inv_sqrt = hermitian_eig(&total)?.map_spectrum(|x| T::one() / x.sqrt());
    let estimates: Vec<T> = (0..outcomes).map(|_| T::lit(rng.random_range(-2.0..4.0) * std::f64::consts::PI)).collect();
    let outcomes = grams
        .iter()
        .zip(estimates)
        .map(|(g, estimate)| Outcome { element: g.congruence(inv_sqrt.as_matrix()), estimate })
        .collect();
    ExplicitMeasurement::new(outcomes)
}
