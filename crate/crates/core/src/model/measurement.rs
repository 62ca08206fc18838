use crate::error::{check_dim, Error, Result};
use crate::qlinalg::{hermitian_eig, HermitianMatrix, SquareMatrix};
use crate::scalar::Real;

use super::grid::PhaseGrid;

const PSD_TOLERANCE: f64 = 1e-10;
const COMPLETENESS_TOLERANCE: f64 = 1e-8;

fn check_psd<T: Real>(m: &HermitianMatrix<T>) -> Result<()> {
    let min = hermitian_eig(m)?.eigenvalues[0];
    if min < -T::tol(PSD_TOLERANCE) * m.frobenius_norm().max(T::one()) {
        return Err(Error::NotPositive { min_eigenvalue: min.as_f64() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<T> {
    pub element: HermitianMatrix<T>,
    pub estimate: T,
}

/// A finite POVM with an estimate attached to every outcome. Estimates are
/// arbitrary reals; nothing ties them to the encoded phases.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitMeasurement<T> {
    outcomes: Vec<Outcome<T>>,
}

impl<T: Real> ExplicitMeasurement<T> {
    /// Checks positivity of every element and `Σ_m Π_m = 1` within `1e-8`.
    pub fn new(outcomes: Vec<Outcome<T>>) -> Result<Self> {
        let Some(first) = outcomes.first() else {
            return Err(Error::InvalidInput("measurement needs at least one outcome".into()));
        };
        let dim = first.element.dim();
        for o in &outcomes {
            check_dim(dim, o.element.dim())?;
            if !o.estimate.is_finite() {
                return Err(Error::InvalidInput("estimates must be finite".into()));
            }
            check_psd(&o.element)?;
        }
        let meas = Self { outcomes };
        let residual = meas.completeness_residual();
        if residual > T::tol(COMPLETENESS_TOLERANCE) {
            return Err(Error::Incomplete { residual: residual.as_f64() });
        }
        Ok(meas)
    }

    pub fn outcomes(&self) -> &[Outcome<T>] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].element.dim()
    }

    /// `‖Σ_m Π_m − 1‖_F`.
    pub fn completeness_residual(&self) -> T {
        let dim = self.dim();
        let total = self.outcomes.iter().fold(HermitianMatrix::zeros(dim), |acc, o| acc.add(&o.element));
        total.sub(&HermitianMatrix::identity(dim)).frobenius_norm()
    }

    /// Merges outcomes whose estimates agree modulo `2π` within `tol`.
    /// Costs depend on estimates only through `C(φ − φ̃)`, so merging
    /// preserves every average cost.
    pub fn coalesce(&self, tol: T) -> Self {
        let mut merged: Vec<Outcome<T>> = Vec::new();
        for o in &self.outcomes {
            let hit = merged.iter_mut().find(|m| crate::scalar::wrap_phase(m.estimate - o.estimate).abs() <= tol);
            match hit {
                Some(m) => m.element = m.element.add(&o.element),
                None => merged.push(o.clone()),
            }
        }
        Self { outcomes: merged }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Seed<T> {
    /// Coset offset `γ ∈ [0, θ)`.
    pub offset: T,
    pub element: HermitianMatrix<T>,
}

/// Sub-covariant measurement generated by seeds `Π_γ` under conjugation by
/// `U_{nθ}`: outcome `(s, n)` has element `(1/N) U_{nθ} Π_{γ_s} U_{nθ}†` and
/// estimate `nθ + γ_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedMeasurement<T> {
    grid: PhaseGrid,
    seeds: Vec<Seed<T>>,
}

impl<T: Real> SeedMeasurement<T> {
    pub fn new(grid: PhaseGrid, seeds: Vec<Seed<T>>) -> Result<Self> {
        let Some(first) = seeds.first() else {
            return Err(Error::InvalidInput("need at least one seed".into()));
        };
        let dim = first.element.dim();
        let theta = grid.spacing::<T>();
        for s in &seeds {
            check_dim(dim, s.element.dim())?;
            if !(s.offset >= T::zero() && s.offset < theta) {
                return Err(Error::InvalidInput(format!("seed offset {} outside [0, {theta})", s.offset)));
            }
            check_psd(&s.element)?;
        }
        let meas = Self { grid, seeds };
        let residual = meas.completeness_residual();
        if residual > T::tol(COMPLETENESS_TOLERANCE) {
            return Err(Error::Incomplete { residual: residual.as_f64() });
        }
        Ok(meas)
    }

    /// Covariant measurement from a single seed at offset zero.
    pub fn covariant(grid: PhaseGrid, seed: HermitianMatrix<T>) -> Result<Self> {
        Self::new(grid, vec![Seed { offset: T::zero(), element: seed }])
    }

    /// Shifted-covariant measurement: the seed `base` is moved to `U_ξ base U_ξ†`
    /// and estimates become `nθ + ξ`. `ξ` is reduced modulo `θ`, which only
    /// relabels outcomes.
    pub fn shifted(grid: PhaseGrid, base: &HermitianMatrix<T>, shift: T) -> Result<Self> {
        let theta = grid.spacing::<T>();
        let mut xi = shift - theta * (shift / theta).floor();
        if xi >= theta {
            xi = T::zero();
        }
        Self::new(grid, vec![Seed { offset: xi, element: base.phase_conjugate(xi) }])
    }

    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn seeds(&self) -> &[Seed<T>] {
        &self.seeds
    }

    pub fn seed_count(&self) -> usize {
        self.seeds.len()
    }

    pub fn dim(&self) -> usize {
        self.seeds[0].element.dim()
    }

    /// `(1/N) Σ_s Σ_n U_{nθ} Π_s U_{nθ}†`, which keeps exactly the entries
    /// with `j ≡ k (mod N)` of `Σ_s Π_s`.
    pub fn completeness_operator(&self) -> HermitianMatrix<T> {
        completeness_operator(self.grid, self.seeds.iter().map(|s| &s.element))
    }

    pub fn completeness_residual(&self) -> T {
        self.completeness_operator().sub(&HermitianMatrix::identity(self.dim())).frobenius_norm()
    }

    /// Smallest eigenvalue over all seeds.
    pub fn min_eigenvalue(&self) -> T {
        self.seeds
            .iter()
            .map(|s| hermitian_eig(&s.element).map(|e| e.eigenvalues[0]).unwrap_or(T::nan()))
            .fold(T::infinity(), T::min)
    }

    /// All `N·S` outcomes as an explicit POVM.
    pub fn expand(&self) -> ExplicitMeasurement<T> {
        let n = self.grid.size();
        let inv_n = T::one() / T::from_usize_lossy(n);
        let mut outcomes = Vec::with_capacity(n * self.seeds.len());
        for seed in &self.seeds {
            for k in 0..n {
                let phase = self.grid.phase::<T>(k);
                outcomes.push(Outcome {
                    element: seed.element.phase_conjugate(phase).scale(inv_n),
                    estimate: phase + seed.offset,
                });
            }
        }
        ExplicitMeasurement { outcomes }
    }
}

pub(crate) fn completeness_operator<'a, T: Real + 'a>(
    grid: PhaseGrid,
    elements: impl Iterator<Item = &'a HermitianMatrix<T>>,
) -> HermitianMatrix<T> {
    let mut total: Option<SquareMatrix<T>> = None;
    for e in elements {
        total = Some(match total {
            None => e.as_matrix().clone(),
            Some(t) => &t + e.as_matrix(),
        });
    }
    let total = total.expect("at least one element");
    let dim = total.dim();
    HermitianMatrix::from_fn(dim, |j, k| {
        if grid.same_residue(j, k) {
            total[(j, k)]
        } else {
            num_complex::Complex::new(T::zero(), T::zero())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::state::flat_vector;

    #[test]
    fn flat_seed_is_complete_for_large_grids() {
        let d = 4;
        let seed = HermitianMatrix::projector(&flat_vector::<f64>(d), d as f64);
        for n in d..(3 * d) {
            let m = SeedMeasurement::covariant(PhaseGrid::new(n).unwrap(), seed.clone()).unwrap();
            assert!(m.completeness_residual() < 1e-12);
            assert!(m.expand().completeness_residual() < 1e-12);
        }
        // too few phases: the flat seed aliases and is not complete
        let err = SeedMeasurement::covariant(PhaseGrid::new(3).unwrap(), seed).unwrap_err();
        assert!(matches!(err, Error::Incomplete { .. }));
    }

    #[test]
    fn rejects_bad_seeds() {
        let grid = PhaseGrid::new(4).unwrap();
        let bad = HermitianMatrix::diagonal(&[2.0, -0.5]);
        assert!(matches!(SeedMeasurement::covariant(grid, bad), Err(Error::NotPositive { .. })));
        let id = HermitianMatrix::<f64>::identity(2);
        let off = vec![Seed { offset: 2.0, element: id }];
        assert!(SeedMeasurement::new(grid, off).is_err());
    }

    #[test]
    fn shifted_reduces_modulo_spacing() {
        let grid = PhaseGrid::new(5).unwrap();
        let base = HermitianMatrix::projector(&flat_vector::<f64>(3), 3.0);
        let theta = grid.spacing::<f64>();
        let a = SeedMeasurement::shifted(grid, &base, 0.3 * theta).unwrap();
        let b = SeedMeasurement::shifted(grid, &base, 2.3 * theta).unwrap();
        assert!((a.seeds()[0].offset - b.seeds()[0].offset).abs() < 1e-12);
        assert!(a.seeds()[0].element.sub(&b.seeds()[0].element).frobenius_norm() < 1e-12);
    }

    #[test]
    fn explicit_measurement_validation() {
        let half = HermitianMatrix::<f64>::identity(2).scale(0.5);
        let ok = ExplicitMeasurement::new(vec![
            Outcome { element: half.clone(), estimate: 0.0 },
            Outcome { element: half.clone(), estimate: 1.0 },
        ]);
        assert!(ok.is_ok());
        let incomplete = ExplicitMeasurement::new(vec![Outcome { element: half, estimate: 0.0 }]);
        assert!(matches!(incomplete, Err(Error::Incomplete { .. })));
    }

    #[test]
    fn coalesce_merges_equal_estimates() {
        let q = HermitianMatrix::<f64>::identity(2).scale(0.25);
        let m = ExplicitMeasurement::new(vec![
            Outcome { element: q.clone(), estimate: 0.5 },
            Outcome { element: q.clone(), estimate: 0.5 + std::f64::consts::TAU },
            Outcome { element: q.clone(), estimate: 1.0 },
            Outcome { element: q, estimate: 1.0 },
        ])
        .unwrap();
        let c = m.coalesce(1e-9);
        assert_eq!(c.len(), 2);
        assert!(c.completeness_residual() < 1e-12);
    }
}
