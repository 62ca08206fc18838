//! Joint outcome statistics, mutual information and the Holevo bound for
//! phase encodings read out by shifted-covariant measurements.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::model::{ExplicitMeasurement, PhaseGrid, ProbeState};
use crate::optimizer::{check_shifts, locate_extremum, Sense, ShiftSweep};
use crate::qlinalg::{von_neumann_entropy, HermitianMatrix};
use crate::scalar::{entropy_term, phasor, Real};

/// Phase-outcome distribution `p_nm` with uniform prior over the `N` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution<T> {
    rows: usize,
    cols: usize,
    p: Vec<T>,
}

impl<T: Real> JointDistribution<T> {
    /// Row-major probabilities. Entries down to `-1e-15` are clipped to zero;
    /// the total must be one within `1e-10`.
    pub fn new(rows: usize, cols: usize, mut p: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("distribution needs at least one row and column".into()));
        }
        check_dim(rows * cols, p.len())?;
        let floor = -T::tol(1e-15);
        for x in p.iter_mut() {
            if !x.is_finite() || *x < floor {
                return Err(Error::InvalidInput(format!("invalid probability {x}")));
            }
            *x = x.max(T::zero());
        }
        let total: T = p.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}")));
        }
        Ok(Self { rows, cols, p })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, n: usize, m: usize) -> T {
        self.p[n * self.cols + m]
    }

    pub fn row_marginals(&self) -> Vec<T> {
        self.p.chunks(self.cols).map(|r| r.iter().copied().sum()).collect()
    }

    pub fn column_marginals(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for row in self.p.chunks(self.cols) {
            for (o, &x) in out.iter_mut().zip(row) {
                *o += x;
            }
        }
        out
    }

    /// Coarse-grains columns `2i` and `2i+1` into one (a trailing odd column
    /// stays on its own).
    pub fn merge_column_pairs(&self) -> Self {
        let cols = self.cols.div_ceil(2);
        let mut p = Vec::with_capacity(self.rows * cols);
        for row in self.p.chunks(self.cols) {
            p.extend(row.chunks(2).map(|pair| pair.iter().copied().sum::<T>()));
        }
        Self { rows: self.rows, cols, p }
    }
}

/// `I = H(X) + H(M) − H(X, M)` in bits.
pub fn mutual_information<T: Real>(p: &JointDistribution<T>) -> T {
    let h = |v: &[T]| v.iter().map(|&x| entropy_term(x)).sum::<T>();
    let i = h(&p.row_marginals()) + h(&p.column_marginals()) - h(&p.p);
    i.max(T::zero())
}

/// Readout of the flat-seed shifted-covariant measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeModel {
    /// `K` outcomes `Π_m = (D/K) U_{c_m}|e⟩⟨e|U_{c_m}†` with `c_m = 2πm/K + ξ`.
    /// Complete only for `K ≥ D`. With `K = N` this is the shifted-covariant
    /// measurement on the grid itself.
    Sampled { outcomes: usize },
    /// The continuous POVM `(D/2π) U_{φ̃+ξ}|e⟩⟨e|U†` integrated over `K`
    /// equal bins centred at `c_m`. Complete for every `K`.
    Binned { bins: usize },
}

impl OutcomeModel {
    pub fn outcomes(&self) -> usize {
        match *self {
            OutcomeModel::Sampled { outcomes } => outcomes,
            OutcomeModel::Binned { bins } => bins,
        }
    }

    /// Default bin count `max(4096, 64 D)`.
    pub fn default_binned(dim: usize) -> Self {
        OutcomeModel::Binned { bins: (64 * dim).max(4096) }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            OutcomeModel::Sampled { outcomes } if outcomes < dim.max(1) => Err(Error::InvalidInput(format!(
                "{outcomes} sampled outcomes cannot resolve the identity in dimension {dim}; need at least {dim}"
            ))),
            OutcomeModel::Binned { bins } if bins < 2 => {
                Err(Error::InvalidInput("binned readout needs at least 2 bins".into()))
            }
            _ => Ok(()),
        }
    }

    /// Weight `s_q` of harmonic `q` (the bin average of `e^{iqx}`).
    fn harmonic_weight<T: Real>(&self, q: i64) -> T {
        match *self {
            OutcomeModel::Sampled { .. } => T::one(),
            OutcomeModel::Binned { bins } => {
                if q == 0 {
                    T::one()
                } else {
                    let x = T::lit(q as f64) * T::PI() / T::from_usize_lossy(bins);
                    x.sin() / x
                }
            }
        }
    }
}

/// `g(x) = Σ_q s_q R_q e^{iqx}` with `R_q = Σ_{k−j=q} c_j* c_k`, so that
/// `⟨φ|Π_m|φ⟩ = g(φ − c_m) / K`.
struct Profile<T> {
    coeffs: Vec<(i64, Complex<T>)>,
}

impl<T: Real> Profile<T> {
    fn new(state: &ProbeState<T>, model: &OutcomeModel) -> Self {
        let c = state.amplitudes();
        let d = c.len() as i64;
        let coeffs = (-(d - 1)..d)
            .map(|q| {
                let r: Complex<T> = (0..d)
                    .filter(|&j| (0..d).contains(&(j + q)))
                    .map(|j| c[j as usize].conj() * c[(j + q) as usize])
                    .sum();
                (q, r * model.harmonic_weight::<T>(q))
            })
            .collect();
        Self { coeffs }
    }

    fn eval(&self, x: T) -> T {
        self.coeffs.iter().map(|&(q, r)| (r * phasor(T::lit(q as f64) * x)).re).sum::<T>().max(T::zero())
    }
}

fn outcome_centre<T: Real>(k: usize, m: usize, shift: T) -> T {
    T::TAU() * T::from_usize_lossy(m) / T::from_usize_lossy(k) + shift
}

/// Joint distribution of the encoded phase and the outcome of the shifted
/// flat-seed measurement.
pub fn joint_distribution<T: Real>(
    state: &ProbeState<T>,
    grid: PhaseGrid,
    shift: T,
    model: OutcomeModel,
) -> Result<JointDistribution<T>> {
    model.validate(state.dim())?;
    let profile = Profile::new(state, &model);
    let (n, k) = (grid.size(), model.outcomes());
    let norm = T::one() / (T::from_usize_lossy(n) * T::from_usize_lossy(k));
    let mut p = Vec::with_capacity(n * k);
    for i in 0..n {
        let phi = grid.phase::<T>(i);
        p.extend((0..k).map(|m| profile.eval(phi - outcome_centre(k, m, shift)) * norm));
    }
    JointDistribution::new(n, k, p)
}

/// `p_nm = (1/N) ⟨φ_n|Π_m|φ_n⟩` for an arbitrary measurement.
pub fn joint_distribution_explicit<T: Real>(
    state: &ProbeState<T>,
    meas: &ExplicitMeasurement<T>,
    grid: PhaseGrid,
) -> Result<JointDistribution<T>> {
    check_dim(state.dim(), meas.dim())?;
    let inv_n = T::one() / T::from_usize_lossy(grid.size());
    let mut p = Vec::with_capacity(grid.size() * meas.len());
    for phi in grid.phases::<T>() {
        let v = state.encode(phi);
        p.extend(meas.outcomes().iter().map(|o| o.element.expectation(&v) * inv_n));
    }
    JointDistribution::new(grid.size(), meas.len(), p)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Mutual information of [`joint_distribution`] without forming the table.
///
/// Row `n` is a cyclic permutation of row `n'` whenever `nK ≡ n'K (mod N)`,
/// so only `N / gcd(N, K)` row entropies are computed, and the outcome
/// marginal keeps just the harmonics `q ≡ 0 (mod N)`.
pub fn shifted_mutual_information<T: Real>(
    state: &ProbeState<T>,
    grid: PhaseGrid,
    shift: T,
    model: OutcomeModel,
) -> Result<T> {
    model.validate(state.dim())?;
    let profile = Profile::new(state, &model);
    let (n, k) = (grid.size(), model.outcomes());
    let inv_k = T::one() / T::from_usize_lossy(k);
    let classes = n / gcd(n, k);
    // class c contains rows with nK ≡ c·gcd (mod N); pick a representative row for each
    let step = gcd(n, k);
    let mut representative = vec![usize::MAX; classes];
    let mut count = vec![0usize; classes];
    for row in 0..n {
        let c = (row * k % n) / step;
        if representative[c] == usize::MAX {
            representative[c] = row;
        }
        count[c] += 1;
    }
    let row_entropy: T = (0..classes)
        .map(|c| {
            let phi = grid.phase::<T>(representative[c]);
            let h: T = (0..k).map(|m| entropy_term(profile.eval(phi - outcome_centre(k, m, shift)) * inv_k)).sum();
            h * T::from_usize_lossy(count[c])
        })
        .sum::<T>()
        / T::from_usize_lossy(n);
    let aliased: Vec<(i64, Complex<T>)> =
        profile.coeffs.iter().copied().filter(|&(q, _)| q.rem_euclid(n as i64) == 0).collect();
    let outcome_entropy: T = (0..k)
        .map(|m| {
            let c = outcome_centre(k, m, shift);
            let p: T = aliased.iter().map(|&(q, r)| (r * phasor(-T::lit(q as f64) * c)).re).sum::<T>() * inv_k;
            entropy_term(p.max(T::zero()))
        })
        .sum();
    Ok((outcome_entropy - row_entropy).max(T::zero()))
}

/// `χ = S((1/N) Σ_n |φ_n⟩⟨φ_n|)`; the average keeps `c_j c_k*` for
/// `j ≡ k (mod N)` and zeroes the rest.
pub fn holevo_bound<T: Real>(state: &ProbeState<T>, grid: PhaseGrid) -> Result<T> {
    let c = state.amplitudes();
    let rho = HermitianMatrix::from_fn(state.dim(), |j, k| {
        if grid.same_residue(j, k) {
            c[j] * c[k].conj()
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    von_neumann_entropy(&rho)
}

/// Mutual information of the shifted flat-seed readout over a grid of
/// shifts, with the maximizing `ξ` located as for cost sweeps.
pub fn optimize_shift_mi<T: Real>(
    state: &ProbeState<T>,
    grid: PhaseGrid,
    model: OutcomeModel,
    shifts: &[T],
) -> Result<ShiftSweep<T>> {
    check_shifts(grid, shifts)?;
    model.validate(state.dim())?;
    let curve: Vec<(T, T)> = shifts
        .par_iter()
        .map(|&xi| shifted_mutual_information(state, grid, xi, model).map(|i| (xi, i)))
        .collect::<Result<_>>()?;
    locate_extremum(grid.spacing(), curve, Sense::Maximize, |xi| shifted_mutual_information(state, grid, xi, model))
}
