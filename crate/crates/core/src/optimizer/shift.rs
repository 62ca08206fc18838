use rayon::prelude::*;

use crate::closedform::reference_seed;
use crate::error::{Error, Result};
use crate::model::{CostFunction, PhaseGrid, SeedMeasurement};
use crate::scalar::Real;

use super::seesaw::{cost_matrix_a, optimal_state_for_measurement};

/// Default number of shifts `iθ/P` sampled in `[0, θ)`.
pub const DEFAULT_SHIFT_POINTS: usize = 64;

/// Values closer than this are reported as ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Uniform shifts `iθ/points`, `i = 0..points`. Even `points` put `θ/2` on
/// the grid.
pub fn uniform_shift_grid<T: Real>(grid: PhaseGrid, points: usize) -> Vec<T> {
    let theta = grid.spacing::<T>();
    (0..points).map(|i| theta * T::from_usize_lossy(i) / T::from_usize_lossy(points)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    fn better<T: Real>(self, a: T, b: T) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

/// A sampled curve over `ξ ∈ [0, θ)` together with its located extremum.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftSweep<T> {
    pub best_shift: T,
    pub best_value: T,
    /// `(ξ, value)` at every requested shift, in input order.
    pub curve: Vec<(T, T)>,
    /// Every sampled shift whose value is within `1e-9` of the sampled best.
    pub ties: Vec<T>,
}

pub(crate) fn check_shifts<T: Real>(grid: PhaseGrid, shifts: &[T]) -> Result<()> {
    if shifts.is_empty() {
        return Err(Error::InvalidInput("shift grid is empty".into()));
    }
    let theta = grid.spacing::<T>();
    if let Some(bad) = shifts.iter().find(|&&x| !(x >= T::zero() && x < theta)) {
        return Err(Error::InvalidInput(format!("shift {bad} outside [0, {theta})")));
    }
    Ok(())
}

/// Picks the best sampled shift (ties within `1e-9` go to the smallest `ξ`),
/// then fits a parabola through it and its periodic neighbours and keeps the
/// vertex if `f` confirms it is better by more than rounding.
pub(crate) fn locate_extremum<T: Real>(
    period: T,
    curve: Vec<(T, T)>,
    sense: Sense,
    f: impl Fn(T) -> Result<T>,
) -> Result<ShiftSweep<T>> {
    let tie = T::tol(TIE_TOLERANCE);
    let mut order: Vec<usize> = (0..curve.len()).collect();
    order.sort_by(|&a, &b| curve[a].0.partial_cmp(&curve[b].0).expect("finite shifts"));
    let mut best = order[0];
    for &i in &order[1..] {
        let (cand, held) = (curve[i].1, curve[best].1);
        let margin = match sense {
            Sense::Minimize => held - cand,
            Sense::Maximize => cand - held,
        };
        if margin > tie {
            best = i;
        }
    }
    let best_value = curve[best].1;
    let ties: Vec<T> = order.iter().filter(|&&i| (curve[i].1 - best_value).abs() <= tie).map(|&i| curve[i].0).collect();
    let mut result = ShiftSweep { best_shift: curve[best].0, best_value, curve: curve.clone(), ties };

    if order.len() >= 3 {
        let pos = order.iter().position(|&i| i == best).expect("present");
        let m = order.len();
        let (xl, yl) = {
            let (x, y) = curve[order[(pos + m - 1) % m]];
            (if pos == 0 { x - period } else { x }, y)
        };
        let (xr, yr) = {
            let (x, y) = curve[order[(pos + 1) % m]];
            (if pos == m - 1 { x + period } else { x }, y)
        };
        let (x0, y0) = (curve[best].0, best_value);
        let denom = (x0 - xl) * (y0 - yr) - (x0 - xr) * (y0 - yl);
        if denom != T::zero() {
            let num = (x0 - xl).powi(2) * (y0 - yr) - (x0 - xr).powi(2) * (y0 - yl);
            let vertex = x0 - T::lit(0.5) * num / denom;
            if vertex > xl && vertex < xr && (vertex - x0).abs() > T::epsilon() * period {
                let wrapped = vertex - period * (vertex / period).floor();
                let wrapped = if wrapped >= period { T::zero() } else { wrapped };
                let value = f(wrapped)?;
                if sense.better(value, best_value) && (value - best_value).abs() > T::tol(1e-12) {
                    result.best_shift = wrapped;
                    result.best_value = value;
                }
            }
        }
    }
    Ok(result)
}

/// Cost of the shifted seed `U_ξ Π₀ U_ξ†` with the probe re-optimized for it
/// (minimal eigenvalue of `A`). `Π₀` is the flat seed `D|e⟩⟨e|` for `N ≥ D`
/// and the perfect-discrimination seed below that.
pub fn shifted_strategy_cost<T: Real>(dim: usize, grid: PhaseGrid, cost: &CostFunction<T>, shift: T) -> Result<T> {
    let seeds = SeedMeasurement::shifted(grid, &reference_seed(dim, grid), shift)?;
    Ok(optimal_state_for_measurement(&cost_matrix_a(&seeds, cost))?.1)
}

/// State-optimized cost of shifted reference seeds over a grid of shifts.
pub fn sweep_shift<T: Real>(
    dim: usize,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
    shifts: &[T],
) -> Result<ShiftSweep<T>> {
    check_shifts(grid, shifts)?;
    let curve: Vec<(T, T)> = shifts
        .par_iter()
        .map(|&xi| shifted_strategy_cost(dim, grid, cost, xi).map(|c| (xi, c)))
        .collect::<Result<_>>()?;
    locate_extremum(grid.spacing(), curve, Sense::Minimize, |xi| shifted_strategy_cost(dim, grid, cost, xi))
}
