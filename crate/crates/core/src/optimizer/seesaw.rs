use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::closedform::{optimal_continuous_state, reference_seed};
use crate::error::Result;
use crate::model::{subcovariant_matrix, CostFunction, PhaseGrid, ProbeState, SeedMeasurement};
use crate::qlinalg::{hermitian_eig, HermitianMatrix};
use crate::scalar::Real;

use super::sdp::{AdmmSettings, AdmmState, SdpProblem, SolverReport, SolverStatus};

/// Default RNG seed for random restarts.
pub const DEFAULT_RNG_SEED: u64 = 0x5EED;

/// `A = (1/N) Σ_s Σ_n U_{nθ} Π_s U_{nθ}† C(nθ + γ_s)`.
pub fn cost_matrix_a<T: Real>(seeds: &SeedMeasurement<T>, cost: &CostFunction<T>) -> HermitianMatrix<T> {
    subcovariant_matrix(seeds, cost)
}

/// Best probe for a fixed measurement: the minimal eigenvector of `A`.
pub fn optimal_state_for_measurement<T: Real>(a: &HermitianMatrix<T>) -> Result<(ProbeState<T>, T)> {
    let (value, vector) = hermitian_eig(a)?.min_pair();
    Ok((ProbeState::new(vector)?, value))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    /// Output of the see-saw search.
    SeeSaw,
    /// Reference seed at offset zero, state optimized.
    Covariant,
    /// Reference seed shifted by half a grid step, state optimized.
    ShiftedHalf,
}

#[derive(Clone, Debug)]
pub struct StrategyResult<T> {
    pub state: ProbeState<T>,
    pub seeds: SeedMeasurement<T>,
    pub cost: T,
    pub kind: StrategyKind,
    /// Index into the start list of the restart that produced the result.
    pub restart: usize,
    pub restarts: usize,
    pub iterations: usize,
    /// Cost after every state update; nonincreasing.
    pub trace: Vec<T>,
    pub report: Option<SolverReport>,
}

impl<T: Real> StrategyResult<T> {
    pub fn seed_count(&self) -> usize {
        self.seeds.seed_count()
    }

    /// Offset of the single seed, if there is exactly one.
    pub fn shift(&self) -> Option<T> {
        match self.seeds.seeds() {
            [only] => Some(only.offset),
            _ => None,
        }
    }

    fn from_seeds(seeds: SeedMeasurement<T>, cost: &CostFunction<T>, kind: StrategyKind) -> Result<Self> {
        let (state, value) = optimal_state_for_measurement(&cost_matrix_a(&seeds, cost))?;
        Ok(Self {
            state,
            seeds,
            cost: value,
            kind,
            restart: 0,
            restarts: 0,
            iterations: 0,
            trace: vec![value],
            report: None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SeeSawSettings<T> {
    /// Number of built-in starts used: `|e⟩`, the continuous optimum, then
    /// random states.
    pub restarts: usize,
    /// Further start states tried after the built-in ones.
    pub extra_starts: Vec<ProbeState<T>>,
    pub max_iterations: usize,
    /// Relative change in cost below which the alternation stops.
    pub tolerance: f64,
    pub rng_seed: u64,
    pub admm: AdmmSettings,
}

impl<T> Default for SeeSawSettings<T> {
    fn default() -> Self {
        Self {
            restarts: 5,
            extra_starts: Vec::new(),
            max_iterations: 200,
            tolerance: 1e-10,
            rng_seed: DEFAULT_RNG_SEED,
            admm: AdmmSettings::default(),
        }
    }
}

fn random_state<T: Real>(dim: usize, rng: &mut ChaCha8Rng) -> ProbeState<T> {
    let amps = (0..dim)
        .map(|_| {
            Complex::new(T::lit(rng.sample::<f64, _>(StandardNormal)), T::lit(rng.sample::<f64, _>(StandardNormal)))
        })
        .collect();
    ProbeState::new(amps).expect("Gaussian vector is nonzero with probability one")
}

/// Built-in start states: `|e⟩`, the continuous optimum, then random states
/// drawn from a ChaCha stream seeded with `rng_seed`.
pub fn start_states<T: Real>(dim: usize, restarts: usize, rng_seed: u64) -> Vec<ProbeState<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::with_capacity(restarts);
    for i in 0..restarts {
        out.push(match i {
            0 => ProbeState::flat(dim),
            1 => optimal_continuous_state(dim),
            _ => random_state(dim, &mut rng),
        });
    }
    out
}

fn run_from<T: Real>(
    start: ProbeState<T>,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
    seed_count: usize,
    settings: &SeeSawSettings<T>,
) -> Result<StrategyResult<T>> {
    let mut state = start;
    let mut warm: Option<AdmmState<T>> = None;
    let mut current: Option<SeedMeasurement<T>> = None;
    let mut trace: Vec<T> = Vec::new();
    let mut report = None;
    let floor = T::tol(1e-14);
    for _ in 0..settings.max_iterations {
        let problem = SdpProblem::for_state(&state, grid, cost, seed_count)?;
        let sol = problem.solve(&settings.admm, warm.as_ref())?;
        let candidate = T::lit(sol.report.objective);
        // keep the previous seeds unless the new ones are better for this state
        let accept = match (&current, trace.last()) {
            (Some(_), Some(&held)) => candidate < held,
            _ => true,
        };
        if accept {
            current = Some(sol.seeds);
            report = Some(sol.report);
        }
        warm = Some(sol.warm);
        let seeds = current.as_ref().expect("seeds set on first pass");
        let (next, value) = optimal_state_for_measurement(&cost_matrix_a(seeds, cost))?;
        let value = match trace.last() {
            Some(&prev) => value.min(prev),
            None => value,
        };
        let done = match trace.last() {
            Some(&prev) => (prev - value).abs() <= T::tol(settings.tolerance) * prev.abs().max(floor),
            None => false,
        };
        trace.push(value);
        state = next;
        if done || !accept {
            break;
        }
    }
    let seeds = current.expect("at least one iteration");
    let cost_value = *trace.last().expect("nonempty trace");
    Ok(StrategyResult {
        state,
        seeds,
        cost: cost_value,
        kind: StrategyKind::SeeSaw,
        restart: 0,
        restarts: 1,
        iterations: trace.len(),
        trace,
        report,
    })
}

fn pick_best<T: Real>(results: Vec<StrategyResult<T>>) -> Option<StrategyResult<T>> {
    results.into_iter().fold(None, |best, r| match best {
        Some(b) if b.cost <= r.cost => Some(b),
        _ => Some(r),
    })
}

/// Alternates seed SDPs and eigenvector state updates from every start state
/// and returns the cheapest outcome (ties go to the earliest start).
pub fn see_saw<T: Real>(
    dim: usize,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
    seed_count: usize,
    restarts: usize,
) -> Result<StrategyResult<T>> {
    see_saw_with(dim, grid, cost, seed_count, &SeeSawSettings { restarts, ..SeeSawSettings::default() })
}

pub fn see_saw_with<T: Real>(
    dim: usize,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
    seed_count: usize,
    settings: &SeeSawSettings<T>,
) -> Result<StrategyResult<T>> {
    let mut starts = start_states(dim, settings.restarts, settings.rng_seed);
    starts.extend(settings.extra_starts.iter().cloned());
    if starts.is_empty() {
        return Err(crate::error::Error::InvalidInput("see-saw needs at least one start state".into()));
    }
    let total = starts.len();
    let results: Vec<StrategyResult<T>> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| {
            run_from(s, grid, cost, seed_count, settings).map(|mut r| {
                r.restart = i;
                r
            })
        })
        .collect::<Result<_>>()?;
    let mut best = pick_best(results).expect("nonempty");
    best.restarts = total;
    if let Some(r) = &best.report {
        if r.status != SolverStatus::Converged {
            log::warn!("best see-saw run ended with solver status {:?}", r.status);
        }
    }
    Ok(best)
}

/// Reference strategies that need no optimization over measurements: the
/// covariant and the half-step shifted measurement built on
/// [`reference_seed`], each with its optimal probe.
pub fn reference_strategies<T: Real>(
    dim: usize,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
) -> Result<Vec<StrategyResult<T>>> {
    let base = reference_seed(dim, grid);
    let cov = SeedMeasurement::covariant(grid, base.clone())?;
    let half = grid.spacing::<T>() * T::lit(0.5);
    let shifted = SeedMeasurement::shifted(grid, &base, half)?;
    Ok(vec![
        StrategyResult::from_seeds(cov, cost, StrategyKind::Covariant)?,
        StrategyResult::from_seeds(shifted, cost, StrategyKind::ShiftedHalf)?,
    ])
}

/// Minimal improvement that justifies one more seed.
pub const ESCALATION_GAIN: f64 = 1e-8;

/// Runs the see-saw for `S = 1, 2, …` until adding a seed gains less than
/// `1e-8` or `S_max` is reached. Reference strategies take part both as
/// candidates and as extra start states. Returns the cheapest strategy found,
/// preferring fewer seeds on ties.
pub fn escalate_seed_count<T: Real>(
    dim: usize,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
    max_seeds: usize,
) -> Result<StrategyResult<T>> {
    escalate_seed_count_with(dim, grid, cost, max_seeds, &SeeSawSettings::default())
}

pub fn escalate_seed_count_with<T: Real>(
    dim: usize,
    grid: PhaseGrid,
    cost: &CostFunction<T>,
    max_seeds: usize,
    settings: &SeeSawSettings<T>,
) -> Result<StrategyResult<T>> {
    if max_seeds == 0 {
        return Err(crate::error::Error::InvalidInput("seed count must be at least 1".into()));
    }
    let references = reference_strategies(dim, grid, cost)?;
    let mut settings = settings.clone();
    settings.extra_starts.extend(references.iter().map(|r| r.state.clone()));
    let mut best = pick_best(references);
    let gain = T::tol(ESCALATION_GAIN);
    // costs are nonnegative, so a zero-cost reference cannot be improved on
    if let Some(b) = &best {
        if b.cost <= T::tol(1e-12) {
            return Ok(best.expect("checked"));
        }
    }
    let mut previous: Option<T> = None;
    for s in 1..=max_seeds {
        let result = see_saw_with(dim, grid, cost, s, &settings)?;
        let value = result.cost;
        let improved_on_previous = previous.is_none_or(|p| value < p - gain);
        if best.as_ref().is_none_or(|b| value < b.cost - gain) {
            settings.extra_starts.push(result.state.clone());
            best = Some(result);
        }
        if !improved_on_previous {
            break;
        }
        previous = Some(previous.map_or(value, |p| p.min(value)));
    }
    Ok(best.expect("at least one candidate"))
}
