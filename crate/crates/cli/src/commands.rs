use std::time::Instant;

use log::info;
use qphase::closedform::{continuous_step_cost, perfect_discrimination_strategy};
use qphase::infotheory::{
    holevo_bound, joint_distribution_explicit, mutual_information, optimize_shift_mi, shifted_mutual_information,
    OutcomeModel,
};
use qphase::model::{PhaseGrid, SeedMeasurement};
use qphase::optimizer::{
    escalate_seed_count_with, reference_strategies, uniform_shift_grid, SeeSawSettings, StrategyKind,
};
use qphase::{CostFunction, ProbeState, StrategyResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{emit, write_file, Cell, Table};

fn header(command: &str, settings: &Settings, extra: &str) -> String {
    let mut h = format!("qphase {command} dim={}", settings.dim);
    if !extra.is_empty() {
        h.push(' ');
        h.push_str(extra);
    }
    h.push_str(&format!(" seed={:#x}", settings.seed));
    h
}

fn see_saw_settings(settings: &Settings) -> SeeSawSettings<f64> {
    SeeSawSettings { rng_seed: settings.seed, ..SeeSawSettings::default() }
}

/// Offset of the seed carrying the largest trace.
pub fn dominant_shift(result: &StrategyResult) -> f64 {
    result
        .seeds
        .seeds()
        .iter()
        .map(|s| (s.element.trace(), s.offset))
        .fold((f64::NEG_INFINITY, 0.0), |best, cur| if cur.0 > best.0 + 1e-12 { cur } else { best })
        .1
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub cost_covariant: f64,
    pub cost_shifted_half: f64,
    pub cost_optimal: f64,
    pub xi_opt: f64,
    pub s_opt: usize,
    pub seconds: f64,
}

pub fn sweep_row(
    dim: usize,
    n: usize,
    cost: &CostFunction,
    seeds_max: usize,
    search: &SeeSawSettings<f64>,
) -> CliResult<SweepRow> {
    let start = Instant::now();
    let grid = PhaseGrid::new(n)?;
    let refs = reference_strategies(dim, grid, cost)?;
    let pick = |kind| refs.iter().find(|r| r.kind == kind).map(|r| r.cost).expect("reference present");
    let best = escalate_seed_count_with(dim, grid, cost, seeds_max, search)?;
    let row = SweepRow {
        n,
        cost_covariant: pick(StrategyKind::Covariant),
        cost_shifted_half: pick(StrategyKind::ShiftedHalf),
        cost_optimal: best.cost,
        xi_opt: dominant_shift(&best),
        s_opt: best.seed_count(),
        seconds: start.elapsed().as_secs_f64(),
    };
    info!("N={n}: optimal {:.6} with S={} ({:.2} s)", row.cost_optimal, row.s_opt, row.seconds);
    Ok(row)
}

pub fn cost_sweep_rows(settings: &Settings) -> CliResult<Vec<SweepRow>> {
    let cost = settings.cost_function()?;
    let search = see_saw_settings(settings);
    let ns: Vec<usize> = settings.n.values().collect();
    settings
        .pool()?
        .install(|| ns.par_iter().map(|&n| sweep_row(settings.dim, n, &cost, settings.seeds_max, &search)).collect())
}

pub fn cost_sweep_table(settings: &Settings) -> CliResult<Table> {
    let rows = cost_sweep_rows(settings)?;
    let mut columns = vec!["N", "cost_covariant", "cost_shifted_half", "cost_optimal", "xi_opt", "S_opt"];
    if settings.timings {
        columns.push("seconds");
    }
    let mut table = Table::new(&columns);
    table.comments.push(header(
        "cost-sweep",
        settings,
        &format!("cost={} seeds_max={}", settings.cost_label(), settings.seeds_max),
    ));
    for r in rows {
        let mut cells = vec![
            Cell::Int(r.n),
            Cell::Float(r.cost_covariant),
            Cell::Float(r.cost_shifted_half),
            Cell::Float(r.cost_optimal),
            Cell::Float(r.xi_opt),
            Cell::Int(r.s_opt),
        ];
        if settings.timings {
            cells.push(Cell::Float(r.seconds));
        }
        table.rows.push(cells);
    }
    Ok(table)
}

pub fn cost_sweep(settings: &Settings) -> CliResult<()> {
    let table = cost_sweep_table(settings)?;
    let title = format!("Average cost, D = {}, {}", settings.dim, settings.cost);
    emit(
        &table,
        settings.out.as_deref(),
        settings.svg.then_some((title.as_str(), "N", &["cost_covariant", "cost_shifted_half", "cost_optimal"][..])),
    )
}

#[derive(Debug, Serialize)]
pub struct SeedReport {
    pub offset: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Serialize)]
pub struct SolverSummary {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
    pub status: String,
}

#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub dim: usize,
    pub n: usize,
    pub cost: String,
    pub seed: u64,
    pub optimal_cost: f64,
    pub covariant_cost: f64,
    pub shifted_half_cost: f64,
    pub strategy: String,
    pub seed_count: usize,
    pub see_saw_iterations: usize,
    pub completeness_residual: f64,
    pub state_re: Vec<f64>,
    pub state_im: Vec<f64>,
    pub seeds: Vec<SeedReport>,
    pub solver: Option<SolverSummary>,
}

pub fn optimize_report(settings: &Settings) -> CliResult<OptimizeReport> {
    if settings.n.start != settings.n.end {
        return Err(CliError::InvalidArgs(format!("optimize takes a single N, got {}", settings.n)));
    }
    let n = settings.n.start;
    let cost = settings.cost_function()?;
    let grid = PhaseGrid::new(n)?;
    let refs = reference_strategies(settings.dim, grid, &cost)?;
    let search = see_saw_settings(settings);
    let best = settings
        .pool()?
        .install(|| escalate_seed_count_with(settings.dim, grid, &cost, settings.seeds_max, &search))?;
    let amps = best.state.amplitudes();
    Ok(OptimizeReport {
        dim: settings.dim,
        n,
        cost: settings.cost_label(),
        seed: settings.seed,
        optimal_cost: best.cost,
        covariant_cost: refs[0].cost,
        shifted_half_cost: refs[1].cost,
        strategy: format!("{:?}", best.kind),
        seed_count: best.seed_count(),
        see_saw_iterations: best.iterations,
        completeness_residual: best.seeds.completeness_residual(),
        state_re: amps.iter().map(|z| z.re).collect(),
        state_im: amps.iter().map(|z| z.im).collect(),
        seeds: best
            .seeds
            .seeds()
            .iter()
            .map(|s| SeedReport {
                offset: s.offset,
                trace: s.element.trace(),
                min_eigenvalue: qphase::qlinalg::hermitian_eig(&s.element)
                    .map(|e| e.eigenvalues[0])
                    .unwrap_or(f64::NAN),
            })
            .collect(),
        solver: best.report.as_ref().map(|r| SolverSummary {
            iterations: r.iterations,
            primal_residual: r.primal_residual,
            dual_residual: r.dual_residual,
            objective: r.objective,
            status: format!("{:?}", r.status),
        }),
    })
}

pub fn render_report(r: &OptimizeReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("D = {}, N = {}, cost {}, seed {:#x}\n", r.dim, r.n, r.cost, r.seed));
    s.push_str(&format!("optimal cost        {:.12}\n", r.optimal_cost));
    s.push_str(&format!("covariant           {:.12}\n", r.covariant_cost));
    s.push_str(&format!("shifted by θ/2      {:.12}\n", r.shifted_half_cost));
    s.push_str(&format!(
        "strategy            {} with {} seed(s), {} see-saw iteration(s)\n",
        r.strategy, r.seed_count, r.see_saw_iterations
    ));
    s.push_str(&format!("completeness error  {:.3e}\n", r.completeness_residual));
    s.push_str("seeds (offset, trace, min eigenvalue)\n");
    for seed in &r.seeds {
        s.push_str(&format!("  {:>12.9} {:>12.6} {:>12.3e}\n", seed.offset, seed.trace, seed.min_eigenvalue));
    }
    s.push_str("state amplitudes (re, im)\n");
    for (k, (re, im)) in r.state_re.iter().zip(&r.state_im).enumerate() {
        s.push_str(&format!("  {k:>3} {re:>14.10} {im:>14.10}\n"));
    }
    if let Some(sol) = &r.solver {
        s.push_str(&format!(
            "solver              {} after {} iterations, primal {:.2e}, dual {:.2e}\n",
            sol.status, sol.iterations, sol.primal_residual, sol.dual_residual
        ));
    }
    s
}

pub fn optimize(settings: &Settings) -> CliResult<()> {
    let report = optimize_report(settings)?;
    print!("{}", render_report(&report));
    if let Some(path) = &settings.out {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(path, &(json + "\n"))?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfoRow {
    pub n: usize,
    pub covariant: f64,
    pub best_shift: f64,
    pub xi_star: f64,
    pub holevo: f64,
}

/// Perfect-discrimination strategy for `N ≤ D`; `|e⟩` with the shifted
/// covariant readout otherwise.
pub fn info_row(dim: usize, n: usize, bins: Option<usize>, xi_grid: usize) -> CliResult<InfoRow> {
    let grid = PhaseGrid::new(n)?;
    let cap = (n as f64).log2();
    if n <= dim {
        let (state, seed) = perfect_discrimination_strategy::<f64>(dim, grid)?;
        let meas = SeedMeasurement::covariant(grid, seed)?.expand();
        let i = mutual_information(&joint_distribution_explicit(&state, &meas, grid)?);
        let chi = holevo_bound(&state, grid)?.min(cap);
        return Ok(InfoRow { n, covariant: i, best_shift: i, xi_star: 0.0, holevo: chi });
    }
    let state = ProbeState::flat(dim);
    let model = match bins {
        Some(k) => OutcomeModel::Binned { bins: k },
        None => OutcomeModel::Sampled { outcomes: n },
    };
    let covariant = shifted_mutual_information(&state, grid, 0.0, model)?;
    let sweep = optimize_shift_mi(&state, grid, model, &uniform_shift_grid(grid, xi_grid))?;
    let (best_shift, xi_star) =
        if sweep.best_value > covariant { (sweep.best_value, sweep.best_shift) } else { (covariant, 0.0) };
    let chi = holevo_bound(&state, grid)?.min(cap);
    info!("N={n}: I(0) {covariant:.6}, best {best_shift:.6} at ξ = {xi_star:.6}");
    Ok(InfoRow { n, covariant, best_shift, xi_star, holevo: chi })
}

pub fn mutual_info_table(settings: &Settings) -> CliResult<Table> {
    if let Some(k) = settings.bins {
        if k < 2 {
            return Err(CliError::InvalidArgs("--bins must be at least 2".into()));
        }
    }
    let ns: Vec<usize> = settings.n.values().collect();
    let rows: Vec<InfoRow> = settings.pool()?.install(|| {
        ns.par_iter().map(|&n| info_row(settings.dim, n, settings.bins, settings.xi_grid)).collect::<CliResult<_>>()
    })?;
    let mut table = Table::new(&["N", "I_covariant", "I_best_shift", "xi_star", "holevo"]);
    let readout = match settings.bins {
        Some(k) => format!("binned K={k}"),
        None => "sampled K=N".into(),
    };
    table.comments.push(header("mutual-info", settings, &format!("readout={readout} xi_grid={}", settings.xi_grid)));
    for r in rows {
        table.rows.push(vec![
            Cell::Int(r.n),
            Cell::Float(r.covariant),
            Cell::Float(r.best_shift),
            Cell::Float(r.xi_star),
            Cell::Float(r.holevo),
        ]);
    }
    Ok(table)
}

pub fn mutual_info(settings: &Settings) -> CliResult<()> {
    let table = mutual_info_table(settings)?;
    let title = format!("Mutual information (bits), D = {}", settings.dim);
    emit(
        &table,
        settings.out.as_deref(),
        settings.svg.then_some((title.as_str(), "N", &["I_covariant", "I_best_shift", "holevo"][..])),
    )
}

pub fn dpss_table(settings: &Settings) -> CliResult<Table> {
    let (cost, state) = continuous_step_cost::<f64>(settings.dim, settings.sigma)?;
    let mut table = Table::new(&["k", "amplitude"]);
    table.comments.push(header("dpss", settings, &format!("sigma={:.16e}", settings.sigma)));
    table.comments.push(format!("continuous_step_cost={cost:.16e}"));
    for (k, a) in state.amplitudes().iter().enumerate() {
        table.rows.push(vec![Cell::Int(k), Cell::Float(a.re)]);
    }
    Ok(table)
}

pub fn dpss(settings: &Settings) -> CliResult<()> {
    let table = dpss_table(settings)?;
    let title = format!("Continuous-limit step-cost state, D = {}", settings.dim);
    emit(&table, settings.out.as_deref(), settings.svg.then_some((title.as_str(), "k", &["amplitude"][..])))
}
