//! Acceptance checks with measured values and pinned tolerances.

pub mod oracles;

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use qphase::closedform::{continuous_step_cost, flat_seed, optimal_continuous_state, perfect_discrimination_strategy};
use qphase::infotheory::{
    holevo_bound, joint_distribution_explicit, mutual_information, optimize_shift_mi, shifted_mutual_information,
    OutcomeModel,
};
use qphase::model::{
    average_cost_explicit, covariant_cost, random_measurement, subcovariance_residual, symmetrize_measurement,
    PhaseGrid, SeedMeasurement,
};
use qphase::optimizer::{
    escalate_seed_count_with, shifted_strategy_cost, sweep_shift, uniform_shift_grid, AdmmSettings, SdpProblem,
    SeeSawSettings, DEFAULT_SHIFT_POINTS,
};
use qphase::{CostFunction, ProbeState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::args::{CostName, NRange, Settings};
use crate::commands::cost_sweep_table;
use crate::error::{CliError, CliResult};
use oracles::{qubit_seed_minimum, step_cost_by_quadrature, QubitSeedCost};

/// Tolerances and bounds of the acceptance checks. Each can be overridden
/// from the `[tolerances]` table of a config file.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub continuous_baseline: f64,
    pub zero_cost: f64,
    pub plateau: f64,
    pub transition_margin: f64,
    pub continuous_bound: f64,
    pub dpss_quadrature: f64,
    pub dpss_palindrome: f64,
    pub symmetrization: f64,
    pub sdp_oracle: f64,
    pub flat_curve: f64,
    pub mi_saturation: f64,
    pub mi_proxy: f64,
    pub gap_min: f64,
    pub gap_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            continuous_baseline: 1e-10,
            zero_cost: 1e-8,
            plateau: 1e-6,
            transition_margin: 1e-7,
            continuous_bound: 1e-8,
            dpss_quadrature: 1e-6,
            dpss_palindrome: 1e-8,
            symmetrization: 1e-10,
            sdp_oracle: 1e-4,
            flat_curve: 1e-8,
            mi_saturation: 1e-6,
            mi_proxy: 1e-3,
            gap_min: 1.0,
            gap_max: 1.5,
        }
    }
}

impl Tolerances {
    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "continuous-baseline" => &mut self.continuous_baseline,
            "zero-cost" => &mut self.zero_cost,
            "plateau" => &mut self.plateau,
            "transition-margin" => &mut self.transition_margin,
            "continuous-bound" => &mut self.continuous_bound,
            "dpss-quadrature" => &mut self.dpss_quadrature,
            "dpss-palindrome" => &mut self.dpss_palindrome,
            "symmetrization" => &mut self.symmetrization,
            "sdp-oracle" => &mut self.sdp_oracle,
            "flat-curve" => &mut self.flat_curve,
            "mi-saturation" => &mut self.mi_saturation,
            "mi-proxy" => &mut self.mi_proxy,
            "gap-min" => &mut self.gap_min,
            "gap-max" => &mut self.gap_max,
            _ => return None,
        })
    }

    pub fn with_overrides<'a>(mut self, overrides: impl IntoIterator<Item = (&'a String, &'a f64)>) -> CliResult<Self> {
        for (key, &value) in overrides {
            *self.slot(key).ok_or_else(|| CliError::InvalidArgs(format!("unknown tolerance '{key}'")))? = value;
        }
        Ok(self)
    }
}

pub struct Context {
    pub tol: Tolerances,
    pub seed: u64,
}

impl Context {
    pub fn new(tol: Tolerances, seed: u64) -> Self {
        Self { tol, seed }
    }

    fn search(&self) -> SeeSawSettings<f64> {
        SeeSawSettings { rng_seed: self.seed, ..SeeSawSettings::default() }
    }
}

impl Default for Context {
    fn default() -> Self {
        Self::new(Tolerances::default(), qphase::optimizer::DEFAULT_RNG_SEED)
    }
}

/// One measured quantity against its limit.
#[derive(Clone, Debug)]
pub struct Check {
    pub what: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(what: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { what: what.into(), value, limit, pass: value <= limit }
    }

    fn at_least(what: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { what: what.into(), value, limit, pass: value >= limit }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:.3e} (limit {:.1e})", self.what, self.value, self.limit)
    }
}

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub slow: bool,
    pub run: fn(&Context) -> CliResult<Vec<Check>>,
}

pub struct Report {
    pub id: usize,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub seconds: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {:>2} {:<22} ", self.id, self.name)?;
        match &self.error {
            Some(e) => write!(f, "error: {e}")?,
            None => {
                let parts: Vec<String> = self.checks.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join("; "))?;
            }
        }
        write!(f, " [{:.2} s]", self.seconds)
    }
}

pub fn run_criterion(c: &Criterion, ctx: &Context) -> Report {
    let start = Instant::now();
    let (checks, error) = match (c.run)(ctx) {
        Ok(checks) => (checks, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    Report { id: c.id, name: c.name, checks, error, seconds: start.elapsed().as_secs_f64() }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "continuous-baseline", slow: false, run: continuous_baseline },
        Criterion { id: 2, name: "zero-cost", slow: false, run: zero_cost },
        Criterion { id: 3, name: "discrimination-plateau", slow: false, run: discrimination_plateau },
        Criterion { id: 4, name: "transition-structure", slow: false, run: transition_structure },
        Criterion { id: 5, name: "dpss-baseline", slow: false, run: dpss_baseline },
        Criterion { id: 6, name: "symmetrization", slow: false, run: symmetrization },
        Criterion { id: 7, name: "sdp-oracle", slow: false, run: sdp_oracle },
        Criterion { id: 8, name: "qubit-shift-signs", slow: false, run: qubit_shift_signs },
        Criterion { id: 9, name: "mi-saturation", slow: false, run: mi_saturation },
        Criterion { id: 10, name: "mi-shift-pattern", slow: false, run: mi_shift_pattern },
        Criterion { id: 11, name: "asymptotic-gap", slow: true, run: asymptotic_gap },
        Criterion { id: 12, name: "determinism", slow: false, run: determinism },
    ]
}

/// Without a filter every fast check runs; `all` adds the slow ones;
/// otherwise checks whose name contains the filter or whose number equals it.
pub fn selected(filter: Option<&str>) -> Vec<Criterion> {
    criteria()
        .into_iter()
        .filter(|c| match filter {
            None => !c.slow,
            Some("all") => true,
            Some(f) => c.name.contains(f) || f.parse::<usize>() == Ok(c.id),
        })
        .collect()
}

pub fn verify(settings: &Settings) -> CliResult<bool> {
    let tol = Tolerances::default().with_overrides(&settings.tolerances)?;
    let ctx = Context::new(tol, settings.seed);
    let chosen = selected(settings.filter.as_deref());
    if chosen.is_empty() {
        return Err(CliError::InvalidArgs(format!("no check matches filter {:?}", settings.filter)));
    }
    let pool = settings.pool()?;
    let mut ok = true;
    for c in &chosen {
        let report = pool.install(|| run_criterion(c, &ctx));
        ok &= report.passed();
        println!("{report}");
    }
    let passed = if ok { "all passed" } else { "FAILED" };
    println!("{} check(s), {passed}", chosen.len());
    Ok(ok)
}

fn c1() -> CostFunction {
    CostFunction::fourier(vec![15.0 / 6.0, -8.0 / 3.0, 1.0 / 6.0]).expect("valid series")
}

fn c2() -> CostFunction {
    CostFunction::fourier(vec![1.25, -1.0, -0.25]).expect("valid series")
}

fn step() -> CostFunction {
    CostFunction::step(PI / 10.0).expect("valid width")
}

fn variants() -> [(&'static str, CostFunction); 3] {
    [("standard", CostFunction::standard()), ("step", step()), ("fourier", c1())]
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn escalated(
    dim: usize,
    ns: impl IntoParallelIterator<Item = usize>,
    cost: &CostFunction,
    ctx: &Context,
) -> CliResult<Vec<(usize, f64)>> {
    let search = ctx.search();
    ns.into_par_iter()
        .map(|n| Ok((n, escalate_seed_count_with(dim, PhaseGrid::new(n)?, cost, 4, &search)?.cost)))
        .collect()
}

fn continuous_baseline(ctx: &Context) -> CliResult<Vec<Check>> {
    let mut worst = 0.0f64;
    for d in 2..=30usize {
        let grid = PhaseGrid::new(d + 1)?;
        let c = covariant_cost(&optimal_continuous_state(d), &flat_seed(d), grid, &CostFunction::standard())?;
        worst = worst.max((c - 2.0 * (1.0 - (PI / (d + 1) as f64).cos())).abs());
    }
    Ok(vec![Check::at_most("max |C - 2(1-cos(pi/(D+1)))| over D=2..30", worst, ctx.tol.continuous_baseline)])
}

fn zero_cost(ctx: &Context) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for (label, cost) in variants() {
        let costs = escalated(10, 2..=10usize, &cost, ctx)?;
        checks.push(Check::at_most(
            format!("{label}: max cost N=2..10"),
            max_of(costs.iter().map(|c| c.1)),
            ctx.tol.zero_cost,
        ));
    }
    Ok(checks)
}

fn discrimination_plateau(ctx: &Context) -> CliResult<Vec<Check>> {
    let costs = escalated(10, 11..=20usize, &step(), ctx)?;
    let dev = max_of(costs.iter().map(|&(n, c)| (c - (1.0 - 10.0 / n as f64)).abs()));
    Ok(vec![Check::at_most("max |C - (1 - 10/N)| N=11..20", dev, ctx.tol.plateau)])
}

fn transition_structure(ctx: &Context) -> CliResult<Vec<Check>> {
    let cost = step();
    let gap = |n: usize| -> CliResult<f64> {
        let grid = PhaseGrid::new(n)?;
        let half = grid.spacing::<f64>() / 2.0;
        Ok(shifted_strategy_cost(10, grid, &cost, 0.0)? - shifted_strategy_cost(10, grid, &cost, half)?)
    };
    let shifted_wins: Vec<f64> = (21..=40usize).into_par_iter().map(gap).collect::<CliResult<_>>()?;
    let covariant_wins: Vec<f64> = (41..=60usize).into_par_iter().map(gap).collect::<CliResult<_>>()?;
    let (limit, _) = continuous_step_cost::<f64>(10, PI / 10.0)?;
    let optimal = escalated(10, 2..=120usize, &cost, ctx)?;
    let m = ctx.tol.transition_margin;
    Ok(vec![
        Check::at_least("N=21..40 min(cov - half)", min_of(shifted_wins), m),
        Check::at_most("N=41..60 max(cov - half)", max_of(covariant_wins), m),
        Check::at_most(
            "N<=120 max(opt - continuous)",
            max_of(optimal.iter().map(|c| c.1 - limit)),
            ctx.tol.continuous_bound,
        ),
    ])
}

fn dpss_baseline(ctx: &Context) -> CliResult<Vec<Check>> {
    let (cost, state) = continuous_step_cost::<f64>(10, PI / 10.0)?;
    let c: Vec<f64> = state.amplitudes().iter().map(|z| z.re).collect();
    let imag = max_of(state.amplitudes().iter().map(|z| z.im.abs()));
    let q = step_cost_by_quadrature(&c, PI / 10.0, 1 << 14);
    let palindrome = max_of((0..c.len()).map(|k| (c[k] - c[c.len() - 1 - k]).abs())).max(imag);
    Ok(vec![
        Check::at_most("|eigenvalue - quadrature|", (cost - q).abs(), ctx.tol.dpss_quadrature),
        Check::at_most("max |c_k - c_(D-1-k)|", palindrome, ctx.tol.dpss_palindrome),
    ])
}

fn symmetrization(ctx: &Context) -> CliResult<Vec<Check>> {
    let grid = PhaseGrid::new(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut cost_dev = 0.0f64;
    let mut residual = 0.0f64;
    for _ in 0..100 {
        let outcomes = rng.random_range(2..=6);
        let meas = random_measurement::<f64, _>(3, outcomes, &mut rng)?;
        let amps: Vec<Complex64> =
            (0..3).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let state = ProbeState::new(amps)?;
        let sym = symmetrize_measurement(&meas, grid);
        residual = residual.max(subcovariance_residual(&sym, grid));
        for (_, cost) in variants() {
            let a = average_cost_explicit(&state, &meas, grid, &cost)?;
            let b = average_cost_explicit(&state, &sym, grid, &cost)?;
            cost_dev = cost_dev.max((a - b).abs());
        }
    }
    Ok(vec![
        Check::at_most("max |C(sym) - C(orig)|", cost_dev, ctx.tol.symmetrization),
        Check::at_most("max conjugation residual", residual, ctx.tol.symmetrization),
    ])
}

fn sdp_oracle(ctx: &Context) -> CliResult<Vec<Check>> {
    let e = [Complex64::new(0.5f64.sqrt(), 0.0); 2];
    let state = ProbeState::new(e.to_vec())?;
    let cases: Vec<(usize, usize, usize)> = [3usize, 4, 5]
        .iter()
        .flat_map(|&n| [1usize, 2].into_iter().flat_map(move |s| (0..3).map(move |c| (n, s, c))))
        .collect();
    let devs: Vec<f64> = cases
        .par_iter()
        .map(|&(n, s, c)| {
            let cost = &variants()[c].1;
            let grid = PhaseGrid::new(n)?;
            let problem = SdpProblem::for_state(&state, grid, cost, s)?;
            let sdp = problem.solve(&AdmmSettings::default(), None)?.report.objective;
            let brute = qubit_seed_minimum(&QubitSeedCost::new(e, n, problem.offsets(), cost), 32);
            Ok((sdp - brute).abs())
        })
        .collect::<CliResult<_>>()?;
    Ok(vec![Check::at_most("max |SDP - grid search| N=3..5 S=1,2", max_of(devs), ctx.tol.sdp_oracle)])
}

fn periodic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

fn qubit_shift_signs(ctx: &Context) -> CliResult<Vec<Check>> {
    let grid = PhaseGrid::new(3)?;
    let theta = grid.spacing::<f64>();
    let shifts = uniform_shift_grid(grid, DEFAULT_SHIFT_POINTS);
    let resolution = theta / DEFAULT_SHIFT_POINTS as f64;
    let flat = sweep_shift(2, grid, &CostFunction::standard(), &shifts)?;
    let range = max_of(flat.curve.iter().map(|p| p.1)) - min_of(flat.curve.iter().map(|p| p.1));
    let s1 = sweep_shift(2, grid, &c1(), &shifts)?;
    let s2 = sweep_shift(2, grid, &c2(), &shifts)?;
    Ok(vec![
        Check::at_most("C1 |argmin - pi/3|", periodic_distance(s1.best_shift, PI / 3.0, theta), resolution),
        Check::at_most("C2 |argmin - 0|", periodic_distance(s2.best_shift, 0.0, theta), resolution),
        Check::at_most("C0 curve range", range, ctx.tol.flat_curve),
    ])
}

fn mi_saturation(ctx: &Context) -> CliResult<Vec<Check>> {
    let mut info_dev = 0.0f64;
    let mut holevo_dev = 0.0f64;
    for n in 2..=10usize {
        let grid = PhaseGrid::new(n)?;
        let (state, seed) = perfect_discrimination_strategy::<f64>(10, grid)?;
        let meas = SeedMeasurement::covariant(grid, seed)?.expand();
        let i = mutual_information(&joint_distribution_explicit(&state, &meas, grid)?);
        info_dev = info_dev.max((i - (n as f64).log2()).abs());
        holevo_dev = holevo_dev.max((i - holevo_bound(&state, grid)?).abs());
    }
    Ok(vec![
        Check::at_most("max |I - log2 N|", info_dev, ctx.tol.mi_saturation),
        Check::at_most("max |I - chi|", holevo_dev, ctx.tol.mi_saturation),
    ])
}

fn best_shift_info(n: usize) -> CliResult<(f64, f64, f64)> {
    let grid = PhaseGrid::new(n)?;
    let sweep = optimize_shift_mi(
        &ProbeState::flat(10),
        grid,
        OutcomeModel::Sampled { outcomes: n },
        &uniform_shift_grid(grid, DEFAULT_SHIFT_POINTS),
    )?;
    Ok((sweep.best_shift, sweep.best_value, grid.spacing()))
}

fn mi_shift_pattern(ctx: &Context) -> CliResult<Vec<Check>> {
    let e = ProbeState::flat(10);
    let proxy = shifted_mutual_information(&e, PhaseGrid::new(512)?, 0.0, OutcomeModel::Sampled { outcomes: 512 })?;
    let rows: Vec<(usize, (f64, f64, f64))> =
        (10..=60usize).into_par_iter().map(|n| best_shift_info(n).map(|r| (n, r))).collect::<CliResult<_>>()?;
    let get = |n: usize| rows.iter().find(|r| r.0 == n).expect("row present").1;
    let (x13, _, t13) = get(13);
    let (x14, _, t14) = get(14);
    let (x15, _, t15) = get(15);
    let res = |t: f64| t / DEFAULT_SHIFT_POINTS as f64;
    let interior = (x14 - res(t14)).min(t14 / 2.0 - res(t14) - x14) / t14;
    let excess = min_of(rows.iter().map(|r| r.1 .1 - proxy));
    Ok(vec![
        Check::at_most("N=13 xi*/theta", periodic_distance(x13, 0.0, t13) / t13, 1.0 / DEFAULT_SHIFT_POINTS as f64),
        Check::at_least("N=14 interior margin/theta", interior, 0.0),
        Check::at_most(
            "N=15 |xi* - pi/15|/theta",
            periodic_distance(x15, t15 / 2.0, t15) / t15,
            1.0 / DEFAULT_SHIFT_POINTS as f64,
        ),
        Check::at_least("N=10..60 min I - I(512)", excess, -ctx.tol.mi_proxy),
    ])
}

fn asymptotic_gap(ctx: &Context) -> CliResult<Vec<Check>> {
    let dim = 128;
    let i = shifted_mutual_information(
        &ProbeState::flat(dim),
        PhaseGrid::new(1024)?,
        0.0,
        OutcomeModel::default_binned(dim),
    )?;
    let gap = (dim as f64).log2() - i;
    Ok(vec![
        Check::at_least("log2 D - I (low)", gap, ctx.tol.gap_min),
        Check::at_most("log2 D - I (high)", gap, ctx.tol.gap_max),
    ])
}

pub fn determinism_settings(seed: u64, jobs: usize) -> Settings {
    Settings {
        dim: 6,
        n: NRange { start: 2, end: 18 },
        cost: CostName::Step,
        sigma: PI / 10.0,
        alphas: None,
        seeds_max: 3,
        bins: None,
        xi_grid: DEFAULT_SHIFT_POINTS,
        out: None,
        svg: false,
        jobs: Some(jobs),
        seed,
        timings: false,
        filter: None,
        tolerances: Default::default(),
    }
}

fn determinism(ctx: &Context) -> CliResult<Vec<Check>> {
    let first = cost_sweep_table(&determinism_settings(ctx.seed, 1))?.to_csv();
    let second = cost_sweep_table(&determinism_settings(ctx.seed, 2))?.to_csv();
    let differing =
        first.bytes().zip(second.bytes()).filter(|(a, b)| a != b).count() + first.len().abs_diff(second.len());
    Ok(vec![Check::at_most("differing CSV bytes", differing as f64, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters() {
        let names = |f| selected(f).iter().map(|c| c.name).collect::<Vec<_>>();
        assert_eq!(names(Some("dpss")), vec!["dpss-baseline"]);
        assert_eq!(names(None).len(), 11);
        assert!(!names(None).contains(&"asymptotic-gap"));
        assert_eq!(names(Some("all")).len(), 12);
        assert_eq!(names(Some("11")), vec!["asymptotic-gap"]);
    }

    #[test]
    fn overrides() {
        let mut map = std::collections::BTreeMap::new();
        map.insert("dpss-quadrature".to_string(), 0.5);
        assert_eq!(Tolerances::default().with_overrides(&map).unwrap().dpss_quadrature, 0.5);
        map.insert("nope".to_string(), 0.5);
        assert!(Tolerances::default().with_overrides(&map).is_err());
    }
}
