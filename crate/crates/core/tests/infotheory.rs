use proptest::prelude::*;
use qphase::closedform::perfect_discrimination_strategy;
use qphase::infotheory::{
    holevo_bound, joint_distribution, joint_distribution_explicit, mutual_information, optimize_shift_mi,
    shifted_mutual_information, OutcomeModel,
};
use qphase::model::{PhaseGrid, SeedMeasurement};
use qphase::optimizer::uniform_shift_grid;
use qphase::ProbeState;

#[test]
fn basis_readout_of_orthogonal_encoding() {
    let grid = PhaseGrid::new(8).unwrap();
    let (state, seed) = perfect_discrimination_strategy::<f64>(10, grid).unwrap();
    let meas = SeedMeasurement::covariant(grid, seed).unwrap().expand();
    let p = joint_distribution_explicit(&state, &meas, grid).unwrap();
    assert!((mutual_information(&p) - 3.0).abs() < 1e-10);
}

#[test]
fn holevo_examples() {
    for n in 1..=10usize {
        let state = ProbeState::flat_on_prefix(10, n).unwrap();
        let chi = holevo_bound(&state, PhaseGrid::new(n).unwrap()).unwrap();
        assert!((chi - (n as f64).log2()).abs() < 1e-10);
    }
    let e = ProbeState::flat(10);
    let mut last = 0.0;
    for n in 1..=20usize {
        let chi = holevo_bound(&e, PhaseGrid::new(n).unwrap()).unwrap();
        assert!(chi <= 10f64.log2() + 1e-10);
        if n >= 10 {
            assert!(chi >= last - 1e-12 || n % 10 != 0);
        }
        last = chi;
    }
    assert!((holevo_bound(&e, PhaseGrid::new(20).unwrap()).unwrap() - 10f64.log2()).abs() < 1e-10);
}

#[test]
fn binned_readout_converges_quadratically_in_bins() {
    let e = ProbeState::flat(10);
    let grid = PhaseGrid::new(30).unwrap();
    let i = |k| shifted_mutual_information(&e, grid, 0.0, OutcomeModel::Binned { bins: k }).unwrap();
    let (a, b, c) = (i(4096), i(8192), i(16384));
    assert!(a < b && b < c);
    assert!(b - a < 4e-6, "{a} {b}");
    let ratio = (b - a) / (c - b);
    assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
}

#[test]
fn binned_readout_does_not_depend_on_shift() {
    // the continuous POVM is covariant under every rotation, so ξ only moves bin edges
    let e = ProbeState::flat(10);
    let grid = PhaseGrid::new(14).unwrap();
    let s = optimize_shift_mi(&e, grid, OutcomeModel::Binned { bins: 4096 }, &uniform_shift_grid(grid, 16)).unwrap();
    let (lo, hi) = s.curve.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    assert!(hi - lo < 1e-8);
}

#[test]
fn optimal_shift_moves_from_zero_to_half_step() {
    let e = ProbeState::flat(10);
    let pick = |n: usize| {
        let grid = PhaseGrid::new(n).unwrap();
        let s =
            optimize_shift_mi(&e, grid, OutcomeModel::Sampled { outcomes: n }, &uniform_shift_grid(grid, 64)).unwrap();
        (s.best_shift, grid.spacing::<f64>())
    };
    let (x13, _) = pick(13);
    assert_eq!(x13, 0.0);
    let (x14, t14) = pick(14);
    assert!(x14 > t14 / 64.0 && x14 < t14 / 2.0 - t14 / 64.0, "{}", x14 / t14);
    let (x15, t15) = pick(15);
    assert!((x15 - t15 / 2.0).abs() <= t15 / 64.0);
}

#[test]
fn shifted_readout_beats_continuous_proxy() {
    let e = ProbeState::flat(10);
    let proxy =
        shifted_mutual_information(&e, PhaseGrid::new(512).unwrap(), 0.0, OutcomeModel::Sampled { outcomes: 512 })
            .unwrap();
    for n in (10..=60).step_by(5) {
        let grid = PhaseGrid::new(n).unwrap();
        let s =
            optimize_shift_mi(&e, grid, OutcomeModel::Sampled { outcomes: n }, &uniform_shift_grid(grid, 64)).unwrap();
        assert!(s.best_value >= proxy - 1e-3, "n={n}");
    }
}

#[test]
fn joint_distribution_rows_have_uniform_prior() {
    let s = ProbeState::from_real(&[0.1, 0.7, 0.7]).unwrap();
    let grid = PhaseGrid::new(5).unwrap();
    let p = joint_distribution(&s, grid, 0.3, OutcomeModel::Binned { bins: 32 }).unwrap();
    for r in p.row_marginals() {
        assert!((r - 0.2).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn information_is_bounded(re in prop::collection::vec(0.01f64..1.0, 2..6), n in 2usize..12, xi in 0.0f64..1.0, k in 2usize..40) {
        let s = ProbeState::from_real(&re).unwrap();
        let grid = PhaseGrid::new(n).unwrap();
        let shift = xi * grid.spacing::<f64>();
        let chi = holevo_bound(&s, grid).unwrap();
        let model = OutcomeModel::Binned { bins: k };
        let p = joint_distribution(&s, grid, shift, model).unwrap();
        let i = mutual_information(&p);
        prop_assert!(i >= 0.0);
        prop_assert!(i <= chi + 1e-6);
        prop_assert!(i <= (n as f64).log2().min((k as f64).log2()) + 1e-12);
        prop_assert!(mutual_information(&p.merge_column_pairs()) <= i + 1e-12);
        let moved = shifted_mutual_information(&s, grid, shift + grid.spacing::<f64>(), model).unwrap();
        prop_assert!((moved - i).abs() < 1e-10);
    }
}

#[test]
fn qubit_readout_bins() {
    let e = ProbeState::flat(2);
    let grid = PhaseGrid::new(2).unwrap();
    let p = joint_distribution(&e, grid, 0.0, OutcomeModel::Sampled { outcomes: 2 }).unwrap();
    assert!((p.get(0, 0) - 0.5).abs() < 1e-12 && (p.get(1, 1) - 0.5).abs() < 1e-12);
    assert!((mutual_information(&p) - 1.0).abs() < 1e-12);
    // four sampled outcomes leak a quarter of each row onto ±π/2
    let p = joint_distribution(&e, grid, 0.0, OutcomeModel::Sampled { outcomes: 4 }).unwrap();
    assert!((p.get(0, 0) - 0.25).abs() < 1e-12 && (p.get(0, 1) - 0.125).abs() < 1e-12 && p.get(0, 2).abs() < 1e-12);
    let single =
        joint_distribution(&e, PhaseGrid::new(1).unwrap(), 0.0, OutcomeModel::Sampled { outcomes: 4 }).unwrap();
    assert!(mutual_information(&single).abs() < 1e-14);
}
