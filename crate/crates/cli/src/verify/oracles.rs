//! Reference computations that share no code with the library's solvers.

use num_complex::Complex64;
use qphase::CostFunction;
use std::f64::consts::PI;

/// `(1/2π) ∫ C_step(φ) |Σ_k c_k e^{ikφ}|² dφ` for a real amplitude vector,
/// by composite Simpson over the zero-cost window and unit total mass.
pub fn step_cost_by_quadrature(c: &[f64], width: f64, intervals: usize) -> f64 {
    assert!(intervals.is_multiple_of(2), "Simpson needs an even interval count");
    let density = |x: f64| {
        let (re, im) = c
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (k, &a)| (re + a * (k as f64 * x).cos(), im + a * (k as f64 * x).sin()));
        re * re + im * im
    };
    let (a, b) = (-width / 2.0, width / 2.0);
    let h = (b - a) / intervals as f64;
    let mut s = density(a) + density(b);
    for i in 1..intervals {
        s += density(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let mass = c.iter().map(|x| x * x).sum::<f64>();
    mass - s * h / 3.0 / (2.0 * PI)
}

/// Average cost of qubit seeds `|v_s⟩⟨v_s|` at offsets `γ_s`, written out as
/// the double sum over true phases `nθ` and outcomes `(m, s)` with element
/// `(1/N) U_{mθ}|v_s⟩⟨v_s|U_{mθ}†` and estimate `mθ + γ_s`.
pub struct QubitSeedCost {
    n: usize,
    psi: Vec<[Complex64; 2]>,
    costs: Vec<f64>,
    seeds: usize,
}

impl QubitSeedCost {
    pub fn new(state: [Complex64; 2], n: usize, offsets: &[f64], cost: &CostFunction) -> Self {
        let theta = 2.0 * PI / n as f64;
        let mut psi = Vec::with_capacity(n * n);
        let mut costs = Vec::with_capacity(offsets.len() * n * n);
        for t in 0..n {
            for m in 0..n {
                let rel = (t as f64 - m as f64) * theta;
                psi.push([state[0], state[1] * Complex64::from_polar(1.0, rel)]);
            }
        }
        for &g in offsets {
            for t in 0..n {
                for m in 0..n {
                    costs.push(cost.value(t as f64 * theta - m as f64 * theta - g));
                }
            }
        }
        Self { n, psi, costs, seeds: offsets.len() }
    }

    pub fn eval(&self, vectors: &[[Complex64; 2]]) -> f64 {
        let nn = self.n * self.n;
        let mut total = 0.0;
        for (s, v) in vectors.iter().enumerate().take(self.seeds) {
            let cs = &self.costs[s * nn..(s + 1) * nn];
            for (p, c) in self.psi.iter().zip(cs) {
                let amp = v[0].conj() * p[0] + v[1].conj() * p[1];
                total += amp.norm_sqr() * c;
            }
        }
        total / nn as f64
    }
}

/// Rank-one qubit seeds with diagonals `(a, d)` and `(1 − a, 1 − d)` and
/// coherence phases `β₀, β₁`; `x = [a, d, β₀, β₁]`.
fn two_seed_vectors(x: &[f64; 4]) -> [[Complex64; 2]; 2] {
    let a = x[0].clamp(0.0, 1.0);
    let d = x[1].clamp(0.0, 1.0);
    let v = |a: f64, d: f64, beta: f64| [Complex64::new(a.sqrt(), 0.0), Complex64::from_polar(d.sqrt(), -beta)];
    [v(a, d, x[2]), v(1.0 - a, 1.0 - d, x[3])]
}

/// Compass search from `x` with initial steps `steps`, halving on failure.
fn polish<const K: usize>(
    f: impl Fn(&[f64; K]) -> f64,
    mut x: [f64; K],
    mut steps: [f64; K],
    bounded: [bool; K],
) -> f64 {
    let mut best = f(&x);
    while steps.iter().any(|&s| s > 1e-10) {
        let mut moved = false;
        for i in 0..K {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[i] += dir * steps[i];
                if bounded[i] {
                    y[i] = y[i].clamp(0.0, 1.0);
                }
                let v = f(&y);
                if v < best - 1e-15 {
                    best = v;
                    x = y;
                    moved = true;
                }
            }
        }
        if !moved {
            for s in steps.iter_mut() {
                *s *= 0.5;
            }
        }
    }
    best
}

/// Minimum over rank-one qubit seed measurements by exhaustive grid search
/// (`points` per parameter) followed by compass refinement.
pub fn qubit_seed_minimum(model: &QubitSeedCost, points: usize) -> f64 {
    let beta = |i: usize| 2.0 * PI * i as f64 / points as f64;
    match model.seeds {
        1 => {
            let f = |x: &[f64; 1]| model.eval(&[[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, -x[0])]]);
            let start = (0..points * points)
                .map(|i| [2.0 * PI * i as f64 / (points * points) as f64])
                .min_by(|a, b| f(a).total_cmp(&f(b)))
                .expect("nonempty");
            polish(f, start, [2.0 * PI / (points * points) as f64], [false])
        }
        2 => {
            let f = |x: &[f64; 4]| model.eval(&two_seed_vectors(x));
            let frac = |i: usize| i as f64 / (points - 1) as f64;
            let mut best = (f64::INFINITY, [0.0; 4]);
            for i in 0..points {
                for j in 0..points {
                    for k in 0..points {
                        for l in 0..points {
                            let x = [frac(i), frac(j), beta(k), beta(l)];
                            let v = f(&x);
                            if v < best.0 {
                                best = (v, x);
                            }
                        }
                    }
                }
            }
            let h = 1.0 / (points - 1) as f64;
            let hb = 2.0 * PI / points as f64;
            polish(f, best.1, [h, h, hb, hb], [true, true, false, false])
        }
        s => panic!("qubit oracle handles one or two seeds, not {s}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_of_single_level() {
        assert!((step_cost_by_quadrature(&[1.0], 1.0, 64) - (1.0 - 1.0 / (2.0 * PI))).abs() < 1e-14);
    }

    #[test]
    fn qubit_cost_of_flat_seed() {
        // flat seed on |e⟩ with the standard cost, summed by hand
        let e = [Complex64::new(0.5f64.sqrt(), 0.0); 2];
        let model = QubitSeedCost::new(e, 3, &[0.0], &CostFunction::standard());
        let flat = [[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]];
        let theta = 2.0 * PI / 3.0;
        let expected: f64 = (0..3)
            .map(|r| {
                let p = (1.0 + (r as f64 * theta).cos()) / 3.0;
                p * 4.0 * (r as f64 * theta / 2.0).sin().powi(2)
            })
            .sum();
        assert!((model.eval(&flat) - expected).abs() < 1e-14);
        assert!((qubit_seed_minimum(&model, 16) - expected).abs() < 1e-9);
    }
}
