//! Optimal strategies for estimating a phase that takes one of `N` equally
//! spaced values on a `D`-level probe.
//!
//! The probe `|φ₀⟩ = Σ_k c_k |k⟩` picks up the phase through
//! `U_φ = diag(e^{ikφ})`. A strategy is a probe together with a POVM whose
//! outcomes carry phase estimates; its quality is the average of an even,
//! periodic cost `C(φ − φ̃)` over the uniform prior on the grid.
//!
//! * [`qlinalg`]: Hermitian eigendecomposition, PSD projection, entropy.
//! * [`model`]: states, grids, costs, measurements and average costs.
//! * [`closedform`]: analytic reference strategies and continuous limits.
//! * [`optimizer`]: seed SDP, see-saw, seed-count escalation, shift sweeps.
//! * [`infotheory`]: mutual information and the Holevo bound.
//!
//! Everything is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.
//!
//! ```
//! use qphase::{closedform, model::PhaseGrid, optimizer, CostFunction};
//!
//! let cost = CostFunction::standard();
//! let grid = PhaseGrid::new(4).unwrap();
//! let best = optimizer::escalate_seed_count(3, grid, &cost, 2).unwrap();
//! assert!((best.cost - closedform::continuous_min_cost::<f64>(3)).abs() < 1e-6);
//! ```

pub mod closedform;
pub mod error;
pub mod infotheory;
pub mod model;
pub mod optimizer;
pub mod qlinalg;
pub mod scalar;

pub use error::{Error, Result};
pub use model::PhaseGrid;
pub use scalar::Real;

pub type HermitianMatrix = qlinalg::HermitianMatrix<f64>;
pub type EigenSystem = qlinalg::EigenSystem<f64>;
pub type ProbeState = model::ProbeState<f64>;
pub type CostFunction = model::CostFunction<f64>;
pub type SeedMeasurement = model::SeedMeasurement<f64>;
pub type ExplicitMeasurement = model::ExplicitMeasurement<f64>;
pub type StrategyResult = optimizer::StrategyResult<f64>;
pub type ShiftSweep = optimizer::ShiftSweep<f64>;
pub type JointDistribution = infotheory::JointDistribution<f64>;

pub type ProbeStateF32 = model::ProbeState<f32>;
pub type CostFunctionF32 = model::CostFunction<f32>;
