//! Allocation-law analysis for heterogeneous hardware.
//!
//! The classical scaling laws ask how much speedup replication buys. This
//! crate asks the modern variant: how should a constrained hardware
//! budget be split between specialized logic and programmable compute
//! when part of the workload keeps absorbing extra compute productively?
//!
//! A workload is the pair `(S, R)`: the value-scalable fraction and the
//! specialization efficiency ratio. Giving the fraction `x` of the budget
//! to specialized logic yields the normalized execution time
//!
//! ```text
//! T(x) = (1 - S) / (1 + (R - 1) x) + S / (1 - x)
//! ```
//!
//! which is strictly convex with a unique optimum: a closed-form interior
//! allocation when `S < 1 - 1/R`, and `x* = 0` (collapse) otherwise. The
//! crate computes the objective and its derivatives, the optimum, the
//! threshold pair `S_c = 1 - 1/R` and `R_c = 1/(1 - S)`, a
//! bandwidth-friction extension where the effective ratio decays with
//! allocation, classical Amdahl/Gustafson curves, sweep datasets for the
//! standard figures, and a JSON scenario format with deterministic
//! CSV/JSON emission.
//!
//! ```
//! use scalelaw::WorkloadPoint;
//!
//! let point = WorkloadPoint::new(0.2, 10.0)?;
//! let opt = point.optimal_allocation()?;
//! assert!((opt.x_star.value() - 1.0 / 3.0).abs() < 1e-12);
//! assert!((opt.time.value() - 0.5).abs() < 1e-12);
//! # Ok::<(), scalelaw::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod friction;
pub mod model;
pub mod numerics;
pub mod scenario;
pub mod sweep;

pub use error::Error;
pub use friction::FrictionModel;
pub use model::{
    collapse_threshold, critical_ratio, AllocationFraction, ClassicParams, NormalizedTime,
    OptimalAllocation, Regime, SolveMethod, WorkloadPoint, EPS_X,
};
