//! Bandwidth-limited extension of the allocation model.
//!
//! Instead of a constant efficiency ratio, the specialized side sees an
//! effective ratio that decays as its allocation grows:
//!
//! ```text
//! R_eff(x) = R_max / (1 + gamma * R_max * x)
//! T_mem(x) = (1 - S) / (1 + (R_eff(x) - 1) x) + S / (1 - x)
//! ```
//!
//! `gamma` summarizes memory friction: how quickly data supply fails to
//! keep up with added specialized compute. Friction deforms the interior
//! of the surface (the optimum moves toward zero) but leaves the collapse
//! threshold at `S_c = 1 - 1/R_max`, because `R_eff(0) = R_max` makes the
//! origin derivative independent of `gamma`.
//!
//! Heavy friction can push `R_eff` below 1, meaning specialization is a
//! net loss at that allocation. The formula stays finite there and is
//! evaluated as written.

use crate::error::Error;
use crate::model::{
    validate_efficiency_ratio, validate_scalable_fraction, AllocationFraction, NormalizedTime,
    OptimalAllocation, Regime, SolveMethod, EPS_X,
};
use crate::numerics;

// Coarse seeding grid for the numeric solver. T_mem is not proven convex,
// so the solver brackets the best coarse sample instead of trusting a
// single descent.
const SEED_GRID: usize = 4096;
const REFINE_TOL: f64 = 1e-10;

/// Parameters of the bandwidth-limited variant: peak ratio `R_max` and
/// memory-friction coefficient `gamma`. `gamma = 0` reduces every
/// operation to the baseline model with `R = R_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionModel {
    r_max: f64,
    gamma: f64,
}

impl FrictionModel {
    pub fn new(r_max: f64, gamma: f64) -> Result<Self, Error> {
        validate_efficiency_ratio("r_max", r_max)?;
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
                constraint: "[0, inf)",
            });
        }
        Ok(Self { r_max, gamma })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Effective ratio `R_eff(x) = R_max / (1 + gamma R_max x)`.
    pub fn effective_ratio(&self, x: AllocationFraction) -> f64 {
        self.r_max / (1.0 + self.gamma * self.r_max * x.value())
    }

    /// Memory-aware execution time `T_mem`; exactly 1 at `x = 0`.
    pub fn execution_time(
        &self,
        scalable_fraction: f64,
        x: AllocationFraction,
    ) -> Result<NormalizedTime, Error> {
        let s = validate_scalable_fraction(scalable_fraction)?;
        Ok(NormalizedTime::from_raw(self.raw_time(s, x.value())))
    }

    fn raw_time(&self, s: f64, x: f64) -> f64 {
        let r_eff = self.r_max / (1.0 + self.gamma * self.r_max * x);
        (1.0 - s) / (1.0 + (r_eff - 1.0) * x) + s / (1.0 - x)
    }

    /// `dT_mem/dx` at the origin: `-(1-S)(R_max - 1) + S`, independent of
    /// `gamma`.
    pub fn origin_derivative(&self, scalable_fraction: f64) -> Result<f64, Error> {
        let s = validate_scalable_fraction(scalable_fraction)?;
        Ok(-(1.0 - s) * (self.r_max - 1.0) + s)
    }

    /// Collapse threshold `1 - 1/R_max`; friction does not move it.
    pub fn collapse_threshold(&self) -> f64 {
        1.0 - 1.0 / self.r_max
    }

    /// Minimizes `T_mem` over `[0, 1 - EPS_X]`.
    ///
    /// In the collapse regime the answer is closed-form: for `S >= S_c`
    /// the friction surface dominates the baseline pointwise
    /// (`T_mem(x) >= T(x) >= 1 = T_mem(0)`), so `x* = 0` without any
    /// convexity assumption. Otherwise the minimum is found numerically:
    /// a coarse grid locates the best bracket and golden-section search
    /// refines it.
    pub fn optimal_allocation(&self, scalable_fraction: f64) -> Result<OptimalAllocation, Error> {
        let s = validate_scalable_fraction(scalable_fraction)?;
        if s >= self.collapse_threshold() {
            return Ok(OptimalAllocation::collapsed(SolveMethod::ClosedForm));
        }
        if s == 0.0 {
            return Err(Error::Degenerate {
                name: "scalable_fraction",
                reason: "S = 0 has no finite optimum; the objective improves all the way to the excluded endpoint x -> 1",
            });
        }

        let objective = |x: f64| self.raw_time(s, x);
        let hi = 1.0 - EPS_X;
        let seed = numerics::grid_minimum(objective, 0.0, hi, SEED_GRID)?;
        let step = hi / ((SEED_GRID - 1) as f64);
        let bracket_lo = (seed.x_min - step).max(0.0);
        let bracket_hi = (seed.x_min + step).min(hi);
        let refined = numerics::minimize_bracketed(objective, bracket_lo, bracket_hi, REFINE_TOL)?;

        let x_star = AllocationFraction::new(refined.x_min)?;
        Ok(OptimalAllocation {
            x_star,
            time: NormalizedTime::from_raw(refined.f_min),
            regime: Regime::Interior,
            method: SolveMethod::Numeric,
        })
    }
}
