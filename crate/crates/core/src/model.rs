//! Closed-form mathematics of the allocation model and the classical laws.
//!
//! A workload is described by its value-scalable fraction `S` and the
//! efficiency ratio `R` of specialized over programmable hardware on the
//! bounded share. Giving a fraction `x` of the constrained budget to
//! specialized logic yields the normalized execution time
//!
//! ```text
//! T(x) = (1 - S) / (1 + (R - 1) x) + S / (1 - x)
//! ```
//!
//! `T` is strictly convex on `[0, 1)`, so the optimum is unique: interior
//! (`x* > 0`) when `S < 1 - 1/R`, pinned at `x* = 0` otherwise. Both the
//! threshold pair (`S_c`, `R_c`) and the interior optimum have closed
//! forms, implemented here together with the classical Amdahl and
//! Gustafson laws for reference.

use crate::error::Error;

/// Numerical clamp keeping allocations away from the pole at `x = 1`:
/// valid allocations live in `[0, 1 - EPS_X]`.
pub const EPS_X: f64 = 1e-9;

pub(crate) fn validate_scalable_fraction(s: f64) -> Result<f64, Error> {
    if s.is_finite() && (0.0..=1.0).contains(&s) {
        Ok(s)
    } else {
        Err(Error::OutOfRange {
            name: "scalable_fraction",
            value: s,
            constraint: "[0, 1]",
        })
    }
}

pub(crate) fn validate_efficiency_ratio(name: &'static str, r: f64) -> Result<f64, Error> {
    if r.is_finite() && r >= 1.0 {
        Ok(r)
    } else {
        Err(Error::OutOfRange {
            name,
            value: r,
            constraint: "[1, inf)",
        })
    }
}

/// Share of the constrained hardware budget given to specialized logic,
/// clamped to `[0, 1 - EPS_X]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AllocationFraction(f64);

impl AllocationFraction {
    /// No specialization at all.
    pub const ZERO: Self = Self(0.0);
    /// Largest admitted allocation, one clamp step below the pole.
    pub const MAX: Self = Self(1.0 - EPS_X);

    pub fn new(value: f64) -> Result<Self, Error> {
        if value.is_finite() && (0.0..=1.0 - EPS_X).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::OutOfRange {
                name: "allocation",
                value,
                constraint: "[0, 1 - 1e-9]",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Execution time scaled so the unspecialized configuration (`x = 0`)
/// takes exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormalizedTime(f64);

impl NormalizedTime {
    pub(crate) const ONE: Self = Self(1.0);

    pub(crate) fn from_raw(value: f64) -> Self {
        debug_assert!(value.is_finite() && value > 0.0);
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Where the unique optimum of `T` sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `S < 1 - 1/R`: a strictly positive allocation pays off.
    Interior,
    /// `S >= 1 - 1/R`: the optimum is pinned at `x* = 0`.
    Collapse,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Interior => "interior",
            Regime::Collapse => "collapse",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How an optimum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedForm,
    Numeric,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::ClosedForm => "closed_form",
            SolveMethod::Numeric => "numeric",
        }
    }
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result record of an optimization: the minimizer, the time there, the
/// regime, and how it was computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalAllocation {
    pub x_star: AllocationFraction,
    pub time: NormalizedTime,
    pub regime: Regime,
    pub method: SolveMethod,
}

impl OptimalAllocation {
    pub(crate) fn collapsed(method: SolveMethod) -> Self {
        Self {
            x_star: AllocationFraction::ZERO,
            time: NormalizedTime::ONE,
            regime: Regime::Collapse,
            method,
        }
    }
}

/// One modeled workload/hardware scenario: the pair `(S, R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadPoint {
    scalable_fraction: f64,
    efficiency_ratio: f64,
}

impl WorkloadPoint {
    /// Requires `S` in `[0, 1]` and `R >= 1`, both finite. `R = 1` is a
    /// degenerate but admitted ratio (no advantage, so every `S > 0`
    /// collapses); it keeps sweeps over `R` grids total at the left edge.
    pub fn new(scalable_fraction: f64, efficiency_ratio: f64) -> Result<Self, Error> {
        Ok(Self {
            scalable_fraction: validate_scalable_fraction(scalable_fraction)?,
            efficiency_ratio: validate_efficiency_ratio("efficiency_ratio", efficiency_ratio)?,
        })
    }

    pub fn scalable_fraction(&self) -> f64 {
        self.scalable_fraction
    }

    pub fn efficiency_ratio(&self) -> f64 {
        self.efficiency_ratio
    }

    /// Normalized execution time `T(x) = (1-S)/(1+(R-1)x) + S/(1-x)`.
    pub fn execution_time(&self, x: AllocationFraction) -> NormalizedTime {
        let s = self.scalable_fraction;
        let r = self.efficiency_ratio;
        let x = x.value();
        NormalizedTime::from_raw((1.0 - s) / (1.0 + (r - 1.0) * x) + s / (1.0 - x))
    }

    /// First derivative `T'(x) = -(1-S)(R-1)/(1+(R-1)x)^2 + S/(1-x)^2`.
    pub fn execution_time_derivative(&self, x: AllocationFraction) -> f64 {
        let s = self.scalable_fraction;
        let r = self.efficiency_ratio;
        let x = x.value();
        let d = 1.0 + (r - 1.0) * x;
        -(1.0 - s) * (r - 1.0) / (d * d) + s / ((1.0 - x) * (1.0 - x))
    }

    /// Second derivative `T''(x) = 2(1-S)(R-1)^2/(1+(R-1)x)^3 + 2S/(1-x)^3`,
    /// strictly positive whenever `S > 0` or `R > 1`.
    pub fn execution_time_second_derivative(&self, x: AllocationFraction) -> f64 {
        let s = self.scalable_fraction;
        let r = self.efficiency_ratio;
        let x = x.value();
        let d = 1.0 + (r - 1.0) * x;
        let u = 1.0 - x;
        2.0 * (1.0 - s) * (r - 1.0) * (r - 1.0) / (d * d * d) + 2.0 * s / (u * u * u)
    }

    /// Collapse threshold `S_c = 1 - 1/R` for this point's ratio.
    pub fn collapse_threshold(&self) -> f64 {
        1.0 - 1.0 / self.efficiency_ratio
    }

    /// Regime classification. The exact boundary `S = S_c` counts as
    /// collapse: there `T'(0) = 0`, and strict convexity pins the unique
    /// minimum to `x = 0`.
    pub fn regime(&self) -> Regime {
        if self.scalable_fraction >= self.collapse_threshold() {
            Regime::Collapse
        } else {
            Regime::Interior
        }
    }

    /// Closed-form interior optimum
    /// `x* = (sqrt(q) - 1) / (sqrt(q) + (R - 1))` with `q = (1-S)(R-1)/S`.
    ///
    /// Only defined strictly inside the interior regime; callers that need
    /// full regime handling should use [`WorkloadPoint::optimal_allocation`].
    pub fn interior_optimum(&self) -> Result<AllocationFraction, Error> {
        let s = self.scalable_fraction;
        let r = self.efficiency_ratio;
        if s == 0.0 {
            return Err(Error::Precondition(
                "interior_optimum requires S > 0".to_string(),
            ));
        }
        if r == 1.0 || s >= self.collapse_threshold() {
            return Err(Error::Precondition(format!(
                "interior_optimum requires S < 1 - 1/R; got S = {s}, R = {r}"
            )));
        }
        let root = ((1.0 - s) * (r - 1.0) / s).sqrt();
        // For S below ~1e-19 the unconstrained optimum passes the pole
        // clamp; the constrained optimum is then the clamp itself.
        let x = ((root - 1.0) / (root + (r - 1.0))).min(1.0 - EPS_X);
        AllocationFraction::new(x)
    }

    /// Unique optimum of `T` with full regime handling: collapse returns
    /// `{x* = 0, T = 1}`, the interior regime the closed form. `S = 0`
    /// with `R > 1` has no finite optimum (the objective keeps improving
    /// toward the excluded endpoint `x -> 1`) and is reported as a
    /// degenerate input.
    pub fn optimal_allocation(&self) -> Result<OptimalAllocation, Error> {
        if self.regime() == Regime::Collapse {
            // Covers (S = 0, R = 1) too: the objective is flat and the tie
            // is broken toward x* = 0.
            return Ok(OptimalAllocation::collapsed(SolveMethod::ClosedForm));
        }
        if self.scalable_fraction == 0.0 {
            return Err(Error::Degenerate {
                name: "scalable_fraction",
                reason: "S = 0 has no finite optimum; the objective improves all the way to the excluded endpoint x -> 1",
            });
        }
        let x_star = self.interior_optimum()?;
        Ok(OptimalAllocation {
            x_star,
            time: self.execution_time(x_star),
            regime: Regime::Interior,
            method: SolveMethod::ClosedForm,
        })
    }
}

/// Collapse threshold `S_c = 1 - 1/R`: the scalable fraction above which
/// zero specialization is optimal.
pub fn collapse_threshold(efficiency_ratio: f64) -> Result<f64, Error> {
    let r = validate_efficiency_ratio("efficiency_ratio", efficiency_ratio)?;
    Ok(1.0 - 1.0 / r)
}

/// Critical ratio `R_c = 1/(1 - S)`: the minimum efficiency ratio that
/// justifies any nonzero specialization at scalable fraction `S`.
/// Diverges as `S -> 1`, so `S = 1` is a domain error.
pub fn critical_ratio(scalable_fraction: f64) -> Result<f64, Error> {
    let s = scalable_fraction;
    if !s.is_finite() || !(0.0..1.0).contains(&s) {
        return Err(Error::OutOfRange {
            name: "scalable_fraction",
            value: s,
            constraint: "[0, 1)",
        });
    }
    Ok(1.0 / (1.0 - s))
}

/// Inputs of the classical replication laws: parallel fraction `P` and
/// processor count `N`. `N` is real-valued so continuous curves over an
/// `N` axis need no special casing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicParams {
    parallel_fraction: f64,
    processors: f64,
}

impl ClassicParams {
    pub fn new(parallel_fraction: f64, processors: f64) -> Result<Self, Error> {
        if !parallel_fraction.is_finite() || !(0.0..=1.0).contains(&parallel_fraction) {
            return Err(Error::OutOfRange {
                name: "parallel_fraction",
                value: parallel_fraction,
                constraint: "[0, 1]",
            });
        }
        if !processors.is_finite() || processors < 1.0 {
            return Err(Error::OutOfRange {
                name: "processors",
                value: processors,
                constraint: "[1, inf)",
            });
        }
        Ok(Self {
            parallel_fraction,
            processors,
        })
    }

    pub fn parallel_fraction(&self) -> f64 {
        self.parallel_fraction
    }

    pub fn processors(&self) -> f64 {
        self.processors
    }

    /// Amdahl speedup `1 / ((1-P) + P/N)`.
    pub fn amdahl_speedup(&self) -> f64 {
        1.0 / ((1.0 - self.parallel_fraction) + self.parallel_fraction / self.processors)
    }

    /// Amdahl normalized time `(1-P) + P/N`, the reciprocal of the speedup.
    pub fn amdahl_time(&self) -> NormalizedTime {
        NormalizedTime::from_raw(
            (1.0 - self.parallel_fraction) + self.parallel_fraction / self.processors,
        )
    }

    /// Gustafson scaled speedup `(1-P) + P N`.
    pub fn gustafson_speedup(&self) -> f64 {
        (1.0 - self.parallel_fraction) + self.parallel_fraction * self.processors
    }
}
