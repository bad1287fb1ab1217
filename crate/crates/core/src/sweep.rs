//! Dataset generation for the standard figures: time–allocation curve
//! families, the optimal locus, the phase boundary, classical-law curves,
//! and regime grids. Everything is emitted as in-memory tables; rendering
//! is left to external tools.

use std::collections::HashSet;

use crate::error::Error;
use crate::friction::FrictionModel;
use crate::model::{AllocationFraction, ClassicParams, Regime, WorkloadPoint, EPS_X};
use crate::scenario::format_number;

/// Grid point spacing. Only linear spacing is needed for the figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
}

/// An inclusive sampling grid: `count` points from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    lo: f64,
    hi: f64,
    count: usize,
    spacing: Spacing,
}

impl SweepGrid {
    pub fn linear(lo: f64, hi: f64, count: usize) -> Result<Self, Error> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Validation {
                field: "grid".to_string(),
                message: format!("requires finite lo < hi; got [{lo}, {hi}]"),
            });
        }
        if count < 2 {
            return Err(Error::Validation {
                field: "grid".to_string(),
                message: format!("requires count >= 2; got {count}"),
            });
        }
        Ok(Self {
            lo,
            hi,
            count,
            spacing: Spacing::Linear,
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Sample points `lo + i (hi - lo) / (count - 1)`. The last point is
    /// pinned to `hi` so rounding cannot push it past the interval.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.hi - self.lo) / ((self.count - 1) as f64);
        (0..self.count).map(move |i| {
            if i == self.count - 1 {
                self.hi
            } else {
                self.lo + (i as f64) * step
            }
        })
    }
}

/// One table row: an abscissa plus labeled values.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub abscissa: f64,
    pub values: Vec<(String, f64)>,
}

fn check_unique_labels(field: &str, labels: &[String]) -> Result<(), Error> {
    let mut seen = HashSet::new();
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(Error::Validation {
                field: field.to_string(),
                message: format!("duplicate column label {label:?}"),
            });
        }
    }
    Ok(())
}

fn check_x_grid(grid: &SweepGrid) -> Result<(), Error> {
    if grid.lo < 0.0 || grid.hi > 1.0 - EPS_X {
        return Err(Error::OutOfRange {
            name: "x_grid",
            value: if grid.lo < 0.0 { grid.lo } else { grid.hi },
            constraint: "[0, 1 - 1e-9]",
        });
    }
    Ok(())
}

/// Time–allocation curves: one column of `T(x)` per scalable fraction at
/// a fixed ratio.
pub fn time_curves(
    efficiency_ratio: f64,
    s_list: &[f64],
    x_grid: &SweepGrid,
) -> Result<Vec<CurveSample>, Error> {
    check_x_grid(x_grid)?;
    let points: Vec<WorkloadPoint> = s_list
        .iter()
        .map(|&s| WorkloadPoint::new(s, efficiency_ratio))
        .collect::<Result<_, _>>()?;
    let labels: Vec<String> = s_list
        .iter()
        .map(|&s| format!("S={}", format_number(s)))
        .collect();
    check_unique_labels("scalable_fractions", &labels)?;

    Ok(x_grid
        .points()
        .map(|x| {
            let xa = AllocationFraction::new(x).expect("grid bounds checked");
            CurveSample {
                abscissa: x,
                values: labels
                    .iter()
                    .zip(&points)
                    .map(|(label, point)| (label.clone(), point.execution_time(xa).value()))
                    .collect(),
            }
        })
        .collect())
}

/// Friction variant of [`time_curves`], using the memory-aware surface.
pub fn time_curves_mem(
    friction: &FrictionModel,
    s_list: &[f64],
    x_grid: &SweepGrid,
) -> Result<Vec<CurveSample>, Error> {
    check_x_grid(x_grid)?;
    let labels: Vec<String> = s_list
        .iter()
        .map(|&s| format!("S={}", format_number(s)))
        .collect();
    check_unique_labels("scalable_fractions", &labels)?;

    let mut samples = Vec::with_capacity(x_grid.count());
    for x in x_grid.points() {
        let xa = AllocationFraction::new(x).expect("grid bounds checked");
        let mut values = Vec::with_capacity(s_list.len());
        for (label, &s) in labels.iter().zip(s_list) {
            values.push((label.clone(), friction.execution_time(s, xa)?.value()));
        }
        samples.push(CurveSample {
            abscissa: x,
            values,
        });
    }
    Ok(samples)
}

/// The optimal locus at fixed ratio: per scalable fraction, `x*(S)` and
/// `T(x*(S))`. Collapse-regime rows report `(0, 1)`.
pub fn optimal_locus(efficiency_ratio: f64, s_grid: &SweepGrid) -> Result<Vec<CurveSample>, Error> {
    let mut samples = Vec::with_capacity(s_grid.count());
    for s in s_grid.points() {
        let opt = WorkloadPoint::new(s, efficiency_ratio)?.optimal_allocation()?;
        samples.push(CurveSample {
            abscissa: s,
            values: vec![
                ("x_star".to_string(), opt.x_star.value()),
                ("time".to_string(), opt.time.value()),
            ],
        });
    }
    Ok(samples)
}

/// The phase boundary `R_c(S) = 1/(1 - S)` separating specialization from
/// collapse in `(S, R)` space.
pub fn phase_boundary(s_grid: &SweepGrid) -> Result<Vec<CurveSample>, Error> {
    let mut samples = Vec::with_capacity(s_grid.count());
    for s in s_grid.points() {
        let r_c = crate::model::critical_ratio(s)?;
        samples.push(CurveSample {
            abscissa: s,
            values: vec![("r_c".to_string(), r_c)],
        });
    }
    Ok(samples)
}

/// Requested projection of the classical laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveForm {
    Speedup,
    Time,
}

impl CurveForm {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveForm::Speedup => "speedup",
            CurveForm::Time => "time",
        }
    }
}

/// Amdahl and Gustafson curves over a processor-count grid, in speedup or
/// normalized-time form. The time form of Gustafson's law is the
/// reciprocal of its speedup.
pub fn classic_curves(
    p_list: &[f64],
    n_grid: &SweepGrid,
    form: CurveForm,
) -> Result<Vec<CurveSample>, Error> {
    if n_grid.lo < 1.0 {
        return Err(Error::OutOfRange {
            name: "n_grid",
            value: n_grid.lo,
            constraint: "[1, inf)",
        });
    }
    let labels: Vec<String> = p_list
        .iter()
        .map(|&p| format!("amdahl P={}", format_number(p)))
        .chain(
            p_list
                .iter()
                .map(|&p| format!("gustafson P={}", format_number(p))),
        )
        .collect();
    check_unique_labels("parallel_fractions", &labels)?;

    let mut samples = Vec::with_capacity(n_grid.count());
    for n in n_grid.points() {
        let params: Vec<ClassicParams> = p_list
            .iter()
            .map(|&p| ClassicParams::new(p, n))
            .collect::<Result<_, _>>()?;
        let values = params
            .iter()
            .map(|c| match form {
                CurveForm::Speedup => c.amdahl_speedup(),
                CurveForm::Time => c.amdahl_time().value(),
            })
            .chain(params.iter().map(|c| match form {
                CurveForm::Speedup => c.gustafson_speedup(),
                CurveForm::Time => 1.0 / c.gustafson_speedup(),
            }))
            .collect::<Vec<f64>>();
        samples.push(CurveSample {
            abscissa: n,
            values: labels.iter().cloned().zip(values).collect(),
        });
    }
    Ok(samples)
}

/// Regime classification over an `(S, R)` product grid. Each cell reports
/// the ratio, an interior flag (1 interior, 0 collapse), and `x*`, all
/// derived from the same optimizer the scalar path uses.
pub fn regime_grid(s_grid: &SweepGrid, r_grid: &SweepGrid) -> Result<Vec<CurveSample>, Error> {
    if s_grid.lo < 0.0 || s_grid.hi >= 1.0 {
        return Err(Error::OutOfRange {
            name: "s_grid",
            value: if s_grid.lo < 0.0 {
                s_grid.lo
            } else {
                s_grid.hi
            },
            constraint: "[0, 1)",
        });
    }
    if r_grid.lo < 1.0 {
        return Err(Error::OutOfRange {
            name: "r_grid",
            value: r_grid.lo,
            constraint: "[1, inf)",
        });
    }
    let mut samples = Vec::with_capacity(s_grid.count() * r_grid.count());
    for s in s_grid.points() {
        for r in r_grid.points() {
            let opt = WorkloadPoint::new(s, r)?.optimal_allocation()?;
            let interior = match opt.regime {
                Regime::Interior => 1.0,
                Regime::Collapse => 0.0,
            };
            samples.push(CurveSample {
                abscissa: s,
                values: vec![
                    ("efficiency_ratio".to_string(), r),
                    ("interior".to_string(), interior),
                    ("x_star".to_string(), opt.x_star.value()),
                ],
            });
        }
    }
    Ok(samples)
}
