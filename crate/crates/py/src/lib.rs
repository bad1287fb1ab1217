//! Python bindings for the allocation-law library.
//!
//! Exposes the closed-form model, the bandwidth-friction extension, the
//! classical laws, and the sweep/scenario machinery as flat functions.
//! Sweep functions return column dictionaries (`"abscissa"` plus one key
//! per curve label) ready for plotting; scenario documents run through
//! the same engine the CLI uses and come back as deterministic JSON or
//! CSV text.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use scalelaw::scenario::{emit_json, parse_scenario};
use scalelaw::sweep::{self, CurveForm, CurveSample, SweepGrid};
use scalelaw::{AllocationFraction, ClassicParams, Error, FrictionModel, WorkloadPoint, EPS_X};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::NoConvergence { .. } | Error::NonFinite { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn point(scalable_fraction: f64, efficiency_ratio: f64) -> PyResult<WorkloadPoint> {
    WorkloadPoint::new(scalable_fraction, efficiency_ratio).map_err(to_py_err)
}

fn alloc(allocation: f64) -> PyResult<AllocationFraction> {
    AllocationFraction::new(allocation).map_err(to_py_err)
}

fn friction(r_max: f64, gamma: f64) -> PyResult<FrictionModel> {
    FrictionModel::new(r_max, gamma).map_err(to_py_err)
}

fn classic(parallel_fraction: f64, processors: f64) -> PyResult<ClassicParams> {
    ClassicParams::new(parallel_fraction, processors).map_err(to_py_err)
}

fn grid(lo: f64, hi: f64, count: usize) -> PyResult<SweepGrid> {
    SweepGrid::linear(lo, hi, count).map_err(to_py_err)
}

fn columns<'py>(py: Python<'py>, samples: &[CurveSample]) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    let abscissa: Vec<f64> = samples.iter().map(|s| s.abscissa).collect();
    dict.set_item("abscissa", abscissa)?;
    if let Some(first) = samples.first() {
        for (index, (label, _)) in first.values.iter().enumerate() {
            let column: Vec<f64> = samples.iter().map(|s| s.values[index].1).collect();
            dict.set_item(label, column)?;
        }
    }
    Ok(dict)
}

/// Result of an optimization: allocation share, time, regime, method.
#[pyclass(name = "OptimalAllocation", frozen)]
struct PyOptimalAllocation {
    #[pyo3(get)]
    x_star: f64,
    #[pyo3(get)]
    time: f64,
    #[pyo3(get)]
    regime: String,
    #[pyo3(get)]
    method: String,
}

impl From<scalelaw::OptimalAllocation> for PyOptimalAllocation {
    fn from(opt: scalelaw::OptimalAllocation) -> Self {
        Self {
            x_star: opt.x_star.value(),
            time: opt.time.value(),
            regime: opt.regime.as_str().to_string(),
            method: opt.method.as_str().to_string(),
        }
    }
}

#[pymethods]
impl PyOptimalAllocation {
    fn __repr__(&self) -> String {
        format!(
            "OptimalAllocation(x_star={}, time={}, regime='{}', method='{}')",
            self.x_star, self.time, self.regime, self.method
        )
    }
}

/// Normalized execution time T(x) = (1-S)/(1+(R-1)x) + S/(1-x).
#[pyfunction]
fn execution_time(scalable_fraction: f64, efficiency_ratio: f64, allocation: f64) -> PyResult<f64> {
    Ok(point(scalable_fraction, efficiency_ratio)?
        .execution_time(alloc(allocation)?)
        .value())
}

/// First derivative T'(x).
#[pyfunction]
fn execution_time_derivative(
    scalable_fraction: f64,
    efficiency_ratio: f64,
    allocation: f64,
) -> PyResult<f64> {
    Ok(point(scalable_fraction, efficiency_ratio)?.execution_time_derivative(alloc(allocation)?))
}

/// Second derivative T''(x), strictly positive off the degenerate corner.
#[pyfunction]
fn execution_time_second_derivative(
    scalable_fraction: f64,
    efficiency_ratio: f64,
    allocation: f64,
) -> PyResult<f64> {
    Ok(point(scalable_fraction, efficiency_ratio)?
        .execution_time_second_derivative(alloc(allocation)?))
}

/// Collapse threshold S_c = 1 - 1/R.
#[pyfunction]
fn collapse_threshold(efficiency_ratio: f64) -> PyResult<f64> {
    scalelaw::collapse_threshold(efficiency_ratio).map_err(to_py_err)
}

/// Critical ratio R_c = 1/(1 - S).
#[pyfunction]
fn critical_ratio(scalable_fraction: f64) -> PyResult<f64> {
    scalelaw::critical_ratio(scalable_fraction).map_err(to_py_err)
}

/// Closed-form interior optimum; raises ValueError outside the interior
/// regime.
#[pyfunction]
fn interior_optimum(scalable_fraction: f64, efficiency_ratio: f64) -> PyResult<f64> {
    Ok(point(scalable_fraction, efficiency_ratio)?
        .interior_optimum()
        .map_err(to_py_err)?
        .value())
}

/// Optimal allocation with full regime handling.
#[pyfunction]
fn optimal_allocation(
    scalable_fraction: f64,
    efficiency_ratio: f64,
) -> PyResult<PyOptimalAllocation> {
    Ok(point(scalable_fraction, efficiency_ratio)?
        .optimal_allocation()
        .map_err(to_py_err)?
        .into())
}

/// Amdahl speedup 1/((1-P) + P/N).
#[pyfunction]
fn amdahl_speedup(parallel_fraction: f64, processors: f64) -> PyResult<f64> {
    Ok(classic(parallel_fraction, processors)?.amdahl_speedup())
}

/// Amdahl normalized time (1-P) + P/N.
#[pyfunction]
fn amdahl_time(parallel_fraction: f64, processors: f64) -> PyResult<f64> {
    Ok(classic(parallel_fraction, processors)?
        .amdahl_time()
        .value())
}

/// Gustafson scaled speedup (1-P) + P N.
#[pyfunction]
fn gustafson_speedup(parallel_fraction: f64, processors: f64) -> PyResult<f64> {
    Ok(classic(parallel_fraction, processors)?.gustafson_speedup())
}

/// Friction-decayed ratio R_eff(x) = R_max / (1 + gamma R_max x).
#[pyfunction]
fn effective_ratio(r_max: f64, gamma: f64, allocation: f64) -> PyResult<f64> {
    Ok(friction(r_max, gamma)?.effective_ratio(alloc(allocation)?))
}

/// Memory-aware execution time T_mem(x).
#[pyfunction]
fn execution_time_mem(
    scalable_fraction: f64,
    r_max: f64,
    gamma: f64,
    allocation: f64,
) -> PyResult<f64> {
    Ok(friction(r_max, gamma)?
        .execution_time(scalable_fraction, alloc(allocation)?)
        .map_err(to_py_err)?
        .value())
}

/// dT_mem/dx at the origin; independent of gamma.
#[pyfunction]
fn mem_origin_derivative(scalable_fraction: f64, r_max: f64, gamma: f64) -> PyResult<f64> {
    friction(r_max, gamma)?
        .origin_derivative(scalable_fraction)
        .map_err(to_py_err)
}

/// Collapse threshold of the friction model: 1 - 1/R_max.
#[pyfunction]
fn mem_collapse_threshold(r_max: f64, gamma: f64) -> PyResult<f64> {
    Ok(friction(r_max, gamma)?.collapse_threshold())
}

/// Numerically minimized allocation under memory friction.
#[pyfunction]
fn optimal_allocation_mem(
    scalable_fraction: f64,
    r_max: f64,
    gamma: f64,
) -> PyResult<PyOptimalAllocation> {
    Ok(friction(r_max, gamma)?
        .optimal_allocation(scalable_fraction)
        .map_err(to_py_err)?
        .into())
}

/// T(x) curves as columns; pass gamma to use the friction surface with
/// efficiency_ratio as R_max.
#[pyfunction]
#[pyo3(signature = (efficiency_ratio, scalable_fractions, lo, hi, count, gamma=None))]
fn time_curves<'py>(
    py: Python<'py>,
    efficiency_ratio: f64,
    scalable_fractions: Vec<f64>,
    lo: f64,
    hi: f64,
    count: usize,
    gamma: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let x_grid = grid(lo, hi, count)?;
    let samples = match gamma {
        None => sweep::time_curves(efficiency_ratio, &scalable_fractions, &x_grid),
        Some(gamma) => {
            let model = friction(efficiency_ratio, gamma)?;
            sweep::time_curves_mem(&model, &scalable_fractions, &x_grid)
        }
    }
    .map_err(to_py_err)?;
    columns(py, &samples)
}

/// Optimal locus columns: abscissa (S), x_star, time.
#[pyfunction]
fn optimal_locus<'py>(
    py: Python<'py>,
    efficiency_ratio: f64,
    lo: f64,
    hi: f64,
    count: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let samples =
        sweep::optimal_locus(efficiency_ratio, &grid(lo, hi, count)?).map_err(to_py_err)?;
    columns(py, &samples)
}

/// Phase-boundary columns: abscissa (S), r_c.
#[pyfunction]
fn phase_boundary<'py>(
    py: Python<'py>,
    lo: f64,
    hi: f64,
    count: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let samples = sweep::phase_boundary(&grid(lo, hi, count)?).map_err(to_py_err)?;
    columns(py, &samples)
}

/// Classical-law columns over a processor grid, form "speedup" or "time".
#[pyfunction]
#[pyo3(signature = (parallel_fractions, lo, hi, count, form="speedup"))]
fn classic_curves<'py>(
    py: Python<'py>,
    parallel_fractions: Vec<f64>,
    lo: f64,
    hi: f64,
    count: usize,
    form: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let form = match form {
        "speedup" => CurveForm::Speedup,
        "time" => CurveForm::Time,
        other => {
            return Err(PyValueError::new_err(format!(
                "form must be \"speedup\" or \"time\", got {other:?}"
            )))
        }
    };
    let samples = sweep::classic_curves(&parallel_fractions, &grid(lo, hi, count)?, form)
        .map_err(to_py_err)?;
    columns(py, &samples)
}

/// Regime classification columns over an (S, R) product grid.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn regime_grid<'py>(
    py: Python<'py>,
    s_lo: f64,
    s_hi: f64,
    s_count: usize,
    r_lo: f64,
    r_hi: f64,
    r_count: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let samples = sweep::regime_grid(&grid(s_lo, s_hi, s_count)?, &grid(r_lo, r_hi, r_count)?)
        .map_err(to_py_err)?;
    columns(py, &samples)
}

/// Run a JSON scenario document and return the results as the same
/// deterministic JSON text the CLI prints.
#[pyfunction]
fn run_scenario(text: &str) -> PyResult<String> {
    let scenario = parse_scenario(text).map_err(to_py_err)?;
    let results = scenario.run().map_err(to_py_err)?;
    Ok(emit_json(&results))
}

/// Run a JSON scenario document and return one CSV document per analysis.
#[pyfunction]
fn scenario_csv(text: &str) -> PyResult<Vec<String>> {
    let scenario = parse_scenario(text).map_err(to_py_err)?;
    let results = scenario.run().map_err(to_py_err)?;
    results
        .iter()
        .map(|result| result.to_csv().map_err(to_py_err))
        .collect()
}

#[pymodule]
fn scalelaw_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("EPS_X", EPS_X)?;
    m.add_class::<PyOptimalAllocation>()?;
    m.add_function(wrap_pyfunction!(execution_time, m)?)?;
    m.add_function(wrap_pyfunction!(execution_time_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(execution_time_second_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(collapse_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(critical_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(interior_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_allocation, m)?)?;
    m.add_function(wrap_pyfunction!(amdahl_speedup, m)?)?;
    m.add_function(wrap_pyfunction!(amdahl_time, m)?)?;
    m.add_function(wrap_pyfunction!(gustafson_speedup, m)?)?;
    m.add_function(wrap_pyfunction!(effective_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(execution_time_mem, m)?)?;
    m.add_function(wrap_pyfunction!(mem_origin_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(mem_collapse_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_allocation_mem, m)?)?;
    m.add_function(wrap_pyfunction!(time_curves, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_locus, m)?)?;
    m.add_function(wrap_pyfunction!(phase_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(classic_curves, m)?)?;
    m.add_function(wrap_pyfunction!(regime_grid, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_csv, m)?)?;
    Ok(())
}
