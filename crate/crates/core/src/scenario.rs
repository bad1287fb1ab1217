//! Declarative scenario documents in, deterministic tables out.
//!
//! A scenario is a JSON document naming a list of analyses:
//!
//! ```json
//! {
//!   "name": "figure-2",
//!   "analyses": [
//!     {"kind": "optimize", "scalable_fraction": 0.2, "efficiency_ratio": 10},
//!     {"kind": "time_curves", "efficiency_ratio": 10,
//!      "scalable_fractions": [0.2, 0.5, 0.8, 0.9, 0.95],
//!      "x_grid": {"lo": 0, "hi": 0.65, "count": 300}}
//!   ]
//! }
//! ```
//!
//! Parsing validates every parameter against the model preconditions and
//! rejects unknown or inapplicable keys, so a typo fails loudly instead
//! of silently running a different analysis.
//!
//! Emission is deterministic byte for byte: numbers are rounded to 9
//! significant digits and printed in their shortest round-trip form, CSV
//! rows are ordered by abscissa, and JSON objects carry the fixed key
//! order (kind, parameters, results) with keys sorted alphabetically
//! inside each section.

use serde::Deserialize;
use serde_json::{json, Map, Number, Value};

use crate::error::Error;
use crate::friction::FrictionModel;
use crate::model::{AllocationFraction, WorkloadPoint, EPS_X};
use crate::sweep::{self, CurveForm, CurveSample, SweepGrid};

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

fn round_sig9(value: f64) -> f64 {
    if value == 0.0 {
        return 0.0;
    }
    debug_assert!(value.is_finite());
    format!("{value:.8e}")
        .parse()
        .expect("formatted float reparses")
}

/// Canonical number rendering: round to 9 significant digits, then print
/// the shortest decimal string that round-trips to the rounded value.
pub fn format_number(value: f64) -> String {
    let rounded = round_sig9(value);
    if rounded == 0.0 {
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}

fn json_number(value: f64) -> Number {
    let rounded = round_sig9(value);
    if rounded == 0.0 {
        Number::from(0)
    } else if rounded.fract() == 0.0 && rounded.abs() <= 9.0e15 {
        Number::from(rounded as i64)
    } else {
        Number::from_f64(rounded).expect("rounded value is finite")
    }
}

// ---------------------------------------------------------------------------
// Requests
// ---------------------------------------------------------------------------

/// Ratio parameterization shared by the scalar analyses: either the
/// baseline constant ratio or a friction model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioSpec {
    Baseline(f64),
    Friction(FrictionModel),
}

/// Workload plus ratio, for analyses that evaluate or optimize a single
/// scenario point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Baseline(WorkloadPoint),
    Friction {
        scalable_fraction: f64,
        model: FrictionModel,
    },
}

impl ModelSpec {
    pub fn friction(scalable_fraction: f64, model: FrictionModel) -> Result<Self, Error> {
        crate::model::validate_scalable_fraction(scalable_fraction)?;
        Ok(ModelSpec::Friction {
            scalable_fraction,
            model,
        })
    }
}

/// One validated analysis request.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisRequest {
    Eval {
        model: ModelSpec,
        allocation: AllocationFraction,
    },
    Optimize {
        model: ModelSpec,
    },
    Threshold {
        ratio: RatioSpec,
    },
    TimeCurves {
        ratio: RatioSpec,
        scalable_fractions: Vec<f64>,
        x_grid: SweepGrid,
    },
    Locus {
        efficiency_ratio: f64,
        s_grid: SweepGrid,
    },
    PhaseBoundary {
        s_grid: SweepGrid,
    },
    Classic {
        parallel_fractions: Vec<f64>,
        n_grid: SweepGrid,
        form: CurveForm,
    },
    RegimeGrid {
        s_grid: SweepGrid,
        r_grid: SweepGrid,
    },
}

/// A named, validated list of analysis requests.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub analyses: Vec<AnalysisRequest>,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    analyses: Vec<RawAnalysis>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    kind: String,
    scalable_fraction: Option<f64>,
    scalable_fractions: Option<Vec<f64>>,
    efficiency_ratio: Option<f64>,
    allocation: Option<f64>,
    friction: Option<RawFriction>,
    s_grid: Option<RawGrid>,
    x_grid: Option<RawGrid>,
    r_grid: Option<RawGrid>,
    n_grid: Option<RawGrid>,
    parallel_fractions: Option<Vec<f64>>,
    form: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFriction {
    r_max: f64,
    gamma: f64,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    lo: f64,
    hi: f64,
    count: usize,
}

fn validation(field: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, Error> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| {
        if e.is_syntax() || e.is_eof() {
            Error::Syntax(e.to_string())
        } else {
            validation("scenario", e.to_string())
        }
    })?;
    if raw.name.is_empty() {
        return Err(validation("name", "must be non-empty"));
    }
    if raw.analyses.is_empty() {
        return Err(validation("analyses", "must contain at least one analysis"));
    }
    let analyses = raw
        .analyses
        .into_iter()
        .map(validate_analysis)
        .collect::<Result<_, _>>()?;
    Ok(Scenario {
        name: raw.name,
        analyses,
    })
}

struct FieldChecker {
    kind: &'static str,
    used: Vec<&'static str>,
}

impl FieldChecker {
    fn require<T>(&mut self, name: &'static str, value: Option<T>) -> Result<T, Error> {
        self.used.push(name);
        value.ok_or_else(|| validation(name, format!("required for kind {:?}", self.kind)))
    }

    fn optional<T>(&mut self, name: &'static str, value: Option<T>) -> Option<T> {
        self.used.push(name);
        value
    }

    /// Rejects any present field this kind did not consume.
    fn finish(&self, raw: &RawAnalysis) -> Result<(), Error> {
        let present: [(&'static str, bool); 11] = [
            ("scalable_fraction", raw.scalable_fraction.is_some()),
            ("scalable_fractions", raw.scalable_fractions.is_some()),
            ("efficiency_ratio", raw.efficiency_ratio.is_some()),
            ("allocation", raw.allocation.is_some()),
            ("friction", raw.friction.is_some()),
            ("s_grid", raw.s_grid.is_some()),
            ("x_grid", raw.x_grid.is_some()),
            ("r_grid", raw.r_grid.is_some()),
            ("n_grid", raw.n_grid.is_some()),
            ("parallel_fractions", raw.parallel_fractions.is_some()),
            ("form", raw.form.is_some()),
        ];
        for (name, is_present) in present {
            if is_present && !self.used.contains(&name) {
                return Err(validation(
                    name,
                    format!("not valid for kind {:?}", self.kind),
                ));
            }
        }
        Ok(())
    }
}

fn grid_for(field: &'static str, raw: RawGrid) -> Result<SweepGrid, Error> {
    SweepGrid::linear(raw.lo, raw.hi, raw.count).map_err(|e| match e {
        Error::Validation { message, .. } => validation(field, message),
        other => other,
    })
}

fn ratio_spec(checker: &mut FieldChecker, raw: &RawAnalysis) -> Result<RatioSpec, Error> {
    let efficiency_ratio = checker.optional("efficiency_ratio", raw.efficiency_ratio);
    let friction = checker.optional("friction", raw.friction.as_ref());
    match (efficiency_ratio, friction) {
        (Some(r), None) => {
            crate::model::validate_efficiency_ratio("efficiency_ratio", r)?;
            Ok(RatioSpec::Baseline(r))
        }
        (None, Some(f)) => Ok(RatioSpec::Friction(FrictionModel::new(f.r_max, f.gamma)?)),
        (Some(_), Some(_)) => Err(validation(
            "efficiency_ratio",
            "efficiency_ratio and friction are mutually exclusive",
        )),
        (None, None) => Err(validation(
            "efficiency_ratio",
            format!(
                "kind {:?} requires efficiency_ratio or friction",
                checker.kind
            ),
        )),
    }
}

fn model_spec(checker: &mut FieldChecker, raw: &RawAnalysis) -> Result<ModelSpec, Error> {
    let s = checker.require("scalable_fraction", raw.scalable_fraction)?;
    match ratio_spec(checker, raw)? {
        RatioSpec::Baseline(r) => Ok(ModelSpec::Baseline(WorkloadPoint::new(s, r)?)),
        RatioSpec::Friction(model) => ModelSpec::friction(s, model),
    }
}

fn validate_analysis(raw: RawAnalysis) -> Result<AnalysisRequest, Error> {
    let kind: &'static str = match raw.kind.as_str() {
        "eval" => "eval",
        "optimize" => "optimize",
        "threshold" => "threshold",
        "time_curves" => "time_curves",
        "locus" => "locus",
        "phase_boundary" => "phase_boundary",
        "classic" => "classic",
        "regime_grid" => "regime_grid",
        other => {
            return Err(validation(
                "kind",
                format!("unknown analysis kind {other:?}"),
            ))
        }
    };
    let mut checker = FieldChecker { kind, used: vec![] };

    let request = match kind {
        "eval" => {
            let model = model_spec(&mut checker, &raw)?;
            let allocation =
                AllocationFraction::new(checker.require("allocation", raw.allocation)?)?;
            AnalysisRequest::Eval { model, allocation }
        }
        "optimize" => AnalysisRequest::Optimize {
            model: model_spec(&mut checker, &raw)?,
        },
        "threshold" => AnalysisRequest::Threshold {
            ratio: ratio_spec(&mut checker, &raw)?,
        },
        "time_curves" => {
            let ratio = ratio_spec(&mut checker, &raw)?;
            let fractions =
                checker.require("scalable_fractions", raw.scalable_fractions.clone())?;
            for &s in &fractions {
                crate::model::validate_scalable_fraction(s)?;
            }
            let x_grid = grid_for("x_grid", checker.require("x_grid", raw.x_grid)?)?;
            if x_grid.lo() < 0.0 || x_grid.hi() > 1.0 - EPS_X {
                return Err(validation("x_grid", "must lie within [0, 1 - 1e-9]"));
            }
            AnalysisRequest::TimeCurves {
                ratio,
                scalable_fractions: fractions,
                x_grid,
            }
        }
        "locus" => {
            let r = checker.require("efficiency_ratio", raw.efficiency_ratio)?;
            crate::model::validate_efficiency_ratio("efficiency_ratio", r)?;
            let s_grid = grid_for("s_grid", checker.require("s_grid", raw.s_grid)?)?;
            if s_grid.lo() < 0.0 || s_grid.hi() > 1.0 {
                return Err(validation("s_grid", "must lie within (0, 1]"));
            }
            AnalysisRequest::Locus {
                efficiency_ratio: r,
                s_grid,
            }
        }
        "phase_boundary" => {
            let s_grid = grid_for("s_grid", checker.require("s_grid", raw.s_grid)?)?;
            if s_grid.lo() < 0.0 || s_grid.hi() >= 1.0 {
                return Err(validation("s_grid", "must lie within [0, 1)"));
            }
            AnalysisRequest::PhaseBoundary { s_grid }
        }
        "classic" => {
            let fractions =
                checker.require("parallel_fractions", raw.parallel_fractions.clone())?;
            for &p in &fractions {
                if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                    return Err(Error::OutOfRange {
                        name: "parallel_fraction",
                        value: p,
                        constraint: "[0, 1]",
                    });
                }
            }
            let n_grid = grid_for("n_grid", checker.require("n_grid", raw.n_grid)?)?;
            if n_grid.lo() < 1.0 {
                return Err(validation("n_grid", "must lie within [1, inf)"));
            }
            let form = match checker.optional("form", raw.form.as_deref()) {
                None | Some("speedup") => CurveForm::Speedup,
                Some("time") => CurveForm::Time,
                Some(other) => {
                    return Err(validation(
                        "form",
                        format!("expected \"speedup\" or \"time\", got {other:?}"),
                    ))
                }
            };
            AnalysisRequest::Classic {
                parallel_fractions: fractions,
                n_grid,
                form,
            }
        }
        "regime_grid" => {
            let s_grid = grid_for("s_grid", checker.require("s_grid", raw.s_grid)?)?;
            if s_grid.lo() < 0.0 || s_grid.hi() >= 1.0 {
                return Err(validation("s_grid", "must lie within [0, 1)"));
            }
            let r_grid = grid_for("r_grid", checker.require("r_grid", raw.r_grid)?)?;
            if r_grid.lo() < 1.0 {
                return Err(validation("r_grid", "must lie within [1, inf)"));
            }
            AnalysisRequest::RegimeGrid { s_grid, r_grid }
        }
        _ => unreachable!(),
    };
    checker.finish(&raw)?;
    Ok(request)
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// A scalar result entry: a number or a short status string.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarValue {
    Number(f64),
    Text(&'static str),
}

/// What an analysis produced: a flat scalar record or a sample table.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Scalar(Vec<(&'static str, ScalarValue)>),
    Table(Vec<CurveSample>),
}

/// An executed analysis, pairing the request with its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub request: AnalysisRequest,
    pub outcome: Outcome,
}

impl AnalysisRequest {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisRequest::Eval { .. } => "eval",
            AnalysisRequest::Optimize { .. } => "optimize",
            AnalysisRequest::Threshold { .. } => "threshold",
            AnalysisRequest::TimeCurves { .. } => "time_curves",
            AnalysisRequest::Locus { .. } => "locus",
            AnalysisRequest::PhaseBoundary { .. } => "phase_boundary",
            AnalysisRequest::Classic { .. } => "classic",
            AnalysisRequest::RegimeGrid { .. } => "regime_grid",
        }
    }

    /// Executes the request against the model.
    pub fn run(&self) -> Result<AnalysisResult, Error> {
        let outcome = match self {
            AnalysisRequest::Eval { model, allocation } => {
                let time = match model {
                    ModelSpec::Baseline(point) => point.execution_time(*allocation).value(),
                    ModelSpec::Friction {
                        scalable_fraction,
                        model,
                    } => model
                        .execution_time(*scalable_fraction, *allocation)?
                        .value(),
                };
                Outcome::Scalar(vec![("time", ScalarValue::Number(time))])
            }
            AnalysisRequest::Optimize { model } => {
                let opt = match model {
                    ModelSpec::Baseline(point) => point.optimal_allocation()?,
                    ModelSpec::Friction {
                        scalable_fraction,
                        model,
                    } => model.optimal_allocation(*scalable_fraction)?,
                };
                Outcome::Scalar(vec![
                    ("method", ScalarValue::Text(opt.method.as_str())),
                    ("regime", ScalarValue::Text(opt.regime.as_str())),
                    ("time", ScalarValue::Number(opt.time.value())),
                    ("x_star", ScalarValue::Number(opt.x_star.value())),
                ])
            }
            AnalysisRequest::Threshold { ratio } => {
                let s_c = match ratio {
                    RatioSpec::Baseline(r) => crate::model::collapse_threshold(*r)?,
                    RatioSpec::Friction(model) => model.collapse_threshold(),
                };
                Outcome::Scalar(vec![("s_c", ScalarValue::Number(s_c))])
            }
            AnalysisRequest::TimeCurves {
                ratio,
                scalable_fractions,
                x_grid,
            } => {
                let samples = match ratio {
                    RatioSpec::Baseline(r) => sweep::time_curves(*r, scalable_fractions, x_grid)?,
                    RatioSpec::Friction(model) => {
                        sweep::time_curves_mem(model, scalable_fractions, x_grid)?
                    }
                };
                Outcome::Table(samples)
            }
            AnalysisRequest::Locus {
                efficiency_ratio,
                s_grid,
            } => Outcome::Table(sweep::optimal_locus(*efficiency_ratio, s_grid)?),
            AnalysisRequest::PhaseBoundary { s_grid } => {
                Outcome::Table(sweep::phase_boundary(s_grid)?)
            }
            AnalysisRequest::Classic {
                parallel_fractions,
                n_grid,
                form,
            } => Outcome::Table(sweep::classic_curves(parallel_fractions, n_grid, *form)?),
            AnalysisRequest::RegimeGrid { s_grid, r_grid } => {
                Outcome::Table(sweep::regime_grid(s_grid, r_grid)?)
            }
        };
        Ok(AnalysisResult {
            request: self.clone(),
            outcome,
        })
    }
}

impl Scenario {
    /// Runs every analysis in file order.
    pub fn run(&self) -> Result<Vec<AnalysisResult>, Error> {
        self.analyses.iter().map(AnalysisRequest::run).collect()
    }
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

fn sorted_by_abscissa(samples: &[CurveSample]) -> Vec<&CurveSample> {
    let mut rows: Vec<&CurveSample> = samples.iter().collect();
    rows.sort_by(|a, b| a.abscissa.total_cmp(&b.abscissa));
    rows
}

/// Renders samples as a CSV document: header `abscissa,<label1>,...`, one
/// row per sample in abscissa order, every row terminated by a line feed.
/// All samples must share one label sequence.
pub fn emit_csv(samples: &[CurveSample]) -> Result<String, Error> {
    let labels: Vec<&str> = match samples.first() {
        Some(first) => first
            .values
            .iter()
            .map(|(label, _)| label.as_str())
            .collect(),
        None => Vec::new(),
    };
    {
        let mut seen = std::collections::HashSet::new();
        if !labels.iter().all(|label| seen.insert(*label)) {
            return Err(Error::InconsistentLabels);
        }
    }
    for sample in samples {
        if sample.values.len() != labels.len()
            || !sample
                .values
                .iter()
                .zip(&labels)
                .all(|((l, _), expect)| l == expect)
        {
            return Err(Error::InconsistentLabels);
        }
    }

    let mut out = String::from("abscissa");
    for label in &labels {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for sample in sorted_by_abscissa(samples) {
        out.push_str(&format_number(sample.abscissa));
        for (_, value) in &sample.values {
            out.push(',');
            out.push_str(&format_number(*value));
        }
        out.push('\n');
    }
    Ok(out)
}

fn grid_value(grid: &SweepGrid) -> Value {
    json!({
        "lo": json_number(grid.lo()),
        "hi": json_number(grid.hi()),
        "count": grid.count(),
    })
}

fn ratio_parameters(ratio: &RatioSpec, parameters: &mut Map<String, Value>) {
    match ratio {
        RatioSpec::Baseline(r) => {
            parameters.insert("efficiency_ratio".into(), Value::Number(json_number(*r)));
        }
        RatioSpec::Friction(model) => {
            parameters.insert(
                "friction".into(),
                json!({
                    "r_max": json_number(model.r_max()),
                    "gamma": json_number(model.gamma()),
                }),
            );
        }
    }
}

fn model_parameters(model: &ModelSpec, parameters: &mut Map<String, Value>) {
    match model {
        ModelSpec::Baseline(point) => {
            parameters.insert(
                "scalable_fraction".into(),
                Value::Number(json_number(point.scalable_fraction())),
            );
            ratio_parameters(&RatioSpec::Baseline(point.efficiency_ratio()), parameters);
        }
        ModelSpec::Friction {
            scalable_fraction,
            model,
        } => {
            parameters.insert(
                "scalable_fraction".into(),
                Value::Number(json_number(*scalable_fraction)),
            );
            ratio_parameters(&RatioSpec::Friction(*model), parameters);
        }
    }
}

fn number_list(values: &[f64]) -> Value {
    Value::Array(
        values
            .iter()
            .map(|&v| Value::Number(json_number(v)))
            .collect(),
    )
}

impl AnalysisRequest {
    /// Parameter echo: exactly the keys a scenario document would use to
    /// express this request, so emitted results parse back.
    pub fn parameters(&self) -> Map<String, Value> {
        let mut parameters = Map::new();
        match self {
            AnalysisRequest::Eval { model, allocation } => {
                model_parameters(model, &mut parameters);
                parameters.insert(
                    "allocation".into(),
                    Value::Number(json_number(allocation.value())),
                );
            }
            AnalysisRequest::Optimize { model } => model_parameters(model, &mut parameters),
            AnalysisRequest::Threshold { ratio } => ratio_parameters(ratio, &mut parameters),
            AnalysisRequest::TimeCurves {
                ratio,
                scalable_fractions,
                x_grid,
            } => {
                ratio_parameters(ratio, &mut parameters);
                parameters.insert("scalable_fractions".into(), number_list(scalable_fractions));
                parameters.insert("x_grid".into(), grid_value(x_grid));
            }
            AnalysisRequest::Locus {
                efficiency_ratio,
                s_grid,
            } => {
                ratio_parameters(&RatioSpec::Baseline(*efficiency_ratio), &mut parameters);
                parameters.insert("s_grid".into(), grid_value(s_grid));
            }
            AnalysisRequest::PhaseBoundary { s_grid } => {
                parameters.insert("s_grid".into(), grid_value(s_grid));
            }
            AnalysisRequest::Classic {
                parallel_fractions,
                n_grid,
                form,
            } => {
                parameters.insert("parallel_fractions".into(), number_list(parallel_fractions));
                parameters.insert("n_grid".into(), grid_value(n_grid));
                parameters.insert("form".into(), Value::String(form.as_str().to_string()));
            }
            AnalysisRequest::RegimeGrid { s_grid, r_grid } => {
                parameters.insert("s_grid".into(), grid_value(s_grid));
                parameters.insert("r_grid".into(), grid_value(r_grid));
            }
        }
        parameters
    }
}

impl AnalysisResult {
    fn results_value(&self) -> Value {
        match &self.outcome {
            Outcome::Scalar(entries) => {
                let mut map = Map::new();
                for (key, value) in entries {
                    let value = match value {
                        ScalarValue::Number(n) => Value::Number(json_number(*n)),
                        ScalarValue::Text(t) => Value::String(t.to_string()),
                    };
                    map.insert((*key).to_string(), value);
                }
                Value::Object(map)
            }
            Outcome::Table(samples) => {
                let labels: Vec<Value> = samples
                    .first()
                    .map(|s| {
                        s.values
                            .iter()
                            .map(|(l, _)| Value::String(l.clone()))
                            .collect()
                    })
                    .unwrap_or_default();
                let rows: Vec<Value> = sorted_by_abscissa(samples)
                    .iter()
                    .map(|sample| {
                        let mut row = vec![Value::Number(json_number(sample.abscissa))];
                        row.extend(
                            sample
                                .values
                                .iter()
                                .map(|(_, v)| Value::Number(json_number(*v))),
                        );
                        Value::Array(row)
                    })
                    .collect();
                json!({ "labels": labels, "rows": rows })
            }
        }
    }

    /// The JSON object for this analysis: kind, echoed parameters, results.
    pub fn to_json_value(&self) -> Value {
        json!({
            "kind": self.request.kind(),
            "parameters": Value::Object(self.request.parameters()),
            "results": self.results_value(),
        })
    }

    /// CSV rendering: tables via [`emit_csv`], scalar records as a
    /// single-row table keyed by result name.
    pub fn to_csv(&self) -> Result<String, Error> {
        match &self.outcome {
            Outcome::Table(samples) => emit_csv(samples),
            Outcome::Scalar(entries) => {
                let header: Vec<&str> = entries.iter().map(|(k, _)| *k).collect();
                let row: Vec<String> = entries
                    .iter()
                    .map(|(_, v)| match v {
                        ScalarValue::Number(n) => format_number(*n),
                        ScalarValue::Text(t) => (*t).to_string(),
                    })
                    .collect();
                Ok(format!("{}\n{}\n", header.join(","), row.join(",")))
            }
        }
    }
}

/// Renders executed analyses as one JSON document ending in a line feed.
/// A single analysis emits its bare object so the output matches the
/// equivalent single-command invocation; several emit an array in file
/// order.
pub fn emit_json(results: &[AnalysisResult]) -> String {
    let document = if results.len() == 1 {
        results[0].to_json_value()
    } else {
        Value::Array(results.iter().map(AnalysisResult::to_json_value).collect())
    };
    let mut text = serde_json::to_string(&document).expect("value serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_number_is_nine_significant_digits_shortest_form() {
        assert_eq!(format_number(1.0 / 3.0), "0.333333333");
        assert_eq!(format_number(1.0 / 6.0), "0.166666667");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(10.000000000000002), "10");
        assert_eq!(format_number(-4.0), "-4");
        assert_eq!(format_number(39.263803680981595), "39.2638037");
        assert_eq!(format_number(1e-9), "0.000000001");
        assert_eq!(format_number(1.0 / 21.0), "0.0476190476");
    }

    #[test]
    fn parses_minimal_document() {
        let scenario = parse_scenario(
            r#"{"name":"t","analyses":[{"kind":"optimize","scalable_fraction":0.2,"efficiency_ratio":10}]}"#,
        )
        .unwrap();
        assert_eq!(scenario.name, "t");
        assert_eq!(scenario.analyses.len(), 1);
        assert!(matches!(
            scenario.analyses[0],
            AnalysisRequest::Optimize { .. }
        ));
    }

    #[test]
    fn parse_rejects_out_of_range_values() {
        let err = parse_scenario(
            r#"{"name":"t","analyses":[{"kind":"optimize","scalable_fraction":1.2,"efficiency_ratio":10}]}"#,
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "scalable_fraction 1.2 outside [0, 1]");
    }

    #[test]
    fn parse_rejects_unknown_and_inapplicable_keys() {
        let err = parse_scenario(
            r#"{"name":"t","analyses":[{"kind":"threshold","efficiency_ratio":10,"gamm":0.1}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("gamm"), "{err}");

        let err = parse_scenario(
            r#"{"name":"t","analyses":[{"kind":"optimize","scalable_fraction":0.2,"efficiency_ratio":10,"allocation":0.1}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "allocation"));
    }

    #[test]
    fn parse_rejects_malformed_and_incomplete_documents() {
        assert!(matches!(parse_scenario("{"), Err(Error::Syntax(_))));
        assert!(matches!(
            parse_scenario(r#"{"name":"t","analyses":[]}"#),
            Err(Error::Validation { .. })
        ));
        assert!(matches!(
            parse_scenario(
                r#"{"name":"","analyses":[{"kind":"threshold","efficiency_ratio":10}]}"#
            ),
            Err(Error::Validation { .. })
        ));
        let err = parse_scenario(
            r#"{"name":"t","analyses":[{"kind":"optimize","scalable_fraction":0.2}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "efficiency_ratio"));
        let err = parse_scenario(
            r#"{"name":"t","analyses":[{"kind":"optimize","scalable_fraction":0.2,"efficiency_ratio":10,"friction":{"r_max":10,"gamma":0.1}}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
        let err = parse_scenario(r#"{"name":"t","analyses":[{"kind":"warp"}]}"#).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "kind"));
    }

    #[test]
    fn parses_figure_parameter_sets() {
        let text = r#"{
            "name": "figure-2",
            "analyses": [
                {"kind": "time_curves", "efficiency_ratio": 10,
                 "scalable_fractions": [0.2, 0.5, 0.8, 0.9, 0.95],
                 "x_grid": {"lo": 0, "hi": 0.65, "count": 300}},
                {"kind": "locus", "efficiency_ratio": 10,
                 "s_grid": {"lo": 0.01, "hi": 0.9, "count": 200}}
            ]
        }"#;
        let scenario = parse_scenario(text).unwrap();
        assert_eq!(scenario.analyses.len(), 2);
        assert!(matches!(
            scenario.analyses[0],
            AnalysisRequest::TimeCurves { .. }
        ));
        assert!(matches!(
            scenario.analyses[1],
            AnalysisRequest::Locus { .. }
        ));
    }

    #[test]
    fn emit_csv_shapes_and_errors() {
        let doc = emit_csv(&[CurveSample {
            abscissa: 0.0,
            values: vec![],
        }])
        .unwrap();
        assert_eq!(doc, "abscissa\n0\n");

        let samples = vec![
            CurveSample {
                abscissa: 0.5,
                values: vec![("a".into(), 1.0)],
            },
            CurveSample {
                abscissa: 0.25,
                values: vec![("a".into(), 2.0)],
            },
        ];
        // Rows come out in abscissa order regardless of input order.
        assert_eq!(emit_csv(&samples).unwrap(), "abscissa,a\n0.25,2\n0.5,1\n");

        let inconsistent = vec![
            CurveSample {
                abscissa: 0.0,
                values: vec![("a".into(), 1.0)],
            },
            CurveSample {
                abscissa: 1.0,
                values: vec![("b".into(), 2.0)],
            },
        ];
        assert!(matches!(
            emit_csv(&inconsistent),
            Err(Error::InconsistentLabels)
        ));
    }

    #[test]
    fn emit_csv_locus_row_has_nine_digit_values() {
        let grid = SweepGrid::linear(0.5, 0.9, 2).unwrap();
        let samples = sweep::optimal_locus(10.0, &grid).unwrap();
        let doc = emit_csv(&samples).unwrap();
        assert_eq!(doc, "abscissa,x_star,time\n0.5,0.166666667,0.8\n0.9,0,1\n");
    }

    #[test]
    fn emit_csv_phase_boundary_prints_paper_anchor() {
        let grid = SweepGrid::linear(0.0, 0.9, 10).unwrap();
        let samples = sweep::phase_boundary(&grid).unwrap();
        let doc = emit_csv(&samples).unwrap();
        assert!(doc.ends_with("0.9,10\n"), "{doc}");
    }

    #[test]
    fn emit_json_optimize_has_fixed_shape() {
        let scenario = parse_scenario(
            r#"{"name":"t","analyses":[{"kind":"optimize","scalable_fraction":0.95,"efficiency_ratio":10}]}"#,
        )
        .unwrap();
        let results = scenario.run().unwrap();
        assert_eq!(
            emit_json(&results),
            "{\"kind\":\"optimize\",\"parameters\":{\"efficiency_ratio\":10,\"scalable_fraction\":0.95},\"results\":{\"method\":\"closed_form\",\"regime\":\"collapse\",\"time\":1,\"x_star\":0}}\n"
        );
    }

    #[test]
    fn emit_json_threshold_and_eval_match_known_values() {
        let scenario = parse_scenario(
            r#"{"name":"t","analyses":[
                {"kind":"threshold","efficiency_ratio":10},
                {"kind":"eval","scalable_fraction":0.2,"efficiency_ratio":10,"allocation":0}
            ]}"#,
        )
        .unwrap();
        let results = scenario.run().unwrap();
        let doc = emit_json(&results);
        assert!(doc.starts_with('['));
        assert!(doc.contains("\"results\":{\"s_c\":0.9}"), "{doc}");
        assert!(doc.contains("\"results\":{\"time\":1}"), "{doc}");
    }

    #[test]
    fn emission_is_deterministic() {
        let text = r#"{"name":"t","analyses":[
            {"kind":"time_curves","efficiency_ratio":10,
             "scalable_fractions":[0.2,0.5],"x_grid":{"lo":0,"hi":0.65,"count":40}}
        ]}"#;
        let a = emit_json(&parse_scenario(text).unwrap().run().unwrap());
        let b = emit_json(&parse_scenario(text).unwrap().run().unwrap());
        assert_eq!(a, b);
        let csv_a = parse_scenario(text).unwrap().run().unwrap()[0]
            .to_csv()
            .unwrap();
        let csv_b = parse_scenario(text).unwrap().run().unwrap()[0]
            .to_csv()
            .unwrap();
        assert_eq!(csv_a, csv_b);
    }

    #[test]
    fn parameters_round_trip_through_emission() {
        let documents = [
            r#"{"name":"t","analyses":[{"kind":"eval","scalable_fraction":0.2,"efficiency_ratio":10,"allocation":0.25}]}"#,
            r#"{"name":"t","analyses":[{"kind":"optimize","scalable_fraction":0.4,"friction":{"r_max":10,"gamma":0.1}}]}"#,
            r#"{"name":"t","analyses":[{"kind":"threshold","friction":{"r_max":4,"gamma":2}}]}"#,
            r#"{"name":"t","analyses":[{"kind":"time_curves","efficiency_ratio":10,"scalable_fractions":[0.2,0.5],"x_grid":{"lo":0,"hi":0.65,"count":30}}]}"#,
            r#"{"name":"t","analyses":[{"kind":"time_curves","friction":{"r_max":10,"gamma":0.5},"scalable_fractions":[0.2],"x_grid":{"lo":0,"hi":0.65,"count":30}}]}"#,
            r#"{"name":"t","analyses":[{"kind":"locus","efficiency_ratio":10,"s_grid":{"lo":0.01,"hi":0.9,"count":20}}]}"#,
            r#"{"name":"t","analyses":[{"kind":"phase_boundary","s_grid":{"lo":0,"hi":0.966,"count":30}}]}"#,
            r#"{"name":"t","analyses":[{"kind":"classic","parallel_fractions":[0.5,0.9],"n_grid":{"lo":1,"hi":64,"count":20},"form":"time"}]}"#,
            r#"{"name":"t","analyses":[{"kind":"regime_grid","s_grid":{"lo":0.1,"hi":0.9,"count":5},"r_grid":{"lo":1,"hi":30,"count":5}}]}"#,
        ];
        for document in documents {
            let scenario = parse_scenario(document).unwrap();
            let request = &scenario.analyses[0];
            let mut echoed = Map::new();
            echoed.insert("kind".into(), Value::String(request.kind().into()));
            echoed.extend(request.parameters());
            let round_trip = format!(
                r#"{{"name":"t","analyses":[{}]}}"#,
                serde_json::to_string(&Value::Object(echoed)).unwrap()
            );
            let reparsed = parse_scenario(&round_trip).unwrap();
            assert_eq!(&reparsed.analyses[0], request, "document: {document}");
        }
    }
}
