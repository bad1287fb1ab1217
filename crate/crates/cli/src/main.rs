//! Command-line surface for the allocation-law library.
//!
//! Scalar subcommands (eval, optimize, threshold) print JSON by default;
//! table subcommands (time-curves, locus, phase-boundary, classic,
//! regime-grid) print CSV. `scenario run FILE` executes a JSON scenario
//! document. Results go to standard output (or `-o`), errors to the
//! error stream, and exit statuses encode the failure class: 2 for
//! argument or validation errors, 3 for degenerate inputs, 4 for solver
//! failures.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use scalelaw::scenario::{
    emit_json, parse_scenario, AnalysisRequest, AnalysisResult, ModelSpec, RatioSpec,
};
use scalelaw::sweep::{CurveForm, SweepGrid};
use scalelaw::{AllocationFraction, Error, FrictionModel, WorkloadPoint};

#[derive(Parser)]
#[command(
    name = "scalelaw",
    version,
    about = "Allocation-law analysis: optimal specialization shares, collapse thresholds, and figure datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the normalized execution time at one allocation
    Eval(EvalArgs),
    /// Compute the optimal allocation and its regime
    Optimize(OptimizeArgs),
    /// Compute the collapse threshold S_c for a ratio
    Threshold(ThresholdArgs),
    /// Tabulate T(x) curves for a list of scalable fractions
    TimeCurves(TimeCurvesArgs),
    /// Tabulate the optimal locus x*(S), T(x*(S))
    Locus(LocusArgs),
    /// Tabulate the phase boundary R_c(S)
    PhaseBoundary(PhaseBoundaryArgs),
    /// Tabulate classical Amdahl/Gustafson curves
    Classic(ClassicArgs),
    /// Classify the regime over an (S, R) product grid
    RegimeGrid(RegimeGridArgs),
    /// Run analyses from a scenario file
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Execute all analyses in a JSON scenario document, in file order
    Run(ScenarioRunArgs),
}

#[derive(Args)]
struct RatioArgs {
    /// Efficiency ratio R of specialized over programmable compute
    #[arg(
        short = 'r',
        long = "efficiency-ratio",
        conflicts_with_all = ["r_max", "gamma"],
        required_unless_present = "r_max"
    )]
    efficiency_ratio: Option<f64>,

    /// Peak efficiency ratio R_max (friction mode, replaces -r)
    #[arg(long = "r-max", requires = "gamma")]
    r_max: Option<f64>,

    /// Memory-friction coefficient; enables the bandwidth-limited model
    #[arg(long, requires = "r_max")]
    gamma: Option<f64>,
}

impl RatioArgs {
    fn ratio(&self) -> Result<RatioSpec, Error> {
        match (self.efficiency_ratio, self.r_max, self.gamma) {
            (Some(r), None, None) => {
                // Validate eagerly so a bad -r fails identically to a bad
                // scenario document.
                scalelaw::collapse_threshold(r)?;
                Ok(RatioSpec::Baseline(r))
            }
            (None, Some(r_max), Some(gamma)) => {
                Ok(RatioSpec::Friction(FrictionModel::new(r_max, gamma)?))
            }
            // clap's requires/conflicts rules keep the remaining shapes
            // unrepresentable.
            _ => unreachable!("argument constraints enforce -r xor (--r-max, --gamma)"),
        }
    }

    fn model(&self, scalable_fraction: f64) -> Result<ModelSpec, Error> {
        match self.ratio()? {
            RatioSpec::Baseline(r) => Ok(ModelSpec::Baseline(WorkloadPoint::new(
                scalable_fraction,
                r,
            )?)),
            RatioSpec::Friction(model) => ModelSpec::friction(scalable_fraction, model),
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result to a file instead of standard output
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,

    /// Output format (default: json for scalars, csv for tables)
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy)]
struct GridSpec {
    lo: f64,
    hi: f64,
    count: usize,
}

impl GridSpec {
    fn build(&self) -> Result<SweepGrid, Error> {
        SweepGrid::linear(self.lo, self.hi, self.count)
    }
}

fn parse_grid(text: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:count, got {text:?}"));
    }
    let lo = parts[0]
        .parse::<f64>()
        .map_err(|e| format!("bad lo {:?}: {e}", parts[0]))?;
    let hi = parts[1]
        .parse::<f64>()
        .map_err(|e| format!("bad hi {:?}: {e}", parts[1]))?;
    let count = parts[2]
        .parse::<usize>()
        .map_err(|e| format!("bad count {:?}: {e}", parts[2]))?;
    Ok(GridSpec { lo, hi, count })
}

#[derive(Args)]
struct EvalArgs {
    /// Value-scalable fraction S in [0, 1]
    #[arg(short = 's', long = "scalable-fraction")]
    scalable_fraction: f64,

    #[command(flatten)]
    ratio: RatioArgs,

    /// Allocation x in [0, 1 - 1e-9]
    #[arg(short = 'x', long = "allocation")]
    allocation: f64,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Value-scalable fraction S in (0, 1]
    #[arg(short = 's', long = "scalable-fraction")]
    scalable_fraction: f64,

    #[command(flatten)]
    ratio: RatioArgs,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    ratio: RatioArgs,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TimeCurvesArgs {
    /// Scalable fraction; repeat for one curve per value
    #[arg(short = 's', long = "scalable-fraction", required = true)]
    scalable_fractions: Vec<f64>,

    #[command(flatten)]
    ratio: RatioArgs,

    /// Allocation grid lo:hi:count within [0, 1 - 1e-9]
    #[arg(long, value_parser = parse_grid)]
    grid: GridSpec,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct LocusArgs {
    /// Efficiency ratio R
    #[arg(short = 'r', long = "efficiency-ratio")]
    efficiency_ratio: f64,

    /// Scalable-fraction grid lo:hi:count within (0, 1]
    #[arg(long, value_parser = parse_grid)]
    grid: GridSpec,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PhaseBoundaryArgs {
    /// Scalable-fraction grid lo:hi:count within [0, 1)
    #[arg(long, value_parser = parse_grid)]
    grid: GridSpec,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ClassicArgs {
    /// Parallel fraction P; repeat for one curve pair per value
    #[arg(short = 'p', long = "parallel-fraction", required = true)]
    parallel_fractions: Vec<f64>,

    /// Processor-count grid lo:hi:count within [1, inf)
    #[arg(long, value_parser = parse_grid)]
    grid: GridSpec,

    /// Which projection of the laws to tabulate
    #[arg(long, value_enum, default_value = "speedup")]
    form: FormArg,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormArg {
    Speedup,
    Time,
}

#[derive(Args)]
struct RegimeGridArgs {
    /// Scalable-fraction grid lo:hi:count within [0, 1)
    #[arg(long, value_parser = parse_grid)]
    grid: GridSpec,

    /// Efficiency-ratio grid lo:hi:count within [1, inf)
    #[arg(long = "r-grid", value_parser = parse_grid)]
    r_grid: GridSpec,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ScenarioRunArgs {
    /// Scenario document to execute
    file: PathBuf,

    #[command(flatten)]
    output: OutputArgs,
}

enum CliError {
    Model(Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(message) => f.write_str(message),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(Error::Degenerate { .. }) => 3,
            CliError::Model(Error::NoConvergence { .. })
            | CliError::Model(Error::NonFinite { .. }) => 4,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Eval(args) => {
            let request = AnalysisRequest::Eval {
                model: args.ratio.model(args.scalable_fraction)?,
                allocation: AllocationFraction::new(args.allocation)?,
            };
            emit_single(&request, &args.output)
        }
        Command::Optimize(args) => {
            let request = AnalysisRequest::Optimize {
                model: args.ratio.model(args.scalable_fraction)?,
            };
            emit_single(&request, &args.output)
        }
        Command::Threshold(args) => {
            let request = AnalysisRequest::Threshold {
                ratio: args.ratio.ratio()?,
            };
            emit_single(&request, &args.output)
        }
        Command::TimeCurves(args) => {
            let request = AnalysisRequest::TimeCurves {
                ratio: args.ratio.ratio()?,
                scalable_fractions: args.scalable_fractions.clone(),
                x_grid: args.grid.build()?,
            };
            emit_single(&request, &args.output)
        }
        Command::Locus(args) => {
            scalelaw::collapse_threshold(args.efficiency_ratio)?;
            let request = AnalysisRequest::Locus {
                efficiency_ratio: args.efficiency_ratio,
                s_grid: args.grid.build()?,
            };
            emit_single(&request, &args.output)
        }
        Command::PhaseBoundary(args) => {
            let request = AnalysisRequest::PhaseBoundary {
                s_grid: args.grid.build()?,
            };
            emit_single(&request, &args.output)
        }
        Command::Classic(args) => {
            let request = AnalysisRequest::Classic {
                parallel_fractions: args.parallel_fractions.clone(),
                n_grid: args.grid.build()?,
                form: match args.form {
                    FormArg::Speedup => CurveForm::Speedup,
                    FormArg::Time => CurveForm::Time,
                },
            };
            emit_single(&request, &args.output)
        }
        Command::RegimeGrid(args) => {
            let request = AnalysisRequest::RegimeGrid {
                s_grid: args.grid.build()?,
                r_grid: args.r_grid.build()?,
            };
            emit_single(&request, &args.output)
        }
        Command::Scenario(ScenarioCommand::Run(args)) => run_scenario_file(&args),
    }
}

fn default_format(request: &AnalysisRequest) -> Format {
    match request {
        AnalysisRequest::Eval { .. }
        | AnalysisRequest::Optimize { .. }
        | AnalysisRequest::Threshold { .. } => Format::Json,
        _ => Format::Csv,
    }
}

fn emit_single(request: &AnalysisRequest, output: &OutputArgs) -> Result<(), CliError> {
    let result = request.run()?;
    let format = output.format.unwrap_or_else(|| default_format(request));
    let text = match format {
        Format::Json => emit_json(std::slice::from_ref(&result)),
        Format::Csv => result.to_csv()?,
    };
    write_text(&output.output, &text)
}

fn run_scenario_file(args: &ScenarioRunArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.file).map_err(|source| CliError::Io {
        path: args.file.clone(),
        source,
    })?;
    let scenario = parse_scenario(&text)?;
    let results = scenario.run()?;
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => write_text(&args.output.output, &emit_json(&results)),
        Format::Csv => write_csv_results(&results, &args.output.output),
    }
}

fn write_csv_results(results: &[AnalysisResult], output: &Option<PathBuf>) -> Result<(), CliError> {
    if results.len() == 1 {
        return write_text(output, &results[0].to_csv()?);
    }
    let base = output.as_ref().ok_or_else(|| {
        CliError::Usage(format!(
            "csv output of a {}-analysis scenario requires --output; each analysis becomes its own file",
            results.len()
        ))
    })?;
    for (index, result) in results.iter().enumerate() {
        let path = indexed_path(base, index);
        fs::write(&path, result.to_csv()?).map_err(|source| CliError::Io { path, source })?;
    }
    Ok(())
}

fn indexed_path(base: &Path, index: usize) -> PathBuf {
    let stem = base
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("result");
    let name = match base.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}.{index}.{ext}"),
        None => format!("{stem}.{index}"),
    };
    base.with_file_name(name)
}

fn write_text(output: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
    }
}
