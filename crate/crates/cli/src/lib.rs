//! Command-line front end: argument definitions, validation into a
//! [`RunConfig`], and dispatch.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use hctree::model::GraphPreset;
use hctree::oracle::{
    assignment_fields, check_consistency, count_admissible, exact_marginal, finite_measure,
};
use hctree::phase::{self, grid_with_critical, verify_theorem, TheoremArgs, THEOREM_IDS};
use hctree::sampler::sample;
use hctree::solvers::{solve, Scenario, Solution, SolutionLabel};
use hctree::{ActivityGraph, AgmPattern, FieldAssignment, FiniteVolume, ModelParams, RootDegree};

/// Defect above which a fixed point counts as inconsistent.
pub const CONSISTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hctree::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                hctree::Error::InvalidParameter(_)
                | hctree::Error::UnsupportedGraph(_)
                | hctree::Error::InvalidAdjacency(_)
                | hctree::Error::BudgetExceeded { .. },
            ) => 2,
            _ => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "hctree",
    version,
    about = "Fixed points, phase sweeps and exact checks for hard-core models on Cayley trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All fixed points at one activity.
    Solve(SolveArgs),
    /// Solution counts across an activity grid.
    Sweep(SweepArgs),
    /// Check the computable consequences of a counting statement.
    Verify(VerifyArgs),
    /// Exact consistency check of solver fields on a finite volume.
    Oracle(OracleArgs),
    /// Draw exact samples on a finite volume.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphArg {
    Wand,
    Hinge,
}

impl From<GraphArg> for GraphPreset {
    fn from(g: GraphArg) -> Self {
        match g {
            GraphArg::Wand => GraphPreset::Wand,
            GraphArg::Hinge => GraphPreset::Hinge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Ti,
    I3,
    I4,
    Wp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldsArg {
    Ti,
    TiAsym,
    I3,
    I4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootArg {
    Full,
    Half,
}

impl From<RootArg> for RootDegree {
    fn from(r: RootArg) -> Self {
        match r {
            RootArg::Full => RootDegree::Full,
            RootArg::Half => RootDegree::Half,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct PatternArgs {
    #[arg(long, value_enum, default_value = "wand")]
    pub graph: GraphArg,
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum, default_value = "ti")]
    pub scenario: ScenarioArg,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub i: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    /// Lower end of the grid; defaults to a tenth of the smallest critical activity.
    #[arg(long)]
    pub lambda_min: Option<f64>,
    /// Upper end of the grid; defaults to ten times the smallest critical activity.
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Number of log-spaced points; defaults to 256 per decade.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub theorem: String,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeArgs {
    #[arg(long, value_enum, default_value = "wand")]
    pub graph: GraphArg,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "full")]
    pub root: RootArg,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value = "ti")]
    pub fields: FieldsArg,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub volume: VolumeArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub volume: VolumeArgs,
    /// Index of the fixed point to sample from, in solver order.
    #[arg(long, default_value_t = 0)]
    pub solution: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Sample matrix path; the JSON sidecar goes next to it with `.json` appended.
    /// Without it only the sidecar is printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A finite volume carrying the fields of one family of fixed points.
#[derive(Debug, Clone)]
pub struct VolumeSpec {
    pub graph: ActivityGraph,
    pub volume: FiniteVolume,
    pub params: ModelParams,
    pub scenario: Scenario,
    pub asymmetric_only: bool,
}

/// Validated command.
#[derive(Debug, Clone)]
pub enum RunConfig {
    Solve {
        scenario: Scenario,
        params: ModelParams,
        format: Format,
        out: Option<PathBuf>,
    },
    Sweep {
        scenario: Scenario,
        k: u32,
        grid: Vec<f64>,
        format: Format,
        out: Option<PathBuf>,
    },
    Verify {
        theorem: String,
        args: TheoremArgs,
        out: Option<PathBuf>,
    },
    Oracle {
        spec: VolumeSpec,
        out: Option<PathBuf>,
    },
    Sample {
        spec: VolumeSpec,
        solution: usize,
        seed: u64,
        samples: usize,
        out: Option<PathBuf>,
    },
}

/// Whether the command's own check passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    VerificationFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::VerificationFailed => 1,
        }
    }
}

fn positive(flag: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!(
            "--{flag} must be a positive number, got {v}"
        )))
    }
}

fn need(flag: &str, v: Option<u32>, what: &str) -> Result<u32, CliError> {
    v.ok_or_else(|| usage(format!("--{flag} is required for {what}")))
}

fn scenario_of(p: &PatternArgs) -> Result<Scenario, CliError> {
    let wand_only = |what: &str| {
        if p.graph == GraphArg::Wand {
            Ok(())
        } else {
            Err(usage(format!(
                "--scenario {what} is defined for --graph wand only"
            )))
        }
    };
    let s = match p.scenario {
        ScenarioArg::Ti => Scenario::ti(p.graph.into()),
        ScenarioArg::I3 => {
            wand_only("i3")?;
            Scenario::I3 {
                m: need("m", p.m, "--scenario i3")?,
            }
        }
        ScenarioArg::I4 => {
            wand_only("i4")?;
            Scenario::I4 {
                m: need("m", p.m, "--scenario i4")?,
                r: need("r", p.r, "--scenario i4")?,
            }
        }
        ScenarioArg::Wp => {
            wand_only("wp")?;
            Scenario::Wp {
                i: need("i", p.i, "--scenario wp")?,
            }
        }
    };
    s.validate(p.k)
        .map_err(|e| usage(format!("{e} (check --k, --m, --r, --i)")))?;
    Ok(s)
}

fn volume_spec(v: &VolumeArgs) -> Result<VolumeSpec, CliError> {
    let preset: GraphPreset = v.graph.into();
    let (scenario, asymmetric_only) = match v.fields {
        FieldsArg::Ti => (Scenario::ti(preset), false),
        FieldsArg::TiAsym => (Scenario::ti(preset), true),
        FieldsArg::I3 | FieldsArg::I4 if v.graph != GraphArg::Wand => {
            return Err(usage("--fields i3/i4 are defined for --graph wand only"));
        }
        FieldsArg::I3 => (
            Scenario::I3 {
                m: need("m", v.m, "--fields i3")?,
            },
            false,
        ),
        FieldsArg::I4 => (
            Scenario::I4 {
                m: need("m", v.m, "--fields i4")?,
                r: need("r", v.r, "--fields i4")?,
            },
            false,
        ),
    };
    scenario
        .validate(v.k)
        .map_err(|e| usage(format!("{e} (check --k, --m, --r)")))?;
    let volume = FiniteVolume::new(v.k, v.n, v.root.into())
        .map_err(|e| usage(format!("{e} (check --k, --n)")))?;
    Ok(VolumeSpec {
        graph: ActivityGraph::preset(preset),
        volume,
        params: ModelParams::new(v.k, positive("lambda", v.lambda)?)?,
        scenario,
        asymmetric_only,
    })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        Ok(match cli.command {
            Command::Solve(a) => RunConfig::Solve {
                scenario: scenario_of(&a.pattern)?,
                params: ModelParams::new(a.pattern.k, positive("lambda", a.lambda)?)?,
                format: a.format,
                out: a.out,
            },
            Command::Sweep(a) => {
                let scenario = scenario_of(&a.pattern)?;
                let k = a.pattern.k;
                let critical = phase::advertised_critical(scenario, k)?;
                let c = critical.first().copied();
                let lo = match (a.lambda_min, c) {
                    (Some(v), _) => positive("lambda-min", v)?,
                    (None, Some(c)) => c / 10.0,
                    (None, None) => {
                        return Err(usage("--lambda-min is required: no critical activity"))
                    }
                };
                let hi = match (a.lambda_max, c) {
                    (Some(v), _) => positive("lambda-max", v)?,
                    (None, Some(c)) => c * 10.0,
                    (None, None) => {
                        return Err(usage("--lambda-max is required: no critical activity"))
                    }
                };
                if lo > hi {
                    return Err(usage("--lambda-min exceeds --lambda-max"));
                }
                let inside: Vec<f64> = critical
                    .into_iter()
                    .filter(|c| *c >= lo && *c <= hi)
                    .collect();
                let grid = match a.points {
                    Some(0) => return Err(usage("--points must be at least 1")),
                    Some(n) => {
                        let mut g = log_grid(lo, hi, n);
                        for &c in &inside {
                            g.extend([c * (1.0 - 1e-6), c, c * (1.0 + 1e-6)]);
                        }
                        g.sort_by(f64::total_cmp);
                        g.dedup();
                        g
                    }
                    None => grid_with_critical(lo, hi, &inside),
                };
                RunConfig::Sweep {
                    scenario,
                    k,
                    grid,
                    format: a.format,
                    out: a.out,
                }
            }
            Command::Verify(a) => {
                let theorem = a.theorem.to_ascii_lowercase();
                if !THEOREM_IDS.contains(&theorem.as_str()) {
                    return Err(usage(format!(
                        "--theorem `{}` is unknown; expected one of {}",
                        a.theorem,
                        THEOREM_IDS.join(", ")
                    )));
                }
                if a.format == Format::Csv {
                    return Err(usage("--format csv is not available for verify reports"));
                }
                RunConfig::Verify {
                    theorem,
                    args: TheoremArgs {
                        k: a.k,
                        m: a.m,
                        r: a.r,
                    },
                    out: a.out,
                }
            }
            Command::Oracle(a) => RunConfig::Oracle {
                spec: volume_spec(&a.volume)?,
                out: a.out,
            },
            Command::Sample(a) => {
                if a.samples == 0 {
                    return Err(usage("--samples must be at least 1"));
                }
                RunConfig::Sample {
                    spec: volume_spec(&a.volume)?,
                    solution: a.solution,
                    seed: a.seed,
                    samples: a.samples,
                    out: a.out,
                }
            }
        })
    }
}

fn emit(
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

/// Fixed points selected by a [`VolumeSpec`], with the field assignment each
/// induces on the volume.
fn selected(spec: &VolumeSpec) -> Result<Vec<(Solution, FieldAssignment)>, CliError> {
    let report = solve(spec.scenario, &spec.params)?;
    let k = spec.params.k();
    report
        .solutions
        .into_iter()
        .filter(|s| !spec.asymmetric_only || s.label != SolutionLabel::TiSymmetric)
        .map(|s| {
            let assignment = match spec.scenario.pattern(k) {
                None => FieldAssignment::Uniform(s.fields.z),
                Some((m, r)) => FieldAssignment::TwoClass {
                    pattern: AgmPattern::new(k, m, r)?,
                    z: s.fields.z,
                    t: s.fields.t,
                },
            };
            Ok((s, assignment))
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct OracleEntry {
    label: SolutionLabel,
    z1: f64,
    z2: f64,
    t1: f64,
    t2: f64,
    defect: f64,
}

#[derive(Debug, Serialize)]
struct OracleReport {
    schema: &'static str,
    graph: String,
    k: u32,
    n: u32,
    root: RootDegree,
    lambda: f64,
    scenario: String,
    admissible_configurations: String,
    tolerance: f64,
    max_defect: f64,
    passed: bool,
    entries: Vec<OracleEntry>,
}

fn run_oracle(
    spec: &VolumeSpec,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let lambda = spec.params.lambda();
    let chosen = selected(spec)?;
    let mut entries = Vec::new();
    for (s, assignment) in &chosen {
        let fields = assignment_fields(&spec.graph, &spec.volume, lambda, assignment)?;
        let [z1, z2, t1, t2] = s.fields.as_array();
        entries.push(OracleEntry {
            label: s.label,
            z1,
            z2,
            t1,
            t2,
            defect: check_consistency(&spec.graph, &spec.volume, lambda, &fields)?,
        });
    }
    let max_defect = entries.iter().map(|e| e.defect).fold(0.0, f64::max);
    let passed = !entries.is_empty() && max_defect <= CONSISTENCY_TOL;
    let report = OracleReport {
        schema: "hctree-oracle/1",
        graph: spec.graph.name().to_string(),
        k: spec.volume.k(),
        n: spec.volume.n(),
        root: spec.volume.root_degree(),
        lambda,
        scenario: spec.scenario.to_string(),
        admissible_configurations: count_admissible(&spec.graph, &spec.volume).to_string(),
        tolerance: CONSISTENCY_TOL,
        max_defect,
        passed,
        entries,
    };
    emit(out, stdout, |w| write_json(w, &report))?;
    Ok(if passed {
        Outcome::Ok
    } else {
        Outcome::VerificationFailed
    })
}

#[derive(Debug, Serialize)]
struct SampleSummary {
    #[serde(flatten)]
    sidecar: hctree::sampler::SampleSidecar,
    exact_marginals: Option<Vec<[f64; 3]>>,
}

fn sidecar_path(matrix: &Path) -> PathBuf {
    let mut s = matrix.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn run_sample(
    spec: &VolumeSpec,
    solution: usize,
    seed: u64,
    samples: usize,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let lambda = spec.params.lambda();
    let chosen = selected(spec)?;
    let Some((_, assignment)) = chosen.get(solution) else {
        return Err(usage(format!(
            "--solution {solution} is out of range: {} fixed points",
            chosen.len()
        )));
    };
    let fields = assignment_fields(&spec.graph, &spec.volume, lambda, assignment)?;
    let batch = sample(&spec.graph, &spec.volume, lambda, &fields, seed, samples)?;
    // Exact marginals when the volume is small enough to enumerate.
    let exact = finite_measure(
        &spec.graph,
        &spec.volume,
        lambda,
        &fields[spec.volume.boundary()],
    )
    .ok()
    .map(|m| {
        (0..spec.volume.len())
            .map(|v| exact_marginal(&m, v))
            .collect::<Result<Vec<_>, _>>()
    })
    .transpose()?;
    let summary = SampleSummary {
        sidecar: batch.sidecar(),
        exact_marginals: exact,
    };
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            batch.write_matrix(&mut w)?;
            w.flush()?;
            let mut s = BufWriter::new(File::create(sidecar_path(path))?);
            write_json(&mut s, &summary)?;
            s.flush()?;
        }
        None => write_json(stdout, &summary)?,
    }
    Ok(Outcome::Ok)
}

/// Executes a validated command, writing to `--out` or to `stdout`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    match config {
        RunConfig::Solve {
            scenario,
            params,
            format,
            out,
        } => {
            let report = solve(*scenario, params)?;
            emit(out, stdout, |w| match format {
                Format::Json => write_json(w, &report),
                Format::Csv => Ok(phase::write_csv(&[report.into()], w)?),
            })?;
            Ok(Outcome::Ok)
        }
        RunConfig::Sweep {
            scenario,
            k,
            grid,
            format,
            out,
        } => {
            let points = phase::sweep(*scenario, *k, grid)?;
            emit(out, stdout, |w| match format {
                Format::Json => write_json(w, &points),
                Format::Csv => Ok(phase::write_csv(&points, w)?),
            })?;
            Ok(Outcome::Ok)
        }
        RunConfig::Verify { theorem, args, out } => {
            let report = verify_theorem(theorem, *args)
                .map_err(|e| usage(format!("{e} (check --k, --m, --r)")))?;
            emit(out, stdout, |w| write_json(w, &report))?;
            Ok(if report.passed {
                Outcome::Ok
            } else {
                Outcome::VerificationFailed
            })
        }
        RunConfig::Oracle { spec, out } => run_oracle(spec, out, stdout),
        RunConfig::Sample {
            spec,
            solution,
            seed,
            samples,
            out,
        } => run_sample(spec, *solution, *seed, *samples, out, stdout),
    }
}

/// Parses, validates and runs `args`, returning the process exit code.
/// Errors are reported on `stderr`.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    match RunConfig::from_cli(cli).and_then(|c| run(&c, stdout)) {
        Ok(outcome) => outcome.exit_code(),
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(CliError::Json(e)) if e.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
