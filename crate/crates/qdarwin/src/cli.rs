//! Command-line driver.
//!
//! Exit codes: 0 on success, 1 for invalid input (flags, files, parameters),
//! 2 for internal failures such as unwritable outputs.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdarwin_core::darwinism::{classify_curve, mi_curve, CurveShape, MiCurve};
use qdarwin_core::estimator::{plan_measurements, PlanTarget};
use qdarwin_core::graphstate::{
    build_graph_state_with_limit, check_local_equivalence, diamond_spec, diamond_to_canonical_circuit,
    named_state, star_experimental_to_ghz_circuit, star_spec, star_to_ghz_circuit, GraphSpec,
    NamedState,
};
use qdarwin_core::measurement::{
    curve_from_counts, sample_plan, OutcomeCounts, Pipeline, RunConfig, ShotModel,
};
use qdarwin_core::state::{QuantumState, StateVector};
use qdarwin_core::Limits;
use serde_json::{json, Value};

use crate::angle::parse_angle;
use crate::formats;
use crate::manifest::{manifest_path, RunManifest};

pub const MAX_QUBITS_ENV: &str = "QDARWIN_MAX_QUBITS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qdarwin_core::Error),
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        source: formats::FormatError,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    CheckFailed(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Write { .. } => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "qdarwin", version, about = "Graph-state simulation and fragment mutual information")]
pub struct Cli {
    /// Pin the manifest timestamp (RFC 3339) for reproducible manifests.
    #[arg(long, global = true)]
    timestamp: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a state and dump its amplitudes as JSON.
    State(StateArgs),
    /// Mutual-information curve of a state, as CSV or JSON.
    Curve(CurveArgs),
    /// Sample measurement counts and estimate the curve with error bars.
    Estimate(EstimateArgs),
    /// Correlators and settings needed by an estimator.
    Plan(PlanArgs),
    /// Check the built-in local-equivalence identities.
    Verify,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Star,
    Diamond,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Named {
    StarExperimental,
    DiamondExperimental,
    DiamondCanonical,
    HyperentangledXi,
    Ghz4,
}

impl Named {
    fn state(self) -> NamedState {
        match self {
            Named::StarExperimental => NamedState::StarExperimental,
            Named::DiamondExperimental => NamedState::DiamondExperimental,
            Named::DiamondCanonical => NamedState::DiamondCanonical,
            Named::HyperentangledXi => NamedState::HyperentangledXi,
            Named::Ghz4 => NamedState::Ghz { n: 4 },
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Graph family; the system is qubit 0 and the environment 1..=n-env.
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long)]
    n_env: Option<usize>,
    /// System-environment phase in radians (default pi).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Environment chain phase in radians, diamond only (default pi).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Graph given as JSON: {"n_qubits", "system", "edges": [[j, k, phase], ...]}.
    #[arg(long)]
    graph_file: Option<PathBuf>,
    /// A fixed four-qubit state.
    #[arg(long, value_enum)]
    named: Option<Named>,
}

#[derive(Args, Debug)]
struct StateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Aggregate {
    Mean,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[command(flatten)]
    source: Source,
    /// Per-size statistic reported as the curve value; min and max are always written.
    #[arg(long, value_enum, default_value = "mean")]
    aggregate: Aggregate,
    /// Tolerance in bits for the plateau/growing classification printed on stdout.
    #[arg(long, default_value_t = 0.01)]
    classify_tol: f64,
    /// Output path; `.json` selects JSON, anything else CSV. Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum PipelineArg {
    ClosedForm,
    Reconstruction,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ShotModelArg {
    Fixed,
    Poisson,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum)]
    pipeline: PipelineArg,
    #[arg(long, default_value_t = 4500)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bootstrap resamples for the error bars (0 disables them).
    #[arg(long, default_value_t = 500)]
    bootstrap: usize,
    #[arg(long, value_enum, default_value = "fixed")]
    shot_model: ShotModelArg,
    /// Estimate from stored counts instead of sampling a state.
    #[arg(long)]
    counts_file: Option<PathBuf>,
    /// Also write the sampled counts as JSON.
    #[arg(long)]
    dump_counts: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TargetArg {
    Star,
    FullTomography,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(long, value_enum)]
    target: TargetArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let outcome = std::panic::catch_unwind(|| execute(&cli));
    match outcome {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("error: internal failure");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let limits = limits_from_env()?;
    let ts = cli.timestamp.as_deref();
    match &cli.command {
        Command::State(a) => cmd_state(a, limits, ts),
        Command::Curve(a) => cmd_curve(a, limits, ts),
        Command::Estimate(a) => cmd_estimate(a, limits, ts),
        Command::Plan(a) => cmd_plan(a, ts),
        Command::Verify => cmd_verify(),
    }
}

fn limits_from_env() -> Result<Limits> {
    match std::env::var(MAX_QUBITS_ENV) {
        Err(_) => Ok(Limits::default()),
        Ok(v) => {
            let max_qubits = v.trim().parse::<usize>().map_err(|_| {
                CliError::Usage(format!("{MAX_QUBITS_ENV}={v:?} is not a qubit count"))
            })?;
            if max_qubits == 0 || max_qubits > usize::BITS as usize - 2 {
                return Err(CliError::Usage(format!("{MAX_QUBITS_ENV}={v:?} out of range")));
            }
            Ok(Limits { max_qubits })
        }
    }
}

struct Resolved {
    state: StateVector,
    system: usize,
    params: BTreeMap<String, Value>,
}

fn resolve(src: &Source, limits: Limits) -> Result<Resolved> {
    let chosen = [src.family.is_some(), src.graph_file.is_some(), src.named.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if chosen != 1 {
        return Err(CliError::Usage(
            "give exactly one of --family, --graph-file or --named".into(),
        ));
    }
    let mut params = BTreeMap::new();
    if let Some(family) = src.family {
        let n_env = src
            .n_env
            .ok_or_else(|| CliError::Usage("--family needs --n-env".into()))?;
        let phi = src.phi.unwrap_or(std::f64::consts::PI);
        let spec = match family {
            Family::Star => {
                if src.theta.is_some() {
                    return Err(CliError::Usage("--theta only applies to --family diamond".into()));
                }
                params.insert("family".into(), json!("star"));
                star_spec(n_env, phi)?
            }
            Family::Diamond => {
                let theta = src.theta.unwrap_or(std::f64::consts::PI);
                params.insert("family".into(), json!("diamond"));
                params.insert("theta".into(), json!(theta));
                diamond_spec(n_env, phi, theta)?
            }
        };
        params.insert("n_env".into(), json!(n_env));
        params.insert("phi".into(), json!(phi));
        let state = build_graph_state_with_limit(&spec, limits)?;
        return Ok(Resolved { state, system: spec.system, params });
    }
    if src.n_env.is_some() || src.phi.is_some() || src.theta.is_some() {
        return Err(CliError::Usage(
            "--n-env, --phi and --theta only apply to --family".into(),
        ));
    }
    if let Some(path) = &src.graph_file {
        let spec = read_graph(path)?;
        params.insert("graph_file".into(), json!(path.display().to_string()));
        params.insert("graph".into(), serde_json::from_str(&formats::graph_spec_to_json(&spec)).expect("valid JSON"));
        let state = build_graph_state_with_limit(&spec, limits)?;
        return Ok(Resolved { state, system: spec.system, params });
    }
    let named = src.named.expect("one source chosen");
    let name = named.to_possible_value().expect("named value").get_name().to_string();
    params.insert("named".into(), json!(name));
    let state = named_state(named.state())?;
    limits.check(state.n_qubits())?;
    Ok(Resolved { state, system: 0, params })
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn read_graph(path: &Path) -> Result<GraphSpec> {
    formats::graph_spec_from_json(&read_text(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `text` with its manifest, or prints it when no path is given.
fn emit(
    out: Option<&Path>,
    text: &str,
    command: &str,
    params: BTreeMap<String, Value>,
    seed: u64,
    timestamp: Option<&str>,
) -> Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            write_text(path, text)?;
            let manifest = RunManifest::new(command, params, seed, timestamp);
            write_text(&manifest_path(path), &manifest.to_json())
        }
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn curve_text(curve: &MiCurve, out: Option<&Path>) -> String {
    match out {
        Some(p) if is_json(p) => formats::curve_to_json(curve),
        _ => formats::curve_to_csv(curve),
    }
}

fn cmd_state(a: &StateArgs, limits: Limits, ts: Option<&str>) -> Result<()> {
    let r = resolve(&a.source, limits)?;
    let text = formats::state_to_json(&r.state, r.system);
    emit(a.out.as_deref(), &text, "state", r.params, 0, ts)
}

fn shape_name(shape: CurveShape) -> &'static str {
    match shape {
        CurveShape::Plateau => "plateau",
        CurveShape::Growing => "growing",
        CurveShape::Other => "other",
    }
}

fn cmd_curve(a: &CurveArgs, limits: Limits, ts: Option<&str>) -> Result<()> {
    if !(a.classify_tol.is_finite() && a.classify_tol > 0.0) {
        return Err(CliError::Usage("--classify-tol must be positive".into()));
    }
    let r = resolve(&a.source, limits)?;
    let curve = mi_curve(&r.state, r.system)?;
    let mut params = r.params;
    params.insert("aggregate".into(), json!("mean"));
    params.insert("system".into(), json!(r.system));
    let Aggregate::Mean = a.aggregate;
    emit(a.out.as_deref(), &curve_text(&curve, a.out.as_deref()), "curve", params, 0, ts)?;
    if let Some(path) = &a.out {
        let shape = classify_curve(&curve, a.classify_tol)
            .map(shape_name)
            .unwrap_or("other");
        println!("wrote {} ({} points, shape: {shape})", path.display(), curve.points.len());
    }
    Ok(())
}

fn cmd_estimate(a: &EstimateArgs, limits: Limits, ts: Option<&str>) -> Result<()> {
    let pipeline = match a.pipeline {
        PipelineArg::ClosedForm => Pipeline::ClosedForm,
        PipelineArg::Reconstruction => Pipeline::Reconstruction,
    };
    let cfg = RunConfig {
        shots_per_setting: a.shots,
        seed: a.seed,
        bootstrap_resamples: a.bootstrap,
        shot_model: match a.shot_model {
            ShotModelArg::Fixed => ShotModel::Fixed,
            ShotModelArg::Poisson => ShotModel::Poisson,
        },
    };
    cfg.validate()?;
    let mut params = BTreeMap::new();
    let (data, system) = match &a.counts_file {
        Some(path) => {
            let s = &a.source;
            if s.family.is_some() || s.graph_file.is_some() || s.named.is_some() {
                return Err(CliError::Usage(
                    "--counts-file replaces the state flags; give one or the other".into(),
                ));
            }
            if a.dump_counts.is_some() {
                return Err(CliError::Usage("--dump-counts needs sampled data, not --counts-file".into()));
            }
            let data = formats::counts_from_json(&read_text(path)?).map_err(|source| CliError::Format {
                path: path.clone(),
                source,
            })?;
            params.insert("counts_file".into(), json!(path.display().to_string()));
            (data, 0)
        }
        None => {
            let r = resolve(&a.source, limits)?;
            if r.state.n_qubits() != 4 {
                return Err(CliError::Usage(format!(
                    "estimation needs a four-qubit state, got {} qubits",
                    r.state.n_qubits()
                )));
            }
            params.extend(r.params);
            let data: Vec<OutcomeCounts> = sample_plan(&r.state, &pipeline.plan(), &cfg)?;
            if let Some(path) = &a.dump_counts {
                write_text(path, &formats::counts_to_json(&data))?;
            }
            (data, r.system)
        }
    };
    let curve = curve_from_counts(&data, system, &cfg, pipeline)?;
    params.insert(
        "pipeline".into(),
        json!(match a.pipeline {
            PipelineArg::ClosedForm => "closed_form",
            PipelineArg::Reconstruction => "reconstruction",
        }),
    );
    params.insert("shots".into(), json!(a.shots));
    params.insert("bootstrap".into(), json!(a.bootstrap));
    params.insert(
        "shot_model".into(),
        json!(match a.shot_model {
            ShotModelArg::Fixed => "fixed",
            ShotModelArg::Poisson => "poisson",
        }),
    );
    params.insert("system".into(), json!(system));
    emit(a.out.as_deref(), &curve_text(&curve, a.out.as_deref()), "estimate", params, a.seed, ts)
}

fn cmd_plan(a: &PlanArgs, ts: Option<&str>) -> Result<()> {
    let target = match a.target {
        TargetArg::Star => PlanTarget::Star,
        TargetArg::FullTomography => PlanTarget::FullTomography,
    };
    let plan = plan_measurements(target);
    let mut params = BTreeMap::new();
    params.insert("target".into(), json!(formats::plan_target_name(target)));
    emit(a.out.as_deref(), &formats::plan_to_json(&plan), "plan", params, 0, ts)
}

/// Runs the equivalence checks and returns the report text and overall result.
pub fn verify_report() -> std::result::Result<(String, bool), qdarwin_core::Error> {
    let pi = std::f64::consts::PI;
    let star = build_graph_state_with_limit(&star_spec(3, pi)?, Limits::default())?;
    let diamond = build_graph_state_with_limit(&diamond_spec(3, pi, pi)?, Limits::default())?;
    let ghz = StateVector::ghz(4)?;
    let checks = [
        (
            "star graph state -> GHZ under environment Hadamards",
            check_local_equivalence(&star, &ghz, &star_to_ghz_circuit(3))?,
        ),
        (
            "diamond graph state -> canonical four-term state under Swap(1,2) and local gates",
            check_local_equivalence(
                &diamond,
                &named_state(NamedState::DiamondCanonical)?,
                &diamond_to_canonical_circuit(),
            )?,
        ),
        (
            "two-branch star resource -> GHZ under X on qubits 1 and 3",
            check_local_equivalence(
                &named_state(NamedState::StarExperimental)?,
                &ghz,
                &star_experimental_to_ghz_circuit(),
            )?,
        ),
    ];
    let mut text = String::new();
    let mut all = true;
    for (name, report) in checks {
        all &= report.pass;
        let verdict = if report.pass { "PASS" } else { "FAIL" };
        writeln!(text, "{name}: fidelity {:.6} {verdict}", report.fidelity).expect("String write");
    }
    Ok((text, all))
}

fn cmd_verify() -> Result<()> {
    let (text, all) = verify_report()?;
    print!("{text}");
    if all {
        Ok(())
    } else {
        Err(CliError::CheckFailed("equivalence check failed".into()))
    }
}
