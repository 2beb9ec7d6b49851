//! The `persuade` command line: instance I/O, solver dispatch, Monte Carlo
//! validation and JSON run reports.
//!
//! Every command prints one JSON report on stdout. The command's artifact
//! (scheme, instance, catalog) is written to `--out` when given and embedded
//! in the report otherwise. Wall-clock timings go to the stderr log only, so
//! reports are byte-identical across runs with the same inputs and flags.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when the solver
//! cannot produce an answer (infeasible, too large, unsupported) or when
//! validation finds a problem.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::best_response::{check_nondegeneracy, enumerate_best_responses, DegeneracyReport, Nondegeneracy};
use crate::cce::{self, ApproxOracle, CceView};
use crate::error::{Error, Result};
use crate::field::{int, parse_rational, Field, Rational};
use crate::json::{self as io, SchemeFile};
use crate::model::{ActionSet, Instance, SignalingScheme};
use crate::persuasion::{self, Persuasiveness, SolveResult, DEFAULT_MAX_ACTIONS};
use crate::reductions::{self, LineqMaSpec, PublicPersuasionSpec, Target};

#[derive(Parser, Debug)]
#[command(
    name = "persuade",
    version,
    about = "Bayesian persuasion with combinatorial receiver actions"
)]
pub struct Cli {
    /// Write the command's artifact here instead of embedding it in the report.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampling and random generation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on explicitly enumerated receiver actions.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ACTIONS)]
    pub max_actions: usize,
    /// Log to stderr as JSON lines.
    #[arg(long, global = true)]
    pub json_logs: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute an optimal (or approximately optimal) signaling scheme.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Engine::CuttingPlane)]
        engine: Engine,
        /// Oracle guarantee for `--mode cce`: 1 (exact) or 1/2 (greedy).
        #[arg(long, default_value = "1", value_parser = rational_arg)]
        alpha: Rational,
        #[arg(long, default_value = "1/10", value_parser = rational_arg)]
        epsilon: Rational,
        /// Check every oracle answer against exhaustive search.
        #[arg(long)]
        audit_oracle: bool,
    },
    /// List the receiver's possible best responses.
    Enumerate { instance: PathBuf },
    /// Check a scheme exactly and estimate its value by simulation.
    Validate {
        instance: PathBuf,
        scheme: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Generate an instance from a reduction.
    Gen {
        #[arg(long, value_enum)]
        from: Source,
        #[arg(long, value_enum)]
        target: GenTarget,
        /// Source specification; random when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n_eq: usize,
        #[arg(long, default_value_t = 10)]
        n_var: usize,
        #[arg(long, default_value_t = 3)]
        n_rec: usize,
        #[arg(long, default_value_t = 2)]
        states: usize,
        /// Also write the planted-solution scheme (lineq sources only).
        #[arg(long)]
        scheme_out: Option<PathBuf>,
    },
    /// Audit the general-position assumption on receiver utilities.
    CheckNondegeneracy { instance: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Full,
    Reduced,
    Cce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    CuttingPlane,
    Ellipsoid,
    BruteForce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Lineq,
    Public,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenTarget {
    Uniform,
    Graphic,
    Path,
    Partition,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

/// Errors that signal a bad invocation or input rather than a solver limit.
fn usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_) | Error::InvalidInstance(_) | Error::ParameterError(_) | Error::Io(_) | Error::MissingSolution
    )
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "Parse",
        Error::InvalidInstance(_) => "InvalidInstance",
        Error::ZeroMassSignal => "ZeroMassSignal",
        Error::MissingTabularEntry(_) => "MissingTabularEntry",
        Error::UnsupportedSense(_) => "UnsupportedSense",
        Error::UnsupportedCombination(_) => "UnsupportedCombination",
        Error::NonLinearReceiver => "NonLinearReceiver",
        Error::DimensionTooSmall => "DimensionTooSmall",
        Error::TooLarge { .. } => "TooLarge",
        Error::NoPath => "NoPath",
        Error::IterationCap(_) => "IterationCap",
        Error::Infeasible => "Infeasible",
        Error::Unbounded => "Unbounded",
        Error::OracleContractViolation(_) => "OracleContractViolation",
        Error::ParameterError(_) => "ParameterError",
        Error::DegenerateBounds => "DegenerateBounds",
        Error::PriorDegenerate(_) => "PriorDegenerate",
        Error::MissingSolution => "MissingSolution",
        Error::Io(_) => "Io",
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            return Outcome {
                code,
                stdout: e.render().to_string(),
            };
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut report = Report::new(echo);
    let code = match dispatch(&cli, &mut report) {
        Ok(code) => code,
        Err(e) => {
            log::error!("{e}");
            report.body.insert(
                "error".into(),
                json!({"kind": error_kind(&e), "message": e.to_string()}),
            );
            if usage_error(&e) {
                1
            } else {
                2
            }
        }
    };
    report.body.insert("exit_code".into(), json!(code));
    Outcome {
        code,
        stdout: report.render(),
    }
}

/// JSON run report; keys are emitted in sorted order.
pub struct Report {
    body: serde_json::Map<String, Value>,
    warnings: Vec<String>,
}

impl Report {
    fn new(command: Vec<String>) -> Self {
        let mut body = serde_json::Map::new();
        body.insert("command".into(), json!(command));
        Report {
            body,
            warnings: Vec::new(),
        }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.body.insert(key.into(), value);
    }

    fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        log::warn!("{msg}");
        self.warnings.push(msg);
    }

    fn render(mut self) -> String {
        self.body.insert("warnings".into(), json!(self.warnings));
        let mut s = serde_json::to_string_pretty(&Value::Object(self.body)).expect("report serializes");
        s.push('\n');
        s
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    io::parse_instance(&text)
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes `artifact` to `--out` (recording the path) or embeds it.
fn emit(cli: &Cli, report: &mut Report, key: &str, artifact: Value) -> Result<()> {
    match &cli.out {
        Some(path) => {
            write_json(path, &artifact)?;
            report.set(&format!("{key}_path"), json!(path.display().to_string()));
        }
        None => report.set(key, artifact),
    }
    Ok(())
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    writeln!(f, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn dispatch(cli: &Cli, report: &mut Report) -> Result<i32> {
    match &cli.command {
        Command::Solve {
            instance,
            mode,
            engine,
            alpha,
            epsilon,
            audit_oracle,
        } => cmd_solve(cli, report, instance, *mode, *engine, alpha, epsilon, *audit_oracle),
        Command::Enumerate { instance } => cmd_enumerate(cli, report, instance),
        Command::Validate {
            instance,
            scheme,
            samples,
        } => cmd_validate(cli, report, instance, scheme, *samples),
        Command::Gen {
            from,
            target,
            spec,
            n_eq,
            n_var,
            n_rec,
            states,
            scheme_out,
        } => cmd_gen(
            cli,
            report,
            *from,
            *target,
            spec.as_deref(),
            (*n_eq, *n_var, *n_rec, *states),
            scheme_out.as_deref(),
        ),
        Command::CheckNondegeneracy { instance } => cmd_check(report, instance),
    }
}

fn stats_json(res: &SolveResult) -> Value {
    let notes: serde_json::Map<String, Value> = res.stats.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "lp_solves": res.stats.solves,
        "pivots": res.stats.pivots,
        "columns": res.stats.columns,
        "rows": res.stats.rows,
        "actions": res.catalog_size,
        "notes": notes,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    cli: &Cli,
    report: &mut Report,
    path: &Path,
    mode: Mode,
    engine: Engine,
    alpha: &Rational,
    epsilon: &Rational,
    audit: bool,
) -> Result<i32> {
    let inst = read_instance(path)?;
    let digest = io::instance_digest(&inst)?;
    report.set("instance_digest", json!(digest));
    let started = Instant::now();
    let res = match mode {
        Mode::Full => persuasion::solve_full_limited(&inst, cli.max_actions)?,
        Mode::Reduced => {
            let catalog = enumerate_best_responses(&inst)?;
            if let DegeneracyReport::Perturbed { violations, .. } = &catalog.report {
                report.warn(format!(
                    "receiver utilities are degenerate ({violations} violations); catalog computed under a small perturbation"
                ));
            }
            persuasion::solve_with_catalog(&inst, &catalog)?
        }
        Mode::Cce => {
            let oracle = if *alpha == int(1) {
                match engine {
                    Engine::BruteForce => ApproxOracle::brute_force(&inst, cli.max_actions)?,
                    _ => ApproxOracle::exact(&inst)?,
                }
            } else if *alpha == Rational::new(1.into(), 2.into()) {
                ApproxOracle::half_greedy(&inst)?
            } else {
                return Err(Error::ParameterError(format!(
                    "no oracle with alpha = {alpha}; use 1 or 1/2"
                )));
            };
            let oracle = if audit { oracle.with_audit(&inst)? } else { oracle };
            let view = CceView::new(&inst, oracle, epsilon.clone())?;
            report.set(
                "cce",
                json!({
                    "prior_value": io::rational_to_json(&view.c),
                    "prior_action": io::action_to_json(&view.s_c),
                    "alpha": io::rational_to_json(view.alpha()),
                    "epsilon": io::rational_to_json(&view.epsilon),
                    "v_bounds": view.bounds.as_ref().map(|(lo, hi)| json!([io::rational_to_json(lo), io::rational_to_json(hi)])),
                }),
            );
            match engine {
                Engine::CuttingPlane => cce::solve_cce_exact(&view)?,
                Engine::Ellipsoid => cce::solve_cce_approx(&view)?,
                Engine::BruteForce => {
                    let actions = persuasion::enumerate_actions_limited(&inst.constraint, inst.n(), cli.max_actions)?;
                    cce::solve_cce_brute_force(&inst, &actions)?
                }
            }
        }
    };
    log::info!(
        "solved {} with {} in {} ms",
        path.display(),
        res.method.name(),
        started.elapsed().as_millis()
    );
    let file = SchemeFile {
        scheme: res.scheme.clone(),
        value: res.sender_value.clone(),
        method: res.method.name().into(),
        instance_digest: digest,
    };
    report.set(
        "result",
        json!({"value": io::rational_to_json(&res.sender_value), "method": res.method.name()}),
    );
    report.set("stats", stats_json(&res));
    emit(cli, report, "scheme", io::scheme_to_json(&file, inst.num_states()))?;
    Ok(0)
}

fn cmd_enumerate(cli: &Cli, report: &mut Report, path: &Path) -> Result<i32> {
    let inst = read_instance(path)?;
    report.set("instance_digest", json!(io::instance_digest(&inst)?));
    let started = Instant::now();
    let catalog = enumerate_best_responses(&inst)?;
    log::info!(
        "enumerated {} cells in {} ms",
        catalog.cells,
        started.elapsed().as_millis()
    );
    let entries: Vec<Value> = catalog
        .actions
        .iter()
        .zip(&catalog.witnesses)
        .map(|(a, w)| {
            json!({
                "action": io::action_to_json(a),
                "witness": w.iter().map(io::rational_to_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let degeneracy = match &catalog.report {
        DegeneracyReport::Clean => json!({"status": "clean"}),
        DegeneracyReport::Perturbed {
            schedule,
            violations,
            epsilon,
        } => {
            report.warn("receiver utilities are degenerate; catalog computed under a small perturbation");
            json!({
                "status": "perturbed",
                "violations": violations,
                "epsilon": io::rational_to_json(epsilon),
                "schedule": schedule.iter().map(|(e, t, p)| json!({"element": e, "state": t, "power": p})).collect::<Vec<_>>(),
            })
        }
        DegeneracyReport::Violations(v) => json!({"status": "violations", "count": v.len()}),
    };
    report.set(
        "result",
        json!({
            "actions": catalog.actions.len(),
            "cells": catalog.cells,
            "hyperplanes": catalog.hyperplanes,
            "degeneracy": degeneracy,
        }),
    );
    emit(cli, report, "catalog", json!(entries))?;
    Ok(0)
}

fn cmd_check(report: &mut Report, path: &Path) -> Result<i32> {
    let inst = read_instance(path)?;
    report.set("instance_digest", json!(io::instance_digest(&inst)?));
    let result = match check_nondegeneracy(&inst)? {
        Nondegeneracy::Clean => json!({"clean": true, "violations": 0}),
        Nondegeneracy::Violations(v, total) => json!({
            "clean": false,
            "violations": total,
            "examples": v.iter().map(|x| json!({"permutation": x.permutation, "subset": x.subset})).collect::<Vec<_>>(),
        }),
    };
    report.set("result", result);
    Ok(0)
}

/// Monte Carlo estimate of a scheme's sender value.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub samples: usize,
    pub mean: f64,
    pub std_error: f64,
    /// Signals where the simulated receiver picked something other than the
    /// recommendation.
    pub deviations: usize,
}

impl Estimate {
    pub fn interval(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.std_error, self.mean + 1.96 * self.std_error)
    }

    /// Whether `exact` lies more than four standard errors away.
    pub fn disagrees_with(&self, exact: f64) -> bool {
        let gap = (self.mean - exact).abs();
        if self.std_error == 0.0 {
            gap > 1e-9 * exact.abs().max(1.0)
        } else {
            gap > 4.0 * self.std_error
        }
    }
}

/// Samples `θ ~ μ`, then a signal from `φ_θ`, then the receiver's choice at
/// that signal's posterior (ties in the sender's favor), and averages the
/// sender's utility.
pub fn monte_carlo(
    instance: &Instance,
    scheme: &SignalingScheme,
    samples: usize,
    seed: u64,
    max_actions: usize,
) -> Result<Estimate> {
    let candidates = match persuasion::enumerate_actions_limited(&instance.constraint, instance.n(), max_actions) {
        Ok(list) => Some(list),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let k = instance.num_states();
    let mut signals: Vec<(ActionSet, ActionSet, Vec<f64>)> = Vec::new();
    for (action, probs) in scheme.entries() {
        let weights: Vec<Rational> = probs.iter().zip(&instance.prior).map(|(p, m)| p * m).collect();
        let mass: Rational = weights.iter().sum();
        if mass.is_zero() {
            continue;
        }
        let xi: Vec<Rational> = weights.iter().map(|w| w / &mass).collect();
        let response = persuasion::receiver_choice(instance, &xi, candidates.as_deref())?;
        let payoff = (0..k)
            .map(|t| instance.sender.value(t, &response).map(|v| to_f64(&v)))
            .collect::<Result<Vec<_>>>()?;
        signals.push((action.clone(), response, payoff));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prior: Vec<f64> = instance.prior.iter().map(to_f64).collect();
    let conditional: Vec<Vec<f64>> = (0..k)
        .map(|t| signals.iter().map(|(a, _, _)| to_f64(&scheme.phi(t, a))).collect())
        .collect();
    let (mut sum, mut sum_sq, mut deviations) = (0.0, 0.0, 0);
    for _ in 0..samples {
        let t = draw(&mut rng, &prior);
        let j = draw(&mut rng, &conditional[t]);
        let (action, response, payoff) = &signals[j];
        if action != response {
            deviations += 1;
        }
        let v = payoff[t];
        sum += v;
        sum_sq += v * v;
    }
    let n = samples.max(1) as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(Estimate {
        samples,
        mean,
        std_error: (var / n).sqrt(),
        deviations,
    })
}

fn draw(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn cmd_validate(cli: &Cli, report: &mut Report, inst_path: &Path, scheme_path: &Path, samples: usize) -> Result<i32> {
    let inst = read_instance(inst_path)?;
    let digest = io::instance_digest(&inst)?;
    report.set("instance_digest", json!(digest));
    let file = io::scheme_from_json(&read_json(scheme_path)?, inst.num_states())?;
    if file.instance_digest != digest {
        return Err(Error::InvalidInstance(format!(
            "scheme was computed for instance {}, not {digest}",
            file.instance_digest
        )));
    }
    let exact_value = inst.sender_value(&file.scheme)?;
    let mut ok = true;
    if exact_value != file.value {
        ok = false;
        report.warn(format!(
            "scheme file claims value {}, exact value is {exact_value}",
            file.value
        ));
    }
    let check = match persuasion::check_persuasive_limited(&inst, &file.scheme, cli.max_actions)? {
        Persuasiveness::Persuasive(m) => json!({"persuasive": true, "method": format!("{m:?}").to_lowercase()}),
        Persuasiveness::Violation {
            action,
            deviation,
            slack,
            method,
        } => {
            ok = false;
            json!({
                "persuasive": false,
                "method": format!("{method:?}").to_lowercase(),
                "violation": {
                    "action": io::action_to_json(&action),
                    "deviation": io::action_to_json(&deviation),
                    "slack": io::rational_to_json(&slack),
                },
            })
        }
    };
    let started = Instant::now();
    let est = monte_carlo(&inst, &file.scheme, samples, cli.seed, cli.max_actions)?;
    log::info!("simulated {samples} rounds in {} ms", started.elapsed().as_millis());
    let exact_f = to_f64(&exact_value);
    let disagree = est.disagrees_with(exact_f);
    if disagree {
        ok = false;
        report.warn(format!(
            "simulated value {:.6} is more than 4 standard errors from {exact_value}",
            est.mean
        ));
    }
    let (lo, hi) = est.interval();
    report.set(
        "result",
        json!({
            "valid": ok,
            "exact_value": io::rational_to_json(&exact_value),
            "check": check,
            "monte_carlo": {
                "samples": est.samples,
                "seed": cli.seed,
                "mean": format!("{:.6}", est.mean),
                "std_error": format!("{:.6}", est.std_error),
                "ci95": [format!("{lo:.6}"), format!("{hi:.6}")],
                "deviating_draws": est.deviations,
                "disagrees": disagree,
            },
        }),
    );
    Ok(if ok { 0 } else { 2 })
}

fn cmd_gen(
    cli: &Cli,
    report: &mut Report,
    from: Source,
    target: GenTarget,
    spec_path: Option<&Path>,
    (n_eq, n_var, n_rec, states): (usize, usize, usize, usize),
    scheme_out: Option<&Path>,
) -> Result<i32> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let (inst, scheme) = match from {
        Source::Lineq => {
            let target = match target {
                GenTarget::Uniform => Target::Uniform,
                GenTarget::Graphic => Target::Graphic,
                GenTarget::Path => Target::Path,
                GenTarget::Partition => {
                    return Err(Error::ParameterError(
                        "linear systems target uniform, graphic or path".into(),
                    ))
                }
            };
            let spec = match spec_path {
                Some(p) => io::lineq_from_json(&read_json(p)?)?,
                None => {
                    let spec = LineqMaSpec::random_satisfiable(n_eq, n_var, &mut rng);
                    spec.validate()?;
                    spec
                }
            };
            if spec.n_var_too_small() {
                report.warn(format!(
                    "n_var = {} is too small for the completeness bound to exceed 1 - 2 zeta",
                    spec.n_var()
                ));
            }
            report.set("source", io::lineq_to_json(&spec));
            if spec.known_solution.is_some() {
                let (inst, scheme) = reductions::completeness_scheme(&spec, target)?;
                (inst, Some(scheme))
            } else {
                (reductions::generate(&spec, target)?, None)
            }
        }
        Source::Public => {
            if target != GenTarget::Partition {
                return Err(Error::ParameterError("public persuasion targets partition only".into()));
            }
            let spec = match spec_path {
                Some(p) => io::public_from_json(&read_json(p)?)?,
                None => PublicPersuasionSpec::random(states.max(1), n_rec.max(1), 10, &mut rng),
            };
            report.set("source", io::public_to_json(&spec));
            (reductions::gen_partition_from_public(&spec)?, None)
        }
    };
    let digest = io::instance_digest(&inst)?;
    report.set("instance_digest", json!(digest));
    report.set(
        "result",
        json!({"states": inst.num_states(), "elements": inst.n(), "constraint": inst.constraint.kind_name()}),
    );
    if let (Some(path), Some(scheme)) = (scheme_out, scheme) {
        let file = SchemeFile {
            value: inst.sender_value(&scheme)?,
            scheme,
            method: "planted".into(),
            instance_digest: digest,
        };
        write_json(path, &io::scheme_to_json(&file, inst.num_states()))?;
        report.set("scheme_path", json!(path.display().to_string()));
        report.set("planted_value", io::rational_to_json(&file.value));
    }
    emit(cli, report, "instance", io::instance_to_json(&inst)?)?;
    Ok(0)
}

struct StderrLogger {
    json: bool,
    start: Instant,
}

impl log::Log for StderrLogger {
    fn enabled(&self, metadata: &log::Metadata) -> bool {
        metadata.level() <= log::Level::Info
    }

    fn log(&self, record: &log::Record) {
        if !self.enabled(record.metadata()) {
            return;
        }
        let level = record.level().as_str().to_lowercase();
        let line = if self.json {
            json!({
                "level": level,
                "elapsed_ms": self.start.elapsed().as_millis() as u64,
                "message": record.args().to_string(),
            })
            .to_string()
        } else {
            format!("[{level}] {}", record.args())
        };
        eprintln!("{line}");
    }

    fn flush(&self) {}
}

/// Installs the stderr logger; later calls are no-ops.
pub fn init_logging(json: bool) {
    let logger = StderrLogger {
        json,
        start: Instant::now(),
    };
    if log::set_boxed_logger(Box::new(logger)).is_ok() {
        log::set_max_level(log::LevelFilter::Info);
    }
}

/// Entry point for the binary: logs, runs, prints, and returns the exit code.
pub fn main_entry() -> i32 {
    let args: Vec<std::ffi::OsString> = std::env::args_os().collect();
    let json_logs = args.iter().any(|a| a == "--json-logs");
    init_logging(json_logs);
    let out = run(args);
    if out.code == 1 && !out.stdout.trim_start().starts_with('{') {
        eprint!("{}", out.stdout);
    } else {
        print!("{}", out.stdout);
    }
    out.code
}
