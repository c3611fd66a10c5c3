//! Command-line front end.
//!
//! Exit status: 0 when every check passes or the solver converges, 1 on a
//! property violation or non-convergence, 2 on usage, parse or constraint
//! errors.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use menger_core::combinatorics::{
    build_relation_r, dense_witness_search, is_m_syndetic, upper_banach_density,
    verify_dense_witness_set,
};
use menger_core::contraction::{check_mk_b, check_mk_c, displacement_profile, ContractionReport};
use menger_core::espace::{AffineMap, EPoint, ESpace, Euclidean, ProbSpace};
use menger_core::pm_space::{FinitePmSpace, ProbMetric, SelfMap};
use menger_core::pn_space::{
    continuity_at_theta_probe, iterate_to_null, pn_axiom_check, pn_c_contraction_check,
    uniform_continuity_probe, uniqueness_and_theta_check, ContinuityReport, FinitePnSpace,
    Mode as PnMode, Vector, LAMBDA_GRID,
};
use menger_core::solver::{
    cauchy_subsequence_check, default_max_iter, picard_solve, OrbitTrace, DEFAULT_TOLERANCE,
};
use menger_core::{Density, PnError, TNorm};
use serde_json::{json, Value};

use crate::formats::{
    self, parse, to_pretty, DdfJson, DdfPairJson, FixtureJson, IndexSetJson, Instance,
    InstanceJson, MapJson, PnInstanceJson, RelationJson, SpaceJson, TraceSummary,
};
use crate::gen::{self, FixtureShape, SpaceShape};

#[derive(Debug, Parser)]
#[command(name = "menger", version, about = "Probabilistic metric spaces and generalized contractions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the Menger triangle inequality on a space or E-space instance.
    CheckSpace {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "M")]
        tnorm: TNorm,
    },
    /// Check the (m,k) scaling and threshold contraction conditions.
    CheckContraction {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        mk: MkArgs,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Condition::Both)]
        condition: Condition,
    },
    /// Picard iteration from one point.
    Solve {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Start point: a label or a working-set index.
        #[arg(long)]
        start: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Density of an index set, or the dense witness search on a relation.
    Density {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Sibley distance between two functions.
    Sibley {
        #[command(flatten)]
        io: Io,
    },
    /// Triangle function (sup-convolution) of two functions.
    Tau {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "W")]
        tnorm: TNorm,
    },
    /// Normed-space suite: axioms, contraction, null iteration, fixed points
    /// and continuity probes.
    PnCheck {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Unscaled)]
        mode: Mode,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        horizon: usize,
    },
    /// Seeded random instances.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        points: usize,
        #[arg(long, default_value_t = 3)]
        outcomes: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        k: Option<f64>,
        /// Contraction fixtures: move the fixed point away from the origin.
        #[arg(long)]
        offset: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// End-to-end orbit pipeline on the halving instance.
    Demo {
        #[arg(long, default_value_t = 60)]
        window: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Io {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MkArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    B,
    C,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Unscaled,
    Strict,
}

impl From<Mode> for PnMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Unscaled => PnMode::Unscaled,
            Mode::Strict => PnMode::Strict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Espace,
    Pnspace,
    ContractionFixture,
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_passed(passed: bool) -> Self {
        if passed {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }
}

/// Exit code for a failed command: usage, parse and constraint errors.
pub const EXIT_USAGE: u8 = 2;

pub fn run(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::CheckSpace { io, tnorm } => check_space(&io, tnorm),
        Command::CheckContraction {
            io,
            mk,
            map,
            condition,
        } => check_contraction(&io, &mk, map.as_deref(), condition),
        Command::Solve {
            io,
            map,
            tol,
            max_iter,
            start,
            format,
        } => solve(&io, map.as_deref(), tol, max_iter, start.as_deref(), format),
        Command::Density { io, m, window } => density(&io, m, window),
        Command::Sibley { io } => {
            let (f, g) = read_pair(&io.input)?;
            let d = f.sibley(&g);
            emit(io.output.as_deref(), &to_pretty(&json!({ "sibley": d })))?;
            Ok(Verdict::Pass)
        }
        Command::Tau { io, tnorm } => {
            let (f, g) = read_pair(&io.input)?;
            let h = tnorm.convolve(&f, &g);
            emit(io.output.as_deref(), &to_pretty(&DdfJson::from(&h)))?;
            Ok(Verdict::Pass)
        }
        Command::PnCheck {
            io,
            k,
            mode,
            eps,
            horizon,
        } => pn_check(&io, k, mode.into(), &eps, horizon),
        Command::Gen {
            kind,
            seed,
            points,
            outcomes,
            dim,
            m,
            k,
            offset,
            output,
        } => {
            let text = generate(kind, seed, points, outcomes, dim, m, k, offset)?;
            emit(output.as_deref(), &text)?;
            Ok(Verdict::Pass)
        }
        Command::Demo { window, output } => demo(window, output.as_deref()),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate_mk(m: usize, k: f64) -> Result<()> {
    if m == 0 {
        bail!("field `--m`: must be at least 1");
    }
    if !(k > 0.0 && k < 1.0) {
        bail!("field `--k`: {k} lies outside (0, 1)");
    }
    Ok(())
}

/// A parsed `--input` file.
enum Input {
    Space(FinitePmSpace),
    Instance(Instance),
    Fixture(Instance, FixtureJson),
}

fn read_input(path: &Path) -> Result<Input> {
    let name = path.display().to_string();
    let text = read(path)?;
    let shape: Value = parse(&name, &text)?;
    if shape.get("instance").is_some() {
        let fx: FixtureJson = parse(&name, &text)?;
        let inst = fx.instance.to_instance()?;
        Ok(Input::Fixture(inst, fx))
    } else if shape.get("probs").is_some() {
        let inst: InstanceJson = parse(&name, &text)?;
        Ok(Input::Instance(inst.to_instance()?))
    } else {
        let space: SpaceJson = parse(&name, &text)?;
        Ok(Input::Space(space.to_space()?))
    }
}

fn read_map(path: &Path) -> Result<MapJson> {
    Ok(parse(&path.display().to_string(), &read(path)?)?)
}

fn read_pair(path: &Path) -> Result<(menger_core::Ddf, menger_core::Ddf)> {
    let pair: DdfPairJson = parse(&path.display().to_string(), &read(path)?)?;
    Ok((pair.f.to_ddf("f")?, pair.g.to_ddf("g")?))
}

fn check_space(io: &Io, tnorm: TNorm) -> Result<Verdict> {
    let space = match read_input(&io.input)? {
        Input::Space(s) => s,
        Input::Instance(i) | Input::Fixture(i, _) => i.to_pm_space()?.0,
    };
    let report = space.check_menger(tnorm);
    let labels = space.labels();
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "p": labels[v.p], "q": labels[v.q], "r": labels[v.r], "witness": v.witness
            })
        })
        .collect();
    let out = json!({
        "tnorm": tnorm.name(),
        "points": space.len(),
        "triples_checked": report.triples_checked,
        "passed": report.passed(),
        "violations": violations,
    });
    emit(io.output.as_deref(), &to_pretty(&out))?;
    Ok(Verdict::from_passed(report.passed()))
}

/// A space together with a self-map on its points.
enum Problem {
    Finite {
        space: FinitePmSpace,
        map: menger_core::TableMap,
        labels: Vec<String>,
    },
    Euclidean {
        space: ESpace<Euclidean>,
        map: AffineMap,
    },
}

fn problem(input: Input, map: Option<&Path>) -> Result<(Problem, Option<(usize, f64)>)> {
    let (input, embedded, mk) = match input {
        Input::Fixture(inst, fx) => (Input::Instance(inst), Some(fx.map), Some((fx.m, fx.k))),
        other => (other, None, None),
    };
    let map = match (map, embedded) {
        (Some(p), _) => read_map(p)?,
        (None, Some(m)) => m,
        (None, None) => bail!("field `--map`: a map file is required"),
    };
    let problem = match (input, &map) {
        (Input::Instance(Instance::Euclidean(space)), MapJson::Affine { .. }) => {
            let map = map.to_affine(space.base().dim())?;
            Problem::Euclidean { space, map }
        }
        (Input::Space(space), MapJson::Table { .. }) => {
            let labels = space.labels().to_vec();
            let map = map.to_table(&labels)?;
            Problem::Finite { space, map, labels }
        }
        (Input::Instance(inst), MapJson::Table { .. }) => {
            let (space, _) = inst.to_pm_space()?;
            let labels = space.labels().to_vec();
            let map = map.to_table(&labels)?;
            Problem::Finite { space, map, labels }
        }
        _ => bail!("field `kind`: affine maps need a Euclidean instance, table maps a finite space"),
    };
    Ok((problem, mk))
}

fn contraction_json(report: &ContractionReport, labels: &[String]) -> Value {
    let failures: Vec<Value> = report
        .failures()
        .map(|c| json!({ "p": labels[c.p], "q": labels[c.q], "counter": c.counter }))
        .collect();
    json!({
        "passed": report.passed(),
        "pairs_checked": report.pairs.len(),
        "dense_agrees": report.dense_agrees(),
        "failures": failures,
    })
}

fn run_checks<S: ProbMetric>(
    space: &S,
    points: &[S::Point],
    f: &impl SelfMap<S::Point>,
    m: usize,
    k: f64,
    condition: Condition,
    labels: &[String],
) -> Result<(Value, bool)> {
    let mut out = serde_json::Map::new();
    let mut passed = true;
    if condition != Condition::C {
        let r = check_mk_b(space, points, f, m, k)?;
        passed &= r.passed();
        out.insert("b".into(), contraction_json(&r, labels));
    }
    if condition != Condition::B {
        let r = check_mk_c(space, points, f, m, k)?;
        passed &= r.passed() && r.dense_agrees();
        out.insert("c".into(), contraction_json(&r, labels));
    }
    Ok((Value::Object(out), passed))
}

fn working_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn check_contraction(io: &Io, mk: &MkArgs, map: Option<&Path>, condition: Condition) -> Result<Verdict> {
    let (problem, embedded) = problem(read_input(&io.input)?, map)?;
    let m = mk.m.or(embedded.map(|e| e.0)).unwrap_or(1);
    let Some(k) = mk.k.or(embedded.map(|e| e.1)) else {
        bail!("field `--k`: a contraction constant is required");
    };
    validate_mk(m, k)?;
    let (checks, passed) = match &problem {
        Problem::Finite { space, map, labels } => {
            let pts: Vec<usize> = (0..space.len()).collect();
            run_checks(space, &pts, map, m, k, condition, labels)?
        }
        Problem::Euclidean { space, map } => {
            let labels = working_labels(space.points().len());
            run_checks(space, space.points(), map, m, k, condition, &labels)?
        }
    };
    let out = json!({ "m": m, "k": k, "passed": passed, "checks": checks });
    emit(io.output.as_deref(), &to_pretty(&out))?;
    Ok(Verdict::from_passed(passed))
}

fn start_index(start: Option<&str>, labels: &[String]) -> Result<usize> {
    let Some(s) = start else { return Ok(0) };
    if let Some(i) = labels.iter().position(|l| l == s) {
        return Ok(i);
    }
    match s.parse::<usize>() {
        Ok(i) if i < labels.len() => Ok(i),
        _ => bail!("field `--start`: unknown point `{s}`"),
    }
}

fn write_trace<P>(
    path: Option<&Path>,
    format: Format,
    trace: &OrbitTrace<P>,
    id: impl Fn(usize, &P) -> String,
) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let text = match format {
        Format::Csv => formats::trace_csv(trace, id)?,
        Format::Json => to_pretty(&formats::trace_rows(trace, id)),
    };
    emit(Some(path), &text)
}

fn solve(
    io: &Io,
    map: Option<&Path>,
    tol: f64,
    max_iter: Option<usize>,
    start: Option<&str>,
    format: Format,
) -> Result<Verdict> {
    if !(tol > 0.0) {
        bail!("field `--tol`: {tol} must be positive");
    }
    let (problem, _) = problem(read_input(&io.input)?, map)?;
    let summary = match &problem {
        Problem::Finite { space, map, labels } => {
            let p0 = start_index(start, labels)?;
            let budget = max_iter.unwrap_or(default_max_iter(Some(space.len())));
            let trace = picard_solve(space, map, &p0, tol, budget)?;
            write_trace(io.output.as_deref(), format, &trace, |_, &p| labels[p].clone())?;
            TraceSummary::new(&trace, |&p| Value::from(labels[p].clone()))
        }
        Problem::Euclidean { space, map } => {
            let labels = working_labels(space.points().len());
            let p0 = &space.points()[start_index(start, &labels)?];
            let budget = max_iter.unwrap_or(default_max_iter(None));
            let trace = picard_solve(space, map, p0, tol, budget)?;
            write_trace(io.output.as_deref(), format, &trace, |n, _| format!("x{n}"))?;
            TraceSummary::new(&trace, |p| Value::from(formats::vector_json(p)))
        }
    };
    let converged = summary.outcome == "converged";
    print!("{}", to_pretty(&summary));
    Ok(Verdict::from_passed(converged))
}

fn density(io: &Io, m: Option<usize>, window: Option<usize>) -> Result<Verdict> {
    let name = io.input.display().to_string();
    let text = read(&io.input)?;
    let shape: Value = parse(&name, &text)?;
    if shape.get("pairs").is_some() {
        let rel = parse::<RelationJson>(&name, &text)?.to_relation()?;
        let Some(m) = m else {
            bail!("field `--m`: the witness search needs m");
        };
        if m == 0 {
            bail!("field `--m`: must be at least 1");
        }
        let (out, passed) = match dense_witness_search(&rel, m) {
            Ok(found) => {
                let verdict = verify_dense_witness_set(&rel, &found, m);
                let out = json!({
                    "set": IndexSetJson::from_set(&found.set),
                    "density": verdict.density,
                    "needed": verdict.needed,
                    "witnesses_ok": verdict.witnesses_ok,
                    "passed": verdict.passed(),
                });
                (out, verdict.passed())
            }
            Err(e) => (json!({ "passed": false, "error": e.to_string() }), false),
        };
        emit(io.output.as_deref(), &to_pretty(&out))?;
        return Ok(Verdict::from_passed(passed));
    }
    let desc: IndexSetJson = parse(&name, &text)?;
    if desc.n.is_none() && desc.members.is_none() && window.is_none() {
        let p = desc.periodic()?.expect("a set without members has a periodic descriptor");
        let out = json!({ "density": p.density().to_string(), "exact": true });
        emit(io.output.as_deref(), &to_pretty(&out))?;
        return Ok(Verdict::Pass);
    }
    let set = desc.to_index_set(window)?;
    let mut out = match upper_banach_density(&set) {
        Density::Exact(r) => json!({ "density": r.to_string(), "exact": true }),
        Density::Estimate { lower, upper } => json!({ "lower": lower, "upper": upper, "exact": false }),
    };
    let mut passed = true;
    if let Some(m) = m {
        let syndetic = is_m_syndetic(&set, m)?;
        passed = syndetic;
        out["syndetic"] = Value::from(syndetic);
    }
    emit(io.output.as_deref(), &to_pretty(&out))?;
    Ok(Verdict::from_passed(passed))
}

fn continuity_json(r: &ContinuityReport) -> Value {
    json!({ "inside": r.inside, "violations": r.violations.len(), "passed": r.passed() })
}

fn pn_check(io: &Io, k: Option<f64>, mode: PnMode, eps: &[f64], horizon: usize) -> Result<Verdict> {
    let inst: PnInstanceJson = parse(&io.input.display().to_string(), &read(&io.input)?)?;
    let space = inst.config.to_space()?;
    let mut samples = inst.vectors()?;
    if samples.is_empty() {
        bail!("field `vectors`: at least one vector is required");
    }
    let axioms = pn_axiom_check(&space, &samples, &LAMBDA_GRID)?;
    let mut passed = axioms.passed();
    let mut out = json!({
        "axioms": {
            "checks": axioms.checks,
            "violations": axioms.violations.iter().map(|v| json!({
                "axiom": format!("{:?}", v.axiom),
                "sample": v.sample,
                "other": v.other,
                "lambda": v.lambda,
                "witness": v.witness,
            })).collect::<Vec<_>>(),
        }
    });
    if let Some(map) = inst.map()? {
        let Some(k) = k else {
            bail!("field `--k`: a contraction constant is required with a map");
        };
        if !(k > 0.0 && k < 1.0) {
            bail!("field `--k`: {k} lies outside (0, 1)");
        }
        if let Some(&e) = eps.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            bail!("field `--eps`: {e} lies outside (0, 1)");
        }
        samples.push(space.theta());
        let (section, ok) = pn_map_checks(&space, &map, k, mode, eps, horizon, &samples)?;
        passed &= ok;
        out["map"] = section;
    }
    out["passed"] = Value::from(passed);
    emit(io.output.as_deref(), &to_pretty(&out))?;
    Ok(Verdict::from_passed(passed))
}

fn pn_map_checks(
    space: &FinitePnSpace,
    map: &AffineMap,
    k: f64,
    mode: PnMode,
    eps: &[f64],
    horizon: usize,
    samples: &[Vector],
) -> Result<(Value, bool)> {
    let contraction = pn_c_contraction_check(space, map, k, samples)?;
    let mode_ok = contraction.passed(mode);
    let mut passed = mode_ok && contraction.dense_agrees();
    let mut out = json!({
        "mode": format!("{mode:?}").to_lowercase(),
        "contraction": {
            "passed": mode_ok,
            "first_failure": contraction.first_failure(mode),
            "dense_agrees": contraction.dense_agrees(),
        }
    });
    if contraction.passed(PnMode::Unscaled) {
        let fixed = uniqueness_and_theta_check(space, map, k, samples)?;
        passed &= fixed.violations.is_empty();
        out["fixed_points"] = json!({ "fixed": fixed.fixed, "violations": fixed.violations });
        let uniform = uniform_continuity_probe(space, map, k, eps, samples)?;
        let at_theta = continuity_at_theta_probe(space, map, k, eps, samples)?;
        passed &= uniform.passed() && at_theta.passed();
        out["uniform_continuity"] = continuity_json(&uniform);
        out["continuity_at_theta"] = continuity_json(&at_theta);
    }
    let mut null = Vec::new();
    for (i, p) in samples.iter().enumerate() {
        for &e in eps {
            match iterate_to_null(space, map, p, k, e, horizon) {
                Ok(r) => {
                    passed &= r.passed() || !r.orbit_strict;
                    null.push(json!({
                        "sample": i, "eps": e, "n0": r.n0, "failures": r.failures,
                        "first_achieving": r.first_achieving, "orbit_strict": r.orbit_strict,
                    }));
                }
                Err(PnError::StrictConditionFails) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    out["null_iteration"] = Value::from(null);
    Ok((out, passed))
}

#[allow(clippy::too_many_arguments)]
fn generate(
    kind: GenKind,
    seed: u64,
    points: usize,
    outcomes: usize,
    dim: usize,
    m: usize,
    k: Option<f64>,
    offset: bool,
) -> Result<String> {
    let shape = SpaceShape {
        points,
        outcomes,
        dim,
    };
    Ok(match kind {
        GenKind::Espace => to_pretty(&InstanceJson::from_euclidean(&gen::gen_espace(seed, shape)?)),
        GenKind::Pnspace => {
            let inst = gen::gen_pnspace(seed, shape, k)?;
            to_pretty(&PnInstanceJson {
                config: formats::PnConfigJson {
                    probs: inst.space.prob().probs().to_vec(),
                    dim: inst.space.dim(),
                    tau: inst.space.tau().name().into(),
                    tau_star: inst.space.tau_star().name().into(),
                },
                vectors: inst.vectors.iter().map(formats::vector_json).collect(),
                matrix: inst.map.map(|a| a.matrix_rows().map(<[f64]>::to_vec).collect()),
            })
        }
        GenKind::ContractionFixture => {
            let Some(k) = k else {
                bail!("field `--k`: contraction fixtures need k");
            };
            let fx = gen::gen_fixture(
                seed,
                FixtureShape {
                    m,
                    k,
                    points,
                    outcomes,
                    offset,
                },
            )?;
            to_pretty(&FixtureJson {
                m: fx.m,
                k: fx.k,
                instance: InstanceJson::from_euclidean(&fx.space),
                map: MapJson::from_affine(&fx.map),
            })
        }
    })
}

/// The halving map on `ℝ` over two equally likely outcomes, started at the
/// point taking the values 1 and 3.
pub fn halving_instance() -> (ESpace<Euclidean>, AffineMap) {
    let space = ESpace::new(
        ProbSpace::uniform(2).expect("two outcomes"),
        Euclidean::new(1).expect("dimension 1"),
        vec![EPoint::new(vec![vec![1.0], vec![3.0]])],
    )
    .expect("valid point");
    (space, AffineMap::scale(0.5, vec![0.0]).expect("valid map"))
}

fn demo(window: usize, output: Option<&Path>) -> Result<Verdict> {
    if window < 12 {
        bail!("field `--window`: must be at least 12");
    }
    let (space, f) = halving_instance();
    let p = &space.points()[0];
    let (m, k) = (1, 0.5);
    let (profile, displacement_set) = displacement_profile(&space, &f, m, k, p, window)?;
    let rel = build_relation_r(&space, &f, p, &profile, k, window)?;
    let found = dense_witness_search(&rel, m)?;
    let verdict = verify_dense_witness_set(&rel, &found, m);
    let cauchy = cauchy_subsequence_check(&space, &f, p, &found.set, 10, 1e-2)?;
    let solved = picard_solve(&space, &f, p, DEFAULT_TOLERANCE, default_max_iter(None))?;
    let passed = verdict.passed() && cauchy.passed && cauchy.profile_nonincreasing() && solved.fixed_point().is_some();
    let out = json!({
        "profile": DdfJson::from(&profile),
        "displacement_set": IndexSetJson::from_set(&displacement_set),
        "relation": RelationJson::from_relation(&rel).pairs.len(),
        "dense_set": IndexSetJson::from_set(&found.set),
        "density": verdict.density,
        "needed": verdict.needed,
        "witnesses_ok": verdict.witnesses_ok,
        "cauchy": { "tail": cauchy.tail, "max_dist": cauchy.max_dist, "passed": cauchy.passed,
                    "nonincreasing": cauchy.profile_nonincreasing() },
        "solve": TraceSummary::new(&solved, |q| Value::from(formats::vector_json(q))),
        "passed": passed,
    });
    emit(output, &to_pretty(&out))?;
    Ok(Verdict::from_passed(passed))
}
