//! Command-line front end. [`run`] parses arguments, runs one command, writes
//! the report, and returns the exit code: 0 when every verdict passes, 1
//! when any fails, 2 on usage or validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::auxfn::AuxFn;
use crate::certify::{
    certify_banach, certify_ef, certify_f_contraction, certify_phi_f, max_admissible_tau, meir_keeler_direct,
    meir_keeler_finite,
};
use crate::classify::{
    check_c1, check_ef_liminf_conditions, check_f2, check_f3, check_jump_dominance, check_monotone, dyadic_probe,
    estimate_right_limit, ClassEntry, LimitOptions, Monotonicity, Outcome,
};
use crate::counterexample::{CounterexampleFamily, GammaSchedule};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SelfMap, SpaceFile};
use crate::picard::picard_iterate;
use crate::real::{Mode, Rational, Real, Scalar, Tolerance};
use crate::report::{Instance, Payload, Report, VolterraReport};
use crate::sampling;
use crate::volterra::{observed_order, picard_solve, Kernel, TimeFn, VolterraProblem};

#[derive(Parser, Debug)]
#[command(
    name = "contraction-kit",
    version,
    about = "Certify and falsify contraction conditions on finite metric spaces"
)]
pub struct Cli {
    /// Arithmetic: exact rationals, floats with a strictness margin, or exact
    /// whenever every input allows it.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Float-mode strictness margin.
    #[arg(long, global = true, default_value_t = crate::real::DEFAULT_MARGIN)]
    pub margin: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Omit the timestamp so identical runs give identical bytes.
    #[arg(long, global = true)]
    pub reproducible: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Auto,
    Exact,
    Float,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check functional hypotheses on F, φ, E.
    FnClass(FnClassArgs),
    /// Certify one contraction condition for a map on a finite space.
    Certify(CertifyArgs),
    /// Audit the Meir-Keeler condition on a finite space.
    MkCheck(MkCheckArgs),
    /// The F-contraction that is not Meir-Keeler.
    #[command(subcommand)]
    Counterexample(CounterexampleCommand),
    /// Picard iteration on a finite space.
    Picard(PicardArgs),
    /// Picard iteration for a Volterra integral equation.
    Volterra(VolterraArgs),
    /// Write a seeded random or built-in instance.
    Sample(SampleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Increasing,
    Nondecreasing,
    F2,
    F3,
    RightLimit,
    C1,
    JumpDominance,
    EfLiminf,
}

#[derive(Args, Debug, Serialize)]
pub struct FnClassArgs {
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Check::Increasing, Check::F2, Check::F3])]
    pub check: Vec<Check>,
    /// Grid for monotonicity and C1, `start:end:step` or a comma list.
    #[arg(long, default_value = "0.01:5:0.01")]
    pub grid: String,
    /// Points for per-t checks, `start:end:step` or a comma list.
    #[arg(long, default_value = "0.25:4:0.25")]
    pub at: String,
    /// Exponent for F3.
    #[arg(long, default_value_t = 0.5)]
    pub k: f64,
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub e: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionArg {
    Banach,
    F,
    Phif,
    Ef,
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    #[arg(long, value_enum)]
    pub condition: ConditionArg,
    /// `@space.json` or inline JSON.
    #[arg(long)]
    pub space: String,
    /// `@map.json`, a JSON array, or `0,0,1`.
    #[arg(long)]
    pub map: String,
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// τ for `--condition f`; omitted means report the largest admissible τ.
    #[arg(long)]
    pub tau: Option<String>,
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub e: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct MkCheckArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub map: String,
    /// Include the per-distance ε-δ classes.
    #[arg(long)]
    pub classes: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[arg(long = "fn", default_value = "step:1,1")]
    pub function: String,
    #[arg(long, default_value = "1")]
    pub t0: String,
    /// `harmonic:scale` or `geometric:first,ratio`; default `(k-2t0)/(2m)`.
    #[arg(long)]
    pub gamma: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum CounterexampleCommand {
    /// Build the family; optionally write a truncation.
    Build {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long)]
        emit_space: Option<PathBuf>,
        #[arg(long)]
        emit_map: Option<PathBuf>,
    },
    /// Certify the F-contraction inequality on the truncation X_N.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "N", default_value_t = 100)]
        n: u64,
        /// Also run the Meir-Keeler audit on the truncation.
        #[arg(long)]
        mk: bool,
    },
    /// Meir-Keeler falsification witnesses for each δ.
    Witness {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<String>,
    },
    /// Check every distance claim on X_N.
    Audit {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "N", default_value_t = 5)]
        n: u64,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct PicardArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub map: String,
    /// Starting point, by label or index; every point when omitted.
    #[arg(long)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Write `iteration,point,step_distance` rows here (single start only).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Seed {
    Forcing,
    Zero,
}

#[derive(Args, Debug, Serialize)]
pub struct VolterraArgs {
    #[arg(long)]
    pub kernel: String,
    #[arg(long)]
    pub forcing: String,
    #[arg(long)]
    pub tend: f64,
    #[arg(long)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub atol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = Seed::Forcing)]
    pub x0: Seed,
    /// Analytic solution to compare against, e.g. `exp:1,0.5`.
    #[arg(long)]
    pub exact: Option<String>,
    /// Estimate the observed order from three grids.
    #[arg(long)]
    pub order: bool,
    /// Write `t,x` rows here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    /// Random points with a uniform random map.
    Line,
    /// Random Banach contraction.
    Banach,
    Halving,
    Ef,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub kind: SampleKind,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long)]
    pub emit_space: Option<PathBuf>,
    #[arg(long)]
    pub emit_map: Option<PathBuf>,
}

/// Parses `argv` (including the program name), runs the command, and writes
/// the report to `out` and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli) {
        Ok(mut report) => {
            report.seed = cli.seed;
            if !cli.reproducible {
                report.timestamp =
                    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).ok().map(|d| d.as_secs());
            }
            let text = match cli.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            if out.write_all(text.as_bytes()).is_err() {
                return 2;
            }
            if report.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    let tol = Tolerance::new(cli.margin);
    match &cli.command {
        Command::FnClass(a) => fn_class(a, tol),
        Command::Certify(a) => certify(a, cli.mode, tol),
        Command::MkCheck(a) => mk_check(a, cli.mode, tol),
        Command::Counterexample(c) => counterexample(c, cli.mode),
        Command::Picard(a) => picard(a, cli.mode),
        Command::Volterra(a) => volterra(a),
        Command::Sample(a) => sample(a, cli.seed.unwrap_or(0)),
    }
}

fn inputs<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn read_arg(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?),
        None => Ok(arg.to_string()),
    }
}

fn parse_fn(s: &str) -> Result<AuxFn> {
    s.parse()
}

fn load_space(arg: &str) -> Result<SpaceFile> {
    Ok(serde_json::from_str(&read_arg(arg)?)?)
}

fn load_map(arg: &str) -> Result<SelfMap> {
    let text = read_arg(arg)?;
    let text = text.trim();
    let image: Vec<usize> = if text.starts_with('[') || text.starts_with('{') {
        match serde_json::from_str::<SelfMap>(text) {
            Ok(m) => m.image().to_vec(),
            Err(_) => serde_json::from_str(text)?,
        }
    } else {
        text.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Parse(format!("map entry {p:?}"))))
            .collect::<Result<_>>()?
    };
    SelfMap::new(image)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// `start:end:step` (inclusive, steps counted from `start`) or `a,b,c`.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("grid value {p:?}")));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, h] => {
            let (a, b, h) = (num(a)?, num(b)?, num(h)?);
            if !(h > 0.0) || b < a {
                return Err(Error::InvalidGrid(s.to_string()));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * h).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(Error::InvalidGrid(s.to_string())),
    }
}

fn resolve_mode(mode: ModeArg, fns: &[&AuxFn]) -> Result<Mode> {
    let exact_ok = fns.iter().all(|f| f.supports_exact());
    match mode {
        ModeArg::Float => Ok(Mode::FloatMargin),
        ModeArg::Auto if exact_ok => Ok(Mode::Exact),
        ModeArg::Auto => Ok(Mode::FloatMargin),
        ModeArg::Exact if exact_ok => Ok(Mode::Exact),
        ModeArg::Exact => {
            let bad = fns.iter().find(|f| !f.supports_exact()).expect("some function is inexact");
            Err(Error::ExactUnavailable(format!("{bad} has no exact evaluation")))
        }
    }
}

fn fn_class(a: &FnClassArgs, tol: Tolerance) -> Result<Report> {
    let f = parse_fn(&a.function)?;
    let grid = parse_grid(&a.grid)?;
    let at = parse_grid(&a.at)?;
    let phi = a.phi.as_deref().map(parse_fn).transpose()?;
    let e = a.e.as_deref().map(parse_fn).transpose()?;
    let opts = LimitOptions { margin: tol.margin, ..LimitOptions::default() };
    let need = |x: &Option<AuxFn>, flag: &str| {
        x.clone().ok_or_else(|| Error::InvalidProblem(format!("this check needs --{flag}")))
    };

    let mut entries: Vec<ClassEntry> = Vec::new();
    let mut extra = Vec::new();
    for check in &a.check {
        match check {
            Check::Increasing => entries.push(check_monotone(&f, &grid, Monotonicity::Strict)?),
            Check::Nondecreasing => entries.push(check_monotone(&f, &grid, Monotonicity::NonDecreasing)?),
            Check::F2 => entries.push(check_f2(&f, &dyadic_probe(40), 1e6)?),
            Check::F3 => entries.push(check_f3(&f, a.k, &dyadic_probe(40), 1e-3)?),
            Check::RightLimit => {
                for &t in &at {
                    extra.push(Payload::RightLimit(estimate_right_limit(&f, t, &opts.schedule, opts.tol)?));
                }
            }
            Check::C1 => {
                let e = need(&e, "e")?;
                entries.push(check_c1(&e, &f, &grid, &tol.margin)?);
            }
            Check::JumpDominance => {
                let phi = need(&phi, "phi")?;
                for mut entry in check_jump_dominance(&phi, &f, &at, &opts)? {
                    if entry.verdict == Outcome::Fail {
                        let t = entry.at.expect("per-t entry");
                        entry.note = Some(format!(
                            "the jump of F at t={t} is not dominated by phi; \
                             `counterexample build --fn {f} --t0 {t}` constructs an F-contraction \
                             that is not Meir-Keeler from this jump"
                        ));
                    }
                    entries.push(entry);
                }
            }
            Check::EfLiminf => {
                let e = need(&e, "e")?;
                extra.push(Payload::EfLiminf(check_ef_liminf_conditions(&e, &f, &at, &opts)?));
            }
        }
    }
    let mut verdicts = Vec::new();
    if !entries.is_empty() {
        verdicts.push(Payload::Classification { function: f.to_string(), entries });
    }
    verdicts.extend(extra);
    Ok(Report::new("fn-class", inputs(a), Mode::FloatMargin, verdicts))
}

fn validated<S: Scalar>(file: &SpaceFile, map: &SelfMap, tol: Tolerance) -> Result<FiniteMetricSpace<S>> {
    let space = FiniteMetricSpace::<S>::from_file(file)?;
    map.check_space(&space)?;
    let slack = if S::is_exact() { S::zero() } else { S::from_real(&Real::from(tol.margin)) };
    let report = space.validate_metric(&slack);
    if !report.pass {
        return Err(Error::InvalidProblem(format!("not a metric: {:?}", report.violation)));
    }
    Ok(space)
}

fn certify(a: &CertifyArgs, mode: ModeArg, tol: Tolerance) -> Result<Report> {
    let file = load_space(&a.space)?;
    let map = load_map(&a.map)?;
    let need = |x: &Option<String>, flag: &str| -> Result<AuxFn> {
        parse_fn(x.as_deref().ok_or_else(|| Error::InvalidProblem(format!("--condition needs --{flag}")))?)
    };
    let fns: Vec<AuxFn> = match a.condition {
        ConditionArg::Banach => vec![],
        ConditionArg::F => vec![need(&a.function, "fn")?],
        ConditionArg::Phif => vec![need(&a.phi, "phi")?, need(&a.function, "fn")?],
        ConditionArg::Ef => vec![need(&a.e, "e")?, need(&a.function, "fn")?],
    };
    let refs: Vec<&AuxFn> = fns.iter().collect();
    let resolved = resolve_mode(mode, &refs)?;
    let verdicts = match resolved {
        Mode::Exact => certify_in::<Rational>(a, &validated(&file, &map, tol)?, &map, &fns, tol)?,
        Mode::FloatMargin => certify_in::<f64>(a, &validated(&file, &map, tol)?, &map, &fns, tol)?,
    };
    Ok(Report::new("certify", inputs(a), resolved, verdicts))
}

fn certify_in<S: Scalar>(
    a: &CertifyArgs,
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    fns: &[AuxFn],
    tol: Tolerance,
) -> Result<Vec<Payload>> {
    Ok(match a.condition {
        ConditionArg::Banach => vec![Payload::Verdict(certify_banach(space, map, tol)?)],
        ConditionArg::F => match &a.tau {
            Some(tau) => {
                let tau = S::from_real(&tau.parse::<Real>()?);
                vec![Payload::Verdict(certify_f_contraction(space, map, &fns[0], &tau, tol)?)]
            }
            None => {
                let best = max_admissible_tau(space, map, &fns[0])?;
                vec![Payload::MaxTau { value: best.to_real(), approx: best.to_f64() }]
            }
        },
        ConditionArg::Phif => vec![Payload::Verdict(certify_phi_f(space, map, &fns[0], &fns[1], tol)?)],
        ConditionArg::Ef => vec![Payload::Verdict(certify_ef(space, map, &fns[0], &fns[1], tol)?)],
    })
}

fn mk_check(a: &MkCheckArgs, mode: ModeArg, tol: Tolerance) -> Result<Report> {
    let file = load_space(&a.space)?;
    let map = load_map(&a.map)?;
    let resolved = resolve_mode(mode, &[])?;
    let payload = match resolved {
        Mode::Exact => mk_in::<Rational>(a, &validated(&file, &map, tol)?, &map, tol)?,
        Mode::FloatMargin => mk_in::<f64>(a, &validated(&file, &map, tol)?, &map, tol)?,
    };
    Ok(Report::new("mk-check", inputs(a), resolved, vec![payload]))
}

fn mk_in<S: Scalar>(a: &MkCheckArgs, space: &FiniteMetricSpace<S>, map: &SelfMap, tol: Tolerance) -> Result<Payload> {
    let verdict = meir_keeler_finite(space, map, tol)?;
    Ok(if a.classes { Payload::MkAudit(meir_keeler_direct(space, map, tol)?) } else { Payload::Verdict(verdict) })
}

fn parse_gamma(s: &str) -> Result<GammaSchedule> {
    let (head, args) = s.split_once(':').ok_or_else(|| Error::InvalidSchedule(s.to_string()))?;
    let vals: Vec<Real> = args.split(',').map(|p| p.trim().parse()).collect::<Result<_>>()?;
    match (head, vals.as_slice()) {
        ("harmonic", [scale]) => Ok(GammaSchedule::Harmonic { scale: scale.clone() }),
        ("geometric", [first, ratio]) => Ok(GammaSchedule::Geometric { first: first.clone(), ratio: ratio.clone() }),
        _ => Err(Error::InvalidSchedule(s.to_string())),
    }
}

fn family(a: &FamilyArgs, mode: ModeArg) -> Result<(CounterexampleFamily, Mode)> {
    let f = parse_fn(&a.function)?;
    let gamma = a.gamma.as_deref().map(parse_gamma).transpose()?;
    let mut fam = CounterexampleFamily::build_with(f, a.t0.parse::<Real>()?, gamma)?;
    let resolved = resolve_mode(mode, &[&fam.f])?;
    fam.exact = resolved == Mode::Exact;
    Ok((fam, resolved))
}

#[derive(Serialize)]
struct CxInputs<'a> {
    action: &'a str,
    #[serde(flatten)]
    family: &'a FamilyArgs,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<&'a [String]>,
}

fn counterexample(c: &CounterexampleCommand, mode: ModeArg) -> Result<Report> {
    let (action, fam_args, n, delta) = match c {
        CounterexampleCommand::Build { family, n, .. } => ("build", family, *n, None),
        CounterexampleCommand::Verify { family, n, .. } => ("verify", family, Some(*n), None),
        CounterexampleCommand::Witness { family, delta } => ("witness", family, None, Some(delta.as_slice())),
        CounterexampleCommand::Audit { family, n } => ("audit", family, Some(*n), None),
    };
    let (fam, resolved) = family(fam_args, mode)?;
    let mut verdicts = Vec::new();
    match c {
        CounterexampleCommand::Build { n, emit_space, emit_map, .. } => {
            verdicts.push(Payload::Family(fam.clone()));
            if emit_space.is_some() || emit_map.is_some() {
                let trunc = fam.enumerate_points(n.unwrap_or(10))?;
                if let Some(path) = emit_space {
                    write_file(path, &serde_json::to_string_pretty(&trunc.space.to_file())?)?;
                }
                if let Some(path) = emit_map {
                    write_file(path, &serde_json::to_string(trunc.map.image())?)?;
                }
            }
        }
        CounterexampleCommand::Verify { n, mk, .. } => {
            verdicts.push(Payload::FamilyVerification(fam.verify_f_contraction(*n)?));
            if *mk {
                let trunc = fam.enumerate_points(*n)?;
                let v = match resolved {
                    Mode::Exact => meir_keeler_finite(&trunc.space, &trunc.map, Tolerance::default())?,
                    Mode::FloatMargin => meir_keeler_finite(&trunc.space.to_f64(), &trunc.map, Tolerance::default())?,
                };
                verdicts.push(Payload::Verdict(v));
            }
        }
        CounterexampleCommand::Witness { delta, .. } => {
            for d in delta {
                verdicts.push(Payload::MkWitness(fam.mk_falsification_witness(d.parse::<Real>()?)?));
            }
        }
        CounterexampleCommand::Audit { n, .. } => verdicts.push(Payload::DistanceAudit(fam.audit_distance_claims(*n)?)),
    }
    let echo = CxInputs { action, family: fam_args, n, delta };
    Ok(Report::new(format!("counterexample {action}"), inputs(&echo), resolved, verdicts))
}

fn picard(a: &PicardArgs, mode: ModeArg) -> Result<Report> {
    let file = load_space(&a.space)?;
    let map = load_map(&a.map)?;
    let resolved = resolve_mode(mode, &[])?;
    let tol = Tolerance::default();
    let starts: Vec<usize> = match &a.x0 {
        Some(x0) => {
            let idx = file
                .labels
                .iter()
                .position(|l| l == x0)
                .or_else(|| x0.parse::<usize>().ok().filter(|&i| i < file.labels.len()))
                .ok_or_else(|| Error::InvalidMap(format!("no point {x0:?}")))?;
            vec![idx]
        }
        None => (0..file.labels.len()).collect(),
    };
    let mut verdicts = Vec::new();
    for &x0 in &starts {
        let trace = match resolved {
            Mode::Exact => picard_iterate(&validated::<Rational>(&file, &map, tol)?, &map, x0, a.atol, a.max_iter)?,
            Mode::FloatMargin => picard_iterate(&validated::<f64>(&file, &map, tol)?, &map, x0, a.atol, a.max_iter)?,
        };
        if let (Some(path), 1) = (&a.csv, starts.len()) {
            write_file(path, &trace.to_csv(|&i| file.labels[i].clone()))?;
        }
        verdicts.push(Payload::PicardTrace { labels: file.labels.clone(), trace });
    }
    Ok(Report::new("picard", inputs(a), resolved, verdicts))
}

fn volterra(a: &VolterraArgs) -> Result<Report> {
    let kernel: Kernel = a.kernel.parse()?;
    let forcing: TimeFn = a.forcing.parse()?;
    let problem = VolterraProblem::new(kernel, forcing, a.tend, a.step)?;
    let x0 = match a.x0 {
        Seed::Forcing => None,
        Seed::Zero => Some(problem.sample(|_| 0.0)),
    };
    let sol = picard_solve(&problem, x0.as_ref(), a.atol, a.max_iter)?;
    let sup_error = match &a.exact {
        Some(s) => {
            let exact: TimeFn = s.parse()?;
            Some(crate::volterra::sup_distance(&sol.solution, &problem.sample(|t| exact.eval(t)))?)
        }
        None => None,
    };
    let order = if a.order { Some(observed_order(&problem, a.atol, a.max_iter)?) } else { None };
    if let Some(path) = &a.csv {
        write_file(path, &sol.solution.to_csv(&problem))?;
    }
    let report = VolterraReport {
        residual: problem.residual(&sol.solution)?,
        iterations: sol.iterations(),
        converged: sol.converged,
        trace: sol.trace,
        contraction_factor: sol.contraction_factor,
        problem,
        sup_error,
        order,
    };
    Ok(Report::new("volterra", inputs(a), Mode::FloatMargin, vec![Payload::Volterra(report)]))
}

fn sample(a: &SampleArgs, seed: u64) -> Result<Report> {
    let mut rng = sampling::seeded(seed);
    let (space, map, lipschitz) = match a.kind {
        SampleKind::Line => {
            if a.n == 0 {
                return Err(Error::TooFewPoints(0));
            }
            let space = sampling::random_line_space(&mut rng, a.n, 8, 100.max(a.n as u32));
            let map = sampling::random_self_map(&mut rng, a.n);
            (space, map, None)
        }
        SampleKind::Banach => {
            if a.n < 2 {
                return Err(Error::TooFewPoints(a.n));
            }
            let inst = sampling::random_banach_instance(&mut rng, a.n);
            (inst.space, inst.map, Some(Real::from_rational(inst.lambda)))
        }
        SampleKind::Halving => {
            let (s, m) = sampling::halving_example();
            (s, m, None)
        }
        SampleKind::Ef => {
            let (s, m) = sampling::ef_example();
            (s, m, None)
        }
    };
    let lipschitz = match (lipschitz, space.len()) {
        (Some(l), _) => Some(l),
        (None, n) if n >= 2 => Some(crate::metric::lipschitz_constant(&space, &map)?.to_real()),
        _ => None,
    };
    let file = space.to_file();
    if let Some(path) = &a.emit_space {
        write_file(path, &serde_json::to_string_pretty(&file)?)?;
    }
    if let Some(path) = &a.emit_map {
        write_file(path, &serde_json::to_string(map.image())?)?;
    }
    let instance = Payload::Instance(Instance { space: file, map: map.image().to_vec(), lipschitz });
    Ok(Report::new("sample", inputs(a), Mode::Exact, vec![instance]))
}
