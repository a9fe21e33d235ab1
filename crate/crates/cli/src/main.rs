mod args;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use nonminimal::pipeline::ExplicitSpec;
use nonminimal::{
    build_l, formal_solutions, gevrey_estimate, lambda_map_check, residue_analysis, run_pipeline, solve_psi,
    termination_detect, Backend, Complex64, ConfigFile, Error, GaussRat, Member, Report, RunConfig, RunError,
    Scalar, Series1,
};
use serde_json::{json, Value};

use args::{Cli, Command, Global, MemberArgs};

/// Why a command stopped without a verdict.
enum Failure {
    Usage(String),
    Resource(String),
    Compute(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Compute(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Resource(m) | Failure::Compute(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(m) => Failure::Usage(m),
            RunError::Resource(m) => Failure::Resource(m),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::BuildOde(member) => build_ode(g, member),
        Command::Segre {
            member,
            sign,
            dual,
            normal_form,
        } => segre(g, member, *sign, *dual, *normal_form),
        Command::Check {
            member,
            checks,
            probe_degree,
        } => {
            let mut cf = member_config(g, member)?;
            cf.checks = Some(checks.clone());
            cf.probe_degree = *probe_degree;
            run_report(cf)
        }
        Command::Equiv { family, probe_degree } => equiv(g, family, *probe_degree),
        Command::Monodromy {
            family,
            numeric,
            radius,
            tol,
        } => monodromy(g, family, *numeric, *radius, *tol),
        Command::Autovec { family, check } => autovec(g, family, check),
        Command::Growth { series, window } => growth(g, series, *window),
        Command::Run {
            config,
            family,
            checks,
            radius,
            tol,
            window,
            growth_degree,
            probe_degree,
        } => {
            let base = match config {
                Some(path) => read_config(path)?,
                None => ConfigFile::default(),
            };
            let mut top = global_config(g);
            top.family = (!family.is_empty()).then(|| family.clone());
            top.checks = checks.clone();
            top.radius = *radius;
            top.tol = *tol;
            top.window = window.map(|(a, b)| [a, b]);
            top.growth_degree = *growth_degree;
            top.probe_degree = *probe_degree;
            run_report(base.overlay(top))
        }
    }
}

/// Global flags as a config layer.
fn global_config(g: &Global) -> ConfigFile {
    ConfigFile {
        degree: g.degree,
        rect: g.rect.map(|(a, b)| [a, b]),
        backend: g.backend,
        jobs: g.jobs,
        out: g.out.as_ref().map(|p| p.display().to_string()),
        ..ConfigFile::default()
    }
}

fn member(args: &MemberArgs) -> Result<Member, Failure> {
    match (&args.family, args.m, &args.a, &args.b) {
        (Some(f), _, _, _) => Ok(Member::parse_family(f)?),
        (None, Some(m), Some(a), Some(b)) => Ok(Member::Explicit {
            m,
            a: a.clone(),
            b: b.clone(),
        }),
        _ => Err(Failure::Usage("give --family m,beta or --m, --a and --b".into())),
    }
}

fn member_config(g: &Global, args: &MemberArgs) -> Result<ConfigFile, Failure> {
    let mut cf = global_config(g);
    match member(args)? {
        Member::Family { .. } => cf.family = args.family.clone().map(|f| vec![f]),
        Member::Explicit { m, a, b } => cf.explicit = Some(vec![ExplicitSpec { m, a, b }]),
    }
    Ok(cf)
}

fn read_config(path: &Path) -> Result<ConfigFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))
}

fn emit(g: &Global, v: &Value) -> Result<(), Failure> {
    emit_to(g.out.as_deref(), v)
}

fn emit_to(out: Option<&Path>, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n";
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Resource(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_report(cf: ConfigFile) -> Outcome {
    let cfg = RunConfig::from_file(cf)?;
    let report = run_pipeline(&cfg)?;
    emit_to(cfg.out.as_deref().map(Path::new), &report.to_json())?;
    summarize(&report);
    Ok(report.exit_code() as u8)
}

/// One line per failing check on stderr.
fn summarize(report: &Report) {
    for run in &report.runs {
        for (check, result) in &run.checks {
            if !result.pass {
                let w = result.witness.clone().unwrap_or(Value::Null);
                eprintln!("FAIL {} {check}: {w}", run.member.to_json());
            }
        }
    }
}

fn require_exact(g: &Global, what: &str) -> Result<(), Failure> {
    if g.backend == Some(Backend::Float) {
        return Err(Failure::Usage(format!(
            "{what} is exact-only; drop --backend float"
        )));
    }
    Ok(())
}

fn family_of(s: &str) -> Result<(i64, nonminimal::BigRational), Failure> {
    match Member::parse_family(s)? {
        Member::Family { m, beta } => Ok((m, beta)),
        Member::Explicit { .. } => unreachable!("parse_family returns a family"),
    }
}

fn build_ode(g: &Global, args: &MemberArgs) -> Outcome {
    require_exact(g, "build-ode")?;
    let n = g.degree.unwrap_or(40);
    let member = member(args)?;
    let (ode, a, b) = member.ode::<GaussRat>(n)?;
    emit(
        g,
        &json!({
            "version": 1,
            "member": member.to_json(),
            "ode": ode.to_json(),
            "a": a.to_json(),
            "b": b.to_json(),
        }),
    )?;
    Ok(0)
}

fn segre(g: &Global, args: &MemberArgs, sign: nonminimal::Sign, dual: bool, normal_form: bool) -> Outcome {
    require_exact(g, "segre")?;
    let (nx, ny) = g.rect.unwrap_or((8, 24));
    let member = member(args)?;
    let (ode, _, _) = member.ode::<GaussRat>(ny as i64)?;
    let ode = match sign {
        nonminimal::Sign::Positive => ode,
        nonminimal::Sign::Negative => ode.conjugate(),
    };
    let fam = solve_psi(&ode, sign, nx, ny)?;
    let rho = fam.rho()?;
    let mut v = json!({
        "version": 1,
        "member": member.to_json(),
        "segre": fam.to_json(),
        "hypersurface": rho.to_json(),
    });
    if dual {
        v["dual"] = fam.dual()?.to_json();
    }
    if normal_form {
        let form = rho.real_normal_form()?;
        v["normal_form"] = json!({
            "v": form.v.to_json(),
            "h": form.h.iter().map(Series1::to_json).collect::<Vec<_>>(),
        });
    }
    emit(g, &v)?;
    Ok(0)
}

fn equiv(g: &Global, family: &str, probe_degree: Option<i64>) -> Outcome {
    require_exact(g, "equiv")?;
    let (m, beta) = family_of(family)?;
    let n = g.degree.unwrap_or(40);
    let pair = formal_solutions::<GaussRat>(m, &beta, n)?;
    let map = pair.chi_tau()?;
    let coupled = nonminimal::coupled_map_g(&map, m)?;
    let mut cf = global_config(g);
    cf.family = Some(vec![family.to_string()]);
    cf.checks = Some(vec!["map".into(), "coupled".into(), "selfmap".into()]);
    cf.probe_degree = probe_degree;
    let report = run_pipeline(&RunConfig::from_file(cf)?)?;
    emit(
        g,
        &json!({
            "version": 1,
            "family": [m, beta.to_string()],
            "f": pair.f.to_json(),
            "u": pair.u.to_json(),
            "chi_tau": map.to_json(),
            "coupled": coupled.to_json(),
            "checks": report.runs[0].to_json()["checks"],
        }),
    )?;
    summarize(&report);
    Ok(report.exit_code() as u8)
}

fn monodromy(g: &Global, family: &str, numeric: bool, radius: f64, tol: f64) -> Outcome {
    let (m, beta) = family_of(family)?;
    if !numeric {
        let rep = residue_analysis(m, &beta)?;
        emit(g, &json!({ "version": 1, "monodromy": rep.to_json() }))?;
        return Ok(0);
    }
    let mut cf = global_config(g);
    cf.backend = None;
    cf.family = Some(vec![family.to_string()]);
    cf.checks = Some(vec!["monodromy".into()]);
    cf.radius = Some(radius);
    cf.tol = Some(tol);
    let report = run_pipeline(&RunConfig::from_file(cf)?)?;
    let check = &report.runs[0].checks[&nonminimal::Check::Monodromy];
    emit(
        g,
        &json!({
            "version": 1,
            "monodromy": check.details,
            "pass": check.pass,
            "witness": check.witness,
        }),
    )?;
    summarize(&report);
    Ok(report.exit_code() as u8)
}

fn autovec(g: &Global, family: &str, checks: &[String]) -> Outcome {
    require_exact(g, "autovec")?;
    let (m, beta) = family_of(family)?;
    let n = g.degree.unwrap_or(40);
    let map = formal_solutions::<GaussRat>(m, &beta, n)?.chi_tau()?;
    let field = build_l(&map, m)?;
    let mut results = serde_json::Map::new();
    let mut code = 0;
    for c in checks {
        match c.as_str() {
            "tangency" => {
                let mut cf = global_config(g);
                cf.family = Some(vec![family.to_string()]);
                cf.checks = Some(vec!["tangency".into()]);
                let report = run_pipeline(&RunConfig::from_file(cf)?)?;
                summarize(&report);
                code = code.max(report.exit_code() as u8);
                results.insert(
                    "tangency".into(),
                    report.runs[0].checks[&nonminimal::Check::Tangency].to_json(),
                );
            }
            "lambda" => {
                let check = lambda_map_check::<GaussRat>(m, n)?;
                let witness = check.witness.as_ref().map(|(s, mm)| {
                    json!({ "series": s, "degree": mm.degree, "left": mm.left.to_string(), "right": mm.right.to_string() })
                });
                if !check.pass() {
                    eprintln!("FAIL lambda: {}", witness.clone().unwrap_or(Value::Null));
                    code = 1;
                }
                results.insert(
                    "lambda".into(),
                    json!({ "pass": check.pass(), "rect": [check.pulled.trunc(), 0], "witness": witness }),
                );
            }
            other => return Err(Failure::Usage(format!("unknown autovec check `{other}`"))),
        }
    }
    emit(
        g,
        &json!({
            "version": 1,
            "family": [m, beta.to_string()],
            "field": field.to_json(),
            "checks": results,
        }),
    )?;
    Ok(code)
}

fn growth(g: &Global, source: &str, window: (i64, i64)) -> Outcome {
    match g.backend.unwrap_or(Backend::Exact) {
        Backend::Exact => growth_with::<GaussRat>(g, source, window),
        Backend::Float => growth_with::<Complex64>(g, source, window),
    }
}

fn growth_with<S: Scalar>(g: &Global, source: &str, window: (i64, i64)) -> Outcome {
    let series = load_series::<S>(g, source)?;
    let termination = termination_detect(&series, nonminimal::growth::DEFAULT_TAIL);
    let report = match gevrey_estimate(&series, window) {
        Ok(r) => r.to_json(),
        Err(e) => json!({ "error": e.to_string() }),
    };
    emit(
        g,
        &json!({
            "version": 1,
            "source": source,
            "trunc": series.trunc(),
            "termination": termination.to_json(),
            "growth": report,
        }),
    )?;
    Ok(0)
}

/// A series from a JSON file or from `f:`, `u:`, `B:` references.
fn load_series<S: Scalar>(g: &Global, source: &str) -> Result<Series1<S>, Failure> {
    let reference = source
        .split_once(':')
        .filter(|(k, _)| matches!(*k, "f" | "u" | "B"));
    if let Some((kind, family)) = reference {
        let (m, beta) = family_of(family)?;
        let n = g.degree.unwrap_or(200);
        let pair = formal_solutions::<S>(m, &beta, n)?;
        return Ok(match kind {
            "f" => pair.f,
            "u" => pair.u,
            _ => build_l(&pair.chi_tau()?, m)?.b,
        });
    }
    let text =
        fs::read_to_string(source).map_err(|e| Failure::Usage(format!("cannot read {source}: {e}")))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid JSON in {source}: {e}")))?;
    Ok(Series1::from_json(&v)?)
}
