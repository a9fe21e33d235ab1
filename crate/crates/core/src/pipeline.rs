//! End-to-end verification runs: configuration, per-member checks and the
//! versioned JSON report.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::autovec::{build_l, explicit_m0, lambda_map_check, tangency_residual};
use crate::equiv::{coupled_map_g, formal_solutions, map_residual, self_map_probe};
use crate::error::Error;
use crate::growth::{gevrey_estimate, termination_detect, Termination, DEFAULT_TAIL};
use crate::monodromy::numeric_monodromy;
use crate::ode::{parse_polynomial, AdmissibleOde, GaugeMap, RealStructure};
use crate::report::real_json;
use crate::scalar::{parse_rational, Backend, GaussRat, Scalar};
use crate::segre::{solve_psi, Hypersurface, SegreFamily, Sign};
use crate::series::{rat, Mismatch, Mismatch2, Series1, Series2};

pub const REPORT_VERSION: u32 = 1;

/// Largest sizes a run accepts before reporting a resource limit.
pub const MAX_DEGREE: i64 = 2000;
pub const MAX_RECT: (usize, usize) = (64, 400);

/// Deviation allowed between numeric and predicted monodromy eigenvalues.
pub const MONODROMY_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Roundtrip,
    Reality,
    Realty,
    Map,
    Coupled,
    Selfmap,
    Monodromy,
    Tangency,
    Model0,
    Growth,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::Roundtrip,
        Check::Reality,
        Check::Realty,
        Check::Map,
        Check::Coupled,
        Check::Selfmap,
        Check::Monodromy,
        Check::Tangency,
        Check::Model0,
        Check::Growth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Roundtrip => "roundtrip",
            Check::Reality => "reality",
            Check::Realty => "realty",
            Check::Map => "map",
            Check::Coupled => "coupled",
            Check::Selfmap => "selfmap",
            Check::Monodromy => "monodromy",
            Check::Tangency => "tangency",
            Check::Model0 => "model0",
            Check::Growth => "growth",
        }
    }

    /// Checks that only make sense for a family member `E^m_β` with `m ≥ 2`.
    pub fn needs_family(self) -> bool {
        !matches!(
            self,
            Check::Roundtrip | Check::Reality | Check::Realty | Check::Selfmap
        )
    }

    /// Checks that may run on the float backend.
    pub fn allows_float(self) -> bool {
        matches!(self, Check::Monodromy | Check::Growth)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown check `{s}`")))
    }
}

/// An ODE with its real data `(a, b)`.
pub type MemberOde<S> = (AdmissibleOde<S>, Series1<S>, Series1<S>);

/// One ODE to run the pipeline on.
#[derive(Clone, Debug, PartialEq)]
pub enum Member {
    /// `E^m_β`: `a ≡ 1`, `b = β w^{2m−2}`.
    Family { m: i64, beta: BigRational },
    /// Real data `(a, b)` given as polynomials in `w`.
    Explicit { m: i64, a: String, b: String },
}

impl Member {
    /// Parses `m,β` such as `2,1` or `3,-1/2`.
    pub fn parse_family(s: &str) -> Result<Self, Error> {
        let (m, beta) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `m,beta`, got `{s}`")))?;
        let m = m
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid m in `{s}`")))?;
        if m < 1 {
            return Err(Error::Parse(format!("m must be at least 1 in `{s}`")));
        }
        Ok(Member::Family {
            m,
            beta: parse_rational(beta)?,
        })
    }

    pub fn m(&self) -> i64 {
        match self {
            Member::Family { m, .. } | Member::Explicit { m, .. } => *m,
        }
    }

    /// The ODE and its real data `(a, b)`, known to degree `trunc`.
    pub fn ode<S: Scalar>(&self, trunc: i64) -> Result<MemberOde<S>, Error> {
        match self {
            Member::Family { m, beta } => {
                let ode = AdmissibleOde::family(*m, beta, trunc)?;
                let a = Series1::one(trunc);
                let b = Series1::monomial(S::from_rational(beta), 2 * m - 2, trunc);
                Ok((ode, a, b))
            }
            Member::Explicit { m, a, b } => {
                let a = parse_polynomial(a, trunc)?;
                let b = parse_polynomial(b, trunc)?;
                let ode = crate::ode::RealData::new(*m, a.clone(), b.clone())?.to_ode();
                Ok((ode, a, b))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Member::Family { m, beta } => json!([m, beta.to_string()]),
            Member::Explicit { m, a, b } => json!({ "m": m, "a": a, "b": b }),
        }
    }
}

/// Explicit member as written in a config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub m: i64,
    pub a: String,
    pub b: String,
}

/// Raw configuration as read from a file or from flags. Every field is
/// optional so that flags can be laid over a file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Family members as `"m,beta"`.
    pub family: Option<Vec<String>>,
    pub explicit: Option<Vec<ExplicitSpec>>,
    pub degree: Option<i64>,
    pub rect: Option<[usize; 2]>,
    pub backend: Option<Backend>,
    pub checks: Option<Vec<String>>,
    pub radius: Option<f64>,
    pub tol: Option<f64>,
    pub window: Option<[i64; 2]>,
    pub growth_degree: Option<i64>,
    pub probe_degree: Option<i64>,
    pub jobs: Option<usize>,
    pub out: Option<String>,
}

impl ConfigFile {
    /// Fields set in `top` replace those of `self`.
    pub fn overlay(self, top: ConfigFile) -> ConfigFile {
        ConfigFile {
            family: top.family.or(self.family),
            explicit: top.explicit.or(self.explicit),
            degree: top.degree.or(self.degree),
            rect: top.rect.or(self.rect),
            backend: top.backend.or(self.backend),
            checks: top.checks.or(self.checks),
            radius: top.radius.or(self.radius),
            tol: top.tol.or(self.tol),
            window: top.window.or(self.window),
            growth_degree: top.growth_degree.or(self.growth_degree),
            probe_degree: top.probe_degree.or(self.probe_degree),
            jobs: top.jobs.or(self.jobs),
            out: top.out.or(self.out),
        }
    }
}

/// Why a run could not produce a verdict.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource limit: {0}")]
    Resource(String),
}

impl RunError {
    /// Process exit code: 2 for configuration errors, 3 for resource limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Resource(_) => 3,
        }
    }
}

/// A validated pipeline configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub members: Vec<Member>,
    /// Degree `N` of the formal solutions and gauge maps.
    pub degree: i64,
    /// `(Nx, Nη)` for Segre families and hypersurfaces.
    pub rect: (usize, usize),
    pub backend: Backend,
    pub checks: Vec<Check>,
    pub radius: f64,
    pub tol: f64,
    pub window: (i64, i64),
    pub growth_degree: i64,
    pub probe_degree: i64,
    pub jobs: usize,
    pub out: Option<String>,
}

impl RunConfig {
    /// Defaults for one family member and a list of checks.
    pub fn for_family(m: i64, beta: BigRational, checks: &[Check]) -> Self {
        RunConfig {
            members: vec![Member::Family { m, beta }],
            degree: 40,
            rect: (8, 24),
            backend: Backend::Exact,
            checks: checks.to_vec(),
            radius: 1.0,
            tol: 1e-10,
            window: (32, 180),
            growth_degree: 200,
            probe_degree: 12,
            jobs: 1,
            out: None,
        }
    }

    pub fn from_file(cf: ConfigFile) -> Result<Self, RunError> {
        let config = |e: Error| RunError::Config(e.to_string());
        let mut members = Vec::new();
        for f in cf.family.unwrap_or_default() {
            members.push(Member::parse_family(&f).map_err(config)?);
        }
        for e in cf.explicit.unwrap_or_default() {
            members.push(Member::Explicit {
                m: e.m,
                a: e.a,
                b: e.b,
            });
        }
        if members.is_empty() {
            return Err(RunError::Config("no family members given".into()));
        }
        let checks = match cf.checks {
            None => Check::ALL.to_vec(),
            Some(list) => {
                let mut cs = list
                    .iter()
                    .map(|c| c.parse::<Check>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(config)?;
                cs.sort();
                cs.dedup();
                cs
            }
        };
        let [nx, ny] = cf.rect.unwrap_or([8, 24]);
        let cfg = RunConfig {
            members,
            degree: cf.degree.unwrap_or(40),
            rect: (nx, ny),
            backend: cf.backend.unwrap_or(Backend::Exact),
            checks,
            radius: cf.radius.unwrap_or(1.0),
            tol: cf.tol.unwrap_or(1e-10),
            window: cf.window.map(|[a, b]| (a, b)).unwrap_or((32, 180)),
            growth_degree: cf.growth_degree.unwrap_or(200),
            probe_degree: cf.probe_degree.unwrap_or(12),
            jobs: cf.jobs.unwrap_or_else(default_jobs).max(1),
            out: cf.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |s: String| Err(RunError::Config(s));
        if self.rect.0 < 3 || self.rect.1 < 2 {
            return bad(format!("rect must be at least (3, 2), got {:?}", self.rect));
        }
        if self.degree < 4 || self.growth_degree < 1 || self.probe_degree < 1 {
            return bad("degrees must be positive (and N >= 4)".into());
        }
        if self.radius.is_nan() || self.radius < 0.1 || self.tol.is_nan() || self.tol <= 0.0 {
            return bad("radius must be at least 0.1 and tol positive".into());
        }
        if self.window.0 > self.window.1 {
            return bad(format!("empty growth window {:?}", self.window));
        }
        if self.backend == Backend::Float {
            if let Some(c) = self.checks.iter().find(|c| !c.allows_float()) {
                return bad(format!(
                    "check `{c}` is an identity check and needs the exact backend"
                ));
            }
        }
        for member in &self.members {
            if let Member::Explicit { .. } = member {
                member
                    .ode::<GaussRat>(1)
                    .map_err(|e| RunError::Config(e.to_string()))?;
            }
            for c in &self.checks {
                let family_m = match member {
                    Member::Family { m, .. } => Some(*m),
                    Member::Explicit { .. } => None,
                };
                if c.needs_family() && family_m.is_none_or(|m| m < 2) {
                    return bad(format!(
                        "check `{c}` needs a family member with m >= 2, got {}",
                        member.to_json()
                    ));
                }
            }
        }
        let too_big = self.degree.max(self.growth_degree).max(self.probe_degree) > MAX_DEGREE
            || self.rect.0 > MAX_RECT.0
            || self.rect.1 > MAX_RECT.1;
        if too_big {
            return Err(RunError::Resource(format!(
                "degrees are capped at {MAX_DEGREE} and rect at {MAX_RECT:?}"
            )));
        }
        Ok(())
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Verdict of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub pass: bool,
    /// Rectangle (or `[N, 0]` for univariate data) on which it was verified.
    pub rect: Option<(usize, usize)>,
    /// The first offending coefficient when `pass` is false.
    pub witness: Option<Value>,
    pub details: Value,
}

impl CheckResult {
    fn ok(rect: Option<(usize, usize)>, details: Value) -> Self {
        CheckResult {
            pass: true,
            rect,
            witness: None,
            details,
        }
    }

    fn fail(rect: Option<(usize, usize)>, witness: Value, details: Value) -> Self {
        CheckResult {
            pass: false,
            rect,
            witness: Some(witness),
            details,
        }
    }

    fn error(e: &Error) -> Self {
        CheckResult::fail(None, json!({ "error": e.to_string() }), Value::Null)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "pass": self.pass,
            "rect": self.rect.map(|(a, b)| json!([a, b])),
            "witness": self.witness,
        });
        if !self.details.is_null() {
            v["details"] = self.details.clone();
        }
        v
    }
}

/// Results of all selected checks for one member.
#[derive(Clone, Debug, PartialEq)]
pub struct MemberReport {
    pub member: Member,
    pub checks: BTreeMap<Check, CheckResult>,
}

impl MemberReport {
    pub fn pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let checks: serde_json::Map<String, Value> = self
            .checks
            .iter()
            .map(|(c, r)| (c.name().to_string(), r.to_json()))
            .collect();
        let key = match self.member {
            Member::Family { .. } => "family",
            Member::Explicit { .. } => "explicit",
        };
        json!({ key: self.member.to_json(), "checks": checks })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub runs: Vec<MemberReport>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.runs.iter().all(MemberReport::pass)
    }

    /// 0 if every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "version": REPORT_VERSION,
            "runs": self.runs.iter().map(MemberReport::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Runs every selected check on every member; members run in parallel on
/// a pool of `cfg.jobs` threads and the report keeps the config order.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| RunError::Resource(e.to_string()))?;
    let runs = pool.install(|| {
        cfg.members
            .par_iter()
            .map(|member| run_member(cfg, member))
            .collect()
    });
    Ok(Report { runs })
}

/// Runs the selected checks on one member. A failing or erroring check
/// does not stop the remaining ones.
pub fn run_member(cfg: &RunConfig, member: &Member) -> MemberReport {
    let ctx = Context::new(cfg, member);
    let checks = cfg
        .checks
        .iter()
        .map(|&c| {
            let result = ctx.run(c).unwrap_or_else(|e| CheckResult::error(&e));
            (c, result)
        })
        .collect();
    MemberReport {
        member: member.clone(),
        checks,
    }
}

type Q = GaussRat;

/// Lazily computed objects shared between the checks of one member.
struct Context<'a> {
    cfg: &'a RunConfig,
    member: &'a Member,
    ode: OnceCell<Result<MemberOde<Q>, Error>>,
    psi: OnceCell<Result<SegreFamily<Q>, Error>>,
    rho: OnceCell<Result<Hypersurface<Q>, Error>>,
    rho0: OnceCell<Result<Hypersurface<Q>, Error>>,
    chi_tau: OnceCell<Result<GaugeMap<Q>, Error>>,
}

fn cached<T: Clone>(
    cell: &OnceCell<Result<T, Error>>,
    f: impl FnOnce() -> Result<T, Error>,
) -> Result<&T, Error> {
    cell.get_or_init(f).as_ref().map_err(Clone::clone)
}

fn mismatch_json<S: Scalar>(series: &str, mm: &Mismatch<S>) -> Value {
    json!({
        "series": series,
        "degree": mm.degree,
        "left": mm.left.to_string(),
        "right": mm.right.to_string(),
    })
}

fn mismatch2_json<S: Scalar>(series: &str, mm: &Mismatch2<S>) -> Value {
    json!({
        "series": series,
        "x_degree": mm.x_degree,
        "eta_degree": mm.eta_degree,
        "left": mm.left.to_string(),
        "right": mm.right.to_string(),
    })
}

fn residual_verdict<S: Scalar>(name: &str, r: &Series2<S>, details: Value) -> CheckResult {
    let rect = Some(r.rect());
    match r.first_nonzero() {
        None => CheckResult::ok(rect, details),
        Some((j, k, v)) => CheckResult::fail(
            rect,
            json!({ "series": name, "x_degree": j, "eta_degree": k, "value": v.to_string() }),
            details,
        ),
    }
}

impl<'a> Context<'a> {
    fn new(cfg: &'a RunConfig, member: &'a Member) -> Self {
        Context {
            cfg,
            member,
            ode: OnceCell::new(),
            psi: OnceCell::new(),
            rho: OnceCell::new(),
            rho0: OnceCell::new(),
            chi_tau: OnceCell::new(),
        }
    }

    fn family(&self) -> Result<(i64, &BigRational), Error> {
        match self.member {
            Member::Family { m, beta } if *m >= 2 => Ok((*m, beta)),
            _ => Err(Error::InvalidArgument(
                "check needs a family member with m >= 2".into(),
            )),
        }
    }

    fn ode(&self) -> Result<&MemberOde<Q>, Error> {
        cached(&self.ode, || self.member.ode(self.cfg.rect.1 as i64))
    }

    fn psi(&self) -> Result<&SegreFamily<Q>, Error> {
        cached(&self.psi, || {
            let (nx, ny) = self.cfg.rect;
            solve_psi(&self.ode()?.0, Sign::Positive, nx, ny)
        })
    }

    fn rho(&self) -> Result<&Hypersurface<Q>, Error> {
        cached(&self.rho, || self.psi()?.rho())
    }

    fn rho0(&self) -> Result<&Hypersurface<Q>, Error> {
        cached(&self.rho0, || {
            let (m, beta) = self.family()?;
            if *beta == rat(0, 1) {
                return Ok(self.rho()?.clone());
            }
            let (nx, ny) = self.cfg.rect;
            let e0 = AdmissibleOde::family(m, &rat(0, 1), ny as i64)?;
            solve_psi(&e0, Sign::Positive, nx, ny)?.rho()
        })
    }

    fn chi_tau(&self) -> Result<&GaugeMap<Q>, Error> {
        cached(&self.chi_tau, || {
            let (m, beta) = self.family()?;
            formal_solutions::<Q>(m, beta, self.cfg.degree)?.chi_tau()
        })
    }

    fn run(&self, check: Check) -> Result<CheckResult, Error> {
        match check {
            Check::Roundtrip => self.roundtrip(),
            Check::Reality => self.reality(),
            Check::Realty => self.realty(),
            Check::Map => self.map(),
            Check::Coupled => self.coupled(),
            Check::Selfmap => self.selfmap(),
            Check::Monodromy => self.monodromy(),
            Check::Tangency => self.tangency(),
            Check::Model0 => self.model0(),
            Check::Growth => self.growth(),
        }
    }

    fn roundtrip(&self) -> Result<CheckResult, Error> {
        let ode = &self.ode()?.0;
        let back = self.psi()?.extract_pq()?;
        let rect = Some(self.cfg.rect);
        let details = json!({ "verified_degree": back.trunc() });
        Ok(match back.mismatch(ode) {
            None => CheckResult::ok(rect, details),
            Some((s, mm)) => CheckResult::fail(rect, mismatch_json(s, &mm), details),
        })
    }

    fn reality(&self) -> Result<CheckResult, Error> {
        let rect = Some(self.cfg.rect);
        if let Some(mm) = self.psi()?.real_structure_witness()? {
            return Ok(CheckResult::fail(
                rect,
                mismatch2_json("dual-conjugate", &mm),
                Value::Null,
            ));
        }
        let (_, a, b) = self.ode()?;
        let back = self.psi()?.extract_pq()?;
        let data = match back.real_structure() {
            RealStructure::Real(d) => d,
            RealStructure::NotReal {
                series,
                degree,
                value,
            } => {
                return Ok(CheckResult::fail(
                    rect,
                    json!({ "series": series, "degree": degree, "value": value.to_string() }),
                    Value::Null,
                ));
            }
        };
        let details = json!({ "a": data.a().to_json(), "b": data.b().to_json() });
        if let Some(mm) = data.a().mismatch(a) {
            return Ok(CheckResult::fail(rect, mismatch_json("a", &mm), details));
        }
        if let Some(mm) = data.b().mismatch(b) {
            return Ok(CheckResult::fail(rect, mismatch_json("b", &mm), details));
        }
        Ok(CheckResult::ok(rect, details))
    }

    fn realty(&self) -> Result<CheckResult, Error> {
        let r = self.rho()?.realty_residual()?;
        Ok(residual_verdict("realty", &r, Value::Null))
    }

    /// The gauge map `(χ, τ)` pulls `E^m_0` back to `E^m_β`, and
    /// `(z χ(w), τ(w))` maps the hypersurface of `E^m_β` to that of `E^m_0`.
    fn map(&self) -> Result<CheckResult, Error> {
        let (m, beta) = self.family()?;
        let n = self.cfg.degree;
        let map = self.chi_tau()?;
        let e0 = AdmissibleOde::<Q>::family(m, &rat(0, 1), n)?;
        let back = e0.pullback(map, m)?;
        let target = AdmissibleOde::family(m, beta, back.trunc())?;
        let order = back.trunc();
        let details = json!({ "pullback_order": order });
        if let Some((s, mm)) = back.mismatch(&target) {
            let w = mismatch_json(s, &mm);
            return Ok(CheckResult::fail(Some((order as usize, 0)), w, details));
        }
        if order < n / 2 {
            let w = json!({ "pullback_order": order, "required": n / 2 });
            return Ok(CheckResult::fail(Some((order as usize, 0)), w, details));
        }
        let r = map_residual(self.rho()?, self.rho0()?, map)?;
        Ok(residual_verdict("map", &r, details))
    }

    fn coupled(&self) -> Result<CheckResult, Error> {
        let (m, _) = self.family()?;
        let map = self.chi_tau()?;
        let g = coupled_map_g(map, m)?;
        let conj = map.conj();
        let n = g.f().trunc().min(g.g().trunc());
        let rect = Some((n as usize, 0));
        if let Some(mm) = g.f().mismatch(conj.f()) {
            return Ok(CheckResult::fail(rect, mismatch_json("lambda", &mm), Value::Null));
        }
        if let Some(mm) = g.g().mismatch(conj.g()) {
            return Ok(CheckResult::fail(rect, mismatch_json("mu", &mm), Value::Null));
        }
        Ok(CheckResult::ok(rect, Value::Null))
    }

    fn selfmap(&self) -> Result<CheckResult, Error> {
        let n = self.cfg.probe_degree;
        let m = self.member.m();
        let (ode, _, _) = self.member.ode::<Q>(n + m + 2)?;
        let rep = self_map_probe(&ode, n)?;
        let rect = Some((rep.verified_degree.max(0) as usize, 0));
        let details = json!({
            "levels": rep.levels.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
            "verified_degree": rep.verified_degree,
        });
        if let Some(l) = rep.levels.iter().find(|l| l.dimension != Some(0)) {
            let w = json!({ "degree": l.degree, "rank": l.rank, "dimension": l.dimension });
            return Ok(CheckResult::fail(rect, w, details));
        }
        let id = GaugeMap::identity(rep.map.f().trunc());
        if let Some(mm) = rep.map.f().mismatch(id.f()) {
            return Ok(CheckResult::fail(rect, mismatch_json("f", &mm), details));
        }
        if let Some(mm) = rep.map.g().mismatch(id.g()) {
            return Ok(CheckResult::fail(rect, mismatch_json("g", &mm), details));
        }
        Ok(CheckResult::ok(rect, details))
    }

    fn monodromy(&self) -> Result<CheckResult, Error> {
        let (m, beta) = self.family()?;
        let rep = numeric_monodromy(m, beta, self.cfg.radius, self.cfg.tol)?;
        let num = rep.numeric.as_ref().expect("numeric part was requested");
        let [e1, e2] = rep.predicted;
        // A double eigenvalue may come with a Jordan block, whose computed
        // eigenvalues are only accurate to about √tol; compare trace and
        // determinant there instead.
        let (deviation, measure) = if (e1 - e2).norm() < 1e-9 {
            let trace = num.matrix[0][0] + num.matrix[1][1];
            (
                (trace - (e1 + e2)).norm().max((num.det - e1 * e2).norm()),
                "trace-det",
            )
        } else {
            (num.deviation, "eigenvalues")
        };
        let mut details = rep.to_json();
        details["measure"] = json!(measure);
        if deviation <= MONODROMY_THRESHOLD {
            Ok(CheckResult::ok(None, details))
        } else {
            let w = json!({
                "deviation": real_json(deviation),
                "threshold": MONODROMY_THRESHOLD,
                "eigenvalues": details["numeric"]["eigenvalues"].clone(),
            });
            Ok(CheckResult::fail(None, w, details))
        }
    }

    fn tangency(&self) -> Result<CheckResult, Error> {
        let (m, _) = self.family()?;
        let field = build_l(self.chi_tau()?, m)?;
        let r = tangency_residual(&field, self.rho()?)?;
        Ok(residual_verdict("tangency", &r, Value::Null))
    }

    /// The closed-form model agrees with the hypersurface of `E^m_0`, and
    /// the Λ-map identity holds for this `m`.
    fn model0(&self) -> Result<CheckResult, Error> {
        let (m, _) = self.family()?;
        let (nx, ny) = self.cfg.rect;
        let model = explicit_m0::<Q>(m, nx, ny)?;
        let rect = Some(model.rect());
        if let Some(mm) = model.rho().mismatch(self.rho0()?.rho()) {
            return Ok(CheckResult::fail(rect, mismatch2_json("rho", &mm), Value::Null));
        }
        let lambda = lambda_map_check::<Q>(m, self.cfg.degree)?;
        let details = json!({ "lambda_degree": lambda.pulled.trunc() });
        match &lambda.witness {
            None => Ok(CheckResult::ok(rect, details)),
            Some((s, mm)) => Ok(CheckResult::fail(rect, mismatch_json(s, mm), details)),
        }
    }

    fn growth(&self) -> Result<CheckResult, Error> {
        match self.cfg.backend {
            Backend::Exact => self.growth_with::<Q>(),
            Backend::Float => self.growth_with::<Complex64>(),
        }
    }

    /// Termination must match the exact resonance set
    /// `β = j(j+1)(m−1)²`; otherwise the fitted Gevrey order must be
    /// within 0.2 of `1/(m−1)`, the rate forced by the recursion.
    fn growth_with<S: Scalar>(&self) -> Result<CheckResult, Error> {
        let (m, beta) = self.family()?;
        let n = self.cfg.growth_degree;
        let f = formal_solutions::<S>(m, beta, n)?.f;
        let termination = termination_detect(&f, DEFAULT_TAIL);
        let resonant = terminating_beta(m, beta);
        let rect = Some((n as usize, 0));
        if termination.terminated() != resonant {
            let w = json!({ "termination": termination.to_json(), "expected_termination": resonant });
            return Ok(CheckResult::fail(rect, w, Value::Null));
        }
        if let Termination::At(_) | Termination::Zero = termination {
            return Ok(CheckResult::ok(
                rect,
                json!({ "termination": termination.to_json() }),
            ));
        }
        let report = gevrey_estimate(&f, self.cfg.window)?;
        let expected = 1.0 / (m - 1) as f64;
        let details = report.to_json();
        if (report.gevrey - expected).abs() <= 0.2 {
            Ok(CheckResult::ok(rect, details))
        } else {
            let w = json!({ "gevrey": real_json(report.gevrey), "expected": real_json(expected) });
            Ok(CheckResult::fail(rect, w, details))
        }
    }
}

/// `β = j(j+1)(m−1)²` for an integer `j ≥ 0`: exactly when the recursion
/// for `f` hits a zero factor.
pub fn terminating_beta(m: i64, beta: &BigRational) -> bool {
    let d = rat((m - 1) * (m - 1), 1);
    let t = beta / d;
    if !t.is_integer() {
        return false;
    }
    let Some(t) = num_traits::ToPrimitive::to_i64(&t.to_integer()) else {
        return false;
    };
    if t < 0 {
        return false;
    }
    let j = ((t as f64).sqrt() as i64).max(0);
    (j.saturating_sub(2)..=j + 2).any(|j| j * (j + 1) == t)
}
